#pragma once

#include <string>
#include <vector>

#include "fdl/stepper.hpp"

namespace fdl {

// CSV conventions: '.' decimal point, no locale, 17 significant digits, so
// regression fixtures are bit-stable across toolchains.
std::string format_number(double v);

void write_csv(const std::string& path, const std::vector<std::string>& column_names,
               const std::vector<std::vector<double>>& columns);

// Field dump: header `x[,y],value`, row-major over the whole bounding box
// including masked zeros.
void write_field_csv(const std::string& path, const Field& f);

// Monitor CSV: `t,mass,sup,grad_l1,energy`.
void write_monitor_csv(const std::string& path, const MonitorSeries& mon);

// Plain-text key=value run manifest; every output file appears as output.<k>.
class Manifest {
 public:
  void set(const std::string& key, const std::string& value);
  void set_number(const std::string& key, double value);
  void add_output(const std::string& path);
  void write(const std::string& path) const;

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
  int outputs_ = 0;
};

}  // namespace fdl
