#include "fdl/io.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace fdl {

std::string format_number(double v) {
  char buf[40];
  snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::ofstream open_or_throw(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  return out;
}

}  // namespace

void write_csv(const std::string& path, const std::vector<std::string>& column_names,
               const std::vector<std::vector<double>>& columns) {
  if (column_names.size() != columns.size())
    throw std::invalid_argument("csv: name/column count mismatch");
  auto out = open_or_throw(path);
  for (size_t c = 0; c < column_names.size(); ++c)
    out << (c ? "," : "") << column_names[c];
  out << "\n";
  const size_t rows = columns.empty() ? 0 : columns.front().size();
  for (const auto& col : columns)
    if (col.size() != rows) throw std::invalid_argument("csv: ragged columns");
  for (size_t r = 0; r < rows; ++r) {
    for (size_t c = 0; c < columns.size(); ++c)
      out << (c ? "," : "") << format_number(columns[c][r]);
    out << "\n";
  }
}

void write_field_csv(const std::string& path, const Field& f) {
  const Grid& g = *f.grid;
  auto out = open_or_throw(path);
  out << (g.dim == 2 ? "x,y,value" : "x,value") << "\n";
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      out << format_number(g.coord[i]);
      if (g.dim == 2) out << "," << format_number(g.coord[j]);
      out << "," << format_number(f.values[g.node(i, j)]) << "\n";
    }
}

void write_monitor_csv(const std::string& path, const MonitorSeries& mon) {
  write_csv(path, {"t", "mass", "sup", "grad_l1", "energy"},
            {mon.t, mon.mass, mon.sup_u, mon.grad_l1, mon.energy});
}

void Manifest::set(const std::string& key, const std::string& value) {
  entries_.emplace_back(key, value);
}

void Manifest::set_number(const std::string& key, double value) {
  entries_.emplace_back(key, format_number(value));
}

void Manifest::add_output(const std::string& path) {
  entries_.emplace_back("output." + std::to_string(outputs_++), path);
}

void Manifest::write(const std::string& path) const {
  auto out = open_or_throw(path);
  for (const auto& [k, v] : entries_) out << k << " = " << v << "\n";
}

}  // namespace fdl
