#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

namespace fdl {

// Spatial vector for dimensions 1 and 2; the unused component stays 0 in 1D.
using Vec = std::array<double, 2>;

inline Vec operator+(Vec a, Vec b) { return {a[0] + b[0], a[1] + b[1]}; }
inline Vec operator-(Vec a, Vec b) { return {a[0] - b[0], a[1] - b[1]}; }
inline Vec operator*(double s, Vec a) { return {s * a[0], s * a[1]}; }
inline double dot(Vec a, Vec b) { return a[0] * b[0] + a[1] * b[1]; }
inline double norm2(Vec a) { return std::sqrt(dot(a, a)); }

// Symmetric 2x2 matrix (m01 stored once); 1D code reads m00 only.
struct SymMat {
  double m00 = 0, m01 = 0, m11 = 0;
  Vec apply(Vec x) const { return {m00 * x[0] + m01 * x[1], m01 * x[0] + m11 * x[1]}; }
};

// Deterministic pairwise reduction: the summation tree depends only on n,
// never on thread count, so results are bitwise reproducible.
double pairwise_sum(std::span<const double> xs);

// Counter-based accumulation helper for loops that cannot materialize a vector.
class PairwiseAccumulator {
 public:
  void add(double x) { buf_.push_back(x); }
  double total() const;

 private:
  std::vector<double> buf_;
};

// Portable deterministic RNG: mt19937_64 bit stream mapped to doubles without
// going through std distributions (their output is implementation-defined).
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ull) {}
  uint64_t next_u64();
  double uniform01();                       // [0,1)
  double uniform(double lo, double hi);     // [lo,hi)
  double sym();                             // (-1,1)

 private:
  uint64_t state_;
};

// Least-squares slope of y against x; returns slope, intercept and the RMS
// residual of the fit.
struct LineFit {
  double slope = 0;
  double intercept = 0;
  double rms_residual = 0;
  int n = 0;
};
LineFit fit_line(std::span<const double> x, std::span<const double> y);
LineFit fit_loglog(std::span<const double> x, std::span<const double> y);

// Cumulative trapezoid integral of y over t; out[0] = 0.
std::vector<double> cumulative_trapezoid(std::span<const double> t, std::span<const double> y);

}  // namespace fdl
