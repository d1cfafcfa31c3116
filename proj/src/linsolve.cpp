#include "fdl/linsolve.hpp"

#include <cmath>
#include <stdexcept>

namespace fdl {

void CsrMatrix::multiply(const std::vector<double>& x, std::vector<double>& y) const {
  y.assign(n, 0.0);
  for (int r = 0; r < n; ++r) {
    double s = 0;
    for (int k = row_ptr[r]; k < row_ptr[r + 1]; ++k) s += val[k] * x[col[k]];
    y[r] = s;
  }
}

CgStats solve_cg(const CsrMatrix& m, const std::vector<double>& rhs, std::vector<double>& x,
                 double rtol, double atol, int max_iterations) {
  const int n = m.n;
  x.assign(n, 0.0);
  std::vector<double> inv_diag(n, 1.0);
  for (int r = 0; r < n; ++r)
    for (int k = m.row_ptr[r]; k < m.row_ptr[r + 1]; ++k)
      if (m.col[k] == r && m.val[k] > 0) inv_diag[r] = 1.0 / m.val[k];

  std::vector<double> r = rhs, z(n), p(n), ap(n);
  double rhs_norm = 0;
  for (double v : rhs) rhs_norm += v * v;
  rhs_norm = std::sqrt(rhs_norm);
  const double target = std::max(atol, rtol * rhs_norm);

  CgStats st;
  double rnorm = rhs_norm;
  if (rnorm <= target) {
    st.converged = true;
    st.residual = rnorm;
    return st;
  }
  for (int i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
  p = z;
  double rz = 0;
  for (int i = 0; i < n; ++i) rz += r[i] * z[i];

  for (int it = 0; it < max_iterations; ++it) {
    m.multiply(p, ap);
    double pap = 0;
    for (int i = 0; i < n; ++i) pap += p[i] * ap[i];
    if (pap <= 0) break;  // matrix not SPD (should not happen) or breakdown
    const double alpha = rz / pap;
    double rr = 0;
    for (int i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * ap[i];
      rr += r[i] * r[i];
    }
    rnorm = std::sqrt(rr);
    st.iterations = it + 1;
    if (rnorm <= target) {
      st.converged = true;
      break;
    }
    double rz_new = 0;
    for (int i = 0; i < n; ++i) {
      z[i] = inv_diag[i] * r[i];
      rz_new += r[i] * z[i];
    }
    const double beta = rz_new / rz;
    rz = rz_new;
    for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  st.residual = rnorm;
  return st;
}

void solve_tridiagonal(std::vector<double> lower, std::vector<double> diag,
                       std::vector<double> upper, std::vector<double> rhs,
                       std::vector<double>& x) {
  const size_t n = diag.size();
  if (lower.size() != n || upper.size() != n || rhs.size() != n)
    throw std::invalid_argument("tridiagonal bands must share one length");
  for (size_t i = 1; i < n; ++i) {
    const double w = lower[i] / diag[i - 1];
    diag[i] -= w * upper[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  x.assign(n, 0.0);
  x[n - 1] = rhs[n - 1] / diag[n - 1];
  for (size_t i = n - 1; i-- > 0;) x[i] = (rhs[i] - upper[i] * x[i + 1]) / diag[i];
}

}  // namespace fdl
