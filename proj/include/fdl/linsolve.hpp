#pragma once

#include <vector>

#include "fdl/common.hpp"

namespace fdl {

// Compressed sparse row matrix with a fixed symmetric pattern; values are
// reassembled in place between Newton iterations.
struct CsrMatrix {
  int n = 0;
  std::vector<int> row_ptr;
  std::vector<int> col;
  std::vector<double> val;

  void multiply(const std::vector<double>& x, std::vector<double>& y) const;
};

struct CgStats {
  int iterations = 0;
  double residual = 0;
  bool converged = false;
};

// Jacobi-preconditioned conjugate gradients for SPD systems. rtol is relative
// to the right-hand side norm; atol guards tiny right-hand sides.
CgStats solve_cg(const CsrMatrix& m, const std::vector<double>& rhs, std::vector<double>& x,
                 double rtol, double atol, int max_iterations);

// Thomas elimination for tridiagonal SPD systems (1D Jacobians).
// diag/lower/upper are the three bands; lower[0] and upper[n-1] are unused.
void solve_tridiagonal(std::vector<double> lower, std::vector<double> diag,
                       std::vector<double> upper, std::vector<double> rhs,
                       std::vector<double>& x);

}  // namespace fdl
