#pragma once

#include <vector>

#include "fdl/norms.hpp"

namespace fdl {

// Cartesian lattice over [-L, L]^N masked to the dual-norm ball {H_0 < R}.
// Node coordinates are exact multiples of h (L itself must be one), so grids
// of different extents share a common lattice and window comparisons need no
// interpolation. The homogeneous Dirichlet condition is realized by treating
// every non-interior node as a ghost carrying the value 0.
struct Grid {
  int dim = 1;
  double h = 0;
  double half_extent = 0;  // L
  double ball_radius = 0;  // R
  int nx = 0, ny = 1;      // nodes per axis
  std::vector<double> coord;            // shared axis coordinates (size nx; y reuses it)
  std::vector<uint8_t> interior;        // size nx*ny
  std::vector<int> dof_of_node;         // -1 outside the mask
  std::vector<int> node_of_dof;
  int n_interior = 0;

  // Faces between lattice neighbors whose gradient stencil touches the mask.
  // t[] holds the four tangential stencil nodes (minus-side j-1, j+1, then
  // plus-side j-1, j+1); -1 marks out-of-box entries (value 0).
  struct Face {
    int axis;
    int a, b;
    int t[4];
    double cx, cy;  // face center
  };
  std::vector<Face> faces;

  int node(int i, int j) const { return j * nx + i; }
  double x_of(int i) const { return coord[i]; }
  double cell_volume() const { return dim == 1 ? h : h * h; }
  // Quadrature weight per face in the energy sum; N faces per cell.
  double face_weight() const { return cell_volume() / dim; }
};

Grid build_grid(double radius, double h, double half_extent, const FinslerEvaluator& ev);

// Smallest lattice-aligned half extent that pads the dual ball by `padding`.
double padded_half_extent(double radius, double h, double padding, const FinslerEvaluator& ev);

// Nodal scalar field on a grid; values at non-interior nodes are kept at 0.
struct Field {
  const Grid* grid = nullptr;
  std::vector<double> values;
};

Field make_field(const Grid& g);
void enforce_mask(Field& f);  // zero all non-interior entries
void require_conforming(const Grid& g, const Field& f);

// Reconstructed gradient per face: two-point normal difference plus, in 2D,
// the four-point average of tangential differences. Linear in the field and
// exact for affine fields away from the mask boundary.
struct FaceGradients {
  const Grid* grid = nullptr;
  std::vector<Vec> g;
};
FaceGradients face_gradients(const Grid& g, const Field& f);
Vec face_gradient(const Grid& g, const Field& f, const Grid::Face& face);

// Sum over faces of H(grad)^2/2 times the face weight; convex in the field.
double discrete_energy(const Grid& g, const FinslerEvaluator& ev, const Field& f);

// Conservative flux-form Finsler Laplacian: exactly minus the gradient of
// discrete_energy scaled by the cell volume, so summation by parts and the
// monotonicity of the flux map hold identically at the discrete level.
Field finsler_laplacian(const Grid& g, const FinslerEvaluator& ev, const Field& f);

// beta(u) = |u|^{q-2} u and its inverse; odd and strictly increasing.
double beta_pow(double q, double u);
double beta_inverse(double q, double v);

}  // namespace fdl
