#include "fdl/disc.hpp"

#include <cmath>

#include "fdl/errors.hpp"

namespace fdl {

Grid build_grid(double radius, double h, double half_extent, const FinslerEvaluator& ev) {
  if (!(h > 0)) throw NonpositiveSpacing("grid spacing must be positive");
  if (!(radius > 0)) throw NonpositiveRadius("ball radius must be positive");
  double stretch = ev.dual_ball_extent(0);
  if (ev.dim() == 2) stretch = std::max(stretch, ev.dual_ball_extent(1));
  if (!(half_extent >= stretch * radius + 2 * h - 1e-12 * h))
    throw BadPadding("bounding box must pad the dual ball by at least 2h");
  const double cells = half_extent / h;
  if (std::abs(cells - std::round(cells)) > 1e-9)
    throw BadPadding("half extent must be an integer multiple of h (shared lattice)");

  Grid g;
  g.dim = ev.dim();
  g.h = h;
  g.half_extent = std::round(cells) * h;
  g.ball_radius = radius;
  const int half_n = static_cast<int>(std::round(cells));
  g.nx = 2 * half_n + 1;
  g.ny = g.dim == 1 ? 1 : g.nx;
  g.coord.resize(g.nx);
  for (int i = 0; i < g.nx; ++i) g.coord[i] = (i - half_n) * h;

  const int n_nodes = g.nx * g.ny;
  g.interior.assign(n_nodes, 0);
  g.dof_of_node.assign(n_nodes, -1);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const Vec x{g.coord[i], g.dim == 2 ? g.coord[j] : 0.0};
      if (ev.in_ball(x, radius)) {
        const int n = g.node(i, j);
        g.interior[n] = 1;
        g.dof_of_node[n] = g.n_interior++;
        g.node_of_dof.push_back(n);
      }
    }
  if (g.n_interior == 0) throw BadPadding("mask is empty; refine h or enlarge R");

  auto any_interior = [&](std::initializer_list<int> nodes) {
    for (int n : nodes)
      if (n >= 0 && g.interior[n]) return true;
    return false;
  };
  auto node_or_minus1 = [&](int i, int j) {
    if (i < 0 || i >= g.nx || j < 0 || j >= g.ny) return -1;
    return g.node(i, j);
  };

  for (int axis = 0; axis < g.dim; ++axis) {
    const int imax = axis == 0 ? g.nx - 1 : g.nx;
    const int jmax = axis == 0 ? g.ny : g.ny - 1;
    for (int j = 0; j < (g.dim == 1 ? 1 : jmax); ++j)
      for (int i = 0; i < imax; ++i) {
        Grid::Face f;
        f.axis = axis;
        f.a = g.node(i, j);
        f.b = axis == 0 ? g.node(i + 1, j) : g.node(i, j + 1);
        if (g.dim == 2) {
          if (axis == 0) {
            f.t[0] = node_or_minus1(i, j - 1);
            f.t[1] = node_or_minus1(i, j + 1);
            f.t[2] = node_or_minus1(i + 1, j - 1);
            f.t[3] = node_or_minus1(i + 1, j + 1);
          } else {
            f.t[0] = node_or_minus1(i - 1, j);
            f.t[1] = node_or_minus1(i + 1, j);
            f.t[2] = node_or_minus1(i - 1, j + 1);
            f.t[3] = node_or_minus1(i + 1, j + 1);
          }
        } else {
          f.t[0] = f.t[1] = f.t[2] = f.t[3] = -1;
        }
        if (!any_interior({f.a, f.b, f.t[0], f.t[1], f.t[2], f.t[3]})) continue;
        const double ax = g.coord[i], ay = g.dim == 2 ? g.coord[j] : 0.0;
        f.cx = ax + (axis == 0 ? 0.5 * h : 0.0);
        f.cy = ay + (axis == 1 ? 0.5 * h : 0.0);
        g.faces.push_back(f);
      }
  }
  return g;
}

double padded_half_extent(double radius, double h, double padding, const FinslerEvaluator& ev) {
  double stretch = ev.dual_ball_extent(0);
  if (ev.dim() == 2) stretch = std::max(stretch, ev.dual_ball_extent(1));
  return std::ceil((stretch * radius + padding) / h - 1e-9) * h;
}

Field make_field(const Grid& g) {
  Field f;
  f.grid = &g;
  f.values.assign(static_cast<size_t>(g.nx) * g.ny, 0.0);
  return f;
}

void enforce_mask(Field& f) {
  for (size_t n = 0; n < f.values.size(); ++n)
    if (!f.grid->interior[n]) f.values[n] = 0.0;
}

void require_conforming(const Grid& g, const Field& f) {
  if (f.grid != &g || f.values.size() != static_cast<size_t>(g.nx) * g.ny)
    throw ShapeMismatch("field does not conform to grid");
}

Vec face_gradient(const Grid& g, const Field& f, const Grid::Face& face) {
  const auto& u = f.values;
  auto val = [&](int n) { return n >= 0 ? u[n] : 0.0; };
  const double gn = (val(face.b) - val(face.a)) / g.h;
  if (g.dim == 1) return {gn, 0};
  const double gt =
      (val(face.t[1]) - val(face.t[0]) + val(face.t[3]) - val(face.t[2])) / (4.0 * g.h);
  return face.axis == 0 ? Vec{gn, gt} : Vec{gt, gn};
}

FaceGradients face_gradients(const Grid& g, const Field& f) {
  require_conforming(g, f);
  FaceGradients fg;
  fg.grid = &g;
  fg.g.resize(g.faces.size());
  for (size_t k = 0; k < g.faces.size(); ++k) fg.g[k] = face_gradient(g, f, g.faces[k]);
  return fg;
}

double discrete_energy(const Grid& g, const FinslerEvaluator& ev, const Field& f) {
  require_conforming(g, f);
  const double w = g.face_weight();
  std::vector<double> terms(g.faces.size());
  for (size_t k = 0; k < g.faces.size(); ++k) {
    const double hval = ev.eval(face_gradient(g, f, g.faces[k]));
    terms[k] = 0.5 * w * hval * hval;
  }
  return pairwise_sum(terms);
}

Field finsler_laplacian(const Grid& g, const FinslerEvaluator& ev, const Field& f) {
  require_conforming(g, f);
  Field out = make_field(g);
  auto& r = out.values;
  const double scale = g.face_weight() / g.cell_volume();  // = 1/dim
  const double inv_h = 1.0 / g.h;
  for (const auto& face : g.faces) {
    const Vec grad = face_gradient(g, f, face);
    const Vec a = ev.flux(grad);
    const double an = face.axis == 0 ? a[0] : a[1];
    const double at = face.axis == 0 ? a[1] : a[0];
    // minus the energy gradient, scattered through the stencil of this face
    const double cn = scale * an * inv_h;
    if (g.interior[face.a]) r[face.a] += cn;
    if (g.interior[face.b]) r[face.b] -= cn;
    if (g.dim == 2 && at != 0.0) {
      const double ct = scale * at * inv_h * 0.25;
      if (face.t[0] >= 0 && g.interior[face.t[0]]) r[face.t[0]] += ct;
      if (face.t[1] >= 0 && g.interior[face.t[1]]) r[face.t[1]] -= ct;
      if (face.t[2] >= 0 && g.interior[face.t[2]]) r[face.t[2]] += ct;
      if (face.t[3] >= 0 && g.interior[face.t[3]]) r[face.t[3]] -= ct;
    }
  }
  return out;
}

double beta_pow(double q, double u) {
  if (!(q > 1)) throw OutOfRegime("beta requires q > 1");
  if (u == 0) return 0;
  return std::copysign(std::pow(std::abs(u), q - 1.0), u);
}

double beta_inverse(double q, double v) {
  if (!(q > 1)) throw OutOfRegime("beta requires q > 1");
  if (v == 0) return 0;
  return std::copysign(std::pow(std::abs(v), 1.0 / (q - 1.0)), v);
}

}  // namespace fdl
