#include "tnst/tt_operators.hpp"

#include <cmath>
#include <stdexcept>

namespace tnst {

namespace {

std::vector<double> derivative_coefficients(const std::vector<double>& c) {
  std::vector<double> d;
  for (std::size_t k = 1; k < c.size(); ++k) d.push_back(static_cast<double>(k) * c[k]);
  if (d.empty()) d.push_back(0.0);
  return d;
}

TTTensor tt_polynomial(const std::vector<double>& c, const TTTensor& u, double eps) {
  const Shape4 sizes = u.mode_sizes();
  if (c.size() == 1) return TTTensor::constant(sizes, c[0]);
  if (c.size() == 2) {
    TTTensor out = tt_scale(u, c[1]);
    return c[0] == 0.0 ? out : tt_round(tt_add(out, TTTensor::constant(sizes, c[0])), eps);
  }
  TTTensor acc = tt_scale(u, c.back());
  for (std::size_t k = c.size() - 1; k-- > 0;) {
    if (c[k] != 0.0) acc = tt_add(acc, TTTensor::constant(sizes, c[k]));
    acc = tt_round(acc, eps);
    if (k > 0) acc = tt_round(tt_hadamard(acc, u), eps);
  }
  return acc;
}

// Applies a map operator and rounds.
TTTensor apply_round(const TTMatrix& a, const TTTensor& x, double eps) { return tt_matvec_round(a, x, eps); }

bool same_function(const ScalarFunction& a, const ScalarFunction& b) {
  return a.polynomial_coefficients() && b.polynomial_coefficients() &&
         *a.polynomial_coefficients() == *b.polynomial_coefficients();
}

double grid_value(const ProblemSpec& problem, const SpaceTimeGrid& grid, const Index4& idx) {
  const double t = grid.node(0, idx[0]);
  const double x = grid.node(1, idx[1]), y = grid.node(2, idx[2]), z = grid.node(3, idx[3]);
  if (idx[0] == 0) return problem.initial(x, y, z);
  for (int k = 1; k < 4; ++k) {
    const GridAxis& ax = grid.axis(k);
    if (ax.collapsed) continue;
    const std::size_t i = idx[static_cast<std::size_t>(k)];
    if (i == 0 || i + 1 == ax.size()) return problem.boundary(t, x, y, z);
  }
  return 0.0;
}

}  // namespace

CrossResult build_boundary_tensor(const ProblemSpec& problem, const SpaceTimeGrid& grid, const CrossOptions& options) {
  const PointEvaluator f = [&](const Index4& idx) { return grid_value(problem, grid, idx); };
  return tt_cross(f, grid.full_shape(), options);
}

CrossResult tt_sample_interior(const SpaceTimeFunction& fn, const SpaceTimeGrid& grid, const CrossOptions& options) {
  const PointEvaluator f = [&](const Index4& idx) {
    const Index4 full = grid.to_full(idx);
    return fn(grid.node(0, full[0]), grid.node(1, full[1]), grid.node(2, full[2]), grid.node(3, full[3]));
  };
  return tt_cross(f, grid.interior_shape(), options);
}

TTTensor tt_embed_interior(const TTTensor& u, const SpaceTimeGrid& grid) {
  std::array<Matrix, 4> f;
  for (int k = 0; k < 4; ++k) f[static_cast<std::size_t>(k)] = grid.restriction(k).transpose();
  return tt_matvec(TTMatrix::kronecker(f), u);
}

TTOperatorSet build_tt_operators(const ProblemSpec& problem, const SpaceTimeGrid& grid,
                                 const TTBuildOptions& options) {
  TTOperatorSet ops;
  ops.interior_sizes = grid.interior_shape();
  ops.full_sizes = grid.full_shape();
  const Shape4& in = ops.interior_sizes;

  std::array<Matrix, 4> eye, restrict;
  for (std::size_t k = 0; k < 4; ++k) {
    const auto n = static_cast<Eigen::Index>(in[k]);
    eye[k] = Matrix::Identity(n, n);
    restrict[k] = grid.restriction(static_cast<int>(k));
  }

  ops.a_t = TTMatrix::kronecker({grid.d1_interior(0), eye[1], eye[2], eye[3]});
  ops.map_t = TTMatrix::kronecker({grid.d1_rows(0), restrict[1], restrict[2], restrict[3]});

  std::array<std::optional<Matrix>, 4> d2;
  std::optional<TTMatrix> map_lap;
  for (int k = 1; k < 4; ++k) {
    const auto sk = static_cast<std::size_t>(k);
    std::array<Matrix, 4> g = eye, mg = restrict;
    if (!grid.axis(k).collapsed) {
      d2[sk] = grid.d2_interior(k);
      std::array<Matrix, 4> ml = restrict;
      ml[sk] = grid.d2_rows(k);
      const TTMatrix term = TTMatrix::kronecker(ml);
      map_lap = map_lap ? tt_matrix_add(*map_lap, term) : term;
    }
    g[sk] = grid.d1_interior(k);
    mg[sk] = grid.d1_rows(k);
    ops.gradients[sk - 1] = TTMatrix::kronecker(g);
    ops.map_gradients[sk - 1] = TTMatrix::kronecker(mg);
  }
  ops.laplacian = TTMatrix::kronecker_sum(d2, in);
  ops.map_laplacian = map_lap ? *map_lap : TTMatrix::kronecker(restrict, 0.0);

  CrossResult bc = build_boundary_tensor(problem, grid, options.cross);
  ops.g_bc = std::move(bc.tensor);
  ops.boundary_report = bc.report;
  const double eps = options.eps_round;
  ops.bc_t = apply_round(ops.map_t, ops.g_bc, eps);
  ops.bc_laplacian = apply_round(ops.map_laplacian, ops.g_bc, eps);
  for (std::size_t k = 0; k < 3; ++k) ops.bc_gradients[k] = apply_round(ops.map_gradients[k], ops.g_bc, eps);

  // Group active convection directions by identical polynomial coefficients.
  for (int k = 1; k < 4; ++k) {
    if (grid.axis(k).collapsed) continue;
    const ScalarFunction& b = problem.convection[static_cast<std::size_t>(k - 1)];
    if (b.is_constant() && b(0.0) == 0.0) continue;
    ConvectionGroup* group = nullptr;
    for (auto& g : ops.convection) {
      if (same_function(g.coefficient, b)) group = &g;
    }
    if (!group) {
      ops.convection.push_back({b, {}, {}, {}});
      group = &ops.convection.back();
    }
    group->modes.push_back(k);
  }
  for (auto& g : ops.convection) {
    std::array<std::optional<Matrix>, 4> d1;
    for (int k : g.modes) d1[static_cast<std::size_t>(k)] = grid.d1_interior(k);
    if (g.modes.size() == 1) {
      g.op = ops.gradients[static_cast<std::size_t>(g.modes[0] - 1)];
      g.bc = ops.bc_gradients[static_cast<std::size_t>(g.modes[0] - 1)];
    } else {
      g.op = TTMatrix::kronecker_sum(d1, in);
      TTTensor acc = ops.bc_gradients[static_cast<std::size_t>(g.modes[0] - 1)];
      for (std::size_t q = 1; q < g.modes.size(); ++q)
        acc = tt_add(acc, ops.bc_gradients[static_cast<std::size_t>(g.modes[q] - 1)]);
      g.bc = tt_round(acc, eps);
    }
  }

  if (problem.source) {
    ops.source = tt_round(tt_sample_interior(problem.source, grid, options.cross).tensor, eps);
  } else {
    ops.source = TTTensor::zeros(in);
  }
  return ops;
}

TTTensor tt_apply_cross(const std::function<double(double)>& fn, const TTTensor& u, double eps,
                        const CrossOptions& cross) {
  CrossOptions opts = cross;
  opts.eps = eps;
  const PointEvaluator f = [&](const Index4& idx) { return fn(u.element(idx)); };
  CrossResult r = tt_cross(f, u.mode_sizes(), opts);
  return tt_round(r.tensor, eps);
}

TTTensor tt_coefficient(const ScalarFunction& fn, const TTTensor& u, double eps, const CrossOptions& cross) {
  if (const auto& c = fn.polynomial_coefficients()) return tt_polynomial(*c, u, eps);
  return tt_apply_cross([&fn](double v) { return fn(v); }, u, eps, cross);
}

TTTensor tt_coefficient_derivative(const ScalarFunction& fn, const TTTensor& u, double eps,
                                   const CrossOptions& cross) {
  if (const auto& c = fn.polynomial_coefficients()) return tt_polynomial(derivative_coefficients(*c), u, eps);
  return tt_apply_cross([&fn](double v) { return fn.derivative(v); }, u, eps, cross);
}

namespace {

struct Derivs {
  TTTensor dt, lap;
  std::vector<TTTensor> conv;  // per convection group
};

Derivs tt_derivatives(const TTTensor& u, const TTOperatorSet& ops, double eps) {
  Derivs d;
  d.dt = tt_round(tt_add(tt_matvec(ops.a_t, u), ops.bc_t), eps);
  d.lap = tt_round(tt_add(tt_matvec(ops.laplacian, u), ops.bc_laplacian), eps);
  for (const auto& g : ops.convection) d.conv.push_back(tt_round(tt_add(tt_matvec(g.op, u), g.bc), eps));
  return d;
}

// c(U) o v, with constants handled by scaling.
TTTensor coefficient_times(const ScalarFunction& fn, const TTTensor& u, const TTTensor& v, double eps,
                           const CrossOptions& cross) {
  if (fn.is_constant()) return tt_scale(v, fn(0.0));
  return tt_round(tt_hadamard(tt_coefficient(fn, u, eps, cross), v), eps);
}

}  // namespace

TTTensor tt_residual(const TTTensor& u, const TTOperatorSet& ops, const ProblemSpec& problem, double eps,
                     const CrossOptions& cross) {
  if (u.mode_sizes() != ops.interior_sizes) throw std::invalid_argument("tt_residual: u must be interior-shaped");
  const double inner = eps * 0.1;
  const Derivs d = tt_derivatives(u, ops, inner);
  TTTensor g = tt_axpby(1.0, d.dt, -1.0, coefficient_times(problem.diffusion, u, d.lap, inner, cross));
  for (std::size_t q = 0; q < ops.convection.size(); ++q) {
    g = tt_add(g, coefficient_times(ops.convection[q].coefficient, u, d.conv[q], inner, cross));
  }
  const ScalarFunction& f = problem.forcing;
  if (!(f.is_constant() && f(0.0) == 0.0)) g = tt_axpby(1.0, g, -1.0, tt_coefficient(f, u, inner, cross));
  g = tt_axpby(1.0, g, -1.0, ops.source);
  return tt_round(g, eps);
}

TTMatrix tt_jacobian(const TTTensor& u, const TTOperatorSet& ops, const ProblemSpec& problem, double eps,
                     const CrossOptions& cross) {
  if (u.mode_sizes() != ops.interior_sizes) throw std::invalid_argument("tt_jacobian: u must be interior-shaped");
  const double inner = eps * 0.1;
  TTMatrix j = ops.a_t;

  // Diagonal part w = -a'(U) (LU) + sum b'(U) (G U) - f'(U).
  std::optional<TTTensor> w;
  auto accumulate = [&](TTTensor term) { w = w ? tt_round(tt_add(*w, term), inner) : std::move(term); };

  const Derivs d = tt_derivatives(u, ops, inner);
  const ScalarFunction& a = problem.diffusion;
  if (a.is_constant()) {
    j = tt_matrix_add(j, tt_matrix_scale(ops.laplacian, -a(0.0)));
  } else {
    const TTTensor au = tt_coefficient(a, u, inner, cross);
    j = tt_matrix_add(j, tt_compose(tt_diag(tt_scale(au, -1.0)), ops.laplacian));
    const TTTensor da = tt_coefficient_derivative(a, u, inner, cross);
    accumulate(tt_scale(tt_round(tt_hadamard(da, d.lap), inner), -1.0));
  }
  for (std::size_t q = 0; q < ops.convection.size(); ++q) {
    const ConvectionGroup& g = ops.convection[q];
    if (g.coefficient.is_constant()) {
      j = tt_matrix_add(j, tt_matrix_scale(g.op, g.coefficient(0.0)));
      continue;
    }
    const TTTensor bu = tt_coefficient(g.coefficient, u, inner, cross);
    j = tt_matrix_add(j, tt_compose(tt_diag(bu), g.op));
    const TTTensor db = tt_coefficient_derivative(g.coefficient, u, inner, cross);
    accumulate(tt_round(tt_hadamard(db, d.conv[q]), inner));
  }
  const ScalarFunction& f = problem.forcing;
  if (f.degree() != 0) {
    accumulate(tt_scale(tt_coefficient_derivative(f, u, inner, cross), -1.0));
  }
  if (w) j = tt_matrix_add(j, tt_diag(*w));
  return tt_matrix_round(j, eps);
}

}  // namespace tnst
