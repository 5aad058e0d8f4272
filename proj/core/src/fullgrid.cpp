#include "tnst/fullgrid.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace tnst {

namespace {

DenseField apply_pointwise(const DenseField& u, const ScalarFunction& fn) {
  Eigen::VectorXd out(u.values().size());
  for (Eigen::Index i = 0; i < out.size(); ++i) out[i] = fn(u.values()[i]);
  if (!out.allFinite()) throw std::domain_error("coefficient evaluation produced a non-finite value");
  return DenseField(u.shape(), std::move(out));
}

DenseField apply_pointwise_derivative(const DenseField& u, const ScalarFunction& fn) {
  Eigen::VectorXd out(u.values().size());
  for (Eigen::Index i = 0; i < out.size(); ++i) out[i] = fn.derivative(u.values()[i]);
  if (!out.allFinite()) throw std::domain_error("coefficient derivative produced a non-finite value");
  return DenseField(u.shape(), std::move(out));
}

}  // namespace

DenseField sample_on_grid(const SpaceTimeFunction& fn, const SpaceTimeGrid& grid) {
  return DenseField::from_function(grid.full_shape(), [&](const Index4& i) {
    return fn(grid.node(0, i[0]), grid.node(1, i[1]), grid.node(2, i[2]), grid.node(3, i[3]));
  });
}

DenseField boundary_values(const ProblemSpec& problem, const SpaceTimeGrid& grid) {
  return DenseField::from_function(grid.full_shape(), [&](const Index4& i) {
    if (grid.is_interior(i)) return 0.0;
    const double x = grid.node(1, i[1]);
    const double y = grid.node(2, i[2]);
    const double z = grid.node(3, i[3]);
    if (i[0] == 0) return problem.initial(x, y, z);
    return problem.boundary(grid.node(0, i[0]), x, y, z);
  });
}

double initial_boundary_mismatch(const ProblemSpec& problem, const SpaceTimeGrid& grid) {
  const Shape4 shape = grid.full_shape();
  const double t0 = grid.node(0, 0);
  double worst = 0.0;
  for (std::size_t j = 0; j < shape[1]; ++j)
    for (std::size_t l = 0; l < shape[2]; ++l)
      for (std::size_t m = 0; m < shape[3]; ++m) {
        // Nodes of the t = 0 plane that would be boundary at later times.
        if (grid.is_interior({1, j, l, m})) continue;
        const double x = grid.node(1, j), y = grid.node(2, l), z = grid.node(3, m);
        worst = std::max(worst, std::abs(problem.boundary(t0, x, y, z) - problem.initial(x, y, z)));
      }
  return worst;
}

DenseField initial_guess(const ProblemSpec& problem, const SpaceTimeGrid& grid) {
  const Shape4 inner = grid.interior_shape();
  return DenseField::from_function(inner, [&](const Index4& i) {
    const Index4 f = grid.to_full(i);
    return problem.initial(grid.node(1, f[1]), grid.node(2, f[2]), grid.node(3, f[3]));
  });
}

double relative_error(const DenseField& u, const SpaceTimeFunction& exact, const SpaceTimeGrid& grid) {
  if (u.shape() != grid.full_shape()) {
    throw std::invalid_argument("relative_error: field must be full-grid shaped");
  }
  const DenseField reference = sample_on_grid(exact, grid);
  const double denom = reference.norm();
  if (denom == 0.0) throw std::domain_error("relative_error: exact solution has zero norm");
  return (u.values() - reference.values()).norm() / denom;
}

// Fast-diagonalization data: eigen-decompositions of the interior spatial
// second-derivative blocks. The time direction is solved per spatial mode.
struct FullGridSystem::FastDiagonalization {
  std::array<Matrix, 3> vectors;
  std::array<Matrix, 3> inverse;
  std::array<Eigen::VectorXd, 3> values;
};

FullGridSystem::FullGridSystem(ProblemSpec problem, SpaceTimeGrid grid)
    : problem_(std::move(problem)), grid_(std::move(grid)) {
  boundary_ = boundary_values(problem_, grid_);
  if (problem_.source) {
    source_ = grid_.restrict_to_interior(sample_on_grid(problem_.source, grid_));
  } else {
    source_ = DenseField(grid_.interior_shape());
  }
  dt_int_ = grid_.d1_interior(0);
  for (int k = 0; k < 4; ++k) {
    d1_int_[static_cast<std::size_t>(k)] = grid_.d1_interior(k);
    d2_int_[static_cast<std::size_t>(k)] = grid_.d2_interior(k);
    d1_rows_[static_cast<std::size_t>(k)] = grid_.d1_rows(k);
    d2_rows_[static_cast<std::size_t>(k)] = grid_.d2_rows(k);
  }

  auto fdm = std::make_shared<FastDiagonalization>();
  for (int k = 1; k < 4; ++k) {
    const auto s = static_cast<std::size_t>(k - 1);
    const Matrix& block = d2_int_[static_cast<std::size_t>(k)];
    if (!axis_active(k)) {
      fdm->vectors[s] = Matrix::Identity(1, 1);
      fdm->inverse[s] = Matrix::Identity(1, 1);
      fdm->values[s] = Eigen::VectorXd::Zero(1);
      continue;
    }
    Eigen::EigenSolver<Matrix> eig(block);
    // Interior Chebyshev second-derivative blocks have real spectra.
    fdm->vectors[s] = eig.eigenvectors().real();
    fdm->values[s] = eig.eigenvalues().real();
    fdm->inverse[s] = fdm->vectors[s].inverse();
  }
  fdm_ = std::move(fdm);
}

DenseField FullGridSystem::assemble(const DenseField& u_interior) const {
  return grid_.embed(u_interior, boundary_);
}

FullGridSystem::Derivatives FullGridSystem::interior_derivatives(const DenseField& full) const {
  const Shape4 inner = grid_.interior_shape();
  Derivatives d{grid_.restrict_to_interior(mode_apply(grid_.axis(0).d1, full, 0)), DenseField(inner),
                {DenseField(inner), DenseField(inner), DenseField(inner)}};
  for (int k = 1; k < 4; ++k) {
    if (!axis_active(k)) continue;
    const auto& axis = grid_.axis(k);
    d.grad[static_cast<std::size_t>(k - 1)] = grid_.restrict_to_interior(mode_apply(axis.d1, full, k));
    d.lap += grid_.restrict_to_interior(mode_apply(axis.d2, full, k));
  }
  return d;
}

DenseField FullGridSystem::residual(const DenseField& u_interior) const {
  if (u_interior.shape() != grid_.interior_shape()) {
    throw std::invalid_argument("residual: field is not interior shaped");
  }
  const DenseField full = assemble(u_interior);
  const Derivatives d = interior_derivatives(full);

  Eigen::VectorXd g = d.dt.values();
  const Eigen::VectorXd& u = u_interior.values();
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    const double ui = u[i];
    double value = g[i] - problem_.diffusion(ui) * d.lap.values()[i] - problem_.forcing(ui);
    for (std::size_t c = 0; c < 3; ++c) {
      if (axis_active(static_cast<int>(c) + 1)) value += problem_.convection[c](ui) * d.grad[c].values()[i];
    }
    g[i] = value - source_.values()[i];
  }
  if (!g.allFinite()) throw std::domain_error("residual: non-finite value");
  return DenseField(u_interior.shape(), std::move(g));
}

FullGridJacobian::FullGridJacobian(const FullGridSystem& system, const DenseField& u_interior)
    : system_(&system) {
  if (u_interior.shape() != system.interior_shape()) {
    throw std::invalid_argument("jacobian: field is not interior shaped");
  }
  const ProblemSpec& p = system.problem();
  const auto d = system.interior_derivatives(system.assemble(u_interior));
  diffusion_ = apply_pointwise(u_interior, p.diffusion);
  Eigen::VectorXd diag = -apply_pointwise_derivative(u_interior, p.diffusion).values().cwiseProduct(d.lap.values()) -
                         apply_pointwise_derivative(u_interior, p.forcing).values();
  for (std::size_t c = 0; c < 3; ++c) {
    if (!system.axis_active(static_cast<int>(c) + 1)) continue;
    convection_[c] = apply_pointwise(u_interior, p.convection[c]);
    diag += apply_pointwise_derivative(u_interior, p.convection[c]).values().cwiseProduct(d.grad[c].values());
  }
  diagonal_ = DenseField(u_interior.shape(), std::move(diag));
}

DenseField FullGridJacobian::apply(const DenseField& v) const {
  const Shape4 shape = v.shape();
  if (shape != diffusion_.shape()) {
    throw std::invalid_argument("jacobian apply: field is not interior shaped");
  }
  Eigen::VectorXd out = mode_apply(system_->dt_interior(), v.values(), shape, 0);
  Eigen::VectorXd lap = Eigen::VectorXd::Zero(out.size());
  for (int k = 1; k < 4; ++k) {
    if (!system_->axis_active(k)) continue;
    lap += mode_apply(system_->d2_interior(k), v.values(), shape, k);
    out += convection_[static_cast<std::size_t>(k - 1)].values().cwiseProduct(
        mode_apply(system_->d1_interior(k), v.values(), shape, k));
  }
  out -= diffusion_.values().cwiseProduct(lap);
  out += diagonal_.values().cwiseProduct(v.values());
  return DenseField(shape, std::move(out));
}

DenseField FullGridSystem::jacobian_apply(const DenseField& u_interior, const DenseField& v) const {
  return linearize(u_interior).apply(v);
}

FieldOperator FullGridSystem::jacobian(const DenseField& u_interior) const {
  auto lin = std::make_shared<FullGridJacobian>(*this, u_interior);
  return [lin](const DenseField& v) { return lin->apply(v); };
}

FieldOperator FullGridSystem::preconditioner(const DenseField& u_interior) const {
  double abar = 0.0;
  for (Eigen::Index i = 0; i < u_interior.values().size(); ++i) abar += problem_.diffusion(u_interior.values()[i]);
  abar /= static_cast<double>(std::max<Eigen::Index>(1, u_interior.values().size()));

  const Shape4 shape = grid_.interior_shape();
  const std::size_t n_space = shape[1] * shape[2] * shape[3];
  const auto nt = static_cast<Eigen::Index>(shape[0]);
  auto factors = std::make_shared<std::vector<Eigen::PartialPivLU<Matrix>>>();
  factors->reserve(n_space);
  const auto& lam = fdm_->values;
  for (std::size_t j = 0; j < shape[1]; ++j)
    for (std::size_t l = 0; l < shape[2]; ++l)
      for (std::size_t m = 0; m < shape[3]; ++m) {
        const double mu = -abar * (lam[0][static_cast<Eigen::Index>(j)] + lam[1][static_cast<Eigen::Index>(l)] +
                                   lam[2][static_cast<Eigen::Index>(m)]);
        factors->emplace_back(Matrix(dt_int_ + mu * Matrix::Identity(nt, nt)));
      }

  return [fdm = fdm_, factors, shape, n_space, nt](const DenseField& r) {
    Eigen::VectorXd v = r.values();
    for (int k = 1; k < 4; ++k) v = mode_apply(fdm->inverse[static_cast<std::size_t>(k - 1)], v, shape, k);
    Eigen::VectorXd fiber(nt);
    for (std::size_t s = 0; s < n_space; ++s) {
      for (Eigen::Index i = 0; i < nt; ++i) fiber[i] = v[static_cast<Eigen::Index>(i * static_cast<Eigen::Index>(n_space) + static_cast<Eigen::Index>(s))];
      fiber = (*factors)[s].solve(fiber);
      for (Eigen::Index i = 0; i < nt; ++i) v[static_cast<Eigen::Index>(i * static_cast<Eigen::Index>(n_space) + static_cast<Eigen::Index>(s))] = fiber[i];
    }
    for (int k = 1; k < 4; ++k) v = mode_apply(fdm->vectors[static_cast<std::size_t>(k - 1)], v, shape, k);
    return DenseField(shape, std::move(v));
  };
}

DenseField residual(const DenseField& u_interior, const ProblemSpec& problem, const SpaceTimeGrid& grid) {
  return FullGridSystem(problem, grid).residual(u_interior);
}

DenseField jacobian_apply(const DenseField& u_interior, const DenseField& v, const ProblemSpec& problem,
                          const SpaceTimeGrid& grid) {
  return FullGridSystem(problem, grid).jacobian_apply(u_interior, v);
}

}  // namespace tnst
