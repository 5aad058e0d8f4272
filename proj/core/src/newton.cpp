#include "tnst/newton.hpp"

#include <algorithm>
#include <chrono>
#include <stdexcept>

namespace tnst {

namespace {

double safe_residual_norm(const DenseNonlinearSystem& system, const DenseField& u, bool& ok) {
  try {
    ok = true;
    return system.residual(u).norm();
  } catch (const std::domain_error&) {
    ok = false;
    return 0.0;
  }
}

}  // namespace

NewtonResult newton_solve(const DenseNonlinearSystem& system, DenseField initial,
                          const NewtonOptions& options) {
  if (!(options.tol_res > 0.0) || !(options.tol_update > 0.0)) {
    throw std::invalid_argument("newton_solve: tolerances must be positive");
  }
  const auto start = std::chrono::steady_clock::now();
  NewtonResult result{std::move(initial), {}};
  NewtonReport& report = result.report;
  auto finish = [&](bool converged, const char* criterion) {
    report.converged = converged;
    report.criterion = criterion;
    report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return std::move(result);
  };

  DenseField g = system.residual(result.u);
  double g_norm = g.norm();
  const double g0 = g_norm;
  report.residual_norms.push_back(g_norm);
  if (g0 == 0.0) return finish(true, "residual");

  for (int k = 0; k < options.max_iter; ++k) {
    const double ratio = g_norm / g0;
    KrylovOptions inner = options.krylov;
    inner.tol = std::min(options.krylov.tol, 0.5 * ratio);
    if (system.is_affine()) inner.tol = std::min(inner.tol, 0.5 * options.tol_res);

    FieldOperator jac = system.jacobian(result.u);
    FieldOperator pc = options.precondition ? system.jacobian_preconditioner(result.u) : FieldOperator{};
    DenseField rhs = -1.0 * g;
    FieldKrylovResult lin = krylov_solve(jac, rhs, inner, pc);
    report.linear_iterations.push_back(lin.iterations);
    if (!lin.x.all_finite()) return finish(false, "linear_solver");

    // Backtracking line search on the residual norm.
    double s = 1.0;
    bool accepted = false;
    DenseField candidate;
    double candidate_norm = 0.0;
    for (int h = 0; h <= options.max_halvings; ++h, s *= 0.5) {
      candidate = result.u;
      candidate.values() += s * lin.x.values();
      bool ok = false;
      candidate_norm = safe_residual_norm(system, candidate, ok);
      if (ok && candidate_norm <= g_norm) {
        accepted = true;
        break;
      }
    }
    if (!accepted) return finish(false, "line_search");

    const double u_norm = result.u.norm();
    const double update = lin.x.norm() / (u_norm > 0.0 ? u_norm : 1.0);
    result.u = std::move(candidate);
    g = system.residual(result.u);
    g_norm = candidate_norm;
    ++report.iterations;
    report.residual_norms.push_back(g_norm);
    report.step_factors.push_back(s);
    report.update_norms.push_back(update);

    if (g_norm / g0 < options.tol_res) return finish(true, "residual");
    if (update < options.tol_update) return finish(true, "update");
  }
  return finish(false, "max_iter");
}

}  // namespace tnst
