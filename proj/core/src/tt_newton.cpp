#include "tnst/tt_newton.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "tnst/fullgrid.hpp"

namespace tnst {

namespace {

void rotation(double a, double b, double& c, double& s) {
  if (b == 0.0) {
    c = 1.0;
    s = 0.0;
    return;
  }
  const double r = std::hypot(a, b);
  c = a / r;
  s = b / r;
}

}  // namespace

TTKrylovResult tt_gmres(const TTLinearMap& a, const TTTensor& rhs, const TTKrylovOptions& options,
                        const TTTensor* initial_guess) {
  if (options.tol <= 0.0 || options.restart < 1) throw std::invalid_argument("tt_gmres: invalid options");
  TTKrylovResult result;
  const Shape4 sizes = rhs.mode_sizes();
  const double b_norm = tt_norm(rhs);
  result.x = initial_guess ? *initial_guess : TTTensor::zeros(sizes);
  if (b_norm == 0.0) {
    result.x = TTTensor::zeros(sizes);
    result.converged = true;
    return result;
  }
  const double eps = options.round_eps;
  TTTensor r = initial_guess ? tt_round(tt_axpby(1.0, rhs, -1.0, a(result.x, eps)), eps) : rhs;
  double beta = tt_norm(r);
  result.relative_residual = beta / b_norm;
  while (result.relative_residual > options.tol && result.iterations < options.max_iter) {
    const int m = options.restart;
    std::vector<TTTensor> v;
    v.reserve(static_cast<std::size_t>(m) + 1);
    v.push_back(tt_scale(r, 1.0 / beta));
    Matrix h = Matrix::Zero(m + 1, m);
    Eigen::VectorXd cs = Eigen::VectorXd::Zero(m), sn = Eigen::VectorXd::Zero(m);
    Eigen::VectorXd g = Eigen::VectorXd::Zero(m + 1);
    g[0] = beta;
    int j = 0;
    for (; j < m && result.iterations < options.max_iter; ++j) {
      TTTensor w = a(v[static_cast<std::size_t>(j)], eps);
      ++result.iterations;
      // Modified Gram-Schmidt, rounding after every projection.
      for (int i = 0; i <= j; ++i) {
        const TTTensor& vi = v[static_cast<std::size_t>(i)];
        const double hij = tt_dot(vi, w);
        h(i, j) = hij;
        w = tt_round(tt_axpby(1.0, w, -hij, vi), eps);
      }
      const double hn = tt_norm(w);
      h(j + 1, j) = hn;
      for (int i = 0; i < j; ++i) {
        const double t = cs[i] * h(i, j) + sn[i] * h(i + 1, j);
        h(i + 1, j) = -sn[i] * h(i, j) + cs[i] * h(i + 1, j);
        h(i, j) = t;
      }
      rotation(h(j, j), h(j + 1, j), cs[j], sn[j]);
      h(j, j) = cs[j] * h(j, j) + sn[j] * h(j + 1, j);
      h(j + 1, j) = 0.0;
      g[j + 1] = -sn[j] * g[j];
      g[j] = cs[j] * g[j];
      result.max_basis_rank = std::max(result.max_basis_rank, w.max_rank());
      const bool breakdown = hn <= 1e-14 * std::abs(h(j, j));
      if (!breakdown) v.push_back(tt_scale(w, 1.0 / hn));
      if (std::abs(g[j + 1]) / b_norm <= options.tol || breakdown) {
        ++j;
        break;
      }
    }
    // Solve the triangular system and update x.
    Eigen::VectorXd y = h.topLeftCorner(j, j).triangularView<Eigen::Upper>().solve(g.head(j));
    for (int i = 0; i < j; ++i) result.x = tt_round(tt_axpby(1.0, result.x, y[i], v[static_cast<std::size_t>(i)]), eps);
    r = tt_round(tt_axpby(1.0, rhs, -1.0, a(result.x, eps)), eps);
    const double new_beta = tt_norm(r);
    const bool stalled = new_beta >= beta * (1.0 - 1e-3);
    beta = new_beta;
    result.relative_residual = beta / b_norm;
    if (stalled && result.relative_residual > options.tol) break;
  }
  result.converged = result.relative_residual <= options.tol;
  return result;
}

TTKrylovResult tt_linear_solve(const TTMatrix& a, const TTTensor& rhs, double eps, int max_iter) {
  TTKrylovOptions opts;
  opts.tol = eps;
  opts.round_eps = eps * 0.1;
  opts.max_iter = max_iter;
  opts.restart = 30;
  return tt_gmres([&a](const TTTensor& x, double e) { return tt_matvec_round(a, x, e); }, rhs, opts);
}

double compression_ratio(const TTTensor& x) {
  return static_cast<double>(x.parameter_count()) / static_cast<double>(element_count(x.mode_sizes()));
}

CrossOptions TTSystemOptions::cross() const {
  CrossOptions c;
  c.eps = eps_cross;
  c.rank_cap = cross_rank_cap;
  c.max_sweeps = cross_sweeps;
  c.seed = seed;
  return c;
}

TTSpaceTimeSystem::TTSpaceTimeSystem(ProblemSpec problem, SpaceTimeGrid grid, TTSystemOptions options)
    : problem_(std::move(problem)), grid_(std::move(grid)), options_(options) {
  TTBuildOptions build;
  build.cross = options_.cross();
  ops_ = build_tt_operators(problem_, grid_, build);
}

TTTensor TTSpaceTimeSystem::residual(const TTTensor& u, double eps) const {
  return tt_residual(u, ops_, problem_, eps, options_.cross());
}

TTMatrix TTSpaceTimeSystem::jacobian(const TTTensor& u, double eps) const {
  return tt_jacobian(u, ops_, problem_, eps, options_.cross());
}

TTTensor TTSpaceTimeSystem::initial_guess(double eps) const {
  const SpaceFunction h = problem_.initial;
  const SpaceTimeFunction broadcast = [h](double, double x, double y, double z) { return h(x, y, z); };
  return tt_round(tt_sample_interior(broadcast, grid_, options_.cross()).tensor, eps);
}

DenseField TTSpaceTimeSystem::assemble_dense(const TTTensor& u) const {
  return grid_.embed(tt_to_dense(u), boundary_values(problem_, grid_));
}

TTRootFindSystem::TTRootFindSystem(RootFindProblem problem, TTSystemOptions options)
    : problem_(std::move(problem)), options_(options) {}

TTTensor TTRootFindSystem::residual(const TTTensor& y, double eps) const {
  const double inner = eps * 0.01;
  const TTTensor e = tt_apply_cross([](double v) { return std::exp(-v); }, y, inner, options_.cross());
  const TTTensor cube = tt_round(tt_hadamard(tt_round(tt_hadamard(y, y), inner), y), inner);
  return tt_round(tt_axpby(1.0, tt_axpby(1.0, e, -1.0, cube), -1.0, problem_.g), eps);
}

TTMatrix TTRootFindSystem::jacobian(const TTTensor& y, double eps) const {
  const double inner = eps * 0.1;
  const TTTensor e = tt_apply_cross([](double v) { return std::exp(-v); }, y, inner, options_.cross());
  const TTTensor sq = tt_round(tt_hadamard(y, y), inner);
  return tt_diag(tt_round(tt_axpby(-1.0, e, -3.0, sq), eps));
}

std::vector<double> StepTruncationState::eps_trace() const {
  std::vector<double> out;
  for (const auto& h : history) out.push_back(h.eps);
  return out;
}

Eigen::Index StepTruncationState::max_rank() const {
  Eigen::Index r = iterate.max_rank();
  for (const auto& h : history) r = std::max({r, h.ranks[0], h.ranks[1], h.ranks[2]});
  return r;
}

double StepTruncationState::relative_residual() const {
  if (residual_norm_0 == 0.0) return 0.0;
  return (history.empty() ? residual_norm_0 : history.back().residual_norm) / residual_norm_0;
}

StepTruncationState step_truncation_newton(const TTNonlinearSystem& system, const TTTensor& u0,
                                           const StepTruncationOptions& options) {
  if (options.eps0 <= 0.0) throw std::invalid_argument("step_truncation_newton: eps0 must be positive");
  const auto start = std::chrono::steady_clock::now();
  const auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); };
  StepTruncationState st;
  st.eps_k = std::max(options.eps0, options.eps_floor);
  auto finish = [&](bool converged, const char* criterion) {
    st.converged = converged;
    st.criterion = criterion;
    st.wall_time = elapsed();
    return std::move(st);
  };

  st.iterate = tt_round(u0, st.eps_k);
  TTTensor g = system.residual(st.iterate, st.eps_k);
  double g_norm = tt_norm(g);
  double g_eps = st.eps_k;  // accuracy g was computed at
  st.residual_norm_0 = g_norm;
  if (g_norm == 0.0) return finish(true, "residual");

  for (int k = 0; k < options.max_iter; ++k) {
    double eps = st.eps_k;
    TTKrylovOptions lin;
    if (system.is_affine()) eps = std::min(eps, 0.1 * options.tol_res);
    if (eps < g_eps) {
      g = system.residual(st.iterate, eps);
      g_norm = tt_norm(g);
      g_eps = eps;
    }
    const double ratio = g_norm / st.residual_norm_0;
    lin.tol = system.is_affine() ? 0.5 * options.tol_res : std::max(eps, std::min(1e-2, 0.5 * ratio));
    lin.round_eps = eps * 0.1;
    lin.max_iter = options.linear_max_iter;
    lin.restart = options.restart;

    const TTMatrix jac = system.jacobian(st.iterate, eps);
    const TTKrylovResult sol = tt_gmres([&jac](const TTTensor& x, double e) { return tt_matvec_round(jac, x, e); }, tt_scale(g, -1.0), lin);
    const TTTensor& delta = sol.x;

    double s = 1.0;
    bool accepted = false;
    TTTensor candidate, g_candidate;
    double candidate_norm = 0.0;
    for (int hv = 0; hv <= options.max_halvings; ++hv, s *= 0.5) {
      try {
        candidate = tt_round(tt_axpby(1.0, st.iterate, s, delta), eps);
        g_candidate = system.residual(candidate, eps);
        candidate_norm = tt_norm(g_candidate);
      } catch (const std::domain_error&) {
        continue;
      }
      if (std::isfinite(candidate_norm) && candidate_norm <= g_norm) {
        accepted = true;
        break;
      }
    }
    if (!accepted) return finish(false, "line_search");

    const double u_norm = tt_norm(st.iterate);
    const double update = tt_norm(delta) / (u_norm > 0.0 ? u_norm : 1.0);
    st.iterate = std::move(candidate);
    g = std::move(g_candidate);
    g_norm = candidate_norm;
    g_eps = eps;
    ++st.iterations;

    StepRecord rec;
    rec.residual_norm = g_norm;
    rec.update_norm = update;
    rec.eps = eps;
    rec.ranks = st.iterate.ranks();
    rec.compression = compression_ratio(st.iterate);
    rec.step_factor = s;
    rec.linear_iterations = sol.iterations;
    rec.linear_residual = sol.relative_residual;
    rec.wall_time = elapsed();
    st.history.push_back(rec);

    if (g_norm / st.residual_norm_0 < options.tol_res) return finish(true, "residual");
    if (update < options.tol_update) return finish(true, "update");
    if (options.adaptive) {
      st.eps_k = std::max(options.eps_floor, std::min({st.eps_k, options.eps_safety * g_norm / st.residual_norm_0,
                                                       options.eps_safety * update}));
    }
  }
  return finish(false, "max_iter");
}

}  // namespace tnst
