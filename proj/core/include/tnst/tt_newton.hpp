#pragma once

#include <functional>
#include <string>
#include <vector>

#include "tnst/problem.hpp"
#include "tnst/problems.hpp"
#include "tnst/space_time_grid.hpp"
#include "tnst/tt_matrix.hpp"
#include "tnst/tt_operators.hpp"

namespace tnst {

/// Linear map on TT tensors: (x, eps) -> A x rounded at eps.
using TTLinearMap = std::function<TTTensor(const TTTensor&, double)>;

struct TTKrylovOptions {
  double tol = 1e-6;         ///< relative residual target
  double round_eps = 1e-7;   ///< rounding of Krylov vectors
  int max_iter = 300;
  int restart = 30;
};

struct TTKrylovResult {
  TTTensor x;
  int iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
  Eigen::Index max_basis_rank = 0;
};

/// Restarted GMRES with Krylov vectors kept in TT format and rounded after
/// every operator application and orthogonalization.
TTKrylovResult tt_gmres(const TTLinearMap& a, const TTTensor& rhs, const TTKrylovOptions& options,
                        const TTTensor* initial_guess = nullptr);

/// GMRES on a TT matrix with tolerance eps and rounding at eps / 10.
TTKrylovResult tt_linear_solve(const TTMatrix& a, const TTTensor& rhs, double eps, int max_iter = 300);

/// Sum of core sizes over the number of tensor entries.
double compression_ratio(const TTTensor& x);

/// G(u) = 0 over TT tensors of a fixed shape.
class TTNonlinearSystem {
public:
  virtual ~TTNonlinearSystem() = default;
  virtual Shape4 shape() const = 0;
  /// Residual rounded at eps.
  virtual TTTensor residual(const TTTensor& u, double eps) const = 0;
  /// Jacobian rounded at eps.
  virtual TTMatrix jacobian(const TTTensor& u, double eps) const = 0;
  /// Affine systems get one linear solve to the residual tolerance.
  virtual bool is_affine() const { return false; }
};

struct TTSystemOptions {
  double eps_cross = 1e-10;  ///< accuracy of cross-built inputs (boundary, source, coefficients)
  Eigen::Index cross_rank_cap = 64;
  int cross_sweeps = 40;
  std::uint64_t seed = 7;

  CrossOptions cross() const;
};

/// Reduced space-time collocation system in TT form.
class TTSpaceTimeSystem : public TTNonlinearSystem {
public:
  TTSpaceTimeSystem(ProblemSpec problem, SpaceTimeGrid grid, TTSystemOptions options = {});

  Shape4 shape() const override { return ops_.interior_sizes; }
  TTTensor residual(const TTTensor& u, double eps) const override;
  TTMatrix jacobian(const TTTensor& u, double eps) const override;
  bool is_affine() const override { return problem_.is_affine(); }

  const ProblemSpec& problem() const { return problem_; }
  const SpaceTimeGrid& grid() const { return grid_; }
  const TTOperatorSet& operators() const { return ops_; }

  /// Cross interpolation of the IC broadcast in time, rounded at eps.
  TTTensor initial_guess(double eps) const;
  /// Full-grid dense field: interior values from u, boundary values injected exactly.
  DenseField assemble_dense(const TTTensor& u) const;

private:
  ProblemSpec problem_;
  SpaceTimeGrid grid_;
  TTSystemOptions options_;
  TTOperatorSet ops_;
};

/// q(Y) = exp(-Y) - Y^3 - G with Jacobian diag(-exp(-Y) - 3 Y^2).
class TTRootFindSystem : public TTNonlinearSystem {
public:
  explicit TTRootFindSystem(RootFindProblem problem, TTSystemOptions options = {});

  Shape4 shape() const override { return problem_.mode_sizes(); }
  TTTensor residual(const TTTensor& y, double eps) const override;
  TTMatrix jacobian(const TTTensor& y, double eps) const override;

  const RootFindProblem& problem() const { return problem_; }

private:
  RootFindProblem problem_;
  TTSystemOptions options_;
};

struct StepTruncationOptions {
  double eps0 = 1e-1;
  double eps_floor = 1e-12;
  /// false: keep eps fixed at eps0 (fixed-accuracy TT-Newton).
  bool adaptive = true;
  /// Factor on the residual and update terms of the eps update; 1 gives the bare running minimum.
  double eps_safety = 0.2;
  double tol_res = 1e-6;
  double tol_update = 1e-6;
  int max_iter = 30;
  int max_halvings = 20;
  int linear_max_iter = 600;
  int restart = 30;
};

struct StepRecord {
  double residual_norm = 0.0;  ///< ||G|| of the accepted iterate
  double update_norm = 0.0;    ///< ||delta|| / ||U||
  double eps = 0.0;            ///< truncation tolerance used in this step
  Ranks3 ranks{};
  double compression = 0.0;
  double step_factor = 0.0;
  int linear_iterations = 0;
  double linear_residual = 0.0;
  double wall_time = 0.0;      ///< seconds since the solve started
};

struct StepTruncationState {
  double eps_k = 0.0;
  TTTensor iterate;
  double residual_norm_0 = 0.0;
  std::vector<StepRecord> history;
  int iterations = 0;
  bool converged = false;
  std::string criterion;  ///< residual | update | max_iter | line_search
  double wall_time = 0.0;

  /// eps values used at each iteration, in order.
  std::vector<double> eps_trace() const;
  Eigen::Index max_rank() const;
  double relative_residual() const;
};

/// Step-truncation TT-Newton. Each iteration rounds the residual and
/// Jacobian at eps_k, solves J delta = -G by TT-GMRES, backtracks on
/// U + s delta rounded at eps_k and then sets
/// eps_{k+1} = max(eps_floor, min(eps_k, c ||G_k|| / ||G_0||, c ||delta|| / ||U||)) with c = eps_safety.
StepTruncationState step_truncation_newton(const TTNonlinearSystem& system, const TTTensor& u0,
                                           const StepTruncationOptions& options = {});

}  // namespace tnst
