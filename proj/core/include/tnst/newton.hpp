#pragma once

#include <string>
#include <vector>

#include "tnst/dense_field.hpp"
#include "tnst/krylov.hpp"

namespace tnst {

/// Nonlinear system G(u) = 0 over dense fields with an analytic Jacobian.
class DenseNonlinearSystem {
public:
  virtual ~DenseNonlinearSystem() = default;
  virtual DenseField residual(const DenseField& u) const = 0;
  virtual FieldOperator jacobian(const DenseField& u) const = 0;
  /// Approximate inverse of the Jacobian, applied on the right. Empty by default.
  virtual FieldOperator jacobian_preconditioner(const DenseField& /*u*/) const { return {}; }
  /// Affine systems are solved to the residual tolerance in a single step.
  virtual bool is_affine() const { return false; }
};

struct NewtonOptions {
  double tol_res = 1e-6;     ///< stop when ||G(U^k)|| / ||G(U^0)|| < tol_res
  double tol_update = 1e-6;  ///< stop when ||delta^k|| / ||U^k|| < tol_update
  int max_iter = 30;
  int max_halvings = 20;
  KrylovOptions krylov{1e-2, 2000, 50};
  bool precondition = false;  ///< right-precondition GMRES with jacobian_preconditioner
};

/// Per-iteration history. residual_norms[0] is ||G(U^0)||; entry k+1 is the
/// residual of the accepted iterate after step k.
struct NewtonReport {
  int iterations = 0;
  std::vector<double> residual_norms;
  std::vector<double> step_factors;
  std::vector<double> update_norms;  ///< ||delta^k|| / ||U^k||
  std::vector<int> linear_iterations;
  bool converged = false;
  std::string criterion;  ///< residual | update | max_iter | line_search | linear_solver
  double wall_time = 0.0;

  double relative_residual() const {
    return residual_norms.empty() || residual_norms.front() == 0.0
               ? 0.0
               : residual_norms.back() / residual_norms.front();
  }
};

struct NewtonResult {
  DenseField u;
  NewtonReport report;
};

/// Inexact Newton with backtracking s = 1, 1/2, 1/4, ... accepting the first
/// step that does not increase ||G||. The inner GMRES tolerance is
/// min(krylov.tol, 0.5 ||G^k|| / ||G^0||).
NewtonResult newton_solve(const DenseNonlinearSystem& system, DenseField initial,
                          const NewtonOptions& options = {});

}  // namespace tnst
