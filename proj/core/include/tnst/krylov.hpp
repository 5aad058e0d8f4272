#pragma once

#include <functional>

#include <Eigen/Dense>

#include "tnst/chebyshev.hpp"
#include "tnst/dense_field.hpp"

namespace tnst {

using LinearOperator = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
using FieldOperator = std::function<DenseField(const DenseField&)>;

struct KrylovOptions {
  double tol = 1e-8;    ///< relative residual target ||A x - b|| <= tol ||b||
  int max_iter = 1000;  ///< total operator applications
  int restart = 50;
};

/// Outcome of a Krylov solve. `converged == false` is a report, not an
/// error: `x` is the best iterate found and `relative_residual` its true
/// residual.
struct KrylovResult {
  Eigen::VectorXd x;
  int iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
};

/// Restarted GMRES with modified Gram-Schmidt. `preconditioner`, when set,
/// is applied on the right so the reported residual is always the true one.
KrylovResult gmres(const LinearOperator& apply, const Eigen::VectorXd& rhs,
                   const KrylovOptions& options,
                   const LinearOperator& preconditioner = {},
                   const Eigen::VectorXd* initial_guess = nullptr);

struct FieldKrylovResult {
  DenseField x;
  int iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
};

FieldKrylovResult krylov_solve(const FieldOperator& apply, const DenseField& rhs,
                               const KrylovOptions& options,
                               const FieldOperator& preconditioner = {});

}  // namespace tnst
