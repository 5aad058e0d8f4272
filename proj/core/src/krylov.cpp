#include "tnst/krylov.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace tnst {

namespace {

// Givens rotation zeroing b in (a, b).
void make_rotation(double a, double b, double& c, double& s) {
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

KrylovResult gmres(const LinearOperator& apply, const Eigen::VectorXd& rhs,
                   const KrylovOptions& options, const LinearOperator& preconditioner,
                   const Eigen::VectorXd* initial_guess) {
  if (!(options.tol > 0.0)) {
    throw std::invalid_argument("gmres: tolerance must be positive");
  }
  if (options.restart < 1 || options.max_iter < 1) {
    throw std::invalid_argument("gmres: restart and max_iter must be positive");
  }
  const Eigen::Index n = rhs.size();
  KrylovResult result;
  result.x = initial_guess ? *initial_guess : Eigen::VectorXd::Zero(n);

  const double rhs_norm = rhs.norm();
  if (rhs_norm == 0.0) {
    result.x.setZero();
    result.converged = true;
    return result;
  }
  const double target = options.tol * rhs_norm;
  auto precondition = [&](const Eigen::VectorXd& v) {
    return preconditioner ? preconditioner(v) : v;
  };

  Eigen::VectorXd r = rhs - (result.x.squaredNorm() > 0.0 ? apply(result.x) : Eigen::VectorXd::Zero(n));
  double beta = r.norm();
  result.relative_residual = beta / rhs_norm;
  if (beta <= target) {
    result.converged = true;
    return result;
  }

  const int m = options.restart;
  std::vector<Eigen::VectorXd> basis;
  basis.reserve(static_cast<std::size_t>(m) + 1);
  Matrix h = Matrix::Zero(m + 1, m);
  Eigen::VectorXd cs(m), sn(m), g(m + 1);

  while (result.iterations < options.max_iter) {
    basis.clear();
    basis.push_back(r / beta);
    h.setZero();
    g.setZero();
    g(0) = beta;

    int k = 0;
    for (; k < m && result.iterations < options.max_iter; ++k) {
      Eigen::VectorXd w = apply(precondition(basis[static_cast<std::size_t>(k)]));
      ++result.iterations;
      for (int i = 0; i <= k; ++i) {
        h(i, k) = basis[static_cast<std::size_t>(i)].dot(w);
        w -= h(i, k) * basis[static_cast<std::size_t>(i)];
      }
      h(k + 1, k) = w.norm();
      for (int i = 0; i < k; ++i) {
        const double tmp = cs(i) * h(i, k) + sn(i) * h(i + 1, k);
        h(i + 1, k) = -sn(i) * h(i, k) + cs(i) * h(i + 1, k);
        h(i, k) = tmp;
      }
      const double sub = h(k + 1, k);
      make_rotation(h(k, k), sub, cs(k), sn(k));
      h(k, k) = cs(k) * h(k, k) + sn(k) * sub;
      h(k + 1, k) = 0.0;
      g(k + 1) = -sn(k) * g(k);
      g(k) = cs(k) * g(k);

      const bool breakdown = sub <= 1e-14 * std::abs(h(k, k));
      if (!breakdown) basis.push_back(w / sub);
      if (std::abs(g(k + 1)) <= target || breakdown) {
        ++k;
        break;
      }
    }

    // Solve the k x k triangular least-squares system and update x.
    Eigen::VectorXd y = h.topLeftCorner(k, k).triangularView<Eigen::Upper>().solve(g.head(k));
    Eigen::VectorXd update = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < k; ++i) update += y(i) * basis[static_cast<std::size_t>(i)];
    result.x += precondition(update);

    r = rhs - apply(result.x);
    beta = r.norm();
    result.relative_residual = beta / rhs_norm;
    if (beta <= target) {
      result.converged = true;
      return result;
    }
    if (beta == 0.0) break;
  }
  return result;
}

FieldKrylovResult krylov_solve(const FieldOperator& apply, const DenseField& rhs,
                               const KrylovOptions& options,
                               const FieldOperator& preconditioner) {
  const Shape4 shape = rhs.shape();
  LinearOperator op = [&](const Eigen::VectorXd& v) {
    return apply(DenseField(shape, v)).values();
  };
  LinearOperator pc;
  if (preconditioner) {
    pc = [&](const Eigen::VectorXd& v) { return preconditioner(DenseField(shape, v)).values(); };
  }
  KrylovResult raw = gmres(op, rhs.values(), options, pc);
  return {DenseField(shape, std::move(raw.x)), raw.iterations, raw.relative_residual, raw.converged};
}

}  // namespace tnst
