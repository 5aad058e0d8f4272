#pragma once

#include <cmath>
#include <cstdint>
#include <memory>

#include "tnst/newton.hpp"
#include "tnst/problem.hpp"
#include "tnst/tt_tensor.hpp"

namespace tnst {

/// u = exp(-t/10) sin(pi x) sin(pi y) sin(pi z) on [0,1] x [-2,2]^3 with
/// a = 1 + u^2, b = (u, 1, 1), f = u - u^3 and the matching source term.
ProblemSpec manufactured_ncd();
double manufactured_exact(double t, double x, double y, double z);

/// Viscous Burgers u_t + u (u_x + u_y + u_z) = Lap u on [0,1] x [0,6]^3.
ProblemSpec burgers3d();
double burgers_exact(double t, double x, double y, double z);

/// Pointwise PDE defect u_t - a(u) Lap u + b(u) . grad u - f(u) - s of the
/// exact solution, from analytic derivatives.
double manufactured_defect(const ProblemSpec& problem, double t, double x, double y, double z);
double burgers_defect(const ProblemSpec& problem, double t, double x, double y, double z);

/// Heat equation u_t = Lap u with the separable sine-mode solution. Linear.
ProblemSpec heat_problem(Interval time = {0.0, 1.0}, std::array<Interval, 3> space = {{{0, 1}, {0, 1}, {0, 1}}});

/// Synthetic root-finding task q(Y) = exp(-Y) - Y^3 - G with
/// G = exp(-Y*) - Y*^3 for a seeded random TT Y*.
struct RootFindProblem {
  TTTensor exact;
  TTTensor g;  // exp(-Y*) - Y*^3

  Shape4 mode_sizes() const { return exact.mode_sizes(); }
  /// Scalar form of one entry of q given y and the matching entry of G.
  static double q_scalar(double y, double g_entry) { return std::exp(-y) - y * y * y - g_entry; }
  static double dq_scalar(double y) { return -std::exp(-y) - 3.0 * y * y; }
};

inline constexpr Shape4 kRootFindSizes{16, 16, 16, 16};
inline constexpr Ranks3 kRootFindRanks{3, 3, 3};

/// Y* has cores uniform in [0, 1], scaled by 1 / (r1 r2 r3) so its entries
/// lie in [0, 1], rounded at machine precision. G is built with TT
/// arithmetic (cross for the exponential).
RootFindProblem experiment1_rootfind(std::uint64_t seed, const Shape4& sizes = kRootFindSizes,
                                     const Ranks3& ranks = kRootFindRanks);

/// Dense q(Y) and the diagonal of its Jacobian.
DenseField rootfind_residual_dense(const RootFindProblem& problem, const DenseField& y);
DenseField rootfind_jacobian_diagonal(const DenseField& y);

/// Full-grid form of the root-finding task for the dense Newton solver.
class DenseRootFindSystem : public DenseNonlinearSystem {
public:
  explicit DenseRootFindSystem(const RootFindProblem& problem);
  DenseField residual(const DenseField& y) const override;
  FieldOperator jacobian(const DenseField& y) const override;

private:
  DenseField g_;
};

}  // namespace tnst
