#pragma once

#include <memory>

#include "tnst/dense_field.hpp"
#include "tnst/kronecker.hpp"
#include "tnst/krylov.hpp"
#include "tnst/newton.hpp"
#include "tnst/problem.hpp"
#include "tnst/space_time_grid.hpp"

namespace tnst {

/// Full-grid field holding g on spatial-boundary nodes, h on the t = 0 plane
/// and zero on interior nodes.
DenseField boundary_values(const ProblemSpec& problem, const SpaceTimeGrid& grid);

/// Largest |g(0, x) - h(x)| over the spatial-boundary nodes of the t = 0 plane.
double initial_boundary_mismatch(const ProblemSpec& problem, const SpaceTimeGrid& grid);

/// Evaluates fn at every node of the full grid.
DenseField sample_on_grid(const SpaceTimeFunction& fn, const SpaceTimeGrid& grid);

/// Default Newton starting point: h broadcast along time, on interior nodes.
DenseField initial_guess(const ProblemSpec& problem, const SpaceTimeGrid& grid);

/// ||u - exact(nodes)|| / ||exact(nodes)|| over all full-grid nodes.
/// Throws std::domain_error when the exact samples vanish.
double relative_error(const DenseField& u, const SpaceTimeFunction& exact, const SpaceTimeGrid& grid);

/// Linearization of the reduced residual at a fixed state, acting on interior
/// fields. Coefficient fields are computed once at construction.
class FullGridJacobian {
public:
  FullGridJacobian(const class FullGridSystem& system, const DenseField& u_interior);
  DenseField apply(const DenseField& v) const;

private:
  const FullGridSystem* system_;
  DenseField diffusion_;             // a(U)
  DenseField diagonal_;              // -a'(U) LU + sum b_i'(U) d_iU - f'(U)
  std::array<DenseField, 3> convection_;  // b_i(U)
};

/// Spectral collocation discretization restricted to interior nodes.
class FullGridSystem : public DenseNonlinearSystem {
public:
  FullGridSystem(ProblemSpec problem, SpaceTimeGrid grid);

  DenseField residual(const DenseField& u_interior) const override;
  FieldOperator jacobian(const DenseField& u_interior) const override;
  FieldOperator jacobian_preconditioner(const DenseField& u_interior) const override {
    return preconditioner(u_interior);
  }
  bool is_affine() const override { return problem_.is_affine(); }

  const ProblemSpec& problem() const { return problem_; }
  const SpaceTimeGrid& grid() const { return grid_; }
  const DenseField& boundary() const { return boundary_; }
  Shape4 interior_shape() const { return grid_.interior_shape(); }

  /// Full-grid field with the boundary values injected around u_interior.
  DenseField assemble(const DenseField& u_interior) const;

  // residual(u): the collocation equations at interior nodes with boundary
  // values frozen. Throws std::domain_error on a non-finite intermediate.

  /// J(U_int) v by analytic linearization.
  DenseField jacobian_apply(const DenseField& u_interior, const DenseField& v) const;
  FullGridJacobian linearize(const DenseField& u_interior) const { return {*this, u_interior}; }

  /// Inverse of A_t - abar * L on interior nodes via fast diagonalization;
  /// abar is the mean diffusion at u_interior.
  FieldOperator preconditioner(const DenseField& u_interior) const;

  const Matrix& dt_interior() const { return dt_int_; }
  const Matrix& d1_interior(int k) const { return d1_int_[static_cast<std::size_t>(k)]; }
  const Matrix& d2_interior(int k) const { return d2_int_[static_cast<std::size_t>(k)]; }
  bool axis_active(int k) const { return !grid_.axis(k).collapsed; }

private:
  friend class FullGridJacobian;

  struct Derivatives {
    DenseField dt, lap;
    std::array<DenseField, 3> grad;
  };
  Derivatives interior_derivatives(const DenseField& full) const;

  ProblemSpec problem_;
  SpaceTimeGrid grid_;
  DenseField boundary_;
  DenseField source_;  // interior samples of s, zero when absent
  Matrix dt_int_;
  std::array<Matrix, 4> d1_int_;
  std::array<Matrix, 4> d2_int_;
  std::array<Matrix, 4> d1_rows_;
  std::array<Matrix, 4> d2_rows_;

  struct FastDiagonalization;
  std::shared_ptr<const FastDiagonalization> fdm_;
};

// Free-function forms of the system operations.
DenseField residual(const DenseField& u_interior, const ProblemSpec& problem, const SpaceTimeGrid& grid);
DenseField jacobian_apply(const DenseField& u_interior, const DenseField& v, const ProblemSpec& problem,
                          const SpaceTimeGrid& grid);

}  // namespace tnst
