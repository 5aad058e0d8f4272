#pragma once

#include <array>
#include <vector>

#include "tnst/problem.hpp"
#include "tnst/space_time_grid.hpp"
#include "tnst/tt_cross.hpp"
#include "tnst/tt_matrix.hpp"
#include "tnst/tt_tensor.hpp"

namespace tnst {

/// Convection directions sharing one coefficient function, so that
/// b(U) . (sum of gradients) is formed with a single Hadamard product.
struct ConvectionGroup {
  ScalarFunction coefficient;
  std::vector<int> modes;  // spatial directions 1..3
  TTMatrix op;             // sum of interior gradients over `modes`
  TTTensor bc;             // sum of map gradients applied to g_bc
};

/// Space-time operators of the reduced system in TT form. Interior operators
/// act on interior-shaped tensors; map operators take full-grid tensors to
/// interior shape and carry the boundary contribution.
struct TTOperatorSet {
  Shape4 interior_sizes{};
  Shape4 full_sizes{};

  TTMatrix a_t;                      // S_t(I,I) (x) I (x) I (x) I
  TTMatrix laplacian;                // rank 2
  std::array<TTMatrix, 3> gradients;

  TTMatrix map_t;                    // S_t(I,:) (x) R (x) R (x) R
  TTMatrix map_laplacian;            // rank 3
  std::array<TTMatrix, 3> map_gradients;

  TTTensor g_bc;                     // full grid, zero on interior nodes
  CrossReport boundary_report;

  TTTensor bc_t;                     // map_t g_bc
  TTTensor bc_laplacian;             // map_laplacian g_bc
  std::array<TTTensor, 3> bc_gradients;

  std::vector<ConvectionGroup> convection;
  TTTensor source;                   // interior samples of s (zero if absent)
};

struct TTBuildOptions {
  CrossOptions cross{};  ///< used for g_bc and the source term
  double eps_round = 1e-14;  ///< rounding of the precomputed boundary terms
};

/// Full-grid boundary tensor: h on the t = 0 plane, g on spatial faces, zero
/// elsewhere, built by cross interpolation.
CrossResult build_boundary_tensor(const ProblemSpec& problem, const SpaceTimeGrid& grid,
                                  const CrossOptions& options = {});

TTOperatorSet build_tt_operators(const ProblemSpec& problem, const SpaceTimeGrid& grid,
                                 const TTBuildOptions& options = {});

/// Cross interpolation of fn sampled at the interior nodes of the grid.
CrossResult tt_sample_interior(const SpaceTimeFunction& fn, const SpaceTimeGrid& grid,
                               const CrossOptions& options = {});

/// Elementwise fn(u). Polynomials use Horner's rule with TT arithmetic and
/// rounding at eps; other functions go through cross interpolation.
TTTensor tt_coefficient(const ScalarFunction& fn, const TTTensor& u, double eps, const CrossOptions& cross = {});
/// Elementwise fn'(u), by the same two paths.
TTTensor tt_coefficient_derivative(const ScalarFunction& fn, const TTTensor& u, double eps,
                                   const CrossOptions& cross = {});
/// Elementwise fn(u) by cross interpolation only.
TTTensor tt_apply_cross(const std::function<double(double)>& fn, const TTTensor& u, double eps,
                        const CrossOptions& cross = {});

/// Reduced residual A_t U + bc_t - a(U) (L U + bc_L) + sum b_i(U) (grad_i U + bc_i) - f(U) - s,
/// rounded at eps.
TTTensor tt_residual(const TTTensor& u, const TTOperatorSet& ops, const ProblemSpec& problem, double eps,
                     const CrossOptions& cross = {});

/// Jacobian of tt_residual as a TT matrix rounded at eps.
TTMatrix tt_jacobian(const TTTensor& u, const TTOperatorSet& ops, const ProblemSpec& problem, double eps,
                     const CrossOptions& cross = {});

/// Interior tensor embedded into the full grid (zero on boundary nodes).
TTTensor tt_embed_interior(const TTTensor& u, const SpaceTimeGrid& grid);

}  // namespace tnst
