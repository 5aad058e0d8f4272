#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "tnst/tt_tensor.hpp"

namespace tnst {

/// Row indices of a dominant r x r submatrix of the tall matrix m: every
/// entry of m * m(rows, :)^{-1} is bounded by 1 + tol in modulus.
/// Throws std::invalid_argument if m is wider than tall and
/// std::domain_error if m is numerically rank deficient.
std::vector<Eigen::Index> maxvol(const Matrix& m, double tol = 1e-2, int max_sweeps = 100);

/// Fills values[k] = f(indices[k]).
using BatchEvaluator = std::function<void(std::span<const Index4> indices, std::span<double> values)>;
using PointEvaluator = std::function<double(const Index4&)>;

struct CrossOptions {
  double eps = 1e-8;           ///< target relative error on the validation set
  Eigen::Index rank_cap = 64;  ///< largest rank any bond may reach
  Eigen::Index initial_rank = 2;
  Eigen::Index rank_step = 2;  ///< random indices added per bond and half-sweep
  int max_sweeps = 20;         ///< half-sweeps (left-right or right-left)
  std::size_t validation_size = 1000;
  std::uint64_t seed = 7;
  double maxvol_tol = 1e-2;
};

struct CrossReport {
  bool converged = false;
  double validation_error = 0.0;  ///< relative, or absolute when f vanishes on the sample
  int sweeps = 0;
  std::size_t evaluations = 0;
};

struct CrossResult {
  TTTensor tensor;
  CrossReport report;
};

/// Rank-adaptive alternating cross interpolation. f is only evaluated on
/// fibers through the current index sets and on the validation sample.
CrossResult tt_cross(const BatchEvaluator& f, const Shape4& sizes, const CrossOptions& options = {});
CrossResult tt_cross(const PointEvaluator& f, const Shape4& sizes, const CrossOptions& options = {});

}  // namespace tnst
