#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace tnst {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Closed interval [lower, upper] with lower < upper.
struct Interval {
  double lower = -1.0;
  double upper = 1.0;

  double midpoint() const { return 0.5 * (lower + upper); }
  double half_width() const { return 0.5 * (upper - lower); }
};

/// Chebyshev-Gauss-Lobatto nodes x_j = mid + half * cos(pi (N - j) / N),
/// j = 0..N, returned in ascending order with exact endpoints.
/// Throws std::invalid_argument for n_points < 2 or a degenerate interval.
std::vector<double> gauss_lobatto_nodes(std::size_t n_points, Interval interval);

/// First-derivative collocation matrix on the given nodes (any ordering),
/// including the affine factor for the interval. Diagonal entries use the
/// negative-sum identity so that every row sums to zero.
Matrix differentiation_matrix(const std::vector<double>& nodes, Interval interval);

/// d1 * d1.
Matrix second_derivative_matrix(const Matrix& d1);

/// One-dimensional Chebyshev collocation grid with its derivative matrices.
class ChebyshevGrid1D {
public:
  ChebyshevGrid1D(std::size_t n_points, Interval interval);

  std::size_t n_points() const { return nodes_.size(); }
  std::size_t degree() const { return nodes_.size() - 1; }
  const Interval& interval() const { return interval_; }
  const std::vector<double>& nodes() const { return nodes_; }
  double node(std::size_t j) const { return nodes_[j]; }

  const Matrix& d1() const { return d1_; }
  const Matrix& d2() const { return d2_; }

private:
  Interval interval_;
  std::vector<double> nodes_;
  Matrix d1_;
  Matrix d2_;
};

}  // namespace tnst
