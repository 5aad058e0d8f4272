#include "tnst/chebyshev.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace tnst {

std::vector<double> gauss_lobatto_nodes(std::size_t n_points, Interval interval) {
  if (n_points < 2) {
    throw std::invalid_argument("gauss_lobatto_nodes: need at least 2 points");
  }
  if (!(interval.lower < interval.upper)) {
    throw std::invalid_argument("gauss_lobatto_nodes: degenerate interval");
  }
  const std::size_t degree = n_points - 1;
  const double mid = interval.midpoint();
  const double half = interval.half_width();

  std::vector<double> nodes(n_points);
  for (std::size_t j = 0; j < n_points; ++j) {
    // sin form of cos(pi (N - j) / N) keeps the symmetric pairs exactly
    // mirrored and the midpoint exactly zero for odd n_points.
    const double arg = std::numbers::pi * (2.0 * static_cast<double>(j) - degree) /
                       (2.0 * static_cast<double>(degree));
    nodes[j] = mid + half * std::sin(arg);
  }
  nodes.front() = interval.lower;
  nodes.back() = interval.upper;
  return nodes;
}

Matrix differentiation_matrix(const std::vector<double>& nodes, Interval interval) {
  const auto n = static_cast<Eigen::Index>(nodes.size());
  if (n < 2) {
    throw std::invalid_argument("differentiation_matrix: need at least 2 nodes");
  }
  const double scale = 1.0 / interval.half_width();

  // Work on the canonical interval; the chain-rule factor is applied at the end.
  std::vector<double> xi(nodes.size());
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    xi[j] = (nodes[j] - interval.midpoint()) * scale;
  }

  auto weight = [n](Eigen::Index j) { return (j == 0 || j == n - 1) ? 2.0 : 1.0; };

  Matrix d = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      const double sign = ((i + j) % 2 == 0) ? 1.0 : -1.0;
      d(i, j) = weight(i) / weight(j) * sign / (xi[i] - xi[j]);
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    d(i, i) = -d.row(i).sum();
  }
  return scale * d;
}

Matrix second_derivative_matrix(const Matrix& d1) {
  if (d1.rows() != d1.cols()) {
    throw std::invalid_argument("second_derivative_matrix: matrix must be square");
  }
  return d1 * d1;
}

ChebyshevGrid1D::ChebyshevGrid1D(std::size_t n_points, Interval interval)
    : interval_(interval),
      nodes_(gauss_lobatto_nodes(n_points, interval)),
      d1_(differentiation_matrix(nodes_, interval)),
      d2_(second_derivative_matrix(d1_)) {}

}  // namespace tnst
