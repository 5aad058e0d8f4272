#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "tnst/chebyshev.hpp"
#include "tnst/dense_field.hpp"

namespace tnst {

/// One direction of the space-time grid. A collapsed axis has a single node,
/// a zero derivative and no boundary; it lets the same 4-way machinery
/// describe 2-D (t, x) or 3-D problems.
struct GridAxis {
  std::vector<double> nodes;
  Matrix d1;
  Matrix d2;
  bool collapsed = false;

  static GridAxis chebyshev(std::size_t n_points, Interval interval);
  static GridAxis collapsed_at(double position);

  std::size_t size() const { return nodes.size(); }
};

enum class AxisKind { time, space };

/// Tensor-product Chebyshev grid over [0, T] x box. Mode 0 is time.
///
/// Interior nodes are t-index 1..n_t-1 (the final-time plane is an
/// unknown) and space-index 1..n-2 along every non-collapsed spatial axis.
class SpaceTimeGrid {
public:
  SpaceTimeGrid(std::array<GridAxis, 4> axes);

  /// Same number of Chebyshev points along every axis.
  static SpaceTimeGrid cube(std::size_t n_points, Interval time, const std::array<Interval, 3>& space);
  /// 2-D (t, x) grid; y and z are collapsed.
  static SpaceTimeGrid plane(std::size_t n_points, Interval time, Interval space);

  const GridAxis& axis(int k) const { return axes_[static_cast<std::size_t>(k)]; }
  double node(int k, std::size_t i) const { return axes_[static_cast<std::size_t>(k)].nodes[i]; }

  Shape4 full_shape() const;
  Shape4 interior_shape() const;
  std::size_t interior_begin(int k) const { return begins_[static_cast<std::size_t>(k)]; }
  std::size_t interior_count(int k) const { return interior_shape()[static_cast<std::size_t>(k)]; }

  bool is_interior(const Index4& full_index) const;
  Index4 to_full(const Index4& interior_index) const;

  /// Rows restricted to interior nodes, all columns: d(I, :).
  Matrix d1_rows(int k) const;
  Matrix d2_rows(int k) const;
  /// Interior-by-interior block: d(I, I).
  Matrix d1_interior(int k) const;
  Matrix d2_interior(int k) const;
  /// Identity restricted to interior rows: I(I, :).
  Matrix restriction(int k) const;

  DenseField restrict_to_interior(const DenseField& full) const;
  /// Writes the interior values into a copy of `full`.
  DenseField embed(const DenseField& interior, const DenseField& full) const;

private:
  std::array<GridAxis, 4> axes_;
  std::array<std::size_t, 4> begins_{};
};

/// Partition of the full grid into boundary/initial nodes and unknowns.
struct IndexSplit {
  std::vector<Index4> boundary;
  std::vector<Index4> interior;
};

IndexSplit split_indices(const SpaceTimeGrid& grid);
/// 4-D cube with n_points per axis. Throws std::invalid_argument if n_points < 3.
IndexSplit split_indices(std::size_t n_points);

}  // namespace tnst
