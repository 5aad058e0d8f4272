#include "tnst/space_time_grid.hpp"

#include <stdexcept>

namespace tnst {

namespace {

Matrix select_rows(const Matrix& m, std::size_t begin, std::size_t count) {
  return m.middleRows(static_cast<Eigen::Index>(begin), static_cast<Eigen::Index>(count));
}

Matrix select_block(const Matrix& m, std::size_t begin, std::size_t count) {
  const auto b = static_cast<Eigen::Index>(begin);
  const auto c = static_cast<Eigen::Index>(count);
  return m.block(b, b, c, c);
}

}  // namespace

GridAxis GridAxis::chebyshev(std::size_t n_points, Interval interval) {
  ChebyshevGrid1D grid(n_points, interval);
  return {grid.nodes(), grid.d1(), grid.d2(), false};
}

GridAxis GridAxis::collapsed_at(double position) {
  return {{position}, Matrix::Zero(1, 1), Matrix::Zero(1, 1), true};
}

SpaceTimeGrid::SpaceTimeGrid(std::array<GridAxis, 4> axes) : axes_(std::move(axes)) {
  if (axes_[0].collapsed) {
    throw std::invalid_argument("SpaceTimeGrid: the time axis cannot be collapsed");
  }
  for (std::size_t k = 0; k < 4; ++k) {
    const auto& a = axes_[k];
    if (a.collapsed) {
      begins_[k] = 0;
      continue;
    }
    const std::size_t min_points = (k == 0) ? 2 : 3;
    if (a.size() < min_points) {
      throw std::invalid_argument("SpaceTimeGrid: axis has no interior nodes");
    }
    begins_[k] = 1;
  }
}

SpaceTimeGrid SpaceTimeGrid::cube(std::size_t n_points, Interval time,
                                  const std::array<Interval, 3>& space) {
  return SpaceTimeGrid({GridAxis::chebyshev(n_points, time), GridAxis::chebyshev(n_points, space[0]),
                        GridAxis::chebyshev(n_points, space[1]),
                        GridAxis::chebyshev(n_points, space[2])});
}

SpaceTimeGrid SpaceTimeGrid::plane(std::size_t n_points, Interval time, Interval space) {
  return SpaceTimeGrid({GridAxis::chebyshev(n_points, time), GridAxis::chebyshev(n_points, space),
                        GridAxis::collapsed_at(0.0), GridAxis::collapsed_at(0.0)});
}

Shape4 SpaceTimeGrid::full_shape() const {
  return {axes_[0].size(), axes_[1].size(), axes_[2].size(), axes_[3].size()};
}

Shape4 SpaceTimeGrid::interior_shape() const {
  Shape4 shape{};
  shape[0] = axes_[0].size() - 1;
  for (std::size_t k = 1; k < 4; ++k) {
    shape[k] = axes_[k].collapsed ? 1 : axes_[k].size() - 2;
  }
  return shape;
}

bool SpaceTimeGrid::is_interior(const Index4& idx) const {
  const Shape4 inner = interior_shape();
  for (std::size_t k = 0; k < 4; ++k) {
    if (idx[k] < begins_[k] || idx[k] >= begins_[k] + inner[k]) return false;
  }
  return true;
}

Index4 SpaceTimeGrid::to_full(const Index4& interior_index) const {
  Index4 full{};
  for (std::size_t k = 0; k < 4; ++k) full[k] = interior_index[k] + begins_[k];
  return full;
}

Matrix SpaceTimeGrid::d1_rows(int k) const {
  return select_rows(axis(k).d1, interior_begin(k), interior_count(k));
}
Matrix SpaceTimeGrid::d2_rows(int k) const {
  return select_rows(axis(k).d2, interior_begin(k), interior_count(k));
}
Matrix SpaceTimeGrid::d1_interior(int k) const {
  return select_block(axis(k).d1, interior_begin(k), interior_count(k));
}
Matrix SpaceTimeGrid::d2_interior(int k) const {
  return select_block(axis(k).d2, interior_begin(k), interior_count(k));
}
Matrix SpaceTimeGrid::restriction(int k) const {
  const auto n = static_cast<Eigen::Index>(axis(k).size());
  return select_rows(Matrix::Identity(n, n), interior_begin(k), interior_count(k));
}

DenseField SpaceTimeGrid::restrict_to_interior(const DenseField& full) const {
  if (full.shape() != full_shape()) {
    throw std::invalid_argument("restrict_to_interior: field is not full-grid shaped");
  }
  const Shape4 inner = interior_shape();
  DenseField out(inner);
  std::size_t k = 0;
  Eigen::VectorXd& dst = out.values();
  const Eigen::VectorXd& src = full.values();
  for (std::size_t i = 0; i < inner[0]; ++i)
    for (std::size_t j = 0; j < inner[1]; ++j)
      for (std::size_t l = 0; l < inner[2]; ++l) {
        const std::size_t base = full.offset(to_full({i, j, l, 0}));
        for (std::size_t m = 0; m < inner[3]; ++m) {
          dst[static_cast<Eigen::Index>(k++)] = src[static_cast<Eigen::Index>(base + m)];
        }
      }
  return out;
}

DenseField SpaceTimeGrid::embed(const DenseField& interior, const DenseField& full) const {
  if (interior.shape() != interior_shape() || full.shape() != full_shape()) {
    throw std::invalid_argument("embed: field shapes do not match the grid");
  }
  const Shape4 inner = interior_shape();
  DenseField out = full;
  std::size_t k = 0;
  Eigen::VectorXd& dst = out.values();
  const Eigen::VectorXd& src = interior.values();
  for (std::size_t i = 0; i < inner[0]; ++i)
    for (std::size_t j = 0; j < inner[1]; ++j)
      for (std::size_t l = 0; l < inner[2]; ++l) {
        const std::size_t base = full.offset(to_full({i, j, l, 0}));
        for (std::size_t m = 0; m < inner[3]; ++m) {
          dst[static_cast<Eigen::Index>(base + m)] = src[static_cast<Eigen::Index>(k++)];
        }
      }
  return out;
}

IndexSplit split_indices(const SpaceTimeGrid& grid) {
  IndexSplit split;
  const Shape4 shape = grid.full_shape();
  for (std::size_t i = 0; i < shape[0]; ++i)
    for (std::size_t j = 0; j < shape[1]; ++j)
      for (std::size_t l = 0; l < shape[2]; ++l)
        for (std::size_t m = 0; m < shape[3]; ++m) {
          const Index4 idx{i, j, l, m};
          (grid.is_interior(idx) ? split.interior : split.boundary).push_back(idx);
        }
  return split;
}

IndexSplit split_indices(std::size_t n_points) {
  if (n_points < 3) {
    throw std::invalid_argument("split_indices: need at least 3 points per axis");
  }
  const Interval unit{0.0, 1.0};
  return split_indices(SpaceTimeGrid::cube(n_points, unit, {unit, unit, unit}));
}

}  // namespace tnst
