#pragma once

#include "evoesn/common.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>
#include <vector>

namespace evoesn {

/// Fixed sparsity pattern of a reservoir: the ordered positions of the M
/// unfrozen weights. Every other entry of the reservoir matrix is frozen to 0.
/// The order of `positions()` defines the coordinate order of the weight
/// vector and is fixed for the lifetime of an experiment.
class ReservoirLayout {
 public:
  using Position = std::pair<Index, Index>;

  ReservoirLayout() = default;

  /// Layout from explicit positions, kept in the given order.
  ReservoirLayout(Index units, std::vector<Position> positions)
      : units_(units), positions_(std::move(positions)) {
    if (units_ < 1) throw LayoutError("layout: unit count must be positive");
    if (static_cast<double>(positions_.size()) >= static_cast<double>(units_) * static_cast<double>(units_)) {
      throw LayoutError("layout: M must be smaller than N^2");
    }
    sorted_linear_.reserve(positions_.size());
    for (const auto& [row, col] : positions_) {
      if (row < 0 || row >= units_ || col < 0 || col >= units_) {
        throw LayoutError("layout: position (" + std::to_string(row) + ", " + std::to_string(col) +
                          ") outside a " + std::to_string(units_) + "-unit reservoir");
      }
      sorted_linear_.push_back(row * units_ + col);
    }
    std::sort(sorted_linear_.begin(), sorted_linear_.end());
    if (std::adjacent_find(sorted_linear_.begin(), sorted_linear_.end()) != sorted_linear_.end()) {
      throw LayoutError("layout: duplicate positions");
    }
    row_major_ = std::is_sorted(positions_.begin(), positions_.end());
  }

  /// M = round(density * N^2) distinct positions drawn uniformly without
  /// replacement, ordered row-major.
  static ReservoirLayout sample(Index units, double density, Rng& rng) {
    if (units < 1) throw LayoutError("layout: unit count must be positive");
    if (!(density >= 0.0 && density < 1.0)) throw LayoutError("layout: density must lie in [0, 1)");
    const Index total = units * units;
    const auto count = static_cast<Index>(std::llround(density * static_cast<double>(total)));
    // partial Fisher-Yates over the linear indices
    std::vector<Index> linear(static_cast<std::size_t>(total));
    std::iota(linear.begin(), linear.end(), Index{0});
    for (Index k = 0; k < count; ++k) {
      std::uniform_int_distribution<Index> pick(k, total - 1);
      std::swap(linear[k], linear[pick(rng)]);
    }
    linear.resize(static_cast<std::size_t>(count));
    std::sort(linear.begin(), linear.end());
    std::vector<Position> positions;
    positions.reserve(linear.size());
    for (Index v : linear) positions.emplace_back(v / units, v % units);
    return ReservoirLayout(units, std::move(positions));
  }

  Index units() const { return units_; }
  Index size() const { return static_cast<Index>(positions_.size()); }
  const std::vector<Position>& positions() const { return positions_; }
  const Position& operator[](Index k) const { return positions_[static_cast<std::size_t>(k)]; }
  bool row_major() const { return row_major_; }

  bool contains(Index row, Index col) const {
    return std::binary_search(sorted_linear_.begin(), sorted_linear_.end(), row * units_ + col);
  }

  friend bool operator==(const ReservoirLayout& a, const ReservoirLayout& b) {
    return a.units_ == b.units_ && a.positions_ == b.positions_;
  }

 private:
  Index units_ = 0;
  std::vector<Position> positions_;
  std::vector<Index> sorted_linear_;
  bool row_major_ = true;
};

/// Sparse reservoir whose stored pattern is exactly the layout; entry p_k
/// takes `values(k)`. Zero values stay stored so the pattern never changes.
template <typename Derived>
SparseMatrix<typename Derived::Scalar> reservoir_from_values(const ReservoirLayout& layout,
                                                             const Eigen::MatrixBase<Derived>& values) {
  using Scalar = typename Derived::Scalar;
  if (values.size() != layout.size()) {
    throw DomainError("reservoir_from_values: expected " + std::to_string(layout.size()) +
                      " values, got " + std::to_string(values.size()));
  }
  const Index n = layout.units();
  SparseMatrix<Scalar> w(n, n);
  Eigen::VectorXi per_row = Eigen::VectorXi::Zero(n);
  for (const auto& pos : layout.positions()) ++per_row(pos.first);
  w.reserve(per_row);
  for (Index k = 0; k < layout.size(); ++k) {
    const auto& [row, col] = layout[k];
    w.insert(row, col) = values(k);
  }
  w.makeCompressed();
  return w;
}

/// Weight vector read from `w` in layout order. Fails if `w` holds a nonzero
/// outside the layout.
template <typename Scalar>
Vector<Scalar> values_from_reservoir(const SparseMatrix<Scalar>& w, const ReservoirLayout& layout) {
  if (w.rows() != layout.units() || w.cols() != layout.units()) {
    throw LayoutError("reservoir dimensions do not match the layout");
  }
  for (Index row = 0; row < w.outerSize(); ++row) {
    for (typename SparseMatrix<Scalar>::InnerIterator it(w, row); it; ++it) {
      if (it.value() != Scalar(0) && !layout.contains(it.row(), it.col())) {
        throw LayoutError("reservoir has a nonzero at frozen position (" + std::to_string(it.row()) +
                          ", " + std::to_string(it.col()) + ")");
      }
    }
  }
  Vector<Scalar> values(layout.size());
  for (Index k = 0; k < layout.size(); ++k) values(k) = w.coeff(layout[k].first, layout[k].second);
  return values;
}

}  // namespace evoesn
