#pragma once

#include <algorithm>
#include <cassert>
#include <cstddef>
#include <span>
#include <vector>

namespace cnc {

// Dense (row, lifetime) table. Lifetimes are 1-based; column 0 holds the
// expired bucket and stays zero for every quantity the controller keeps.
class LifetimeTable {
 public:
  LifetimeTable() = default;
  LifetimeTable(std::size_t rows, int max_lifetime)
      : rows_(rows), width_(static_cast<std::size_t>(max_lifetime) + 1), data_(rows * width_, 0.0) {}

  std::size_t rows() const { return rows_; }
  int max_lifetime() const { return static_cast<int>(width_) - 1; }

  double& at(std::size_t row, int l) {
    assert(row < rows_ && l >= 0 && static_cast<std::size_t>(l) < width_);
    return data_[row * width_ + static_cast<std::size_t>(l)];
  }
  double at(std::size_t row, int l) const {
    assert(row < rows_ && l >= 0 && static_cast<std::size_t>(l) < width_);
    return data_[row * width_ + static_cast<std::size_t>(l)];
  }
  // Zero beyond the table's lifetime range, which is how the controller
  // treats L_max + 1 terms.
  double get(std::size_t row, int l) const {
    if (l < 0 || static_cast<std::size_t>(l) >= width_) return 0.0;
    return data_[row * width_ + static_cast<std::size_t>(l)];
  }

  std::span<double> row(std::size_t r) { return {data_.data() + r * width_, width_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * width_, width_}; }

  double row_sum(std::size_t r) const {
    double s = 0.0;
    for (double v : row(r)) s += v;
    return s;
  }
  double total() const {
    double s = 0.0;
    for (double v : data_) s += v;
    return s;
  }
  void fill(double v) { std::fill(data_.begin(), data_.end(), v); }
  std::span<const double> raw() const { return data_; }
  std::span<double> raw() { return data_; }

  bool operator==(const LifetimeTable&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t width_ = 1;
  std::vector<double> data_;
};

// Moves rows to their new positions; rows mapped to -1 are dropped and
// rows with no source stay zero.
inline LifetimeTable remap_rows(const LifetimeTable& table, std::span<const int> mapping, std::size_t new_rows) {
  LifetimeTable out(new_rows, table.max_lifetime());
  for (std::size_t r = 0; r < mapping.size() && r < table.rows(); ++r) {
    if (mapping[r] < 0) continue;
    auto src = table.row(r);
    std::copy(src.begin(), src.end(), out.row(static_cast<std::size_t>(mapping[r])).begin());
  }
  return out;
}

}  // namespace cnc
