#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ctmap/error.hpp"

namespace ctmap {

/// Dense row-major 2-D raster. Cell (y, x) lives at index y * width + x.
template <typename T>
class Grid {
 public:
  using value_type = T;

  Grid() = default;
  Grid(int height, int width, T fill = T{}) : height_(height), width_(width) {
    if (height < 0 || width < 0) {
      throw Error(ErrorCode::kInvalidArgument, "grid dimensions must be non-negative");
    }
    cells_.assign(static_cast<std::size_t>(height) * static_cast<std::size_t>(width), fill);
  }

  int height() const noexcept { return height_; }
  int width() const noexcept { return width_; }
  std::size_t size() const noexcept { return cells_.size(); }
  bool empty() const noexcept { return cells_.empty(); }

  bool contains(int y, int x) const noexcept {
    return y >= 0 && y < height_ && x >= 0 && x < width_;
  }

  T& operator()(int y, int x) noexcept { return cells_[index(y, x)]; }
  const T& operator()(int y, int x) const noexcept { return cells_[index(y, x)]; }

  T& operator[](std::size_t i) noexcept { return cells_[i]; }
  const T& operator[](std::size_t i) const noexcept { return cells_[i]; }

  std::span<T> cells() noexcept { return cells_; }
  std::span<const T> cells() const noexcept { return cells_; }

  std::size_t index(int y, int x) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  template <typename U>
  bool same_shape(const Grid<U>& other) const noexcept {
    return height_ == other.height() && width_ == other.width();
  }

  bool operator==(const Grid&) const = default;

 private:
  int height_ = 0;
  int width_ = 0;
  std::vector<T> cells_;
};

/// Binary raster; every cell is 0 or 1.
using BitMask = Grid<std::uint8_t>;

using FloatMap = Grid<float>;

/// Per-pixel displacement in pixels, x then y. Laid out as two packed floats
/// so a Grid<Shift> is byte-compatible with an H x W x 2 float tensor.
struct Shift {
  float dx = 0.0F;
  float dy = 0.0F;

  bool operator==(const Shift&) const = default;
};
static_assert(sizeof(Shift) == 2 * sizeof(float));

using ShiftField = Grid<Shift>;

/// Integer label raster: 0 is background, ids 1..num_labels are regions.
struct LabeledGrid {
  Grid<std::int32_t> labels;
  int num_labels = 0;

  int height() const noexcept { return labels.height(); }
  int width() const noexcept { return labels.width(); }
  std::int32_t operator()(int y, int x) const noexcept { return labels(y, x); }

  bool operator==(const LabeledGrid&) const = default;
};

inline std::size_t count_set(const BitMask& mask) {
  std::size_t n = 0;
  for (auto v : mask.cells()) n += v != 0 ? 1 : 0;
  return n;
}

template <typename T, typename U>
void require_same_shape(const Grid<T>& a, const Grid<U>& b, const char* what) {
  if (!a.same_shape(b)) throw Error(ErrorCode::kShapeMismatch, what);
}

}  // namespace ctmap
