#pragma once

#include <cassert>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace riskplan {

struct PixelCoord {
  int y = 0;
  int x = 0;

  friend bool operator==(const PixelCoord&, const PixelCoord&) = default;
};

/// Dense row-major H x W grid.
template <typename T>
class Grid {
 public:
  Grid() = default;
  Grid(int height, int width, const T& fill = T{})
      : height_(height), width_(width), data_(static_cast<std::size_t>(height) * width, fill) {
    assert(height >= 0 && width >= 0);
  }

  int height() const { return height_; }
  int width() const { return width_; }
  std::size_t size() const { return data_.size(); }

  bool contains(int y, int x) const { return y >= 0 && y < height_ && x >= 0 && x < width_; }
  bool contains(PixelCoord p) const { return contains(p.y, p.x); }

  std::size_t index(int y, int x) const {
    assert(contains(y, x));
    return static_cast<std::size_t>(y) * width_ + x;
  }

  T& operator()(int y, int x) { return data_[index(y, x)]; }
  const T& operator()(int y, int x) const { return data_[index(y, x)]; }
  T& operator[](PixelCoord p) { return data_[index(p.y, p.x)]; }
  const T& operator[](PixelCoord p) const { return data_[index(p.y, p.x)]; }

  std::vector<T>& data() { return data_; }
  const std::vector<T>& data() const { return data_; }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  int height_ = 0;
  int width_ = 0;
  std::vector<T> data_;
};

}  // namespace riskplan
