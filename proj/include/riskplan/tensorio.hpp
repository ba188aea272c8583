#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "riskplan/grid.hpp"
#include "riskplan/taxonomy.hpp"

namespace riskplan {

/// H x W grid of class labels tagged with the class count it is valid for.
struct LabelMap {
  Grid<ClassId> labels;
  int num_classes = 0;

  LabelMap() = default;
  LabelMap(int height, int width, int classes, ClassId fill = {})
      : labels(height, width, fill), num_classes(classes) {}

  int height() const { return labels.height(); }
  int width() const { return labels.width(); }
  ClassId operator()(int y, int x) const { return labels(y, x); }
  ClassId& operator()(int y, int x) { return labels(y, x); }

  /// Throws DimensionError on any label >= num_classes.
  void validate() const;

  friend bool operator==(const LabelMap&, const LabelMap&) = default;
};

using ScalarMap = Grid<double>;

/// T stochastic softmax samples over an H x W grid with C classes, stored
/// t-major, then (y, x), then class.
class SoftmaxStack {
 public:
  SoftmaxStack() = default;
  SoftmaxStack(int passes, int height, int width, int classes);

  int passes() const { return passes_; }
  int height() const { return height_; }
  int width() const { return width_; }
  int classes() const { return classes_; }

  std::span<float> row(int t, int y, int x) { return {probs_.data() + offset(t, y, x), std::size_t(classes_)}; }
  std::span<const float> row(int t, int y, int x) const {
    return {probs_.data() + offset(t, y, x), std::size_t(classes_)};
  }
  /// All H*W*C values of pass t.
  std::span<float> pass(int t) { return {probs_.data() + offset(t, 0, 0), pass_size()}; }
  std::span<const float> pass(int t) const { return {probs_.data() + offset(t, 0, 0), pass_size()}; }

  std::vector<float>& values() { return probs_; }
  const std::vector<float>& values() const { return probs_; }

  /// Rows must have entries in [0,1] summing to 1 within this tolerance.
  static constexpr double kNormTolerance = 1e-5;

  /// Throws ParseError naming (t, y, x) of the first non-normalized row.
  void validate() const;

  /// Stack holding only the given passes, in the given order.
  SoftmaxStack select_passes(std::span<const int> order) const;

  friend bool operator==(const SoftmaxStack&, const SoftmaxStack&) = default;

 private:
  std::size_t pass_size() const { return std::size_t(height_) * width_ * classes_; }
  std::size_t offset(int t, int y, int x) const {
    return ((std::size_t(t) * height_ + y) * width_ + x) * classes_;
  }

  int passes_ = 0;
  int height_ = 0;
  int width_ = 0;
  int classes_ = 0;
  std::vector<float> probs_;
};

// Label map: ASCII, `LBL1 H W C` then H rows of W integers.
LabelMap read_label_map(const std::filesystem::path& path);
LabelMap parse_label_map(const std::string& text);
void write_label_map(const LabelMap& map, const std::filesystem::path& path);
std::string format_label_map(const LabelMap& map);

// Scalar map: ASCII, `SCL1 H W` then H rows of W decimals (exact round trip).
ScalarMap read_scalar_map(const std::filesystem::path& path);
ScalarMap parse_scalar_map(const std::string& text);
void write_scalar_map(const ScalarMap& map, const std::filesystem::path& path);
std::string format_scalar_map(const ScalarMap& map);

// Softmax stack: `SMX1 T H W C\n` then T*H*W*C little-endian float32.
SoftmaxStack read_softmax_stack(const std::filesystem::path& path);
SoftmaxStack decode_softmax_stack(const std::string& bytes);
void write_softmax_stack(const SoftmaxStack& stack, const std::filesystem::path& path);
std::string encode_softmax_stack(const SoftmaxStack& stack);

}  // namespace riskplan
