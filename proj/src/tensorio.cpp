#include "riskplan/tensorio.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <sstream>

#include "riskplan/error.hpp"
#include "text_util.hpp"

namespace riskplan {

void LabelMap::validate() const {
  if (num_classes < 1) throw DimensionError("label map needs at least one class");
  for (int y = 0; y < height(); ++y)
    for (int x = 0; x < width(); ++x)
      if (labels(y, x).index >= num_classes)
        throw DimensionError("label " + std::to_string(labels(y, x).index) + " at (" +
                             std::to_string(y) + "," + std::to_string(x) + ") >= C=" +
                             std::to_string(num_classes));
}

SoftmaxStack::SoftmaxStack(int passes, int height, int width, int classes)
    : passes_(passes), height_(height), width_(width), classes_(classes) {
  if (passes < 1 || height < 1 || width < 1 || classes < 2)
    throw DimensionError("softmax stack needs T>=1, H>=1, W>=1, C>=2");
  probs_.assign(std::size_t(passes) * pass_size(), 0.0f);
}

void SoftmaxStack::validate() const {
  for (int t = 0; t < passes_; ++t)
    for (int y = 0; y < height_; ++y)
      for (int x = 0; x < width_; ++x) {
        double sum = 0.0;
        bool in_range = true;
        for (float p : row(t, y, x)) {
          if (!(p >= 0.0f && p <= 1.0f)) in_range = false;
          sum += p;
        }
        if (!in_range || !(std::abs(sum - 1.0) <= kNormTolerance))
          throw ParseError("softmax row not normalized at (t=" + std::to_string(t) +
                           ",y=" + std::to_string(y) + ",x=" + std::to_string(x) +
                           "), sum=" + detail::format_exact(sum));
      }
}

SoftmaxStack SoftmaxStack::select_passes(std::span<const int> order) const {
  SoftmaxStack out(int(order.size()), height_, width_, classes_);
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (order[i] < 0 || order[i] >= passes_) throw DimensionError("pass index out of range");
    auto src = pass(order[i]);
    std::copy(src.begin(), src.end(), out.pass(int(i)).begin());
  }
  return out;
}

namespace {

struct HeaderLine {
  std::string_view line;
  std::size_t body_offset;
};

HeaderLine first_line(std::string_view text) {
  auto nl = text.find('\n');
  if (nl == std::string_view::npos) return {text, text.size()};
  return {text.substr(0, nl), nl + 1};
}

template <typename Int>
Int header_int(std::string_view tok, const char* what, const char* fmt) {
  auto v = detail::parse_int<Int>(tok);
  if (!v || *v < 0) throw ParseError(std::string(fmt) + ": bad " + what);
  return *v;
}

}  // namespace

// ---- label map -------------------------------------------------------------

LabelMap parse_label_map(const std::string& text) {
  auto [head, off] = first_line(text);
  auto h = detail::tokens(head);
  if (h.size() != 4 || h[0] != "LBL1") throw ParseError("label map: expected header 'LBL1 H W C'");
  const int height = header_int<int>(h[1], "height", "label map");
  const int width = header_int<int>(h[2], "width", "label map");
  const int classes = header_int<int>(h[3], "class count", "label map");
  if (classes < 1 || classes > 0xFFFF) throw ParseError("label map: bad class count");

  // Line structure is informational; the value count is what must match.
  std::vector<std::string_view> values;
  for (auto line : detail::split(std::string_view(text).substr(off), '\n'))
    for (auto tok : detail::tokens(line)) values.push_back(tok);
  const std::size_t expected = std::size_t(height) * width;
  if (values.size() != expected)
    throw ParseError("label map: header says " + std::to_string(expected) + " values, body has " +
                     std::to_string(values.size()));

  LabelMap map(height, width, classes);
  for (std::size_t i = 0; i < expected; ++i) {
    auto v = detail::parse_int<int>(values[i]);
    if (!v || *v < 0) throw ParseError("label map: bad label '" + std::string(values[i]) + "'");
    if (*v >= classes)
      throw ParseError("label map: label " + std::to_string(*v) + " >= C=" + std::to_string(classes));
    map.labels.data()[i] = ClassId{static_cast<std::uint16_t>(*v)};
  }
  return map;
}

std::string format_label_map(const LabelMap& map) {
  std::ostringstream out;
  out << "LBL1 " << map.height() << ' ' << map.width() << ' ' << map.num_classes << '\n';
  for (int y = 0; y < map.height(); ++y) {
    for (int x = 0; x < map.width(); ++x) out << (x ? " " : "") << map(y, x).index;
    out << '\n';
  }
  return out.str();
}

LabelMap read_label_map(const std::filesystem::path& path) {
  return parse_label_map(detail::read_file(path));
}

void write_label_map(const LabelMap& map, const std::filesystem::path& path) {
  map.validate();
  detail::write_file(path, format_label_map(map));
}

// ---- scalar map ------------------------------------------------------------

ScalarMap parse_scalar_map(const std::string& text) {
  auto [head, off] = first_line(text);
  auto h = detail::tokens(head);
  if (h.size() != 3 || h[0] != "SCL1") throw ParseError("scalar map: expected header 'SCL1 H W'");
  const int height = header_int<int>(h[1], "height", "scalar map");
  const int width = header_int<int>(h[2], "width", "scalar map");

  std::vector<std::string_view> values;
  for (auto line : detail::split(std::string_view(text).substr(off), '\n'))
    for (auto tok : detail::tokens(line)) values.push_back(tok);
  const std::size_t expected = std::size_t(height) * width;
  if (values.size() != expected)
    throw ParseError("scalar map: header says " + std::to_string(expected) + " values, body has " +
                     std::to_string(values.size()));

  ScalarMap map(height, width);
  for (std::size_t i = 0; i < expected; ++i) {
    auto v = detail::parse_double(values[i]);
    if (!v || !std::isfinite(*v))
      throw ParseError("scalar map: bad value '" + std::string(values[i]) + "'");
    map.data()[i] = *v;
  }
  return map;
}

std::string format_scalar_map(const ScalarMap& map) {
  std::ostringstream out;
  out << "SCL1 " << map.height() << ' ' << map.width() << '\n';
  for (int y = 0; y < map.height(); ++y) {
    for (int x = 0; x < map.width(); ++x) out << (x ? " " : "") << detail::format_exact(map(y, x));
    out << '\n';
  }
  return out.str();
}

ScalarMap read_scalar_map(const std::filesystem::path& path) {
  return parse_scalar_map(detail::read_file(path));
}

void write_scalar_map(const ScalarMap& map, const std::filesystem::path& path) {
  for (double v : map.data())
    if (!std::isfinite(v)) throw NumericError("scalar map contains a non-finite value");
  detail::write_file(path, format_scalar_map(map));
}

// ---- softmax stack ---------------------------------------------------------

namespace {

std::uint32_t to_le(std::uint32_t v) {
  if constexpr (std::endian::native == std::endian::little) return v;
  return ((v & 0xFFu) << 24) | ((v & 0xFF00u) << 8) | ((v >> 8) & 0xFF00u) | (v >> 24);
}

}  // namespace

std::string encode_softmax_stack(const SoftmaxStack& stack) {
  std::string out = "SMX1 " + std::to_string(stack.passes()) + ' ' + std::to_string(stack.height()) +
                    ' ' + std::to_string(stack.width()) + ' ' + std::to_string(stack.classes()) + '\n';
  const std::size_t head = out.size();
  out.resize(head + stack.values().size() * 4);
  char* dst = out.data() + head;
  for (float f : stack.values()) {
    std::uint32_t bits = to_le(std::bit_cast<std::uint32_t>(f));
    std::memcpy(dst, &bits, 4);
    dst += 4;
  }
  return out;
}

SoftmaxStack decode_softmax_stack(const std::string& bytes) {
  auto nl = bytes.find('\n');
  if (bytes.compare(0, 5, "SMX1 ") != 0 || nl == std::string::npos || nl > 128)
    throw ParseError("softmax stack: bad magic (expected 'SMX1')");
  auto h = detail::tokens(std::string_view(bytes).substr(0, nl));
  if (h.size() != 5) throw ParseError("softmax stack: expected header 'SMX1 T H W C'");
  const int t = header_int<int>(h[1], "pass count", "softmax stack");
  const int height = header_int<int>(h[2], "height", "softmax stack");
  const int width = header_int<int>(h[3], "width", "softmax stack");
  const int classes = header_int<int>(h[4], "class count", "softmax stack");
  if (t < 1 || height < 1 || width < 1 || classes < 2)
    throw ParseError("softmax stack: dimensions must satisfy T>=1, H>=1, W>=1, C>=2");

  SoftmaxStack stack(t, height, width, classes);
  const std::size_t body = bytes.size() - (nl + 1);
  const std::size_t expected = stack.values().size() * 4;
  if (body != expected)
    throw ParseError("softmax stack: length error, expected " + std::to_string(expected) +
                     " payload bytes, found " + std::to_string(body));
  const char* src = bytes.data() + nl + 1;
  for (float& f : stack.values()) {
    std::uint32_t bits;
    std::memcpy(&bits, src, 4);
    f = std::bit_cast<float>(to_le(bits));
    src += 4;
  }
  stack.validate();
  return stack;
}

SoftmaxStack read_softmax_stack(const std::filesystem::path& path) {
  return decode_softmax_stack(detail::read_file(path));
}

void write_softmax_stack(const SoftmaxStack& stack, const std::filesystem::path& path) {
  stack.validate();
  detail::write_file(path, encode_softmax_stack(stack));
}

}  // namespace riskplan
