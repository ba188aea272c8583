#include "riskplan/render.hpp"

#include <algorithm>
#include <cmath>

#include "riskplan/error.hpp"
#include "text_util.hpp"

namespace riskplan {

Image render_labels(const LabelMap& labels, const CostTable& table) {
  Image img(labels.height(), labels.width());
  for (int y = 0; y < labels.height(); ++y)
    for (int x = 0; x < labels.width(); ++x) img(y, x) = table.entry(labels(y, x)).color;
  return img;
}

Image render_ramp(const ScalarMap& values, std::optional<double> max_value) {
  double top = 0.0;
  if (max_value) {
    top = *max_value;
  } else {
    for (double v : values.data()) top = std::max(top, v);
  }
  Image img(values.height(), values.width());
  for (int y = 0; y < values.height(); ++y)
    for (int x = 0; x < values.width(); ++x) {
      double v = top > 0.0 ? std::clamp(values(y, x) / top, 0.0, 1.0) : 0.0;
      auto level = static_cast<std::uint8_t>(std::lround(v * 255.0));
      img(y, x) = {level, level, level};
    }
  return img;
}

void overlay_path(Image& image, const PlannedPath& path, Rgb color) {
  for (auto p : path.waypoints) {
    if (!image.contains(p)) throw PlanningError("path leaves the image");
    image[p] = color;
  }
}

std::string encode_ppm(const Image& image) {
  std::string out = "P6\n" + std::to_string(image.width()) + " " + std::to_string(image.height()) + "\n255\n";
  out.reserve(out.size() + image.size() * 3);
  for (const Rgb& c : image.data()) {
    out.push_back(static_cast<char>(c.r));
    out.push_back(static_cast<char>(c.g));
    out.push_back(static_cast<char>(c.b));
  }
  return out;
}

void write_ppm(const Image& image, const std::filesystem::path& path) { detail::write_file(path, encode_ppm(image)); }

}  // namespace riskplan
