#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "riskplan/grid.hpp"
#include "riskplan/planner.hpp"
#include "riskplan/taxonomy.hpp"
#include "riskplan/tensorio.hpp"

namespace riskplan {

using Image = Grid<Rgb>;

inline constexpr Rgb kPathColor{255, 0, 255};

/// Each pixel colored by its class's legend color.
Image render_labels(const LabelMap& labels, const CostTable& table);

/// Grayscale ramp, black at 0 and white at `max_value` (defaults to the map
/// maximum). An all-zero map renders black.
Image render_ramp(const ScalarMap& values, std::optional<double> max_value = std::nullopt);

/// Recolors exactly the waypoint pixels.
void overlay_path(Image& image, const PlannedPath& path, Rgb color = kPathColor);

/// Binary PPM (P6).
std::string encode_ppm(const Image& image);
void write_ppm(const Image& image, const std::filesystem::path& path);

}  // namespace riskplan
