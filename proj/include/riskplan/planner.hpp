#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "riskplan/grid.hpp"
#include "riskplan/riskmap.hpp"
#include "riskplan/tensorio.hpp"

namespace riskplan {

struct PlannedPath {
  std::vector<PixelCoord> waypoints;  // start ... goal, 8-connected
  /// Sum of the planning map over waypoints[1..]; the start pixel is free.
  double planned_cost = 0.0;

  friend bool operator==(const PlannedPath&, const PlannedPath&) = default;
};

struct PlannerOptions {
  /// Chebyshev distance times the minimum unblocked pixel cost. With false
  /// the search degenerates to Dijkstra.
  bool use_heuristic = true;
};

struct PlannerStats {
  std::size_t expansions = 0;
};

/// A* over the 8-connected grid. Entering a pixel costs its map value
/// (diagonal moves included); blocked pixels are not in the graph.
/// Ties on f go to the lower g, then to the earlier-pushed node.
///
/// Throws PlanningError if start or goal is outside the map or blocked,
/// UnreachableError if no path exists.
PlannedPath plan(const RiskCostMap& map, PixelCoord start, PixelCoord goal, const PlannerOptions& options = {},
                 PlannerStats* stats = nullptr);

/// Sum of `map` over waypoints[1..]. Throws PlanningError on an
/// out-of-bounds waypoint.
double path_cost_under(const ScalarMap& map, const PlannedPath& path);
double path_cost_under(const RiskCostMap& map, const PlannedPath& path);

/// Path file: `PTH1 N planned_cost` then N lines `y x`.
std::string format_path(const PlannedPath& path);
PlannedPath parse_path(const std::string& text);
void write_path(const PlannedPath& path, const std::filesystem::path& file);
PlannedPath read_path(const std::filesystem::path& file);

inline int chebyshev(PixelCoord a, PixelCoord b) {
  const int dy = a.y > b.y ? a.y - b.y : b.y - a.y;
  const int dx = a.x > b.x ? a.x - b.x : b.x - a.x;
  return dy > dx ? dy : dx;
}

}  // namespace riskplan
