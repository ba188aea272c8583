#include "riskplan/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>

#include "riskplan/error.hpp"
#include "text_util.hpp"

namespace riskplan {

namespace {

struct OpenNode {
  double f;
  double g;
  std::uint64_t seq;
  std::size_t cell;
};

// std::priority_queue pops the largest; order so the best node is largest.
struct Worse {
  bool operator()(const OpenNode& a, const OpenNode& b) const {
    if (a.f != b.f) return a.f > b.f;
    if (a.g != b.g) return a.g > b.g;
    return a.seq > b.seq;
  }
};

std::string coord_str(PixelCoord p) { return "(" + std::to_string(p.y) + "," + std::to_string(p.x) + ")"; }

}  // namespace

PlannedPath plan(const RiskCostMap& map, PixelCoord start, PixelCoord goal, const PlannerOptions& options,
                 PlannerStats* stats) {
  const ScalarMap& costs = map.costs;
  if (!costs.contains(start)) throw PlanningError("start " + coord_str(start) + " outside map");
  if (!costs.contains(goal)) throw PlanningError("goal " + coord_str(goal) + " outside map");
  if (map.is_blocked(start.y, start.x)) throw PlanningError("start " + coord_str(start) + " is impassable");
  if (map.is_blocked(goal.y, goal.x)) throw PlanningError("goal " + coord_str(goal) + " is impassable");

  if (stats) *stats = {};
  if (start == goal) return {{start}, 0.0};

  const int W = costs.width();
  const std::size_t n = costs.size();
  double min_cost = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const double c = costs.data()[i];
    if (!std::isfinite(c) || c < 0.0) throw NumericError("planning costs must be finite and >= 0");
    if (!map.blocked[i]) min_cost = std::min(min_cost, c);
  }
  const double h_scale = options.use_heuristic ? min_cost : 0.0;
  auto heuristic = [&](std::size_t cell) {
    return h_scale * chebyshev({int(cell / W), int(cell % W)}, goal);
  };

  constexpr double kInf = std::numeric_limits<double>::infinity();
  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  std::vector<double> g(n, kInf);
  std::vector<std::size_t> parent(n, kNone);
  std::vector<std::uint8_t> closed(n, 0);
  std::priority_queue<OpenNode, std::vector<OpenNode>, Worse> open;
  std::uint64_t seq = 0;

  const std::size_t src = costs.index(start.y, start.x);
  const std::size_t dst = costs.index(goal.y, goal.x);
  g[src] = 0.0;
  open.push({heuristic(src), 0.0, seq++, src});

  while (!open.empty()) {
    const OpenNode node = open.top();
    open.pop();
    if (closed[node.cell] || node.g > g[node.cell]) continue;
    closed[node.cell] = 1;
    if (stats) ++stats->expansions;
    if (node.cell == dst) break;

    const int y = int(node.cell / W), x = int(node.cell % W);
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx) {
        if (!dy && !dx) continue;
        const int ny = y + dy, nx = x + dx;
        if (!costs.contains(ny, nx)) continue;
        const std::size_t next = costs.index(ny, nx);
        if (closed[next] || map.blocked[next]) continue;
        const double cand = node.g + costs.data()[next];
        if (cand < g[next]) {
          g[next] = cand;
          parent[next] = node.cell;
          open.push({cand + heuristic(next), cand, seq++, next});
        }
      }
  }

  if (!closed[dst])
    throw UnreachableError("goal " + coord_str(goal) + " unreachable from " + coord_str(start));

  PlannedPath path;
  for (std::size_t cell = dst; cell != kNone; cell = parent[cell]) path.waypoints.push_back({int(cell / W), int(cell % W)});
  std::reverse(path.waypoints.begin(), path.waypoints.end());
  path.planned_cost = g[dst];
  return path;
}

double path_cost_under(const ScalarMap& map, const PlannedPath& path) {
  double sum = 0.0;
  for (std::size_t i = 0; i < path.waypoints.size(); ++i) {
    const PixelCoord p = path.waypoints[i];
    if (!map.contains(p)) throw PlanningError("waypoint " + coord_str(p) + " outside map");
    if (i > 0) sum += map[p];
  }
  return sum;
}

double path_cost_under(const RiskCostMap& map, const PlannedPath& path) { return path_cost_under(map.costs, path); }

std::string format_path(const PlannedPath& path) {
  std::ostringstream out;
  out << "PTH1 " << path.waypoints.size() << ' ' << detail::format_exact(path.planned_cost) << '\n';
  for (auto p : path.waypoints) out << p.y << ' ' << p.x << '\n';
  return out.str();
}

PlannedPath parse_path(const std::string& text) {
  auto lines = detail::split(text, '\n');
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty()) throw ParseError("path: empty file");
  auto head = detail::tokens(lines[0]);
  if (head.size() != 3 || head[0] != "PTH1") throw ParseError("path: expected header 'PTH1 N planned_cost'");
  auto count = detail::parse_int<std::size_t>(head[1]);
  auto cost = detail::parse_double(head[2]);
  if (!count || !cost) throw ParseError("path: malformed header");
  if (lines.size() - 1 != *count)
    throw ParseError("path: header says " + std::to_string(*count) + " waypoints, found " +
                     std::to_string(lines.size() - 1));
  PlannedPath path;
  path.planned_cost = *cost;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    auto t = detail::tokens(lines[i]);
    auto y = t.size() == 2 ? detail::parse_int<int>(t[0]) : std::nullopt;
    auto x = t.size() == 2 ? detail::parse_int<int>(t[1]) : std::nullopt;
    if (!y || !x) throw ParseError("path line " + std::to_string(i + 1) + ": expected 'y x'");
    path.waypoints.push_back({*y, *x});
  }
  return path;
}

void write_path(const PlannedPath& path, const std::filesystem::path& file) {
  detail::write_file(file, format_path(path));
}

PlannedPath read_path(const std::filesystem::path& file) { return parse_path(detail::read_file(file)); }

}  // namespace riskplan
