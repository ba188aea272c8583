#pragma once

// Independent reference implementations used only by tests. Nothing here
// shares code with the library paths it checks.

#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <random>
#include <vector>

namespace riskplan::oracle {

/// Straight-from-definition confidence estimate for one pixel.
/// probs[t][c] are the pass samples, costs[c] the class costs.
struct PixelConfidence {
  std::vector<double> mean;
  int prediction = 0;
  double base_cost = 0.0;
  double uncertainty = 0.0;
};

inline PixelConfidence confidence_by_definition(const std::vector<std::vector<double>>& probs,
                                                const std::vector<double>& costs) {
  const std::size_t T = probs.size(), C = costs.size();
  PixelConfidence out;
  out.mean.assign(C, 0.0);
  for (std::size_t c = 0; c < C; ++c) {
    for (std::size_t t = 0; t < T; ++t) out.mean[c] += probs[t][c];
    out.mean[c] /= double(T);
  }
  for (std::size_t c = 1; c < C; ++c)
    if (out.mean[c] > out.mean[out.prediction]) out.prediction = int(c);
  out.base_cost = costs[out.prediction];
  if (T < 2) return out;
  double total = 0.0;
  for (std::size_t c = 0; c < C; ++c) {
    double m = 0.0;
    for (std::size_t t = 0; t < T; ++t) m += costs[c] * probs[t][c];
    m /= double(T);
    double ss = 0.0;
    for (std::size_t t = 0; t < T; ++t) ss += (costs[c] * probs[t][c] - m) * (costs[c] * probs[t][c] - m);
    total += std::sqrt(ss / double(T - 1));
  }
  out.uncertainty = total / double(C);
  return out;
}

/// Plain Dijkstra over the 8-connected grid with entered-pixel costs.
/// Returns +inf when unreachable.
inline double dijkstra_cost(const std::vector<double>& cost, const std::vector<bool>& blocked, int H, int W, int sy,
                            int sx, int gy, int gx) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(std::size_t(H) * W, inf);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  dist[sy * W + sx] = 0.0;
  pq.push({0.0, sy * W + sx});
  while (!pq.empty()) {
    auto [d, u] = pq.top();
    pq.pop();
    if (d > dist[u]) continue;
    const int uy = u / W, ux = u % W;
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx) {
        const int vy = uy + dy, vx = ux + dx;
        if ((!dy && !dx) || vy < 0 || vy >= H || vx < 0 || vx >= W) continue;
        const int v = vy * W + vx;
        if (blocked[v]) continue;
        if (d + cost[v] < dist[v]) {
          dist[v] = d + cost[v];
          pq.push({dist[v], v});
        }
      }
  }
  return dist[gy * W + gx];
}

/// Minimum entered-pixel cost over every simple 8-connected path (DFS).
inline double enumerate_min_path_cost(const std::vector<double>& cost, const std::vector<bool>& blocked, int H, int W,
                                      int sy, int sx, int gy, int gx) {
  double best = std::numeric_limits<double>::infinity();
  std::vector<bool> seen(std::size_t(H) * W, false);
  std::function<void(int, double)> dfs = [&](int u, double acc) {
    if (u == gy * W + gx) {
      best = std::min(best, acc);
      return;
    }
    const int uy = u / W, ux = u % W;
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx) {
        const int vy = uy + dy, vx = ux + dx;
        if ((!dy && !dx) || vy < 0 || vy >= H || vx < 0 || vx >= W) continue;
        const int v = vy * W + vx;
        if (seen[v] || blocked[v]) continue;
        seen[v] = true;
        dfs(v, acc + cost[v]);
        seen[v] = false;
      }
  };
  seen[sy * W + sx] = true;
  dfs(sy * W + sx, 0.0);
  return best;
}

}  // namespace riskplan::oracle
