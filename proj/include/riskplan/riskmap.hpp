#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "riskplan/confidence.hpp"
#include "riskplan/taxonomy.hpp"
#include "riskplan/tensorio.hpp"

namespace riskplan {

struct RiskConfig {
  /// Weight of the uncertainty term; 0 is risk-neutral.
  double lambda = 8.0;
};

struct Provenance {
  std::string source;  // "dropout", "bootstrap", "deterministic", "ground-truth", ...
  int samples = 0;     // T or K; 0 when not applicable
  std::uint64_t seed = 0;

  friend bool operator==(const Provenance&, const Provenance&) = default;
};

/// Planning cost per pixel. `blocked` marks pixels whose class is impassable;
/// the planner removes them from the graph.
struct RiskCostMap {
  ScalarMap costs;
  std::vector<std::uint8_t> blocked;  // H * W, row-major
  double lambda = 0.0;
  Provenance provenance;

  int height() const { return costs.height(); }
  int width() const { return costs.width(); }
  bool is_blocked(int y, int x) const { return blocked[costs.index(y, x)] != 0; }

  /// Plain cost map with nothing blocked.
  static RiskCostMap from_costs(ScalarMap costs, Provenance provenance = {});
};

/// costs(p) = base_cost(p) + lambda * uncertainty(p). Impassable predictions
/// are blocked. Throws NumericError on negative lambda or non-finite input.
RiskCostMap build_risk_cost_map(const ConfidenceMaps& maps, const CostTable& table, const RiskConfig& config,
                                Provenance provenance = {});

/// Cost of each true label; lambda recorded as 0.
RiskCostMap ground_truth_cost_map(const LabelMap& truth, const CostTable& table);

/// Writes `<stem>.scl` (scalar map) and `<stem>.json` (lambda, provenance).
void write_risk_cost_map(const RiskCostMap& map, const std::filesystem::path& stem);
std::string risk_sidecar_json(const RiskCostMap& map);

}  // namespace riskplan
