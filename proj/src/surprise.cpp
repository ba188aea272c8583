#include "riskplan/surprise.hpp"

#include <cmath>

#include "riskplan/confidence.hpp"
#include "riskplan/error.hpp"

namespace riskplan {

double surprise_factor(double expected_cost, double actual_cost, SurpriseMode mode) {
  if (expected_cost == actual_cost) return 0.0;
  const double denom = mode == SurpriseMode::by_expected ? expected_cost : actual_cost;
  if (denom == 0.0)
    throw MetricError("surprise undefined: normalizing cost is 0 (expected " + std::to_string(expected_cost) +
                      ", actual " + std::to_string(actual_cost) + ")");
  switch (mode) {
    case SurpriseMode::signed_difference:
      return (actual_cost - expected_cost) / denom;
    case SurpriseMode::symmetric:
    case SurpriseMode::by_expected:
      break;
  }
  return std::abs(expected_cost - actual_cost) / denom;
}

SurpriseReport evaluate_surprise(const PlannedPath& path, const ScalarMap& predicted_base,
                                 const RiskCostMap& truth_map, SurpriseMode mode) {
  SurpriseReport report;
  report.path = path;
  report.expected_cost = path_cost_under(predicted_base, path);
  report.actual_cost = path_cost_under(truth_map, path);
  report.surprise_factor = surprise_factor(report.expected_cost, report.actual_cost, mode);
  return report;
}

std::string_view variant_name(Variant v) {
  switch (v) {
    case Variant::ground_truth:
      return "ground_truth";
    case Variant::deterministic:
      return "deterministic";
    case Variant::dropout:
      return "dropout";
    case Variant::bootstrap:
      return "bootstrap";
  }
  return "?";
}

Variant parse_variant(std::string_view name) {
  for (Variant v : {Variant::ground_truth, Variant::deterministic, Variant::dropout, Variant::bootstrap})
    if (variant_name(v) == name) return v;
  throw ParseError("unknown variant: " + std::string(name));
}

SurpriseReport run_scenario(const ConfidenceMaps& maps, const RiskCostMap& truth_map, const CostTable& table,
                            const RiskConfig& config, Variant variant, PixelCoord start, PixelCoord goal,
                            Provenance provenance, const SurpriseOptions& options) {
  if (variant == Variant::ground_truth) {
    const PlannedPath path = plan(truth_map, start, goal);
    SurpriseReport r = evaluate_surprise(path, truth_map.costs, truth_map, options.mode);
    r.provenance = truth_map.provenance;
    return r;
  }
  if (maps.height() != truth_map.height() || maps.width() != truth_map.width())
    throw DimensionError("prediction and ground truth differ in size");
  const RiskConfig effective{variant == Variant::deterministic ? 0.0 : config.lambda};
  provenance.source = std::string(variant_name(variant));
  const RiskCostMap planning = build_risk_cost_map(maps, table, effective, provenance);
  const PlannedPath path = plan(planning, start, goal);
  const ScalarMap& predicted = options.expected_includes_risk ? planning.costs : maps.base_cost;
  SurpriseReport r = evaluate_surprise(path, predicted, truth_map, options.mode);
  r.provenance = planning.provenance;
  return r;
}

SurpriseReport run_scenario(const SoftmaxStack& stack, const LabelMap& truth, const CostTable& table,
                            const RiskConfig& config, Variant variant, PixelCoord start, PixelCoord goal,
                            const SurpriseOptions& options) {
  if (stack.height() != truth.height() || stack.width() != truth.width())
    throw DimensionError("stack and ground truth differ in size");
  const RiskCostMap truth_map = ground_truth_cost_map(truth, table);
  if (variant == Variant::ground_truth)
    return run_scenario(ConfidenceMaps{}, truth_map, table, config, variant, start, goal, {}, options);
  const ConfidenceMaps maps =
      variant == Variant::deterministic ? deterministic_baseline(stack, table) : estimate_confidence(stack, table);
  return run_scenario(maps, truth_map, table, config, variant, start, goal, {"", stack.passes(), 0}, options);
}

}  // namespace riskplan
