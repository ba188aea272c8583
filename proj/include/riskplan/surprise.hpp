#pragma once

#include <string>
#include <string_view>

#include "riskplan/planner.hpp"
#include "riskplan/riskmap.hpp"
#include "riskplan/tensorio.hpp"

namespace riskplan {

enum class SurpriseMode {
  /// |expected - actual| / actual (default).
  symmetric,
  /// (actual - expected) / actual: positive when the plan underestimated.
  signed_difference,
  /// |expected - actual| / expected.
  by_expected,
};

struct SurpriseReport {
  double expected_cost = 0.0;
  double actual_cost = 0.0;
  double surprise_factor = 0.0;
  PlannedPath path;
  Provenance provenance;
};

/// Surprise of a path given predicted base costs (no lambda term) and the
/// ground-truth cost map. A single-waypoint path reports zeros. Throws
/// MetricError when the normalizing cost is 0 but the costs differ.
SurpriseReport evaluate_surprise(const PlannedPath& path, const ScalarMap& predicted_base,
                                 const RiskCostMap& truth_map, SurpriseMode mode = SurpriseMode::symmetric);

double surprise_factor(double expected_cost, double actual_cost, SurpriseMode mode = SurpriseMode::symmetric);

struct SurpriseOptions {
  SurpriseMode mode = SurpriseMode::symmetric;
  /// Expected cost sums the planning map (L + lambda * V) instead of the
  /// base label costs L. Off by default; the lambda term is a planning
  /// penalty, not a cost estimate.
  bool expected_includes_risk = false;
};

enum class Variant { ground_truth, deterministic, dropout, bootstrap };

std::string_view variant_name(Variant v);
Variant parse_variant(std::string_view name);

/// Plans on the variant's cost map and evaluates its surprise:
///   ground_truth  - truth costs; surprise is always 0
///   deterministic - deterministic_baseline (pass 0), lambda ignored (0)
///   dropout, bootstrap - estimate_confidence, then C = L + lambda * V
SurpriseReport run_scenario(const SoftmaxStack& stack, const LabelMap& truth, const CostTable& table,
                            const RiskConfig& config, Variant variant, PixelCoord start, PixelCoord goal,
                            const SurpriseOptions& options = {});

/// Same, reusing precomputed confidence maps for the non-ground-truth variants.
SurpriseReport run_scenario(const ConfidenceMaps& maps, const RiskCostMap& truth_map, const CostTable& table,
                            const RiskConfig& config, Variant variant, PixelCoord start, PixelCoord goal,
                            Provenance provenance = {}, const SurpriseOptions& options = {});

}  // namespace riskplan
