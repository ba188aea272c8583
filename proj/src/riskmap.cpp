#include "riskplan/riskmap.hpp"

#include <cmath>

#include "json.hpp"

#include "riskplan/error.hpp"
#include "text_util.hpp"

namespace riskplan {

RiskCostMap RiskCostMap::from_costs(ScalarMap costs, Provenance provenance) {
  RiskCostMap map;
  map.blocked.assign(costs.size(), 0);
  map.costs = std::move(costs);
  map.provenance = std::move(provenance);
  return map;
}

RiskCostMap build_risk_cost_map(const ConfidenceMaps& maps, const CostTable& table, const RiskConfig& config,
                                Provenance provenance) {
  if (!(config.lambda >= 0.0) || !std::isfinite(config.lambda))
    throw NumericError("lambda must be finite and >= 0");
  if (maps.base_cost.height() != maps.uncertainty.height() || maps.base_cost.width() != maps.uncertainty.width())
    throw DimensionError("base cost and uncertainty maps differ in size");

  RiskCostMap out;
  out.costs = ScalarMap(maps.height(), maps.width());
  out.blocked.assign(out.costs.size(), 0);
  out.lambda = config.lambda;
  out.provenance = std::move(provenance);

  const auto& base = maps.base_cost.data();
  const auto& unc = maps.uncertainty.data();
  for (std::size_t i = 0; i < base.size(); ++i) {
    if (!std::isfinite(base[i]) || !std::isfinite(unc[i]) || unc[i] < 0.0)
      throw NumericError("non-finite or negative input at pixel " + std::to_string(i));
    out.costs.data()[i] = base[i] + config.lambda * unc[i];
    out.blocked[i] = table.is_impassable(maps.prediction.labels.data()[i]) ? 1 : 0;
  }
  return out;
}

RiskCostMap ground_truth_cost_map(const LabelMap& truth, const CostTable& table) {
  RiskCostMap out;
  out.costs = ScalarMap(truth.height(), truth.width());
  out.blocked.assign(out.costs.size(), 0);
  out.lambda = 0.0;
  out.provenance = {"ground-truth", 0, 0};
  for (std::size_t i = 0; i < out.costs.size(); ++i) {
    const ClassId id = truth.labels.data()[i];
    out.costs.data()[i] = cost_of(table, id);
    out.blocked[i] = table.is_impassable(id) ? 1 : 0;
  }
  return out;
}

std::string risk_sidecar_json(const RiskCostMap& map) {
  nlohmann::json j;
  j["lambda"] = map.lambda;
  j["source"] = map.provenance.source;
  j["samples"] = map.provenance.samples;
  j["seed"] = map.provenance.seed;
  j["height"] = map.height();
  j["width"] = map.width();
  return j.dump(2) + "\n";
}

void write_risk_cost_map(const RiskCostMap& map, const std::filesystem::path& stem) {
  auto scl = stem;
  scl += ".scl";
  auto json = stem;
  json += ".json";
  write_scalar_map(map.costs, scl);
  detail::write_file(json, risk_sidecar_json(map));
}

}  // namespace riskplan
