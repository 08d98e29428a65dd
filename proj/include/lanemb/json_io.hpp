// JSON (de)serialization for configs and reports.

#pragma once

#include <json.hpp>

#include "lanemb/cluster.hpp"
#include "lanemb/losses.hpp"
#include "lanemb/metrics.hpp"
#include "lanemb/optimize.hpp"
#include "lanemb/synth.hpp"

namespace lanemb {

void to_json(nlohmann::json& j, const LossConfig& c);
void from_json(const nlohmann::json& j, LossConfig& c);

void to_json(nlohmann::json& j, const LossReport& r);

void to_json(nlohmann::json& j, const FitConfig& c);
void from_json(const nlohmann::json& j, FitConfig& c);

void to_json(nlohmann::json& j, const SynthConfig& c);
void from_json(const nlohmann::json& j, SynthConfig& c);

void to_json(nlohmann::json& j, const ClusterParams& p);
void from_json(const nlohmann::json& j, ClusterParams& p);

void to_json(nlohmann::json& j, const DbscanParams& p);
void from_json(const nlohmann::json& j, DbscanParams& p);

void to_json(nlohmann::json& j, const EvalParams& p);
void from_json(const nlohmann::json& j, EvalParams& p);

void to_json(nlohmann::json& j, const TuSimpleResult& r);
void to_json(nlohmann::json& j, const QualityResult& r);
void to_json(nlohmann::json& j, const TimingReport& r);

// Scene sidecar: cfg echo, curve coefficients, centerline samples.
nlohmann::json scene_sidecar(const LaneScene& scene);
std::vector<LanePoints> lanes_from_sidecar(const nlohmann::json& j);

}  // namespace lanemb
