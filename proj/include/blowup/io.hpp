#pragma once

#include <filesystem>
#include <optional>
#include <ostream>

#include <json.hpp>

#include "blowup/experiments.hpp"
#include "blowup/flow.hpp"
#include "blowup/integrator.hpp"

namespace blowup::io {

using nlohmann::json;

[[nodiscard]] json to_json(const ModelParams& p);
[[nodiscard]] json to_json(const ConeParams& c);
[[nodiscard]] json to_json(const IntegratorOptions& o);
[[nodiscard]] json to_json(const EventTimes& e);
[[nodiscard]] json to_json(const EventFlags& f);
[[nodiscard]] json to_json(const TrappingReport& r);
[[nodiscard]] json to_json(const SegmentClassification& s);
[[nodiscard]] json to_json(const BisectionResult& b);
[[nodiscard]] json to_json(const ExperimentConfig& c);
[[nodiscard]] json to_json(const MonteCarloReport& r, bool include_runtime = true);
[[nodiscard]] json to_json(const FlowCheckReport& r);
[[nodiscard]] json to_json(const LongrunSummary& s);

/// Outcome, event times and run metadata for a trajectory (the CSV holds the
/// samples).
[[nodiscard]] json trajectory_sidecar(const TrajectoryRecord& rec, const IntegratorOptions& opts,
                                      std::optional<std::uint64_t> seed);

/// `t,x,y` rows.
void write_trajectory_csv(std::ostream& out, const TrajectoryRecord& rec);
/// `y,tag,exit_time,outcome` rows.
void write_scan_csv(std::ostream& out, const SegmentClassification& s);
/// `x0,replicate,seed,strict,lenient,b1,b2,blowup_time` rows.
void write_montecarlo_csv(std::ostream& out, const MonteCarloReport& r);
/// `t,x,y` rows of the thinned samples.
void write_samples_csv(std::ostream& out, const LongrunSummary& s);

void write_json(const std::filesystem::path& file, const json& j);

}  // namespace blowup::io
