#pragma once

// Scenario configuration: strict JSON schema, defaults from the reference-design
// baseline, resolution of derived parameters, and a content digest.
//
// Derived parameters are written as `null` in the defaults and resolved on
// load: the pair coefficient (from the target detected signal rate), the
// Raman coefficients (from their noise fractions), p_pi (from the calibration
// point), the ring reference resonance (pump channel) and the crystal
// temperature (phase-matching temperature of the design wavelengths).

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "qdemux/montecarlo.hpp"

namespace qdemux {

/// The baseline document, including nulls for derived parameters.
nlohmann::json default_config_json();

/// Throws ValidationError naming the offending field for unknown keys,
/// wrong types, or out-of-range values.
ScenarioConfig config_from_json(const nlohmann::json& user);

/// An empty or missing-keys file yields the reference-design defaults.
ScenarioConfig load_config(const std::filesystem::path& path);

ScenarioConfig reference_config();

/// Fully resolved document (no nulls). Loading it reproduces the config.
nlohmann::json to_json(const ScenarioConfig& cfg);

/// SHA-256 over the canonical (key-sorted) resolved document.
std::string config_digest(const ScenarioConfig& cfg);

/// Quoted reference figures kept for comparison reports.
struct QuotedFigures {
  double sfg_module_db = 8.59;
  double idler_overall_db = 13.99;
  double signal_overall_db = 15.59;
  double qpm_temperature_c = 29.5;
  double fiber_period_k = 0.585;
  double ktp_period_k = 1.16;
  double ktp_quoted_length_mm = 163.48;
};

}  // namespace qdemux
