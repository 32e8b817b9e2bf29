#pragma once

// Scenario description and end-to-end timestamp generation:
// ring source -> DWDM split -> (SFG arm | direct arm) / idler arm -> UMIs -> detectors.

#include <cstdint>
#include <string>
#include <vector>

#include "qdemux/channel_plan.hpp"
#include "qdemux/detection.hpp"
#include "qdemux/event_stream.hpp"
#include "qdemux/franson.hpp"
#include "qdemux/ring_source.hpp"
#include "qdemux/sfg_converter.hpp"

namespace qdemux {

enum class SignalPath {
  up_converted,  // through the SFG module to the Si detector
  direct,        // straight to a second InGaAs detector (reference, before conversion)
};

struct SourceSettings {
  RingSpectrumModel ring;
  SfwmRates rates;
  double chip_power_uw = 400.0;
  // Calibration targets the rate coefficients were resolved from.
  double target_detected_signal_rate = 2000.0;
  double raman_fraction_signal = 0.1;
  double raman_fraction_idler = 0.1;
};

// Bow-tie cavity constants; recorded, not modelled.
struct CavityConstants {
  double length_mm = 547.0;
  double input_coupler_transmittance = 0.03;
  double mirror_curvature_mm = 80.0;
  double beam_waist_um = 60.0;
};

struct SfgSettings {
  CrystalSpec crystal;
  ConversionCurve conversion;
  PumpTuningWindow window;
  double pump_power_mw = 400.0;
  std::string target = "S2";  // signal channel the pump is tuned to
  double design_pump_nm = 795.0;
  double design_signal_nm = 1560.0;
  double calibration_power_mw = 550.0;
  double calibration_efficiency = 0.38;
  CavityConstants cavity;
};

struct FransonSettings {
  bool enabled = true;
  FringeModel fringe;
  double phase_jitter_rad = 0.0;  // Gaussian, per pair
  UmiSpec signal_umi;
  UmiSpec idler_umi;
  double signal_quoted_period_k = 1.16;
  double idler_quoted_period_k = 0.585;
};

struct LedgerSet {
  LossLedger signal;         // through the SFG module
  LossLedger idler;
  LossLedger signal_direct;  // reference arm without conversion
};

struct DetectorSet {
  DetectorSpec apd1;  // InGaAs, idler
  DetectorSpec apd2;  // Si, up-converted signal
  DetectorSpec apd3;  // InGaAs, direct signal
};

struct FringeSweep {
  int points = 8;
  double accumulation_before_s = 30.0;
  double accumulation_after_s = 300.0;
};

struct CarSweep {
  double min_uw = 10.0;
  double max_uw = 2000.0;
  double step_uw = 10.0;
  std::vector<double> mc_powers_uw{100.0, 200.0, 300.0, 400.0, 600.0};
  double mc_duration_s = 120.0;
  double mc_span_ns = 200.0;
};

struct ScenarioConfig {
  std::string name = "reference-design";
  std::uint64_t seed = 1;
  double duration_s = 60.0;

  int pump_index = 34;
  std::vector<int> pair_offsets{10, 12, 14};

  SourceSettings source;
  SfgSettings sfg;
  FransonSettings franson;
  LedgerSet ledgers;
  DetectorSet detectors;
  CoincidenceConfig coincidence;

  SignalPath signal_path = SignalPath::up_converted;
  std::string idler_channel = "I2";

  FringeSweep fringe;
  CarSweep car;

  std::vector<ChannelPair> plan() const;
  const ChannelPair& pair_for_idler(const std::vector<ChannelPair>& plan) const;
  void validate() const;
};

/// Finds a pair by its pair, signal or idler label ("S2-I2", "S2", "I2").
const ChannelPair& find_pair(const std::vector<ChannelPair>& plan, const std::string& label);

/// Pump wavelength solved for the configured SFG target.
double target_pump_nm(const ScenarioConfig& cfg);

/// eta_q(pump power) times the sinc^2 acceptance of `signal` at `pump_nm`.
double conversion_survival(const ScenarioConfig& cfg, const ItuChannel& signal, double pump_nm);

/// Pair-rate law with the ring enhancement for this channel pair (pump and
/// both photons weighted by their Lorentzian detuning from the comb).
SfwmRates channel_rates(const ScenarioConfig& cfg, const ChannelPair& pair);

/// Arm models for the analytic CAR: the signal arm either through the SFG
/// (conversion entry replaced by the model at `pump_nm`) or direct.
ArmModel signal_arm(const ScenarioConfig& cfg, SignalPath path, const ChannelPair& pair, double pump_nm);
ArmModel idler_arm(const ScenarioConfig& cfg);

struct RunResult {
  EventStream signal;
  EventStream idler;
  double pump_nm = 0.0;
  std::uint64_t pairs_generated = 0;
  std::uint64_t pairs_both_arrived = 0;  // both photons reached their detectors' inputs
};

/// One seeded run. Throws DomainError when the target channel cannot be
/// phase-matched inside the pump tuning window.
RunResult generate_run(const ScenarioConfig& cfg);

}  // namespace qdemux
