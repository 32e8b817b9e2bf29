#pragma once

// Canned scenarios behind the CLI: model sweeps, fringe scans, the CAR study
// and the three-channel demultiplexing run. Everything here is a pure
// function of the configuration and its seed.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "qdemux/analysis.hpp"
#include "qdemux/montecarlo.hpp"

namespace qdemux {

/// Number of workers used by parallel_map; at least 1.
unsigned worker_count();

/// Evaluates fn(0..n-1) on a small thread pool. Results come back in index
/// order whatever the completion order; the first exception is rethrown.
template <typename R>
std::vector<R> parallel_map(std::size_t n, const std::function<R(std::size_t)>& fn);

// ---- model sweeps ----

struct RingRow {
  double frequency_ghz = 0.0;
  double transmission = 0.0;
};
/// Transmission over +/- half_span_ghz around the reference resonance.
std::vector<RingRow> ring_sweep(const RingSpectrumModel& ring, double half_span_ghz, double step_ghz);

struct QpmChannelSolution {
  std::string label;  // "S1"
  int channel = 0;
  double signal_nm = 0.0;
  std::optional<double> pump_nm;  // nullopt: unaddressable
  double sfg_nm = 0.0;
  double delta_k = 0.0;  // rad/m at the solution
  std::string error;
};
std::vector<QpmChannelSolution> solve_channel_pumps(const ScenarioConfig& cfg);

struct QpmCurve {
  std::vector<std::string> labels;          // one column per signal channel
  std::vector<double> x;                    // pump_nm or temperature_C
  std::vector<std::vector<double>> values;  // values[row][column]
};
/// Relative efficiency of every signal channel against pump wavelength.
QpmCurve qpm_pump_curve(const ScenarioConfig& cfg, double step_nm);
/// Relative efficiency of the design wavelengths against crystal temperature.
QpmCurve qpm_temperature_curve(const ScenarioConfig& cfg, double min_c, double max_c, double step_c);

struct SfgEffRow {
  double pump_mw = 0.0;
  double eta_quantum = 0.0;
  double eta_power = 0.0;
};
std::vector<SfgEffRow> sfg_efficiency_sweep(const ScenarioConfig& cfg, double max_mw, double step_mw);

// ---- CAR ----

struct CarCurve {
  std::vector<double> pump_uw;
  std::vector<double> car;
  std::optional<double> argmax_uw;
  bool unique_interior_max = false;
};

struct CarMcPoint {
  double pump_uw = 0.0;
  CarEstimate measured;   // raw center / background, includes the accidental floor
  double analytic_car = 0.0;
  double analytic_raw = 0.0;  // analytic_car + 1
  double deviation_sigma = 0.0;
};

struct CarStudy {
  double pump_nm = 0.0;
  double capture = 1.0;
  CarCurve before;  // direct InGaAs reference arm
  CarCurve after;   // through the SFG module
  std::vector<CarMcPoint> mc;
};

/// Analytic model for one signal path, with window capture and dead-time
/// correction as used by the comparison against simulation.
CarModel car_model(const ScenarioConfig& cfg, SignalPath path);
CarCurve analytic_car_curve(const ScenarioConfig& cfg, SignalPath path);
/// Simulated CAR at each configured power (interferometers bypassed).
std::vector<CarMcPoint> car_monte_carlo(const ScenarioConfig& cfg);
CarStudy run_car_study(const ScenarioConfig& cfg, bool with_mc);

// ---- fringes ----

struct FringeRow {
  double phase_rad = 0.0;
  double temperature_k = 0.0;  // idler UMI temperature giving the same phase
  std::uint64_t coincidences = 0;
  double background = 0.0;
  double fitted = 0.0;
};

struct FringeScanResult {
  std::string pair_label;
  SignalPath path = SignalPath::up_converted;
  double accumulation_s = 0.0;
  FringeScan scan;
  VisibilityResult visibility;
  std::vector<FringeRow> rows;
  std::vector<RunResult> runs;  // kept only when requested
};

/// Configuration of one fringe point: pump retuned to the pair's signal,
/// phase applied through the signal UMI, point seed derived from the master.
ScenarioConfig fringe_point_config(const ScenarioConfig& cfg, const std::string& pair_label, SignalPath path,
                                   double accumulation_s, std::size_t index);

/// Scan analysis shared by the in-memory pipeline and file ingestion.
FringePoint fringe_point_from_streams(const EventStream& signal, const EventStream& idler,
                                      const CoincidenceConfig& coincidence, double side_delay_ns, double phase_rad);

FringeScanResult run_fringe_scan(const ScenarioConfig& cfg, const std::string& pair_label, SignalPath path,
                                 double accumulation_s, bool keep_runs = false);

// ---- demultiplexing ----

struct CrosstalkEntry {
  std::string target;  // pump tuned to this signal channel
  std::string idler;
  std::uint64_t center = 0;
  double background = 0.0;  // per window
  std::uint64_t background_raw = 0;
  double background_windows = 0.0;
  double predicted_suppression_db = 0.0;  // acceptance oracle
};

struct DemuxResult {
  std::vector<std::string> labels;           // pair labels
  std::vector<CrosstalkEntry> crosstalk;     // row-major: target x idler
  std::vector<ReportRow> report;             // before / after visibilities
  std::vector<FringeScanResult> scans_before;
  std::vector<FringeScanResult> scans_after;
};

/// 3 x 3 coincidence matrix at zero phase: pump tuned to each signal channel
/// in turn, coincidences counted against every idler channel.
std::vector<CrosstalkEntry> crosstalk_matrix(const ScenarioConfig& cfg, double duration_s);

DemuxResult run_demux(const ScenarioConfig& cfg, bool with_fringes, bool keep_runs);

// ---- template implementation ----

template <typename R>
std::vector<R> parallel_map(std::size_t n, const std::function<R(std::size_t)>& fn) {
  std::vector<std::optional<R>> slots(n);
  const unsigned workers = std::min<std::size_t>(worker_count(), std::max<std::size_t>(n, 1));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) slots[i].emplace(fn(i));
  } else {
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            slots[i].emplace(fn(i));
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
    for (auto& t : pool) t.join();
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
  std::vector<R> out;
  out.reserve(n);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

}  // namespace qdemux
