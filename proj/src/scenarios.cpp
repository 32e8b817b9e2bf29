#include "qdemux/scenarios.hpp"

#include <cmath>
#include <limits>

#include <fmt/core.h>

#include "qdemux/errors.hpp"
#include "qdemux/histogram.hpp"
#include "qdemux/seeding.hpp"

namespace qdemux {

unsigned worker_count() {
  const unsigned hw = std::thread::hardware_concurrency();
  return std::clamp(hw, 1u, 8u);
}

std::vector<RingRow> ring_sweep(const RingSpectrumModel& ring, double half_span_ghz, double step_ghz) {
  if (!(half_span_ghz > 0.0 && step_ghz > 0.0)) throw ValidationError("ring", "span and step must be positive");
  ring.validate();
  const double centre = ring.nearest_resonance_thz(ring.reference_resonance_thz) * 1e3;
  const long n = std::lround(half_span_ghz / step_ghz);
  std::vector<RingRow> rows;
  rows.reserve(static_cast<std::size_t>(2 * n + 1));
  for (long i = -n; i <= n; ++i) {
    const double f_ghz = centre + static_cast<double>(i) * step_ghz;
    rows.push_back({f_ghz, transmission(ring, f_ghz * 1e-3)});
  }
  return rows;
}

std::vector<QpmChannelSolution> solve_channel_pumps(const ScenarioConfig& cfg) {
  std::vector<QpmChannelSolution> out;
  for (const auto& pair : cfg.plan()) {
    QpmChannelSolution s;
    s.label = pair.signal_label();
    s.channel = pair.signal.index;
    s.signal_nm = pair.signal.center_wavelength_nm();
    try {
      const double pump = solve_pump_wavelength(cfg.sfg.crystal, pair.signal, cfg.sfg.window);
      s.pump_nm = pump;
      s.sfg_nm = sfg_wavelength_nm(pump, s.signal_nm);
      s.delta_k = phase_mismatch(cfg.sfg.crystal, pump, s.signal_nm);
    } catch (const DomainError& e) {
      s.error = e.what();
    }
    out.push_back(s);
  }
  return out;
}

QpmCurve qpm_pump_curve(const ScenarioConfig& cfg, double step_nm) {
  if (!(step_nm > 0.0)) throw ValidationError("step", "must be positive");
  QpmCurve curve;
  const auto plan = cfg.plan();
  for (const auto& p : plan) curve.labels.push_back(p.signal_label());
  const long n = std::lround((cfg.sfg.window.max_nm - cfg.sfg.window.min_nm) / step_nm);
  for (long i = 0; i <= n; ++i) {
    const double pump = cfg.sfg.window.min_nm + static_cast<double>(i) * step_nm;
    std::vector<double> row;
    for (const auto& p : plan) row.push_back(relative_efficiency(cfg.sfg.crystal, pump, p.signal.center_wavelength_nm()));
    curve.x.push_back(pump);
    curve.values.push_back(std::move(row));
  }
  return curve;
}

QpmCurve qpm_temperature_curve(const ScenarioConfig& cfg, double min_c, double max_c, double step_c) {
  if (!(step_c > 0.0 && max_c > min_c)) throw ValidationError("temperature", "need min < max and a positive step");
  QpmCurve curve;
  curve.labels.push_back(fmt::format("{:.0f}+{:.0f}nm", cfg.sfg.design_pump_nm, cfg.sfg.design_signal_nm));
  const long n = std::lround((max_c - min_c) / step_c);
  CrystalSpec crystal = cfg.sfg.crystal;
  for (long i = 0; i <= n; ++i) {
    crystal.temperature_c = min_c + static_cast<double>(i) * step_c;
    curve.x.push_back(crystal.temperature_c);
    curve.values.push_back({relative_efficiency(crystal, cfg.sfg.design_pump_nm, cfg.sfg.design_signal_nm)});
  }
  return curve;
}

std::vector<SfgEffRow> sfg_efficiency_sweep(const ScenarioConfig& cfg, double max_mw, double step_mw) {
  if (!(max_mw > 0.0 && step_mw > 0.0)) throw ValidationError("sfg-eff", "range and step must be positive");
  const double signal = cfg.sfg.design_signal_nm;
  const double sfg = sfg_wavelength_nm(cfg.sfg.design_pump_nm, signal);
  const long n = std::lround(max_mw / step_mw);
  std::vector<SfgEffRow> rows;
  for (long i = 0; i <= n; ++i) {
    const double p = static_cast<double>(i) * step_mw;
    const double q = quantum_efficiency(cfg.sfg.conversion, p);
    rows.push_back({p, q, power_efficiency(q, signal, sfg)});
  }
  return rows;
}

// ---- CAR ----

CarModel car_model(const ScenarioConfig& cfg, SignalPath path) {
  const auto plan = cfg.plan();
  const ChannelPair& pair = cfg.pair_for_idler(plan);
  const double pump = path == SignalPath::up_converted ? target_pump_nm(cfg) : 0.0;
  CarModel m;
  m.source = channel_rates(cfg, pair);
  m.arm_a = signal_arm(cfg, path, pair, pump);
  m.side_a = Arm::signal;
  m.arm_b = idler_arm(cfg);
  m.side_b = Arm::idler;
  m.window_ns = cfg.coincidence.window_ns;
  const double jitter = std::hypot(m.arm_a.detector.jitter_sigma_ps, m.arm_b.detector.jitter_sigma_ps);
  m.capture = coincidence_window_capture(biphoton_coherence_time_ps(cfg.source.ring), jitter,
                                         static_cast<double>(cfg.coincidence.window_ps()));
  m.dead_time_correction = true;
  return m;
}

CarCurve analytic_car_curve(const ScenarioConfig& cfg, SignalPath path) {
  const CarModel model = car_model(cfg, path);
  CarCurve curve;
  const long n = std::lround((cfg.car.max_uw - cfg.car.min_uw) / cfg.car.step_uw);
  for (long i = 0; i <= n; ++i) {
    const double p = cfg.car.min_uw + static_cast<double>(i) * cfg.car.step_uw;
    curve.pump_uw.push_back(p);
    curve.car.push_back(car_curve(model, p).value_or(std::numeric_limits<double>::infinity()));
  }
  // Unique interior maximum: rises strictly to one peak, then falls strictly.
  const auto peak = std::max_element(curve.car.begin(), curve.car.end());
  const auto k = static_cast<std::size_t>(peak - curve.car.begin());
  bool unimodal = std::isfinite(*peak) && k > 0 && k + 1 < curve.car.size();
  for (std::size_t i = 1; unimodal && i < curve.car.size(); ++i) {
    unimodal = i <= k ? curve.car[i] > curve.car[i - 1] : curve.car[i] < curve.car[i - 1];
  }
  curve.unique_interior_max = unimodal;
  if (unimodal) curve.argmax_uw = curve.pump_uw[k];
  return curve;
}

std::vector<CarMcPoint> car_monte_carlo(const ScenarioConfig& cfg) {
  const CarModel model = car_model(cfg, SignalPath::up_converted);
  const auto& powers = cfg.car.mc_powers_uw;
  return parallel_map<CarMcPoint>(powers.size(), [&](std::size_t i) {
    ScenarioConfig run = cfg;
    run.signal_path = SignalPath::up_converted;
    run.franson.enabled = false;
    run.duration_s = cfg.car.mc_duration_s;
    run.source.chip_power_uw = powers[i];
    run.coincidence.histogram_span_ns = cfg.car.mc_span_ns;
    run.seed = derive_seed(cfg.seed, "car-point", fmt::format("{:.6f}", powers[i]));
    const RunResult r = generate_run(run);
    const auto h = histogram(r.signal, r.idler, run.coincidence);

    CarMcPoint pt;
    pt.pump_uw = powers[i];
    pt.measured = car_from_histogram(h, run.coincidence.window_ns, cfg.franson.signal_umi.delay_ns);
    pt.analytic_car = car_curve(model, powers[i]).value_or(0.0);
    pt.analytic_raw = pt.analytic_car + 1.0;
    pt.deviation_sigma = pt.measured.sigma > 0.0 ? (pt.measured.car - pt.analytic_raw) / pt.measured.sigma : 0.0;
    return pt;
  });
}

CarStudy run_car_study(const ScenarioConfig& cfg, bool with_mc) {
  CarStudy s;
  s.pump_nm = target_pump_nm(cfg);
  s.capture = car_model(cfg, SignalPath::direct).capture;
  s.before = analytic_car_curve(cfg, SignalPath::direct);
  s.after = analytic_car_curve(cfg, SignalPath::up_converted);
  if (with_mc) s.mc = car_monte_carlo(cfg);
  return s;
}

// ---- fringes ----

ScenarioConfig fringe_point_config(const ScenarioConfig& cfg, const std::string& pair_label, SignalPath path,
                                   double accumulation_s, std::size_t index) {
  const auto plan = cfg.plan();
  const ChannelPair& pair = find_pair(plan, pair_label);
  ScenarioConfig run = cfg;
  run.signal_path = path;
  run.idler_channel = pair.idler_label();
  run.sfg.target = pair.signal_label();
  run.duration_s = accumulation_s;
  const auto n = static_cast<double>(cfg.fringe.points);
  run.franson.fringe.signal_phase = cfg.franson.fringe.signal_phase + kTwoPi * static_cast<double>(index) / n;
  run.seed = derive_seed(cfg.seed, path == SignalPath::up_converted ? "fringe-after" : "fringe-before",
                         fmt::format("{}#{}", pair.label(), index));
  return run;
}

FringePoint fringe_point_from_streams(const EventStream& signal, const EventStream& idler,
                                      const CoincidenceConfig& coincidence, double side_delay_ns, double phase_rad) {
  const auto h = histogram(signal, idler, coincidence);
  const WindowCounts w = central_window_counts(h, coincidence.window_ns, side_delay_ns);
  FringePoint p;
  p.phase_rad = phase_rad;
  p.center_counts = w.center;
  p.background_counts = w.far_background();
  p.accumulation_s = signal.duration_s;
  return p;
}

FringeScanResult run_fringe_scan(const ScenarioConfig& cfg, const std::string& pair_label, SignalPath path,
                                 double accumulation_s, bool keep_runs) {
  const auto n = static_cast<std::size_t>(cfg.fringe.points);
  struct PointRun {
    FringePoint point;
    RunResult run;
  };
  auto points = parallel_map<PointRun>(n, [&](std::size_t i) {
    const ScenarioConfig run = fringe_point_config(cfg, pair_label, path, accumulation_s, i);
    PointRun out;
    out.run = generate_run(run);
    const double phase = run.franson.fringe.signal_phase - cfg.franson.fringe.signal_phase;
    out.point = fringe_point_from_streams(out.run.signal, out.run.idler, run.coincidence,
                                          run.franson.signal_umi.delay_ns, phase);
    if (!keep_runs) out.run = RunResult{};
    return out;
  });

  FringeScanResult result;
  result.pair_label = find_pair(cfg.plan(), pair_label).label();
  result.path = path;
  result.accumulation_s = accumulation_s;
  for (auto& p : points) {
    result.scan.points.push_back(p.point);
    if (keep_runs) result.runs.push_back(std::move(p.run));
  }
  result.visibility = fit_visibility(result.scan);

  const UmiSpec& idler = cfg.franson.idler_umi;
  const double period = temperature_tuning_period(idler);
  for (const auto& p : result.scan.points) {
    FringeRow row;
    row.phase_rad = p.phase_rad;
    row.temperature_k = idler.reference_temperature_k + p.phase_rad / kTwoPi * period;
    row.coincidences = p.center_counts;
    row.background = p.background_counts;
    row.fitted = result.visibility.fit_amplitude *
                 (1.0 + result.visibility.raw.value * std::cos(p.phase_rad + result.visibility.fit_phase_offset));
    result.rows.push_back(row);
  }
  return result;
}

// ---- demultiplexing ----

std::vector<CrosstalkEntry> crosstalk_matrix(const ScenarioConfig& cfg, double duration_s) {
  const auto plan = cfg.plan();
  const std::size_t n = plan.size();
  return parallel_map<CrosstalkEntry>(n * n, [&](std::size_t k) {
    const ChannelPair& target = plan[k / n];
    const ChannelPair& idler = plan[k % n];
    ScenarioConfig run = cfg;
    run.signal_path = SignalPath::up_converted;
    run.sfg.target = target.signal_label();
    run.idler_channel = idler.idler_label();
    run.duration_s = duration_s;
    run.seed = derive_seed(cfg.seed, "crosstalk", target.signal_label() + "/" + idler.idler_label());
    const RunResult r = generate_run(run);
    const auto h = histogram(r.signal, r.idler, run.coincidence);
    const WindowCounts w = central_window_counts(h, run.coincidence.window_ns, run.franson.signal_umi.delay_ns);

    CrosstalkEntry e;
    e.target = target.signal_label();
    e.idler = idler.idler_label();
    e.center = w.center;
    e.background = w.far_background();
    e.background_raw = w.background_raw;
    e.background_windows = w.background_windows;
    const double pump = r.pump_nm;
    e.predicted_suppression_db =
        -10.0 * std::log10(std::max(relative_efficiency(run.sfg.crystal, pump, idler.signal.center_wavelength_nm()),
                                    1e-300));
    return e;
  });
}

DemuxResult run_demux(const ScenarioConfig& cfg, bool with_fringes, bool keep_runs) {
  DemuxResult d;
  const auto plan = cfg.plan();
  for (const auto& p : plan) d.labels.push_back(p.label());
  d.crosstalk = crosstalk_matrix(cfg, cfg.duration_s);
  if (!with_fringes) return d;
  for (const auto& p : plan) {
    d.scans_before.push_back(
        run_fringe_scan(cfg, p.label(), SignalPath::direct, cfg.fringe.accumulation_before_s, keep_runs));
    d.scans_after.push_back(
        run_fringe_scan(cfg, p.label(), SignalPath::up_converted, cfg.fringe.accumulation_after_s, keep_runs));
    ReportRow row;
    row.label = fmt::format("{}-{}", p.signal_label(), p.idler_label());
    row.before = d.scans_before.back().visibility;
    row.after = d.scans_after.back().visibility;
    d.report.push_back(row);
  }
  return d;
}

}  // namespace qdemux
