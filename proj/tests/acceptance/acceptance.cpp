// End-to-end acceptance checks. One PASS/FAIL line per criterion; the exit
// status is nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "qdemux/analysis.hpp"
#include "qdemux/channel_plan.hpp"
#include "qdemux/cli.hpp"
#include "qdemux/config.hpp"
#include "qdemux/constants.hpp"
#include "qdemux/franson.hpp"
#include "qdemux/scenarios.hpp"
#include "qdemux/sfg_converter.hpp"

using namespace qdemux;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int failures = 0;

void report(int id, const std::string& name, bool ok, const std::string& detail) {
  if (!ok) ++failures;
  std::cout << fmt::format("{} {:>2} {}: {}", ok ? "PASS" : "FAIL", id, name, detail) << std::endl;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int invoke(const std::vector<std::string>& args, std::string& out) {
  std::string err;
  const int code = cli::run_captured(args, out, err);
  if (code != 0) std::cerr << err;
  return code;
}

// ---- 1 ----
void channel_plan_check() {
  struct Row {
    int channel;
    double nm;
  };
  // Published grid wavelengths for the pump and the three pairs.
  const std::vector<Row> table{{20, 1561.42}, {22, 1559.79}, {24, 1558.17}, {34, 1550.12},
                               {44, 1542.14}, {46, 1540.56}, {48, 1538.98}};
  const auto t0 = Clock::now();
  std::string out;
  const int code = invoke({"plan"}, out);
  const ScenarioConfig cfg = reference_config();
  const auto plan = cfg.plan();
  const double elapsed = seconds_since(t0);

  std::vector<int> planned{plan.front().pump.index};
  for (const auto& p : plan) {
    planned.push_back(p.signal.index);
    planned.push_back(p.idler.index);
  }
  bool ok = code == 0 && planned.size() == table.size();
  double worst = 0.0;
  for (const auto& r : table) {
    ok = ok && std::find(planned.begin(), planned.end(), r.channel) != planned.end();
    const double nm = channel_wavelength_nm(r.channel);
    worst = std::max(worst, std::abs(nm - r.nm));
    ok = ok && out.find(fmt::format("{:.2f}", nm)) != std::string::npos;
  }
  ok = ok && worst <= 0.005 && elapsed < 1.0;
  report(1, "channel plan wavelengths", ok,
         fmt::format("max |error| {:.4f} nm over 7 channels, {:.3f} s", worst, elapsed));
}

// ---- 2 ----
void loss_check() {
  const ScenarioConfig cfg = reference_config();
  const double sfg = ledger_total(cfg.ledgers.signal.group("sfg-module")).total_db;
  const double idler = ledger_total(cfg.ledgers.idler).total_db;
  const double signal = ledger_total(cfg.ledgers.signal.without(LossKind::detector)).total_db;
  const double full = ledger_total(cfg.ledgers.signal).total_db;
  std::string out;
  const int code = invoke({"loss"}, out);
  const bool printed = out.find(fmt::format("{:.2f}", full)) != std::string::npos &&
                       out.find("note:") != std::string::npos;
  const bool ok = code == 0 && std::abs(sfg - 8.59) <= 0.01 && std::abs(idler - 13.99) <= 0.01 &&
                  std::abs(signal - 15.59) <= 0.01 && std::abs(full - 18.59) <= 0.01 && printed;
  report(2, "loss ledger totals", ok,
         fmt::format("SFG {:.2f}, idler {:.2f}, signal {:.2f}, with detector {:.2f} dB (printed: {})", sfg, idler,
                     signal, full, printed ? "yes" : "no"));
}

// ---- 3 ----
void efficiency_check() {
  const ScenarioConfig cfg = reference_config();
  const double eta = quantum_efficiency(cfg.sfg.conversion, 550.0);
  double worst = 0.0;
  const double sfg_nm = sfg_wavelength_nm(795.0, 1560.0);
  for (double q = 0.0; q <= 1.0; q += 0.01) {
    const double back = quantum_from_power_efficiency(power_efficiency(q, 1560.0, sfg_nm), 1560.0, sfg_nm);
    worst = std::max(worst, std::abs(back - q));
  }
  const bool ok = std::abs(eta - 0.380) <= 0.001 && worst <= 1e-12;
  report(3, "conversion efficiency calibration", ok,
         fmt::format("eta_q(550 mW) = {:.4f}, round-trip error {:.1e}", eta, worst));
}

// ---- 4 ----
void tuning_period_check() {
  const ScenarioConfig cfg = reference_config();
  const double fiber = temperature_tuning_period(cfg.franson.idler_umi);
  const double ktp = temperature_tuning_period(cfg.franson.signal_umi);
  UmiSpec quoted_ktp = cfg.franson.signal_umi;
  quoted_ktp.medium.tunable_length_mm = 163.48;
  const TuningPeriodCheck bad = check_tuning_period(quoted_ktp, 1.16, 0.01);
  const TuningPeriodCheck good = check_tuning_period(cfg.franson.signal_umi, 1.16, 0.01);
  const bool ok = std::abs(fiber - 0.585) <= 0.001 && std::abs(ktp - 1.16) <= 0.01 &&
                  std::abs(cfg.franson.signal_umi.medium.tunable_length_mm - 14.1) < 0.05 && good.consistent &&
                  !bad.consistent;
  report(4, "interferometer tuning periods", ok,
         fmt::format("fiber {:.4f} K, KTP {:.4f} K at {:.2f} mm; 163.48 mm gives {:.4f} K (flagged: {})", fiber, ktp,
                     cfg.franson.signal_umi.medium.tunable_length_mm, bad.computed_k, bad.consistent ? "no" : "yes"));
}

// ---- 5 ----
void qpm_check() {
  const ScenarioConfig cfg = reference_config();
  const auto t = solve_qpm_temperature(cfg.sfg.crystal, 795.0, 1560.0);
  const auto pumps = solve_channel_pumps(cfg);
  bool all_pumps = pumps.size() == 3;
  std::string pump_text;
  for (const auto& p : pumps) {
    all_pumps = all_pumps && p.pump_nm && *p.pump_nm >= 790.0 && *p.pump_nm <= 800.0;
    pump_text += fmt::format(" {} {}", p.label, p.pump_nm ? fmt::format("{:.4f}", *p.pump_nm) : "none");
  }
  const bool temp_ok = t && std::abs(*t - 29.5) <= 10.0;
  report(5, "phase-matching temperature and channel pumps", temp_ok && all_pumps,
         fmt::format("T_qpm = {} C (target 29.5 +/- 10), pumps in 790-800 nm:{}",
                     t ? fmt::format("{:.2f}", *t) : "none", pump_text));
}

// ---- 6 ----
void franson_check() {
  double worst_sum = 0.0;
  for (double v : {0.0, 0.5, 0.9622, 1.0}) {
    for (int k = 0; k < 64; ++k) {
      const auto d = outcome_distribution(FringeModel{v, kTwoPi * k / 64.0, 0.0, 0.0});
      worst_sum = std::max(worst_sum, std::abs(d.center + d.early + d.late + d.lost - 1.0));
    }
  }
  // Composite Simpson over one period.
  auto simpson = [](auto f) {
    const int n = 2000;
    const double h = kTwoPi / n;
    double s = f(0.0) + f(kTwoPi);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(i * h);
    return s * h / 3.0;
  };
  const double v0 = 0.9622;
  const double center = simpson([&](double p) { return outcome_distribution(FringeModel{v0, p, 0.0, 0.0}).center; });
  const double all = simpson([&](double p) {
    const auto d = outcome_distribution(FringeModel{v0, p, 0.0, 0.0});
    return d.center + d.early + d.late;
  });
  const double fraction_err = std::abs(center / all - 0.5);

  std::vector<double> ph, c, var;
  for (int i = 0; i < 8; ++i) {
    const double p = kTwoPi * i / 8.0;
    ph.push_back(p);
    c.push_back(5000.0 * (1.0 + v0 * std::cos(p + 0.4)));
    var.push_back(c.back());
  }
  const double fit_err = std::abs(fit_sinusoid(ph, c, var).visibility - v0);
  const bool ok = worst_sum <= 1e-12 && fraction_err <= 1e-9 && fit_err <= 1e-6;
  report(6, "interferometer outcome model", ok,
         fmt::format("sum error {:.1e}, central fraction error {:.1e}, fitted V error {:.1e}", worst_sum, fraction_err,
                     fit_err));
}

// ---- 7 ----
void replica_check() {
  const ScenarioConfig cfg = reference_config();
  const auto t0 = Clock::now();
  bool ok = true;
  std::string detail;
  for (const auto& pair : cfg.plan()) {
    const FringeScanResult r = run_fringe_scan(cfg, pair.label(), SignalPath::up_converted, 60.0);
    const auto& v = r.visibility;
    ok = ok && v.raw.value >= 0.89 && v.net.value >= v.raw.value && v.bell_violating;
    detail += fmt::format("{} raw {:.2f}% net {:.2f}%{}; ", pair.label(), 100 * v.raw.value, 100 * v.net.value,
                          v.bell_violating ? " Bell" : "");
  }
  const double elapsed = seconds_since(t0);
  ok = ok && elapsed < 120.0;
  report(7, "end-to-end fringe visibilities", ok, detail + fmt::format("{:.1f} s", elapsed));
}

// ---- 8 ----
void car_check() {
  const ScenarioConfig cfg = reference_config();
  const CarStudy s = run_car_study(cfg, true);
  bool ok = s.before.unique_interior_max && s.after.unique_interior_max && s.before.argmax_uw && s.after.argmax_uw &&
            *s.after.argmax_uw > *s.before.argmax_uw && s.mc.size() == 5;
  std::string devs;
  for (const auto& p : s.mc) {
    ok = ok && std::abs(p.deviation_sigma) <= 2.0;
    devs += fmt::format(" {:+.2f}", p.deviation_sigma);
  }
  report(8, "CAR curve shape and simulation agreement", ok,
         fmt::format("argmax {} -> {} uW, MC deviations (sigma):{}",
                     s.before.argmax_uw ? fmt::format("{:.0f}", *s.before.argmax_uw) : "none",
                     s.after.argmax_uw ? fmt::format("{:.0f}", *s.after.argmax_uw) : "none", devs));
}

// ---- 9 ----
void demux_check() {
  const ScenarioConfig cfg = reference_config();
  const auto m = crosstalk_matrix(cfg, cfg.duration_s);
  bool ok = m.size() == 9;
  double worst_mismatch = 0.0;
  double min_ratio = 1e300;
  for (const auto& e : m) {
    const double bg = e.background;
    const bool matched = e.target.substr(1) == e.idler.substr(1);
    if (matched) {
      const double ratio = static_cast<double>(e.center) / std::max(bg, 1.0 / std::max(e.background_windows, 1.0));
      min_ratio = std::min(min_ratio, ratio);
      ok = ok && ratio >= 10.0;
    } else {
      // Poisson spread of the window plus that of the background estimate.
      const double sigma = std::sqrt(std::max(bg, 1.0) + bg / std::max(e.background_windows, 1.0));
      const double z = (static_cast<double>(e.center) - bg) / sigma;
      worst_mismatch = std::max(worst_mismatch, std::abs(z));
      ok = ok && std::abs(z) <= 3.0;
    }
  }
  report(9, "pump-switched channel selectivity", ok,
         fmt::format("matched/accidental >= {:.0f}, worst mismatched deviation {:.2f} sigma", min_ratio,
                     worst_mismatch));
}

// ---- 10 ----
void determinism_check() {
  const fs::path root = fs::temp_directory_path() / "qdemux_acceptance";
  fs::remove_all(root);
  const fs::path a = root / "a";
  const fs::path b = root / "b";
  std::string out;
  const std::vector<std::string> base{"fringe", "--pair", "S1", "--duration", "10", "--emit-tags"};
  auto args_a = base;
  args_a.insert(args_a.end(), {"--out", a.string()});
  auto args_b = base;
  args_b.insert(args_b.end(), {"--out", b.string()});
  bool ok = invoke(args_a, out) == 0 && invoke(args_b, out) == 0;

  std::size_t compared = 0;
  if (ok) {
    const auto manifest = nlohmann::json::parse(slurp(a / "manifest.json"));
    for (const auto& name : manifest["outputs"]) {
      const std::string n = name.get<std::string>();
      ok = ok && slurp(a / n) == slurp(b / n);
      ++compared;
    }
  }

  std::vector<std::string> analyze{"analyze"};
  if (fs::exists(a / "tags")) {
    for (const auto& e : fs::directory_iterator(a / "tags")) {
      if (e.path().extension() == ".csv") analyze.push_back(e.path().string());
    }
  }
  std::sort(analyze.begin() + 1, analyze.end());
  std::string analyzed;
  ok = ok && analyze.size() == 9 && invoke(analyze, analyzed) == 0;

  const ScenarioConfig cfg = reference_config();
  const FringeScanResult mem = run_fringe_scan(cfg, "S1", SignalPath::up_converted, 10.0);
  const std::string expected =
      "visibility: raw " + format_percent(mem.visibility.raw) + "  net " + format_percent(mem.visibility.net);
  const bool closure = analyzed.find(expected) != std::string::npos;
  ok = ok && closure;
  report(10, "determinism and file round trip", ok,
         fmt::format("{} outputs identical across reruns, file analysis {} in-memory ({})", compared,
                     closure ? "matches" : "differs from", expected.substr(12)));
}

}  // namespace

int main() {
  const std::vector<void (*)()> checks{channel_plan_check, loss_check,    efficiency_check, tuning_period_check,
                                       qpm_check,          franson_check, replica_check,    car_check,
                                       demux_check,        determinism_check};
  for (std::size_t i = 0; i < checks.size(); ++i) {
    try {
      checks[i]();
    } catch (const std::exception& e) {
      report(static_cast<int>(i + 1), "exception", false, e.what());
    }
  }
  std::cout << fmt::format("{} of {} criteria passed", checks.size() - failures, checks.size()) << std::endl;
  return failures == 0 ? 0 : 1;
}
