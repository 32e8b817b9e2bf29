#include "qdemux/cli.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/core.h>
#include <nlohmann/json.hpp>

#include "qdemux/analysis.hpp"
#include "qdemux/config.hpp"
#include "qdemux/errors.hpp"
#include "qdemux/histogram.hpp"
#include "qdemux/scenarios.hpp"

namespace qdemux::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// ---- output plumbing ----

struct Column {
  std::string name;
  int precision = -1;  // < 0: integer or text, written as is
};

struct Table {
  std::vector<Column> columns;
  std::vector<std::vector<json>> rows;

  std::string csv() const {
    std::string out;
    for (std::size_t c = 0; c < columns.size(); ++c) out += (c ? "," : "") + columns[c].name;
    out += '\n';
    for (const auto& row : rows) {
      for (std::size_t c = 0; c < row.size(); ++c) {
        if (c) out += ',';
        const json& v = row[c];
        if (v.is_string()) {
          out += v.get<std::string>();
        } else if (v.is_boolean()) {
          out += v.get<bool>() ? "true" : "false";
        } else if (v.is_number_integer()) {
          out += v.dump();
        } else if (v.is_null()) {
          // empty cell
        } else {
          const int p = columns[c].precision < 0 ? 6 : columns[c].precision;
          out += fmt::format("{:.{}f}", v.get<double>(), p);
        }
      }
      out += '\n';
    }
    return out;
  }

  json to_json() const {
    json arr = json::array();
    for (const auto& row : rows) {
      json obj = json::object();
      for (std::size_t c = 0; c < row.size(); ++c) obj[columns[c].name] = row[c];
      arr.push_back(std::move(obj));
    }
    return arr;
  }
};

struct Artifact {
  std::string name;
  std::string content;
};

struct TagSet {
  std::string name;  // relative csv path
  std::vector<EventStream> streams;
  std::optional<double> phase_rad;
};

struct Outcome {
  std::vector<Artifact> files;
  std::vector<TagSet> tags;
  std::size_t primary = 0;
  std::string summary;  // printed instead of the primary artifact when --out is set
  bool summary_only = false;  // print the summary even without --out
};

struct Common {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::string format = "csv";
  std::optional<double> duration;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "Scenario configuration (JSON)");
  cmd->add_option("--out", c.out, "Output directory; writes files and manifest.json");
  cmd->add_option("--seed", c.seed, "Master seed override");
  cmd->add_option("--format", c.format, "Table format")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--duration", c.duration, "Simulated seconds (per run or per fringe point)")
      ->check(CLI::PositiveNumber);
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

Artifact table_artifact(const std::string& stem, const Table& t, const Common& c) {
  if (c.format == "json") return {stem + ".json", dump(t.to_json())};
  return {stem + ".csv", t.csv()};
}

ScenarioConfig load(const Common& c) {
  ScenarioConfig cfg = c.config.empty() ? reference_config() : load_config(c.config);
  if (c.seed) cfg.seed = *c.seed;
  if (c.duration) cfg.duration_s = *c.duration;
  cfg.validate();
  return cfg;
}

// ---- subcommands ----

Outcome cmd_plan(const Common& c, std::optional<int> pump, std::optional<std::vector<int>> offsets) {
  ScenarioConfig cfg = load(c);
  if (pump) cfg.pump_index = *pump;
  if (offsets) cfg.pair_offsets = *offsets;
  const auto plan = cfg.plan();
  Table t{{{"name", -1}, {"channel", -1}, {"wavelength_nm", 2}, {"frequency_THz", 2}}, {}};
  const ItuChannel pump_channel = ItuChannel::from_index(cfg.pump_index);
  t.rows.push_back({"Pump", pump_channel.name(), pump_channel.center_wavelength_nm(),
                    pump_channel.center_frequency_thz()});
  for (const auto& p : plan) {
    t.rows.push_back({p.signal_label(), p.signal.name(), p.signal.center_wavelength_nm(), p.signal.center_frequency_thz()});
    t.rows.push_back({p.idler_label(), p.idler.name(), p.idler.center_wavelength_nm(), p.idler.center_frequency_thz()});
  }
  Outcome o;
  o.files.push_back(table_artifact("plan", t, c));
  o.summary = o.files.front().content;
  return o;
}

Outcome cmd_ring(const Common& c, double half_span, double step) {
  const ScenarioConfig cfg = load(c);
  const auto& ring = cfg.source.ring;
  Table t{{{"frequency_GHz", 4}, {"transmission", 6}}, {}};
  for (const auto& r : ring_sweep(ring, half_span, step)) t.rows.push_back({r.frequency_ghz, r.transmission});
  Outcome o;
  o.files.push_back(table_artifact("ring_transmission", t, c));
  o.summary = fmt::format(
      "ring: FSR {:.1f} GHz, FWHM {:.1f} MHz, Q implied by FWHM {:.0f} (configured {:.0f}), {} points\n", ring.fsr_ghz,
      ring.fwhm_mhz, ring.implied_q(), ring.q_factor, t.rows.size());
  return o;
}

Outcome cmd_qpm(const Common& c, double step_nm, std::optional<double> t_min, std::optional<double> t_max,
                double t_step) {
  const ScenarioConfig cfg = load(c);
  const double t0 = cfg.sfg.crystal.temperature_c;
  const QuotedFigures quoted;

  const QpmCurve pump_curve = qpm_pump_curve(cfg, step_nm);
  Table tp{{{"pump_nm", 4}}, {}};
  for (const auto& l : pump_curve.labels) tp.columns.push_back({"efficiency_" + l, 6});
  for (std::size_t i = 0; i < pump_curve.x.size(); ++i) {
    std::vector<json> row{pump_curve.x[i]};
    for (double v : pump_curve.values[i]) row.emplace_back(v);
    tp.rows.push_back(std::move(row));
  }

  const QpmCurve temp_curve = qpm_temperature_curve(cfg, t_min.value_or(t0 - 20.0), t_max.value_or(t0 + 20.0), t_step);
  Table tt{{{"temperature_C", 3}, {"efficiency", 6}}, {}};
  for (std::size_t i = 0; i < temp_curve.x.size(); ++i) tt.rows.push_back({temp_curve.x[i], temp_curve.values[i][0]});

  json channels = json::array();
  std::string text = fmt::format("crystal {} at {:.2f} C, period {:.3f} um, length {:.1f} mm\n",
                                 cfg.sfg.crystal.sellmeier.name, t0, cfg.sfg.crystal.poling_period_um,
                                 cfg.sfg.crystal.length_mm);
  for (const auto& s : solve_channel_pumps(cfg)) {
    json j{{"label", s.label}, {"channel", fmt::format("C{}", s.channel)}, {"signal_nm", s.signal_nm}};
    if (s.pump_nm) {
      j["pump_nm"] = *s.pump_nm;
      j["sfg_nm"] = s.sfg_nm;
      j["delta_k_rad_per_m"] = s.delta_k;
      text += fmt::format("  {} C{} {:.2f} nm -> pump {:.4f} nm, SFG {:.2f} nm\n", s.label, s.channel, s.signal_nm,
                          *s.pump_nm, s.sfg_nm);
    } else {
      j["pump_nm"] = nullptr;
      j["error"] = s.error;
      text += fmt::format("  {} C{} {:.2f} nm -> {}\n", s.label, s.channel, s.signal_nm, s.error);
    }
    channels.push_back(std::move(j));
  }
  const auto solved =
      solve_qpm_temperature(cfg.sfg.crystal, cfg.sfg.design_pump_nm, cfg.sfg.design_signal_nm);
  json report{{"crystal_temperature_C", t0},
              {"sellmeier", cfg.sfg.crystal.sellmeier.name},
              {"sellmeier_citation", cfg.sfg.crystal.sellmeier.citation},
              {"design_qpm_temperature_C", solved ? json(*solved) : json(nullptr)},
              {"quoted_qpm_temperature_C", quoted.qpm_temperature_c},
              {"channels", channels}};
  text += fmt::format("design point {:.0f} + {:.0f} nm phase-matches at {} (quoted {:.1f} C)\n",
                      cfg.sfg.design_pump_nm, cfg.sfg.design_signal_nm,
                      solved ? fmt::format("{:.2f} C", *solved) : std::string("no temperature in range"),
                      quoted.qpm_temperature_c);

  Outcome o;
  o.files.push_back({"qpm_channels.json", dump(report)});
  o.files.push_back(table_artifact("qpm_pump_tuning", tp, c));
  o.files.push_back(table_artifact("qpm_temperature_tuning", tt, c));
  o.summary = text;
  return o;
}

Outcome cmd_sfg_eff(const Common& c, double max_mw, double step_mw) {
  const ScenarioConfig cfg = load(c);
  Table t{{{"pump_mW", 1}, {"eta_quantum", 6}, {"eta_power", 6}}, {}};
  for (const auto& r : sfg_efficiency_sweep(cfg, max_mw, step_mw)) t.rows.push_back({r.pump_mw, r.eta_quantum, r.eta_power});
  Outcome o;
  o.files.push_back(table_artifact("sfg_efficiency", t, c));
  o.summary = fmt::format("eta_device {:.3f}, p_pi {:.1f} mW; eta_quantum({:.0f} mW) = {:.4f}, at {:.0f} mW = {:.4f}\n",
                          cfg.sfg.conversion.eta_device, cfg.sfg.conversion.p_pi_mw, cfg.sfg.calibration_power_mw,
                          quantum_efficiency(cfg.sfg.conversion, cfg.sfg.calibration_power_mw), cfg.sfg.pump_power_mw,
                          quantum_efficiency(cfg.sfg.conversion, cfg.sfg.pump_power_mw));
  return o;
}

Table car_table(const CarCurve& curve) {
  Table t{{{"pump_uW", 1}, {"car", 4}}, {}};
  for (std::size_t i = 0; i < curve.pump_uw.size(); ++i) t.rows.push_back({curve.pump_uw[i], curve.car[i]});
  return t;
}

std::string argmax_text(const CarCurve& c) {
  return c.argmax_uw ? fmt::format("{:.0f} uW", *c.argmax_uw) : std::string("no unique interior maximum");
}

Outcome cmd_car(const Common& c, bool no_mc) {
  ScenarioConfig cfg = load(c);
  if (c.duration) cfg.car.mc_duration_s = *c.duration;
  const CarStudy s = run_car_study(cfg, !no_mc);
  Outcome o;
  o.files.push_back(table_artifact("car_before_qfc", car_table(s.before), c));
  o.files.push_back(table_artifact("car_after_qfc", car_table(s.after), c));
  json summary{{"pump_nm", s.pump_nm},
               {"window_capture", s.capture},
               {"argmax_before_uW", s.before.argmax_uw ? json(*s.before.argmax_uw) : json(nullptr)},
               {"argmax_after_uW", s.after.argmax_uw ? json(*s.after.argmax_uw) : json(nullptr)}};
  std::string text = fmt::format("CAR maximum before QFC: {}; after QFC: {} (SFG pump {:.4f} nm, window capture {:.4f})\n",
                                 argmax_text(s.before), argmax_text(s.after), s.pump_nm, s.capture);
  if (!no_mc) {
    Table t{{{"pump_uW", 1},
             {"car_measured", 4},
             {"sigma", 4},
             {"car_analytic_raw", 4},
             {"deviation_sigma", 3},
             {"center", -1},
             {"background_raw", -1},
             {"lower_bound", -1}},
            {}};
    for (const auto& p : s.mc) {
      t.rows.push_back({p.pump_uw, p.measured.car, p.measured.sigma, p.analytic_raw, p.deviation_sigma,
                        p.measured.center, p.measured.background_raw, p.measured.lower_bound});
      text += fmt::format("  MC {:6.1f} uW: CAR {:.2f} +/- {:.2f}, analytic {:.2f} ({:+.2f} sigma)\n", p.pump_uw,
                          p.measured.car, p.measured.sigma, p.analytic_raw, p.deviation_sigma);
    }
    o.files.push_back(table_artifact("car_monte_carlo", t, c));
    summary["monte_carlo"] = t.to_json();
  }
  o.files.push_back({"car_summary.json", dump(summary)});
  o.summary = text;
  o.primary = o.files.size() - 1;
  return o;
}

std::string stage_name(SignalPath p) { return p == SignalPath::up_converted ? "after" : "before"; }

void add_scan(Outcome& o, const FringeScanResult& r, const Common& c, bool emit_tags) {
  Table t{{{"phase_rad", 4},
           {"temperature_K", 4},
           {"coincidences", -1},
           {"poisson_error", 3},
           {"background", 3},
           {"fitted", 3}},
          {}};
  for (const auto& row : r.rows) {
    t.rows.push_back({row.phase_rad, row.temperature_k, row.coincidences,
                      std::sqrt(static_cast<double>(row.coincidences)), row.background, row.fitted});
  }
  const std::string stem = fmt::format("fringe_{}_{}", stage_name(r.path), r.pair_label);
  o.files.push_back(table_artifact(stem, t, c));
  if (emit_tags) {
    for (std::size_t i = 0; i < r.runs.size(); ++i) {
      TagSet tags;
      tags.name = fmt::format("tags/{}_{:02d}.csv", stem, i);
      tags.streams = {r.runs[i].signal, r.runs[i].idler};
      tags.phase_rad = r.scan.points[i].phase_rad;
      o.tags.push_back(std::move(tags));
    }
  }
}

std::string visibility_line(const FringeScanResult& r) {
  const auto& v = r.visibility;
  return fmt::format("  {} {} QFC: raw {}  net {}{}\n", r.pair_label, stage_name(r.path),
                     format_percent(v.raw), format_percent(v.net), v.bell_violating ? "  [Bell-violating]" : "");
}

Outcome cmd_fringe(const Common& c, const std::vector<std::string>& pairs, const std::string& stage, bool emit_tags) {
  const ScenarioConfig cfg = load(c);
  const SignalPath path = stage == "before" ? SignalPath::direct : SignalPath::up_converted;
  const double accumulation =
      c.duration ? *c.duration
                 : (path == SignalPath::direct ? cfg.fringe.accumulation_before_s : cfg.fringe.accumulation_after_s);
  std::vector<std::string> labels = pairs;
  if (labels.empty()) {
    for (const auto& p : cfg.plan()) labels.push_back(p.label());
  }
  Outcome o;
  json report = json::array();
  std::string text = fmt::format("fringe scans {} QFC, {} points x {:.0f} s\n", stage, cfg.fringe.points, accumulation);
  for (const auto& label : labels) {
    const FringeScanResult r = run_fringe_scan(cfg, label, path, accumulation, emit_tags);
    add_scan(o, r, c, emit_tags);
    json j = to_json(r.visibility);
    j["pair"] = r.pair_label;
    report.push_back(std::move(j));
    text += visibility_line(r);
  }
  o.files.push_back({fmt::format("visibility_{}.json", stage), dump(report)});
  o.primary = o.files.size() - 1;
  o.summary = text;
  return o;
}

Outcome cmd_demux(const Common& c, bool emit_tags, bool no_fringes) {
  ScenarioConfig cfg = load(c);
  if (c.duration) {
    cfg.fringe.accumulation_before_s = *c.duration;
    cfg.fringe.accumulation_after_s = *c.duration;
  }
  const DemuxResult d = run_demux(cfg, !no_fringes, emit_tags);
  Outcome o;
  Table t{{{"target", -1},
           {"idler", -1},
           {"center", -1},
           {"background_per_window", 4},
           {"background_raw", -1},
           {"predicted_suppression_dB", 2}},
          {}};
  std::string text = fmt::format("crosstalk at zero phase, {:.0f} s per cell (rows: pump tuned to; columns: idler)\n",
                                 cfg.duration_s);
  const std::size_t n = d.labels.size();
  for (std::size_t k = 0; k < d.crosstalk.size(); ++k) {
    const auto& e = d.crosstalk[k];
    t.rows.push_back({e.target, e.idler, e.center, e.background, e.background_raw, e.predicted_suppression_db});
    if (k % n == 0) text += fmt::format("  {:<4}", e.target);
    text += fmt::format("  {}:{:>8} ({:.2f})", e.idler, e.center, e.background);
    if (k % n == n - 1) text += '\n';
  }
  o.files.push_back(table_artifact("crosstalk", t, c));
  if (!no_fringes) {
    for (std::size_t i = 0; i < d.scans_before.size(); ++i) {
      add_scan(o, d.scans_before[i], c, emit_tags);
      add_scan(o, d.scans_after[i], c, emit_tags);
    }
    const std::string report = visibility_report(d.report);
    o.files.push_back({"visibility_report.txt", report});
    o.files.push_back({"visibility_report.json", dump(visibility_report_json(d.report))});
    text = report + "\n" + text;
  }
  o.summary = text;
  o.summary_only = true;
  o.files.push_back({"demux_summary.txt", text});
  o.primary = o.files.size() - 1;
  return o;
}

Outcome cmd_loss(const Common& c) {
  const ScenarioConfig cfg = load(c);
  const QuotedFigures quoted;
  std::string text;
  json j;
  auto ledger_block = [&](const std::string& title, const LossLedger& l) {
    text += title + "\n";
    json arr = json::array();
    for (const auto& e : l.entries) {
      text += fmt::format("  {:<26}{:>7.2f} dB  {:<10}  {}\n", e.name, e.loss_db, to_string(e.kind), e.group);
      arr.push_back({{"name", e.name}, {"loss_dB", e.loss_db}, {"kind", to_string(e.kind)}, {"group", e.group}});
    }
    return arr;
  };
  j["signal"] = ledger_block("signal arm (through the SFG module)", cfg.ledgers.signal);
  j["idler"] = ledger_block("idler arm", cfg.ledgers.idler);

  const double sfg_module = ledger_total(cfg.ledgers.signal.group("sfg-module")).total_db;
  const double idler = ledger_total(cfg.ledgers.idler).total_db;
  const double signal_wo_detector = ledger_total(cfg.ledgers.signal.without(LossKind::detector)).total_db;
  const double signal_full = ledger_total(cfg.ledgers.signal).total_db;
  text += "totals\n";
  text += fmt::format("  {:<44}{:>7.2f} dB\n", "SFG module", sfg_module);
  text += fmt::format("  {:<44}{:>7.2f} dB\n", "idler overall", idler);
  text += fmt::format("  {:<44}{:>7.2f} dB\n", "signal overall, detector excluded", signal_wo_detector);
  text += fmt::format("  {:<44}{:>7.2f} dB\n", "signal overall, detector included", signal_full);
  if (std::abs(signal_full - quoted.signal_overall_db) > 0.005) {
    text += fmt::format(
        "note: the quoted signal total {:.2f} dB equals the detector-excluded sum; the itemised entries "
        "including the Si detector add to {:.2f} dB\n",
        quoted.signal_overall_db, signal_full);
  }
  j["totals"] = {{"sfg_module_dB", sfg_module},
                 {"idler_overall_dB", idler},
                 {"signal_without_detector_dB", signal_wo_detector},
                 {"signal_with_detector_dB", signal_full},
                 {"quoted_signal_overall_dB", quoted.signal_overall_db}};
  Outcome o;
  o.files.push_back({"loss.txt", text});
  o.files.push_back({"loss.json", dump(j)});
  o.primary = c.format == "json" ? 1 : 0;
  o.summary = text;
  return o;
}

Outcome cmd_analyze(const Common& c, const std::vector<std::string>& inputs, const std::string& signal_label,
                    const std::string& idler_label) {
  const ScenarioConfig cfg = load(c);
  const double side_delay = cfg.franson.signal_umi.delay_ns;
  Outcome o;
  FringeScan scan;
  bool all_phased = true;
  Table summary{{{"file", -1},
                 {"signal", -1},
                 {"idler", -1},
                 {"phase_rad", 4},
                 {"center", -1},
                 {"background_per_window", 4},
                 {"car", 4},
                 {"car_sigma", 4},
                 {"car_lower_bound", -1}},
                {}};
  for (const auto& input : inputs) {
    const StreamFile file = read_streams(input);
    auto pick = [&](const std::string& label, std::size_t fallback) -> const EventStream& {
      if (!label.empty()) {
        for (const auto& s : file.streams) {
          if (s.channel_label == label) return s;
        }
        throw ValidationError("--signal/--idler", fmt::format("'{}' not found in {}", label, input));
      }
      if (file.streams.size() <= fallback) throw ValidationError(input, "expected two channels");
      return file.streams[fallback];
    };
    const EventStream& a = pick(signal_label, 0);
    const EventStream& b = pick(idler_label, 1);
    const auto h = histogram(a, b, cfg.coincidence);
    const std::string stem = fs::path(input).stem().string();
    Table ht{{{"delay_ps", -1}, {"count", -1}}, {}};
    for (std::size_t i = 0; i < h.counts.size(); ++i) ht.rows.push_back({h.delay_of(i), h.counts[i]});
    o.files.push_back({fmt::format("histogram_{}.csv", stem), ht.csv()});

    const FringePoint p = fringe_point_from_streams(a, b, cfg.coincidence, side_delay, file.manifest.phase_rad.value_or(0.0));
    const CarEstimate car = car_from_histogram(h, cfg.coincidence.window_ns, side_delay);
    summary.rows.push_back({fs::path(input).filename().string(), a.channel_label, b.channel_label,
                            file.manifest.phase_rad ? json(*file.manifest.phase_rad) : json(nullptr), p.center_counts,
                            p.background_counts, car.car, car.sigma, car.lower_bound});
    all_phased = all_phased && file.manifest.phase_rad.has_value();
    scan.points.push_back(p);
  }
  o.files.push_back(table_artifact("analysis", summary, c));
  o.summary = o.files.back().content;
  o.primary = o.files.size() - 1;
  if (all_phased && scan.points.size() >= 4) {
    const VisibilityResult v = fit_visibility(scan);
    o.files.push_back({"visibility.json", dump(to_json(v))});
    o.summary += fmt::format("visibility: raw {}  net {}{}\n", format_percent(v.raw), format_percent(v.net),
                             v.bell_violating ? "  [Bell-violating]" : "");
  }
  o.summary_only = true;
  return o;
}

// ---- driver ----

void write_file(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << content;
}

void emit(const Outcome& o, const Common& c, const std::string& command, double wall_s, std::ostream& out) {
  if (c.out.empty()) {
    if (o.summary_only) {
      out << o.summary;
    } else if (!o.files.empty()) {
      out << o.files[o.primary].content;
    }
    return;
  }
  const fs::path dir(c.out);
  fs::create_directories(dir);
  json outputs = json::array();
  for (const auto& f : o.files) {
    write_file(dir / f.name, f.content);
    outputs.push_back(f.name);
  }
  const ScenarioConfig cfg = load(c);
  const std::string digest = config_digest(cfg);
  for (const auto& t : o.tags) {
    fs::create_directories((dir / t.name).parent_path());
    write_streams(t.streams, dir / t.name, digest, t.phase_rad);
    outputs.push_back(t.name);
    outputs.push_back(manifest_path_for(t.name).generic_string());
  }
  json manifest{{"scenario", cfg.name},
                {"command", command},
                {"config_digest", digest},
                {"seed", cfg.seed},
                {"tool_version", kToolVersion},
                {"outputs", outputs},
                {"wall_clock_s", wall_s}};
  write_file(dir / "manifest.json", dump(manifest));
  out << o.summary;
}

int dispatch(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multi-channel entangled-photon demultiplexing simulator", "qdemux"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);
  Common common;

  auto* plan = app.add_subcommand("plan", "ITU channel plan (signal/idler pairs about the pump)");
  std::optional<int> pump;
  std::optional<std::vector<int>> offsets;
  plan->add_option("--pump", pump, "Pump channel index");
  plan->add_option("--offsets", offsets, "Pair offsets in channels, comma separated")->delimiter(',');
  add_common(plan, common);

  auto* ring = app.add_subcommand("ring", "Ring transmission sweep");
  double half_span = 300.0;
  double ring_step = 0.05;
  ring->add_option("--half-span-ghz", half_span, "Sweep half width")->check(CLI::PositiveNumber);
  ring->add_option("--step-ghz", ring_step, "Sweep step")->check(CLI::PositiveNumber);
  add_common(ring, common);

  auto* qpm = app.add_subcommand("qpm", "Phase-matching tuning curves and channel-to-pump table");
  double qpm_step = 0.01;
  std::optional<double> t_min;
  std::optional<double> t_max;
  double t_step = 0.05;
  qpm->add_option("--step-nm", qpm_step, "Pump sweep step")->check(CLI::PositiveNumber);
  qpm->add_option("--t-min", t_min, "Temperature sweep start (C)");
  qpm->add_option("--t-max", t_max, "Temperature sweep end (C)");
  qpm->add_option("--t-step", t_step, "Temperature sweep step (C)")->check(CLI::PositiveNumber);
  add_common(qpm, common);

  auto* eff = app.add_subcommand("sfg-eff", "Conversion efficiency against SFG pump power");
  double max_mw = 1000.0;
  double step_mw = 10.0;
  eff->add_option("--max-mw", max_mw, "Largest pump power")->check(CLI::PositiveNumber);
  eff->add_option("--step-mw", step_mw, "Pump power step")->check(CLI::PositiveNumber);
  add_common(eff, common);

  auto* car = app.add_subcommand("car", "CAR against chip pump power, before and after conversion");
  bool no_mc = false;
  car->add_flag("--no-mc", no_mc, "Skip the Monte Carlo points");
  add_common(car, common);

  auto* fringe = app.add_subcommand("fringe", "Two-photon interference fringes per channel pair");
  std::vector<std::string> fringe_pairs;
  std::string stage = "after";
  bool fringe_tags = false;
  fringe->add_option("--pair", fringe_pairs, "Pair label (S2-I2, S2 or I2); repeatable, default all");
  fringe->add_option("--stage", stage, "Before or after frequency conversion")
      ->check(CLI::IsMember({"before", "after"}));
  fringe->add_flag("--emit-tags", fringe_tags, "Write timestamp files for every point");
  add_common(fringe, common);

  auto* demux = app.add_subcommand("demux", "Three-channel demultiplexing: crosstalk matrix and visibility table");
  bool demux_tags = false;
  bool no_fringes = false;
  demux->add_flag("--emit-tags", demux_tags, "Write timestamp files for every fringe point");
  demux->add_flag("--no-fringes", no_fringes, "Crosstalk matrix only");
  add_common(demux, common);

  auto* loss = app.add_subcommand("loss", "Loss ledger report");
  add_common(loss, common);

  auto* analyze = app.add_subcommand("analyze", "Histogram, CAR and visibility from timestamp files");
  std::vector<std::string> inputs;
  std::string signal_label;
  std::string idler_label;
  analyze->add_option("files", inputs, "Timestamp CSV files")->required()->check(CLI::ExistingFile);
  analyze->add_option("--signal", signal_label, "Signal channel label (default: first in file)");
  analyze->add_option("--idler", idler_label, "Idler channel label (default: second in file)");
  add_common(analyze, common);

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  const auto start = std::chrono::steady_clock::now();
  try {
    Outcome o;
    std::string command;
    if (*plan) {
      command = "plan";
      o = cmd_plan(common, pump, offsets);
    } else if (*ring) {
      command = "ring";
      o = cmd_ring(common, half_span, ring_step);
    } else if (*qpm) {
      command = "qpm";
      o = cmd_qpm(common, qpm_step, t_min, t_max, t_step);
    } else if (*eff) {
      command = "sfg-eff";
      o = cmd_sfg_eff(common, max_mw, step_mw);
    } else if (*car) {
      command = "car";
      o = cmd_car(common, no_mc);
    } else if (*fringe) {
      command = "fringe";
      if (fringe_tags && common.out.empty()) throw ValidationError("--emit-tags", "requires --out");
      o = cmd_fringe(common, fringe_pairs, stage, fringe_tags);
    } else if (*demux) {
      command = "demux";
      if (demux_tags && common.out.empty()) throw ValidationError("--emit-tags", "requires --out");
      o = cmd_demux(common, demux_tags, no_fringes);
    } else if (*loss) {
      command = "loss";
      o = cmd_loss(common);
    } else {
      command = "analyze";
      o = cmd_analyze(common, inputs, signal_label, idler_label);
    }
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    emit(o, common, command, wall, out);
    return 0;
  } catch (const ValidationError& e) {
    err << "qdemux: error: " << (common.config.empty() ? std::string() : common.config + ": ") << e.what() << '\n';
    return 1;
  } catch (const ParseError& e) {
    err << "qdemux: error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "qdemux: runtime error: " << (common.config.empty() ? std::string() : common.config + ": ") << e.what()
        << '\n';
    return 2;
  }
}

}  // namespace

int run(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return dispatch(std::move(args), std::cout, std::cerr);
}

int run_captured(const std::vector<std::string>& args, std::string& out, std::string& err) {
  std::ostringstream o;
  std::ostringstream e;
  const int code = dispatch(args, o, e);
  out = o.str();
  err = e.str();
  return code;
}

}  // namespace qdemux::cli
