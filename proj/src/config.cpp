#include "qdemux/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <type_traits>
#include <utility>

#include <fmt/core.h>

#include "qdemux/errors.hpp"
#include "qdemux/seeding.hpp"

namespace qdemux {

using nlohmann::json;

namespace {

json loss_entry(const char* name, double db, const char* kind, const char* group) {
  return json{{"name", name}, {"loss_dB", db}, {"kind", kind}, {"group", group}};
}

json umi_json(const char* label, double wavelength_nm, double dn_dt, double index, double length_mm,
              double quoted_period_k) {
  return json{{"label", label},
              {"delay_ns", 1.6},  // 1.6 ns arm time difference, both UMIs
              {"wavelength_nm", wavelength_nm},
              {"dn_dT", dn_dt},
              {"refractive_index", index},
              {"tunable_length_mm", length_mm},
              {"reference_temperature_K", 0.0},
              {"quoted_period_K", quoted_period_k}};
}

json detector_json(const char* name, double efficiency, double dark, double dead_us, double jitter_ps) {
  return json{{"name", name},
              {"efficiency", efficiency},
              {"dark_rate", dark},
              {"dead_time_us", dead_us},
              {"jitter_sigma_ps", jitter_ps}};
}

}  // namespace

json default_config_json() {
  json j;
  j["scenario"] = "reference-design";
  j["seed"] = 20190417;
  j["duration_s"] = 60.0;

  // Pump in C34 (1550.12 nm); pairs C24/C44, C22/C46, C20/C48.
  j["channel_plan"] = {{"pump_index", 34}, {"pair_offsets", {10, 12, 14}}};

  j["ring"] = {
      {"fsr_GHz", 200.0},                     // 200 GHz FSR
      {"fwhm_MHz", 490.0},                    // 490 MHz linewidth
      {"q_factor", 430000.0},                 // quoted Q; descriptive only
      {"extinction_depth", 0.9},              // notch depth not quoted
      {"reference_resonance_THz", nullptr},   // null: pump channel frequency
      {"thermo_optic_shift_GHz_per_K", 10.0}, // ~10 GHz/K thermo-optic shift
      {"temperature_K", 0.0},
  };

  j["source"] = {{"chip_power_uW", 400.0}};  // 400 uW before the waveguide

  j["sfwm"] = {
      {"pair_coefficient", nullptr},          // null: from target_detected_signal_rate
      {"target_detected_signal_rate", 2000.0},// ~2000/s up-converted photons detected
      {"raman_coefficient_signal", nullptr},  // null: from raman_fraction_signal
      {"raman_coefficient_idler", nullptr},
      {"raman_fraction_signal", 0.1},
      {"raman_fraction_idler", 0.1},
  };

  j["sfg"] = {
      {"crystal",
       {
           {"length_mm", 50.0},         // 1 x 0.5 x 50 mm PPLN
           {"poling_period_um", 7.3},   // 7.3 um poling period
           {"temperature_C", nullptr},  // null: QPM temperature of the design wavelengths
           {"sellmeier", "gayer2008_mgo_cln"},
           {"thermal_expansion_per_K", 0.0},
       }},
      {"design_pump_nm", 795.0},
      {"design_signal_nm", 1560.0},
      {"pump_power_mW", 400.0},  // 795-nm cavity pump during the CAR and fringe runs
      {"tuning_window_nm", {790.0, 800.0}},
      {"target", "S2"},
      {"conversion",
       {
           {"eta_device", 1.0},
           {"p_pi_mW", nullptr},                      // null: from the calibration point
           {"calibration_power_mW", 550.0},           // 38 % quantum efficiency at 550 mW
           {"calibration_quantum_efficiency", 0.38},
       }},
      // Bow-tie cavity: 547 mm round trip, M1 T = 3 % at 795 nm, M3/M4 80 mm
      // curvature, 60 um waist between M3 and M4. Recorded only.
      {"cavity",
       {
           {"length_mm", 547.0},
           {"input_coupler_transmittance", 0.03},
           {"mirror_curvature_mm", 80.0},
           {"beam_waist_um", 60.0},
       }},
  };

  j["franson"] = {
      {"enabled", true},
      {"visibility", 1.0},
      {"phase_offset_rad", 0.0},
      {"signal_phase_rad", 0.0},
      {"idler_phase_rad", 0.0},
      {"phase_jitter_rad", 0.0},
      // Free-space UMI tuned by KTP, dn_z/dT = 1.6e-5 /K at 525 nm. The
      // quoted 1.16 K period needs a 14.14 mm tunable length; the quoted
      // 163.48 mm would give 0.100 K.
      {"signal_umi", umi_json("free-space-ktp", 525.0, 1.6e-5, 1.0, 14.14, 1.16)},
      // Fiber UMI, dn/dT = 0.811e-5 /K at 1550 nm, L_d = 163.48 mm, period 0.585 K.
      {"idler_umi", umi_json("fiber", 1550.0, 0.811e-5, 1.467, 163.48, 0.585)},
  };

  j["ledgers"] = {
      {"signal",
       {
           loss_entry("silicon waveguide", 5.00, "passive", "chip"),
           loss_entry("DWDM filters", 2.00, "passive", "chip"),
           loss_entry("SFG transmission", 0.80, "passive", "sfg-module"),
           loss_entry("up-conversion", 5.38, "conversion", "sfg-module"),
           loss_entry("SFG filtering", 0.20, "passive", "sfg-module"),
           loss_entry("fiber coupling", 2.21, "passive", "sfg-module"),
           loss_entry("Si detector (50 %)", 3.00, "detector", "detector"),
       }},
      {"idler",
       {
           loss_entry("silicon waveguide", 5.00, "passive", "chip"),
           loss_entry("DWDM filters", 2.00, "passive", "chip"),
           loss_entry("InGaAs detector (20 %)", 6.99, "detector", "detector"),
       }},
      {"signal_direct",
       {
           loss_entry("silicon waveguide", 5.00, "passive", "chip"),
           loss_entry("DWDM filters", 2.00, "passive", "chip"),
           loss_entry("InGaAs detector (20 %)", 6.99, "detector", "detector"),
       }},
  };

  j["detectors"] = {
      // ID220 InGaAs: 20 % efficiency, 5 us dead time. Dark rate not quoted;
      // 800/s puts the unconverted CAR maximum near 150 uW.
      {"apd1", detector_json("apd1", 0.20, 800.0, 5.0, 100.0)},
      // Si SPAD: 50 % efficiency, ~1000/s dark counts.
      {"apd2", detector_json("apd2", 0.50, 1000.0, 0.05, 100.0)},
      // Second InGaAs detector for the unconverted reference arm.
      {"apd3", detector_json("apd3", 0.20, 800.0, 5.0, 100.0)},
  };

  j["coincidence"] = {
      {"window_ns", 0.8},  // 0.8 ns coincidence window
      {"histogram_bin_ps", 32.0},
      {"histogram_span_ns", 20.0},
  };

  j["signal_path"] = "up_converted";
  j["idler_channel"] = "I2";

  // 30 s per point before conversion, 300 s after.
  j["fringe"] = {{"points", 8}, {"accumulation_before_s", 30.0}, {"accumulation_after_s", 300.0}};

  j["car"] = {
      {"min_uW", 10.0},
      {"max_uW", 2000.0},
      {"step_uW", 10.0},
      {"mc_powers_uW", {100.0, 200.0, 300.0, 400.0, 600.0}},
      {"mc_duration_s", 120.0},
      {"mc_span_ns", 200.0},
  };
  return j;
}

namespace {

void check_keys(const json& user, const json& schema, const std::string& path) {
  if (!user.is_object()) {
    throw ValidationError(path.empty() ? "<root>" : path, "expected a JSON object");
  }
  for (const auto& [key, value] : user.items()) {
    const std::string field = path.empty() ? key : path + "." + key;
    if (!schema.contains(key)) throw ValidationError(field, "unknown key");
    const json& expected = schema.at(key);
    if (expected.is_object() && !value.is_null()) {
      check_keys(value, expected, field);
    } else if (expected.is_array() && !expected.empty() && expected.front().is_object()) {
      if (!value.is_array()) throw ValidationError(field, "expected an array");
      for (std::size_t i = 0; i < value.size(); ++i) {
        check_keys(value[i], expected.front(), fmt::format("{}[{}]", field, i));
      }
    }
  }
}

void merge_into(json& base, const json& user) {
  for (const auto& [key, value] : user.items()) {
    if (value.is_object() && base.contains(key) && base[key].is_object()) {
      merge_into(base[key], value);
    } else {
      base[key] = value;
    }
  }
}

// Typed field access with the dotted path in every error.
class Reader {
 public:
  Reader(const json& root, std::string path) : root_(root), path_(std::move(path)) {}

  Reader at(const std::string& key) const { return Reader(node(key), field(key)); }

  bool is_null(const std::string& key) const { return node(key).is_null(); }
  bool has(const std::string& key) const { return root_.is_object() && root_.contains(key); }

  template <typename T>
  T get(const std::string& key) const {
    const json& v = node(key);
    try {
      if constexpr (std::is_floating_point_v<T>) {
        if (!v.is_number()) throw ValidationError(field(key), "expected a number");
      } else if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) throw ValidationError(field(key), "expected true or false");
      } else if constexpr (std::is_integral_v<T>) {
        if (!v.is_number_integer()) throw ValidationError(field(key), "expected an integer");
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string()) throw ValidationError(field(key), "expected a string");
      }
      return v.get<T>();
    } catch (const json::exception& e) {
      throw ValidationError(field(key), e.what());
    }
  }

  double number(const std::string& key) const {
    const double v = get<double>(key);
    if (!std::isfinite(v)) throw ValidationError(field(key), "must be finite");
    return v;
  }

  const json& node(const std::string& key) const {
    if (!root_.is_object() || !root_.contains(key)) throw ValidationError(field(key), "missing");
    return root_.at(key);
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  const std::string& path() const { return path_; }

 private:
  const json& root_;
  std::string path_;
};

LossLedger read_ledger(const Reader& r, const std::string& key, const std::string& role) {
  const json& arr = r.node(key);
  if (!arr.is_array()) throw ValidationError(r.field(key), "expected an array of loss entries");
  LossLedger ledger{role, {}};
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string path = fmt::format("{}[{}]", r.field(key), i);
    Reader e(arr[i], path);
    LossEntry entry;
    entry.name = e.get<std::string>("name");
    entry.loss_db = e.number("loss_dB");
    try {
      entry.kind = e.has("kind") ? loss_kind_from_string(e.get<std::string>("kind")) : LossKind::passive;
    } catch (const ValidationError& err) {
      throw ValidationError(path + ".kind", err.what());
    }
    entry.group = e.has("group") ? e.get<std::string>("group") : std::string{};
    if (entry.loss_db < 0.0) throw ValidationError(path + ".loss_dB", "must be non-negative");
    ledger.entries.push_back(entry);
  }
  return ledger;
}


UmiSpec read_umi(const Reader& r, double& quoted_period_k) {
  UmiSpec umi;
  umi.label = r.get<std::string>("label");
  umi.delay_ns = r.number("delay_ns");
  umi.wavelength_nm = r.number("wavelength_nm");
  umi.medium.dn_dt = r.number("dn_dT");
  umi.medium.refractive_index = r.number("refractive_index");
  umi.medium.tunable_length_mm = r.number("tunable_length_mm");
  umi.reference_temperature_k = r.number("reference_temperature_K");
  quoted_period_k = r.number("quoted_period_K");
  umi.validate(r.path());
  return umi;
}

DetectorSpec read_detector(const Reader& r) {
  DetectorSpec d;
  d.name = r.get<std::string>("name");
  d.efficiency = r.number("efficiency");
  d.dark_rate = r.number("dark_rate");
  d.dead_time_us = r.number("dead_time_us");
  d.jitter_sigma_ps = r.number("jitter_sigma_ps");
  d.validate(r.path());
  return d;
}

// Rewraps errors thrown by model validators under the JSON field name.
template <typename F>
void checked(const std::string& field, F&& f) {
  try {
    f();
  } catch (const ValidationError& e) {
    if (e.field().rfind(field, 0) == 0) throw;
    throw ValidationError(field, e.what());
  } catch (const DomainError& e) {
    throw ValidationError(field, e.what());
  }
}

}  // namespace

ScenarioConfig config_from_json(const json& user) {
  const json defaults = default_config_json();
  check_keys(user, defaults, "");
  json doc = defaults;
  merge_into(doc, user);

  ScenarioConfig cfg;
  const Reader root(doc, "");
  cfg.name = root.get<std::string>("scenario");
  {
    const json& seed = root.node("seed");
    if (!seed.is_number_integer()) throw ValidationError("seed", "expected a non-negative integer");
    if (seed.is_number_unsigned()) {
      cfg.seed = seed.get<std::uint64_t>();
    } else {
      const auto v = seed.get<std::int64_t>();
      if (v < 0) throw ValidationError("seed", "expected a non-negative integer");
      cfg.seed = static_cast<std::uint64_t>(v);
    }
  }
  cfg.duration_s = root.number("duration_s");
  if (!(cfg.duration_s > 0.0)) throw ValidationError("duration_s", "must be positive");

  const Reader plan = root.at("channel_plan");
  cfg.pump_index = plan.get<int>("pump_index");
  {
    const json& offsets = plan.node("pair_offsets");
    if (!offsets.is_array()) throw ValidationError("channel_plan.pair_offsets", "expected an array of integers");
    cfg.pair_offsets.clear();
    for (const auto& o : offsets) {
      if (!o.is_number_integer()) throw ValidationError("channel_plan.pair_offsets", "expected integers");
      cfg.pair_offsets.push_back(o.get<int>());
    }
  }
  std::vector<ChannelPair> pairs;
  try {
    pairs = cfg.plan();
  } catch (const std::exception& e) {
    throw ValidationError("channel_plan", e.what());
  }

  const Reader ring = root.at("ring");
  auto& rm = cfg.source.ring;
  rm.fsr_ghz = ring.number("fsr_GHz");
  rm.fwhm_mhz = ring.number("fwhm_MHz");
  rm.q_factor = ring.number("q_factor");
  rm.extinction_depth = ring.number("extinction_depth");
  rm.reference_resonance_thz = ring.is_null("reference_resonance_THz")
                                   ? channel_frequency_thz(cfg.pump_index)
                                   : ring.number("reference_resonance_THz");
  rm.thermo_optic_shift_ghz_per_k = ring.number("thermo_optic_shift_GHz_per_K");
  rm.temperature_k = ring.number("temperature_K");
  checked("ring", [&] { rm.validate(); });

  cfg.source.chip_power_uw = root.at("source").number("chip_power_uW");
  if (!(cfg.source.chip_power_uw > 0.0)) throw ValidationError("source.chip_power_uW", "must be positive");

  // Ledgers come before the rate calibration, which depends on them.
  const Reader ledgers = root.at("ledgers");
  cfg.ledgers.signal = read_ledger(ledgers, "signal", "signal-arm");
  cfg.ledgers.idler = read_ledger(ledgers, "idler", "idler-arm");
  cfg.ledgers.signal_direct = read_ledger(ledgers, "signal_direct", "signal-arm");
  checked("ledgers.signal", [&] { cfg.ledgers.signal.validate("ledgers.signal"); });
  checked("ledgers.idler", [&] { cfg.ledgers.idler.validate("ledgers.idler"); });
  checked("ledgers.signal_direct", [&] { cfg.ledgers.signal_direct.validate("ledgers.signal_direct"); });

  const Reader sfwm = root.at("sfwm");
  auto& rates = cfg.source.rates;
  cfg.source.target_detected_signal_rate = sfwm.number("target_detected_signal_rate");
  cfg.source.raman_fraction_signal = sfwm.number("raman_fraction_signal");
  cfg.source.raman_fraction_idler = sfwm.number("raman_fraction_idler");
  if (sfwm.is_null("pair_coefficient")) {
    // Detected signal rate through the full signal ledger at the nominal pump power.
    const double arm = ledger_total(cfg.ledgers.signal).linear;
    checked("sfwm.target_detected_signal_rate", [&] {
      rates.pair_coefficient =
          pair_coefficient_for_detected_rate(cfg.source.target_detected_signal_rate, arm, cfg.source.chip_power_uw);
    });
  } else {
    rates.pair_coefficient = sfwm.number("pair_coefficient");
  }
  auto raman = [&](const char* key, double fraction) {
    if (!sfwm.is_null(key)) return sfwm.number(key);
    double v = 0.0;
    checked(sfwm.field(key), [&] {
      v = raman_coefficient_for_fraction(rates.pair_coefficient, fraction, cfg.source.chip_power_uw);
    });
    return v;
  };
  rates.raman_signal = raman("raman_coefficient_signal", cfg.source.raman_fraction_signal);
  rates.raman_idler = raman("raman_coefficient_idler", cfg.source.raman_fraction_idler);
  checked("sfwm", [&] { rates.validate(); });

  const Reader sfg = root.at("sfg");
  const Reader crystal = sfg.at("crystal");
  auto& cs = cfg.sfg.crystal;
  cs.length_mm = crystal.number("length_mm");
  cs.poling_period_um = crystal.number("poling_period_um");
  cs.thermal_expansion_per_k = crystal.number("thermal_expansion_per_K");
  {
    const auto name = crystal.get<std::string>("sellmeier");
    const auto set = sellmeier_by_name(name);
    if (!set) {
      std::string known;
      for (const auto& n : sellmeier_names()) known += (known.empty() ? "" : ", ") + n;
      throw ValidationError("sfg.crystal.sellmeier", fmt::format("unknown set '{}' (known: {})", name, known));
    }
    cs.sellmeier = *set;
  }
  cfg.sfg.design_pump_nm = sfg.number("design_pump_nm");
  cfg.sfg.design_signal_nm = sfg.number("design_signal_nm");
  if (crystal.is_null("temperature_C")) {
    std::optional<double> t;
    checked("sfg.crystal.temperature_C", [&] {
      t = solve_qpm_temperature(cs, cfg.sfg.design_pump_nm, cfg.sfg.design_signal_nm);
    });
    if (!t) {
      throw ValidationError("sfg.crystal.temperature_C",
                            "design wavelengths cannot be phase-matched in the searched range; set it explicitly");
    }
    cs.temperature_c = *t;
  } else {
    cs.temperature_c = crystal.number("temperature_C");
  }
  checked("sfg.crystal", [&] { cs.validate(); });

  cfg.sfg.pump_power_mw = sfg.number("pump_power_mW");
  if (!(cfg.sfg.pump_power_mw >= 0.0)) throw ValidationError("sfg.pump_power_mW", "must be non-negative");
  {
    const json& w = sfg.node("tuning_window_nm");
    if (!w.is_array() || w.size() != 2 || !w[0].is_number() || !w[1].is_number()) {
      throw ValidationError("sfg.tuning_window_nm", "expected [min_nm, max_nm]");
    }
    cfg.sfg.window = {w[0].get<double>(), w[1].get<double>()};
    if (!(cfg.sfg.window.min_nm < cfg.sfg.window.max_nm)) {
      throw ValidationError("sfg.tuning_window_nm", "min must be below max");
    }
  }
  cfg.sfg.target = sfg.get<std::string>("target");
  const Reader conversion = sfg.at("conversion");
  cfg.sfg.calibration_power_mw = conversion.number("calibration_power_mW");
  cfg.sfg.calibration_efficiency = conversion.number("calibration_quantum_efficiency");
  cfg.sfg.conversion.eta_device = conversion.number("eta_device");
  if (conversion.is_null("p_pi_mW")) {
    checked("sfg.conversion", [&] {
      cfg.sfg.conversion = ConversionCurve::calibrated(cfg.sfg.calibration_power_mw, cfg.sfg.calibration_efficiency,
                                                       cfg.sfg.conversion.eta_device);
    });
  } else {
    cfg.sfg.conversion.p_pi_mw = conversion.number("p_pi_mW");
  }
  checked("sfg.conversion", [&] { cfg.sfg.conversion.validate(); });
  const Reader cavity = sfg.at("cavity");
  cfg.sfg.cavity.length_mm = cavity.number("length_mm");
  cfg.sfg.cavity.input_coupler_transmittance = cavity.number("input_coupler_transmittance");
  cfg.sfg.cavity.mirror_curvature_mm = cavity.number("mirror_curvature_mm");
  cfg.sfg.cavity.beam_waist_um = cavity.number("beam_waist_um");

  const Reader franson = root.at("franson");
  auto& fr = cfg.franson;
  fr.enabled = franson.get<bool>("enabled");
  fr.fringe.visibility = franson.number("visibility");
  fr.fringe.phase_offset = franson.number("phase_offset_rad");
  fr.fringe.signal_phase = franson.number("signal_phase_rad");
  fr.fringe.idler_phase = franson.number("idler_phase_rad");
  fr.phase_jitter_rad = franson.number("phase_jitter_rad");
  fr.signal_umi = read_umi(franson.at("signal_umi"), fr.signal_quoted_period_k);
  fr.idler_umi = read_umi(franson.at("idler_umi"), fr.idler_quoted_period_k);

  const Reader detectors = root.at("detectors");
  cfg.detectors.apd1 = read_detector(detectors.at("apd1"));
  cfg.detectors.apd2 = read_detector(detectors.at("apd2"));
  cfg.detectors.apd3 = read_detector(detectors.at("apd3"));

  const Reader coincidence = root.at("coincidence");
  cfg.coincidence.window_ns = coincidence.number("window_ns");
  cfg.coincidence.histogram_bin_ps = coincidence.number("histogram_bin_ps");
  cfg.coincidence.histogram_span_ns = coincidence.number("histogram_span_ns");
  checked("coincidence", [&] { cfg.coincidence.validate(); });

  {
    const auto path = root.get<std::string>("signal_path");
    if (path == "up_converted") {
      cfg.signal_path = SignalPath::up_converted;
    } else if (path == "direct") {
      cfg.signal_path = SignalPath::direct;
    } else {
      throw ValidationError("signal_path", "expected \"up_converted\" or \"direct\"");
    }
  }
  cfg.idler_channel = root.get<std::string>("idler_channel");

  const Reader fringe = root.at("fringe");
  cfg.fringe.points = fringe.get<int>("points");
  cfg.fringe.accumulation_before_s = fringe.number("accumulation_before_s");
  cfg.fringe.accumulation_after_s = fringe.number("accumulation_after_s");

  const Reader car = root.at("car");
  cfg.car.min_uw = car.number("min_uW");
  cfg.car.max_uw = car.number("max_uW");
  cfg.car.step_uw = car.number("step_uW");
  {
    const json& powers = car.node("mc_powers_uW");
    if (!powers.is_array()) throw ValidationError("car.mc_powers_uW", "expected an array of powers");
    cfg.car.mc_powers_uw.clear();
    for (const auto& p : powers) {
      if (!p.is_number() || !(p.get<double>() > 0.0)) {
        throw ValidationError("car.mc_powers_uW", "expected positive numbers");
      }
      cfg.car.mc_powers_uw.push_back(p.get<double>());
    }
  }
  cfg.car.mc_duration_s = car.number("mc_duration_s");
  cfg.car.mc_span_ns = car.number("mc_span_ns");

  cfg.validate();
  return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config", fmt::format("cannot open '{}'", path.string()));
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) return reference_config();
  json user;
  try {
    user = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError("config", fmt::format("{}: {}", path.string(), e.what()));
  }
  return config_from_json(user);
}

ScenarioConfig reference_config() { return config_from_json(json::object()); }

namespace {

json ledger_json(const LossLedger& ledger) {
  json arr = json::array();
  for (const auto& e : ledger.entries) {
    arr.push_back(json{{"name", e.name}, {"loss_dB", e.loss_db}, {"kind", to_string(e.kind)}, {"group", e.group}});
  }
  return arr;
}

json umi_to_json(const UmiSpec& u, double quoted) {
  return json{{"label", u.label},
              {"delay_ns", u.delay_ns},
              {"wavelength_nm", u.wavelength_nm},
              {"dn_dT", u.medium.dn_dt},
              {"refractive_index", u.medium.refractive_index},
              {"tunable_length_mm", u.medium.tunable_length_mm},
              {"reference_temperature_K", u.reference_temperature_k},
              {"quoted_period_K", quoted}};
}

json detector_to_json(const DetectorSpec& d) {
  return json{{"name", d.name},
              {"efficiency", d.efficiency},
              {"dark_rate", d.dark_rate},
              {"dead_time_us", d.dead_time_us},
              {"jitter_sigma_ps", d.jitter_sigma_ps}};
}

}  // namespace

json to_json(const ScenarioConfig& cfg) {
  json j;
  j["scenario"] = cfg.name;
  j["seed"] = cfg.seed;
  j["duration_s"] = cfg.duration_s;
  j["channel_plan"] = {{"pump_index", cfg.pump_index}, {"pair_offsets", cfg.pair_offsets}};
  const auto& r = cfg.source.ring;
  j["ring"] = {{"fsr_GHz", r.fsr_ghz},
               {"fwhm_MHz", r.fwhm_mhz},
               {"q_factor", r.q_factor},
               {"extinction_depth", r.extinction_depth},
               {"reference_resonance_THz", r.reference_resonance_thz},
               {"thermo_optic_shift_GHz_per_K", r.thermo_optic_shift_ghz_per_k},
               {"temperature_K", r.temperature_k}};
  j["source"] = {{"chip_power_uW", cfg.source.chip_power_uw}};
  const auto& s = cfg.source;
  j["sfwm"] = {{"pair_coefficient", s.rates.pair_coefficient},
               {"target_detected_signal_rate", s.target_detected_signal_rate},
               {"raman_coefficient_signal", s.rates.raman_signal},
               {"raman_coefficient_idler", s.rates.raman_idler},
               {"raman_fraction_signal", s.raman_fraction_signal},
               {"raman_fraction_idler", s.raman_fraction_idler}};
  const auto& g = cfg.sfg;
  j["sfg"] = {
      {"crystal",
       {{"length_mm", g.crystal.length_mm},
        {"poling_period_um", g.crystal.poling_period_um},
        {"temperature_C", g.crystal.temperature_c},
        {"sellmeier", g.crystal.sellmeier.name},
        {"thermal_expansion_per_K", g.crystal.thermal_expansion_per_k}}},
      {"design_pump_nm", g.design_pump_nm},
      {"design_signal_nm", g.design_signal_nm},
      {"pump_power_mW", g.pump_power_mw},
      {"tuning_window_nm", {g.window.min_nm, g.window.max_nm}},
      {"target", g.target},
      {"conversion",
       {{"eta_device", g.conversion.eta_device},
        {"p_pi_mW", g.conversion.p_pi_mw},
        {"calibration_power_mW", g.calibration_power_mw},
        {"calibration_quantum_efficiency", g.calibration_efficiency}}},
      {"cavity",
       {{"length_mm", g.cavity.length_mm},
        {"input_coupler_transmittance", g.cavity.input_coupler_transmittance},
        {"mirror_curvature_mm", g.cavity.mirror_curvature_mm},
        {"beam_waist_um", g.cavity.beam_waist_um}}},
  };
  const auto& f = cfg.franson;
  j["franson"] = {{"enabled", f.enabled},
                  {"visibility", f.fringe.visibility},
                  {"phase_offset_rad", f.fringe.phase_offset},
                  {"signal_phase_rad", f.fringe.signal_phase},
                  {"idler_phase_rad", f.fringe.idler_phase},
                  {"phase_jitter_rad", f.phase_jitter_rad},
                  {"signal_umi", umi_to_json(f.signal_umi, f.signal_quoted_period_k)},
                  {"idler_umi", umi_to_json(f.idler_umi, f.idler_quoted_period_k)}};
  j["ledgers"] = {{"signal", ledger_json(cfg.ledgers.signal)},
                  {"idler", ledger_json(cfg.ledgers.idler)},
                  {"signal_direct", ledger_json(cfg.ledgers.signal_direct)}};
  j["detectors"] = {{"apd1", detector_to_json(cfg.detectors.apd1)},
                    {"apd2", detector_to_json(cfg.detectors.apd2)},
                    {"apd3", detector_to_json(cfg.detectors.apd3)}};
  j["coincidence"] = {{"window_ns", cfg.coincidence.window_ns},
                      {"histogram_bin_ps", cfg.coincidence.histogram_bin_ps},
                      {"histogram_span_ns", cfg.coincidence.histogram_span_ns}};
  j["signal_path"] = cfg.signal_path == SignalPath::up_converted ? "up_converted" : "direct";
  j["idler_channel"] = cfg.idler_channel;
  j["fringe"] = {{"points", cfg.fringe.points},
                 {"accumulation_before_s", cfg.fringe.accumulation_before_s},
                 {"accumulation_after_s", cfg.fringe.accumulation_after_s}};
  j["car"] = {{"min_uW", cfg.car.min_uw},
              {"max_uW", cfg.car.max_uw},
              {"step_uW", cfg.car.step_uw},
              {"mc_powers_uW", cfg.car.mc_powers_uw},
              {"mc_duration_s", cfg.car.mc_duration_s},
              {"mc_span_ns", cfg.car.mc_span_ns}};
  return j;
}

std::string config_digest(const ScenarioConfig& cfg) { return sha256_hex(to_json(cfg).dump()); }

}  // namespace qdemux
