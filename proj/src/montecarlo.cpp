#include "qdemux/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <fmt/core.h>

#include "qdemux/errors.hpp"
#include "qdemux/seeding.hpp"

namespace qdemux {

std::vector<ChannelPair> ScenarioConfig::plan() const { return build_plan(pump_index, pair_offsets); }

const ChannelPair& find_pair(const std::vector<ChannelPair>& plan, const std::string& label) {
  for (const auto& p : plan) {
    if (p.label() == label || p.signal_label() == label || p.idler_label() == label || p.converted_label() == label) {
      return p;
    }
  }
  throw ValidationError("channel", fmt::format("'{}' does not name a pair in the channel plan", label));
}

const ChannelPair& ScenarioConfig::pair_for_idler(const std::vector<ChannelPair>& plan) const {
  return find_pair(plan, idler_channel);
}

void ScenarioConfig::validate() const {
  if (!(duration_s > 0.0)) throw ValidationError("duration_s", "must be positive");
  const auto p = plan();
  if (p.empty()) throw ValidationError("channel_plan.pair_offsets", "plan has no channel pairs");
  try {
    find_pair(p, idler_channel);
  } catch (const ValidationError& e) {
    throw ValidationError("idler_channel", e.what());
  }
  try {
    find_pair(p, sfg.target);
  } catch (const ValidationError& e) {
    throw ValidationError("sfg.target", e.what());
  }
  source.ring.validate();
  source.rates.validate();
  if (!(source.chip_power_uw >= 0.0)) throw ValidationError("source.chip_power_uW", "must be non-negative");
  sfg.crystal.validate();
  sfg.conversion.validate();
  if (!(sfg.pump_power_mw >= 0.0)) throw ValidationError("sfg.pump_power_mW", "must be non-negative");
  if (!(sfg.window.min_nm < sfg.window.max_nm)) throw ValidationError("sfg.tuning_window_nm", "min must be below max");
  if (!(franson.fringe.visibility >= 0.0 && franson.fringe.visibility <= 1.0)) {
    throw ValidationError("franson.visibility", "must lie in [0, 1]");
  }
  if (!(franson.phase_jitter_rad >= 0.0)) throw ValidationError("franson.phase_jitter_rad", "must be non-negative");
  franson.signal_umi.validate("franson.signal_umi");
  franson.idler_umi.validate("franson.idler_umi");
  ledgers.signal.validate("ledgers.signal");
  ledgers.idler.validate("ledgers.idler");
  ledgers.signal_direct.validate("ledgers.signal_direct");
  detectors.apd1.validate("detectors.apd1");
  detectors.apd2.validate("detectors.apd2");
  detectors.apd3.validate("detectors.apd3");
  coincidence.validate();
  if (fringe.points < 4) throw ValidationError("fringe.points", "at least 4 phase points required");
  if (!(fringe.accumulation_before_s > 0.0)) throw ValidationError("fringe.accumulation_before_s", "must be positive");
  if (!(fringe.accumulation_after_s > 0.0)) throw ValidationError("fringe.accumulation_after_s", "must be positive");
  if (!(car.min_uw > 0.0 && car.max_uw > car.min_uw && car.step_uw > 0.0)) {
    throw ValidationError("car", "sweep needs 0 < min_uW < max_uW and a positive step");
  }
  if (!(car.mc_duration_s > 0.0)) throw ValidationError("car.mc_duration_s", "must be positive");
}

double target_pump_nm(const ScenarioConfig& cfg) {
  const auto plan = cfg.plan();
  return solve_pump_wavelength(cfg.sfg.crystal, find_pair(plan, cfg.sfg.target).signal, cfg.sfg.window);
}

double conversion_survival(const ScenarioConfig& cfg, const ItuChannel& signal, double pump_nm) {
  return quantum_efficiency(cfg.sfg.conversion, cfg.sfg.pump_power_mw) *
         relative_efficiency(cfg.sfg.crystal, pump_nm, signal.center_wavelength_nm());
}

SfwmRates channel_rates(const ScenarioConfig& cfg, const ChannelPair& pair) {
  const auto& ring = cfg.source.ring;
  const double pump = resonance_enhancement(ring, pair.pump.center_frequency_thz());
  SfwmRates rates = cfg.source.rates;
  rates.enhancement *= pump * pump * resonance_enhancement(ring, pair.signal.center_frequency_thz()) *
                       resonance_enhancement(ring, pair.idler.center_frequency_thz());
  return rates;
}

ArmModel signal_arm(const ScenarioConfig& cfg, SignalPath path, const ChannelPair& pair, double pump_nm) {
  if (path == SignalPath::direct) return ArmModel{cfg.ledgers.signal_direct, cfg.detectors.apd3};
  const double survival = std::max(conversion_survival(cfg, pair.signal, pump_nm), 1e-100);
  return ArmModel{cfg.ledgers.signal.with_conversion(survival), cfg.detectors.apd2};
}

ArmModel idler_arm(const ScenarioConfig& cfg) { return ArmModel{cfg.ledgers.idler, cfg.detectors.apd1}; }

namespace {

double passive_transmission(const LossLedger& ledger) {
  return ledger_total(ledger.without(LossKind::conversion).without(LossKind::detector)).linear;
}

struct Interferometers {
  bool enabled = false;
  Picoseconds signal_delay = 0;
  Picoseconds idler_delay = 0;
};

// Independent Poisson process of single photons; with interferometers each
// photon leaves the analysed port with probability 1/2 through a random arm.
void add_poisson_singles(std::vector<Picoseconds>& out, double rate, double duration_s, Picoseconds arm_delay,
                         bool interferometer, std::uint64_t seed) {
  if (interferometer) rate *= 0.5;
  if (!(rate > 0.0)) return;
  std::mt19937_64 rng(seed);
  std::poisson_distribution<long long> count(rate * duration_s);
  std::uniform_real_distribution<double> when(0.0, duration_s);
  std::bernoulli_distribution long_arm(0.5);
  const long long n = count(rng);
  out.reserve(out.size() + static_cast<std::size_t>(n));
  for (long long i = 0; i < n; ++i) {
    Picoseconds t = std::llround(when(rng) * kPsPerSecond);
    if (interferometer && long_arm(rng)) t += arm_delay;
    out.push_back(t);
  }
}

EventStream finish_stream(std::string label, std::vector<Picoseconds>& photons, const ScenarioConfig& cfg,
                          const DetectorSpec& detector) {
  std::sort(photons.begin(), photons.end());
  const Picoseconds end = std::llround(cfg.duration_s * kPsPerSecond);
  const auto last = std::upper_bound(photons.begin(), photons.end(), end);
  const auto first = std::lower_bound(photons.begin(), last, Picoseconds{0});
  EventStream incoming{label, std::vector<Picoseconds>(first, last), cfg.duration_s, cfg.seed};
  return apply_detector(incoming, detector, derive_seed(cfg.seed, "detector", label));
}

}  // namespace

RunResult generate_run(const ScenarioConfig& cfg) {
  cfg.validate();
  const auto plan = cfg.plan();
  const ChannelPair& pair = cfg.pair_for_idler(plan);
  const bool converted = cfg.signal_path == SignalPath::up_converted;

  RunResult result;
  result.pump_nm = converted ? target_pump_nm(cfg) : 0.0;

  const double duration = cfg.duration_s;
  const double power = cfg.source.chip_power_uw;
  const double signal_passive = passive_transmission(converted ? cfg.ledgers.signal : cfg.ledgers.signal_direct);
  const double idler_passive = passive_transmission(cfg.ledgers.idler);
  auto signal_survival = [&](const ChannelPair& p) {
    return signal_passive * (converted ? conversion_survival(cfg, p.signal, result.pump_nm) : 1.0);
  };

  Interferometers umi;
  umi.enabled = cfg.franson.enabled;
  umi.signal_delay = std::llround(cfg.franson.signal_umi.delay_ns * kPsPerNs);
  umi.idler_delay = std::llround(cfg.franson.idler_umi.delay_ns * kPsPerNs);

  std::vector<Picoseconds> signal_photons;
  std::vector<Picoseconds> idler_photons;

  // Pairs of the detected channel. A Poisson number of pairs is split by
  // per-photon survival into both/signal-only/idler-only classes.
  {
    std::mt19937_64 rng(derive_seed(cfg.seed, "pairs", pair.label()));
    const double rate = pair_rate(channel_rates(cfg, pair), power);
    const double ps = signal_survival(pair);
    const double pi = idler_passive;

    const long long total = std::poisson_distribution<long long>(rate * duration)(rng);
    result.pairs_generated = static_cast<std::uint64_t>(total);
    const long long n_both = std::binomial_distribution<long long>(total, ps * pi)(rng);
    const double p_signal_only = ps * pi < 1.0 ? ps * (1.0 - pi) / (1.0 - ps * pi) : 0.0;
    const long long n_signal = std::binomial_distribution<long long>(total - n_both, p_signal_only)(rng);
    const long long n_idler = std::binomial_distribution<long long>(total - n_both - n_signal, pi)(rng);

    std::uniform_real_distribution<double> when(0.0, duration);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double tau = biphoton_coherence_time_ps(cfg.source.ring);
    const double tail = 1.0 - std::exp(-5.0);
    auto pair_delay = [&]() {
      const double magnitude = -tau * std::log1p(-unit(rng) * tail);
      return std::llround(unit(rng) < 0.5 ? -magnitude : magnitude);
    };

    const FringeModel& fringe = cfg.franson.fringe;
    const ExitDistribution fixed_exit = exit_distribution(fringe);
    const OutcomeDistribution fixed_outcome = outcome_distribution(fringe);
    std::normal_distribution<double> phase_noise(0.0, std::max(cfg.franson.phase_jitter_rad, 1e-300));

    for (long long n = 0; n < n_both; ++n) {
      const Picoseconds t = std::llround(when(rng) * kPsPerSecond);
      const Picoseconds ts = t + pair_delay();
      if (!umi.enabled) {
        signal_photons.push_back(ts);
        idler_photons.push_back(t);
        ++result.pairs_both_arrived;
        continue;
      }
      ExitDistribution exit = fixed_exit;
      OutcomeDistribution outcome = fixed_outcome;
      if (cfg.franson.phase_jitter_rad > 0.0) {
        FringeModel jittered = fringe;
        jittered.phase_offset += phase_noise(rng);
        exit = exit_distribution(jittered);
        outcome = outcome_distribution(jittered);
      }
      double u = unit(rng);
      if (u < outcome.center) {
        const bool long_long = unit(rng) < 0.5;
        signal_photons.push_back(ts + (long_long ? umi.signal_delay : 0));
        idler_photons.push_back(t + (long_long ? umi.idler_delay : 0));
        ++result.pairs_both_arrived;
        continue;
      }
      u -= outcome.center;
      if (u < outcome.early) {
        signal_photons.push_back(ts);
        idler_photons.push_back(t + umi.idler_delay);
        ++result.pairs_both_arrived;
        continue;
      }
      u -= outcome.early;
      if (u < outcome.late) {
        signal_photons.push_back(ts + umi.signal_delay);
        idler_photons.push_back(t);
        ++result.pairs_both_arrived;
        continue;
      }
      u -= outcome.late;
      if (u < exit.signal_only) {
        signal_photons.push_back(ts + (unit(rng) < 0.5 ? umi.signal_delay : 0));
      } else if (u < exit.signal_only + exit.idler_only) {
        idler_photons.push_back(t + (unit(rng) < 0.5 ? umi.idler_delay : 0));
      }
    }

    std::bernoulli_distribution exits(umi.enabled ? 0.5 : 1.0);
    for (long long n = 0; n < n_signal; ++n) {
      const Picoseconds t = std::llround(when(rng) * kPsPerSecond) + pair_delay();
      if (!exits(rng)) continue;
      signal_photons.push_back(t + (umi.enabled && unit(rng) < 0.5 ? umi.signal_delay : 0));
    }
    for (long long n = 0; n < n_idler; ++n) {
      const Picoseconds t = std::llround(when(rng) * kPsPerSecond);
      if (!exits(rng)) continue;
      idler_photons.push_back(t + (umi.enabled && unit(rng) < 0.5 ? umi.idler_delay : 0));
    }
  }

  // Signal-band noise. After conversion every multiplexed signal channel
  // reaches the SFG crystal; off-target channels leak through the sinc^2 tails.
  for (const auto& other : plan) {
    if (!converted && !(other == pair)) continue;
    const double survival = signal_survival(other);
    add_poisson_singles(signal_photons, cfg.source.rates.raman_signal * power * survival, duration, umi.signal_delay,
                        umi.enabled, derive_seed(cfg.seed, "raman-signal", other.signal_label()));
    if (!(other == pair)) {
      add_poisson_singles(signal_photons, pair_rate(channel_rates(cfg, other), power) * survival, duration,
                          umi.signal_delay, umi.enabled, derive_seed(cfg.seed, "leak", other.label()));
    }
  }
  add_poisson_singles(idler_photons, cfg.source.rates.raman_idler * power * idler_passive, duration, umi.idler_delay,
                      umi.enabled, derive_seed(cfg.seed, "raman-idler", pair.idler_label()));

  const std::string signal_label =
      converted ? find_pair(plan, cfg.sfg.target).converted_label() : pair.signal_label();
  result.signal = finish_stream(signal_label, signal_photons, cfg,
                                converted ? cfg.detectors.apd2 : cfg.detectors.apd3);
  result.idler = finish_stream(pair.idler_label(), idler_photons, cfg, cfg.detectors.apd1);
  return result;
}

}  // namespace qdemux
