#include "qdemux/detection.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <fmt/core.h>

#include "qdemux/errors.hpp"

namespace qdemux {

double db_to_linear(double loss_db) { return std::pow(10.0, -loss_db / 10.0); }

double linear_to_db(double transmission) {
  if (!(transmission > 0.0)) throw DomainError("transmission must be positive");
  return -10.0 * std::log10(transmission);
}

std::string to_string(LossKind kind) {
  switch (kind) {
    case LossKind::passive: return "passive";
    case LossKind::conversion: return "conversion";
    case LossKind::detector: return "detector";
  }
  return "passive";
}

LossKind loss_kind_from_string(const std::string& s) {
  if (s == "passive") return LossKind::passive;
  if (s == "conversion") return LossKind::conversion;
  if (s == "detector") return LossKind::detector;
  throw ValidationError("kind", fmt::format("unknown loss kind '{}'", s));
}

void LossLedger::validate(const std::string& field) const {
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& e = entries[i];
    if (!(e.loss_db >= 0.0) || !std::isfinite(e.loss_db)) {
      throw ValidationError(fmt::format("{}[{}].loss_dB", field, i),
                            fmt::format("entry '{}' has negative or non-finite loss {}", e.name, e.loss_db));
    }
  }
}

LossLedger LossLedger::with_conversion(double conversion_efficiency) const {
  LossLedger out{role, {}};
  bool inserted = false;
  for (const auto& e : entries) {
    if (e.kind != LossKind::conversion) {
      out.entries.push_back(e);
    } else if (!inserted) {
      out.entries.push_back({e.name, linear_to_db(conversion_efficiency), LossKind::conversion, e.group});
      inserted = true;
    }
  }
  return out;
}

LossLedger LossLedger::without(LossKind kind) const {
  LossLedger out{role, {}};
  std::copy_if(entries.begin(), entries.end(), std::back_inserter(out.entries),
               [kind](const LossEntry& e) { return e.kind != kind; });
  return out;
}

LossLedger LossLedger::group(const std::string& name) const {
  LossLedger out{role, {}};
  std::copy_if(entries.begin(), entries.end(), std::back_inserter(out.entries),
               [&name](const LossEntry& e) { return e.group == name; });
  return out;
}

LedgerTotal ledger_total(const LossLedger& ledger) {
  ledger.validate(ledger.role.empty() ? "ledger" : ledger.role);
  LedgerTotal total;
  for (const auto& e : ledger.entries) total.total_db += e.loss_db;
  total.linear = db_to_linear(total.total_db);
  return total;
}

void DetectorSpec::validate(const std::string& field) const {
  if (!(efficiency > 0.0 && efficiency <= 1.0)) throw ValidationError(field + ".efficiency", "must lie in (0, 1]");
  if (!(dark_rate >= 0.0)) throw ValidationError(field + ".dark_rate", "must be non-negative");
  if (!(dead_time_us >= 0.0)) throw ValidationError(field + ".dead_time_us", "must be non-negative");
  if (!(jitter_sigma_ps >= 0.0)) throw ValidationError(field + ".jitter_sigma_ps", "must be non-negative");
}

Picoseconds CoincidenceConfig::window_ps() const { return std::llround(window_ns * kPsPerNs); }
Picoseconds CoincidenceConfig::bin_ps() const { return std::llround(histogram_bin_ps); }
Picoseconds CoincidenceConfig::span_ps() const { return std::llround(histogram_span_ns * kPsPerNs); }

void CoincidenceConfig::validate() const {
  if (!(window_ns > 0.0)) throw ValidationError("coincidence.window_ns", "must be positive");
  if (!(histogram_bin_ps >= 1.0) || histogram_bin_ps != std::round(histogram_bin_ps)) {
    throw ValidationError("coincidence.histogram_bin_ps", "must be a positive whole number of ps");
  }
  if (!(histogram_bin_ps <= window_ns * kPsPerNs)) {
    throw ValidationError("coincidence.histogram_bin_ps", "bin must not exceed the window");
  }
  const Picoseconds bin = bin_ps();
  if (std::abs(window_ns * kPsPerNs - static_cast<double>(window_ps())) > 1e-6 || window_ps() % bin != 0 ||
      (window_ps() / bin) % 2 == 0) {
    throw ValidationError("coincidence.window_ns", "window must be an odd multiple of the histogram bin");
  }
  if (!(histogram_span_ns > 0.0) || span_ps() % bin != 0) {
    throw ValidationError("coincidence.histogram_span_ns", "span must be a positive multiple of the histogram bin");
  }
  if (window_ps() * 4 > span_ps()) throw ValidationError("coincidence.window_ns", "window must not exceed span/4");
}

double accidental_rate(double singles_a, double singles_b, double window_ns) {
  if (!(singles_a >= 0.0) || !(singles_b >= 0.0) || !(window_ns >= 0.0)) {
    throw DomainError("singles rates and window must be non-negative");
  }
  return singles_a * singles_b * window_ns * 1e-9;
}

double ArmModel::efficiency() const {
  return ledger_total(ledger.without(LossKind::detector)).linear * detector.efficiency;
}

namespace {

// CDF of the double exponential truncated to |x| <= truncation * tau.
double truncated_laplace_cdf(double x, double tau, double truncation) {
  const double a = truncation * tau;
  if (x <= -a) return 0.0;
  if (x >= a) return 1.0;
  const double tail = std::exp(-truncation);
  const double norm = 2.0 * (1.0 - tail);
  if (x < 0.0) return (std::exp(x / tau) - tail) / norm;
  return 1.0 - (std::exp(-x / tau) - tail) / norm;
}

}  // namespace

double coincidence_window_capture(double coherence_ps, double jitter_sigma_ps, double window_ps, double truncation) {
  const double half = 0.5 * window_ps;
  auto inside = [&](double shift) {
    if (coherence_ps <= 0.0) return (std::abs(shift) < half) ? 1.0 : 0.0;
    return truncated_laplace_cdf(half - shift, coherence_ps, truncation) -
           truncated_laplace_cdf(-half - shift, coherence_ps, truncation);
  };
  if (jitter_sigma_ps <= 0.0) return inside(0.0);

  // Simpson over the Gaussian jitter, +/-8 sigma.
  constexpr int kIntervals = 4000;
  const double lo = -8.0 * jitter_sigma_ps;
  const double h = 16.0 * jitter_sigma_ps / kIntervals;
  const double norm = 1.0 / (std::sqrt(2.0 * std::numbers::pi) * jitter_sigma_ps);
  double sum = 0.0;
  for (int i = 0; i <= kIntervals; ++i) {
    const double g = lo + i * h;
    const double w = (i == 0 || i == kIntervals) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    sum += w * norm * std::exp(-0.5 * g * g / (jitter_sigma_ps * jitter_sigma_ps)) * inside(-g);
  }
  return sum * h / 3.0;
}

CarPoint car_point(const CarModel& model, double pump_uw) {
  double eta_a = model.arm_a.efficiency();
  double eta_b = model.arm_b.efficiency();
  CarPoint p;
  p.singles_a = singles_rate(model.source, pump_uw, model.side_a, eta_a, model.arm_a.detector.dark_rate);
  p.singles_b = singles_rate(model.source, pump_uw, model.side_b, eta_b, model.arm_b.detector.dark_rate);
  if (model.dead_time_correction) {
    const double live_a = 1.0 / (1.0 + p.singles_a * model.arm_a.detector.dead_time_us * 1e-6);
    const double live_b = 1.0 / (1.0 + p.singles_b * model.arm_b.detector.dead_time_us * 1e-6);
    p.singles_a *= live_a;
    p.singles_b *= live_b;
    eta_a *= live_a;
    eta_b *= live_b;
  }
  p.true_rate = eta_a * eta_b * pair_rate(model.source, pump_uw) * model.capture;
  p.accidental_rate = accidental_rate(p.singles_a, p.singles_b, model.window_ns);
  if (p.accidental_rate > 0.0) p.car = p.true_rate / p.accidental_rate;
  return p;
}

std::optional<double> car_curve(const CarModel& model, double pump_uw) { return car_point(model, pump_uw).car; }

EventStream apply_detector(const EventStream& stream, const DetectorSpec& spec, std::uint64_t seed) {
  if (!stream.is_sorted()) throw ValidationError(stream.channel_label, "detector input is not time-sorted");
  spec.validate(spec.name.empty() ? "detector" : spec.name);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::normal_distribution<double> jitter(0.0, spec.jitter_sigma_ps > 0.0 ? spec.jitter_sigma_ps : 1.0);

  std::vector<Picoseconds> times;
  times.reserve(stream.timestamps_ps.size());
  for (Picoseconds t : stream.timestamps_ps) {
    if (spec.efficiency < 1.0 && uniform(rng) >= spec.efficiency) continue;
    if (spec.jitter_sigma_ps > 0.0) t += std::llround(jitter(rng));
    times.push_back(t);
  }

  const Picoseconds duration = stream.duration_ps();
  if (spec.dark_rate > 0.0 && duration > 0) {
    std::poisson_distribution<long long> count(spec.dark_rate * stream.duration_s);
    std::uniform_int_distribution<Picoseconds> when(0, duration);
    const long long n = count(rng);
    for (long long i = 0; i < n; ++i) times.push_back(when(rng));
  }
  std::sort(times.begin(), times.end());

  // Non-paralyzable dead time; a zero dead time still merges coincident ps.
  const Picoseconds dead = std::max<Picoseconds>(1, std::llround(spec.dead_time_us * 1e6));
  EventStream out{stream.channel_label, {}, stream.duration_s, stream.seed};
  out.timestamps_ps.reserve(times.size());
  for (Picoseconds t : times) {
    if (t < 0 || t > duration) continue;
    if (!out.timestamps_ps.empty() && t - out.timestamps_ps.back() < dead) continue;
    out.timestamps_ps.push_back(t);
  }
  return out;
}

}  // namespace qdemux
