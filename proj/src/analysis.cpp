#include "qdemux/analysis.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>
#include <fmt/core.h>

#include "qdemux/constants.hpp"
#include "qdemux/errors.hpp"

namespace qdemux {

void FringeScan::validate() const {
  if (points.size() < 4) throw ValidationError("scan", fmt::format("{} points; at least 4 required", points.size()));
  double lo = points.front().phase_rad;
  double hi = lo;
  for (const auto& p : points) {
    if (!(p.background_counts >= 0.0)) throw ValidationError("scan", "background counts must be non-negative");
    if (!(p.accumulation_s > 0.0)) throw ValidationError("scan", "accumulation time must be positive");
    lo = std::min(lo, p.phase_rad);
    hi = std::max(hi, p.phase_rad);
  }
  if (!(hi - lo > kPi)) throw ValidationError("scan", "phase points must span more than pi");
}

SinusoidFit fit_sinusoid(const std::vector<double>& phases, const std::vector<double>& counts,
                         const std::vector<double>& variances) {
  const auto n = static_cast<Eigen::Index>(phases.size());
  if (n < 3 || counts.size() != phases.size() || variances.size() != phases.size()) {
    throw DomainError("sinusoid fit needs at least 3 points with matching counts and variances");
  }
  Eigen::MatrixXd x(n, 3);
  Eigen::VectorXd y(n);
  Eigen::VectorXd var(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    x(i, 0) = 1.0;
    x(i, 1) = std::cos(phases[k]);
    x(i, 2) = std::sin(phases[k]);
    y(i) = counts[k];
    var(i) = variances[k];
  }

  // Ordinary least squares, then three passes weighted by the fitted variance.
  Eigen::VectorXd w = Eigen::VectorXd::Ones(n);
  Eigen::MatrixXd estimator;
  Eigen::Vector3d beta;
  for (int pass = 0; pass < 4; ++pass) {
    const Eigen::MatrixXd xtw = x.transpose() * w.asDiagonal();
    const Eigen::Matrix3d normal = xtw * x;
    estimator = normal.ldlt().solve(xtw);
    beta = estimator * y;
    const Eigen::VectorXd model = x * beta;
    for (Eigen::Index i = 0; i < n; ++i) w(i) = 1.0 / std::max(model(i), 1.0);
  }
  const Eigen::Matrix3d cov = estimator * var.asDiagonal() * estimator.transpose();

  SinusoidFit fit;
  fit.amplitude = beta(0);
  fit.amplitude_sigma = std::sqrt(std::max(cov(0, 0), 0.0));
  const double r = std::hypot(beta(1), beta(2));
  if (!(fit.amplitude > 0.0)) {
    fit.visibility = 0.0;
    fit.visibility_sigma = 1.0;
    return fit;
  }
  fit.visibility = r / fit.amplitude;
  double phi0 = std::atan2(-beta(2), beta(1));
  if (phi0 < 0.0) phi0 += kTwoPi;
  fit.phase_offset = phi0;

  double var_v = 0.0;
  if (r > 1e-12 * fit.amplitude) {
    const Eigen::Vector3d grad(-fit.visibility / fit.amplitude, beta(1) / (fit.amplitude * r),
                               beta(2) / (fit.amplitude * r));
    var_v = grad.dot(cov * grad);
  } else {
    var_v = 0.5 * (cov(1, 1) + cov(2, 2)) / (fit.amplitude * fit.amplitude);
  }
  fit.visibility_sigma = std::sqrt(std::max(var_v, 0.0));
  return fit;
}

Estimate minmax_visibility(double n_max, double n_min) {
  const double sum = n_max + n_min;
  if (!(sum > 0.0)) return {0.0, 1.0};
  const double v = (n_max - n_min) / sum;
  const double sigma = 2.0 * std::sqrt(n_max * n_max * n_min + n_min * n_min * n_max) / (sum * sum);
  return {v, sigma};
}

namespace {

Estimate minmax_of(const std::vector<double>& values) {
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  return minmax_visibility(*hi, *lo);
}

}  // namespace

VisibilityResult fit_visibility(const FringeScan& scan) {
  scan.validate();
  const std::size_t n = scan.points.size();
  std::vector<double> phases(n), raw(n), raw_var(n), net(n), net_var(n);

  double background_total = 0.0;
  double accumulation_total = 0.0;
  for (const auto& p : scan.points) {
    background_total += p.background_counts;
    accumulation_total += p.accumulation_s;
  }
  const double background_rate = background_total / accumulation_total;
  // Var(bg_i) ~ bg_i is a conservative bound (each far estimate spans >= 1 window).
  const double background_rate_var = background_total / (accumulation_total * accumulation_total);

  VisibilityResult result;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& p = scan.points[i];
    const double counts = static_cast<double>(p.center_counts);
    phases[i] = p.phase_rad;
    raw[i] = counts;
    raw_var[i] = counts > 0.0 ? counts : 1.0;
    double subtracted = counts - background_rate * p.accumulation_s;
    if (subtracted < 0.0) {
      subtracted = 0.0;
      result.clamped = true;
    }
    net[i] = subtracted;
    net_var[i] = raw_var[i] + p.accumulation_s * p.accumulation_s * background_rate_var;
  }

  const SinusoidFit raw_fit = fit_sinusoid(phases, raw, raw_var);
  const SinusoidFit net_fit = fit_sinusoid(phases, net, net_var);
  result.raw = {raw_fit.visibility, raw_fit.visibility_sigma};
  result.net = {net_fit.visibility, net_fit.visibility_sigma};
  result.fit_phase_offset = raw_fit.phase_offset;
  result.fit_amplitude = raw_fit.amplitude;
  result.raw_minmax = minmax_of(raw);
  result.net_minmax = minmax_of(net);
  result.estimators_disagree = std::abs(result.raw.value - result.raw_minmax.value) > result.raw.sigma ||
                               std::abs(result.net.value - result.net_minmax.value) > result.net.sigma;
  result.bell_violating = result.net.value - result.net.sigma > kBellVisibilityThreshold;
  return result;
}

CarEstimate car_from_histogram(const CoincidenceHistogram& h, double window_ns, double side_delay_ns) {
  const WindowCounts w = central_window_counts(h, window_ns, side_delay_ns);
  if (!(w.background_windows > 0.0)) throw DomainError("histogram has no far-background region");
  CarEstimate est;
  est.center = w.center;
  est.background_raw = w.background_raw;
  est.lower_bound = w.background_raw == 0;
  const double bg_raw = est.lower_bound ? 1.0 : static_cast<double>(w.background_raw);
  const double per_window = bg_raw / w.background_windows;
  est.car = static_cast<double>(w.center) / per_window;
  const double center = std::max<double>(static_cast<double>(w.center), 1.0);
  est.sigma = (static_cast<double>(w.center) > 0.0 ? est.car : 1.0 / per_window) * std::sqrt(1.0 / center + 1.0 / bg_raw);
  return est;
}

std::string format_percent(const Estimate& e) {
  return fmt::format("({:.2f} ± {:.2f}) %", 100.0 * e.value, 100.0 * e.sigma);
}

std::string visibility_report(const std::vector<ReportRow>& rows) {
  constexpr int kLabel = 15;
  constexpr int kCell = 22;
  std::string out;
  out += fmt::format("{:<{}}{:<{}}{:<{}}\n", "Channel pairs", kLabel, "Before QFC", 2 * kCell, "After QFC", 2 * kCell);
  out += fmt::format("{:<{}}{:<{}}{:<{}}{:<{}}{:<{}}\n", "", kLabel, "Raw visibility", kCell, "Net visibility", kCell,
                     "Raw visibility", kCell, "Net visibility", kCell);
  bool missing = false;
  // "±" is two bytes in UTF-8; pad by display width.
  auto cell = [&](const std::optional<VisibilityResult>& v, bool net_value) {
    if (!v) {
      missing = true;
      return fmt::format("{:<{}}", "", kCell);
    }
    return fmt::format("{:<{}}", format_percent(net_value ? v->net : v->raw), kCell + 1);
  };
  for (const auto& row : rows) {
    out += fmt::format("{:<{}}", row.label, kLabel);
    out += cell(row.before, false);
    out += cell(row.before, true);
    out += cell(row.after, false);
    out += cell(row.after, true);
    while (!out.empty() && out.back() == ' ') out.pop_back();
    out += '\n';
  }
  if (missing) out += "note: blank cells had no fringe scan\n";
  return out;
}

nlohmann::json to_json(const VisibilityResult& v) {
  auto est = [](const Estimate& e) { return nlohmann::json{{"value", e.value}, {"sigma", e.sigma}}; };
  return nlohmann::json{{"raw", est(v.raw)},
                        {"net", est(v.net)},
                        {"raw_minmax", est(v.raw_minmax)},
                        {"net_minmax", est(v.net_minmax)},
                        {"bell_violating", v.bell_violating},
                        {"clamped", v.clamped},
                        {"estimators_disagree", v.estimators_disagree},
                        {"fit_phase_offset_rad", v.fit_phase_offset},
                        {"fit_amplitude", v.fit_amplitude}};
}

nlohmann::json visibility_report_json(const std::vector<ReportRow>& rows) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& row : rows) {
    nlohmann::json j{{"pair", row.label}};
    j["before_qfc"] = row.before ? to_json(*row.before) : nlohmann::json();
    j["after_qfc"] = row.after ? to_json(*row.after) : nlohmann::json();
    arr.push_back(std::move(j));
  }
  return arr;
}

}  // namespace qdemux
