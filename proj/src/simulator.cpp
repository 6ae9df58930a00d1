#include "qsentinel/simulator.hpp"

#include <cmath>

#include "qsentinel/error.hpp"
#include "qsentinel/rng.hpp"

namespace qsentinel::sim {

namespace {

constexpr double kTwoPi = 2.0 * 3.14159265358979323846;
constexpr double kDaySeconds = 86400.0;

double clip(double v, double lo, double hi) {
  return v < lo ? lo : (v > hi ? hi : v);
}

// Standard normal CDF.
double phi(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

void check_profile(const LinkProfile& p) {
  if (!(p.clip_low < p.qber_mean && p.qber_mean < p.clip_high)) {
    throw UsageError("profile: qber_mean must lie inside clip range");
  }
  if (!(p.ar_coefficient >= 0.0 && p.ar_coefficient < 1.0)) {
    throw UsageError("profile: ar_coefficient must be in [0,1)");
  }
  if (p.qber_amplitude < 0.0 || p.noise_std < 0.0 || p.sample_interval_s <= 0.0 ||
      p.skr_base_bps < 0.0) {
    throw UsageError("profile: negative parameter");
  }
}

}  // namespace

TelemetrySeries simulate_qber(const LinkProfile& profile, Eigen::Index n) {
  check_profile(profile);
  if (n < 1) throw UsageError("simulate_qber: n must be >= 1");

  Rng rng(profile.seed);
  TelemetrySeries series;
  series.link_id = "sim";
  series.records.reserve(n);

  const double phi_ar = profile.ar_coefficient;
  const double innov_std = profile.noise_std * std::sqrt(1.0 - phi_ar * phi_ar);
  double e = profile.noise_std * rng.normal();  // stationary start
  for (Eigen::Index i = 0; i < n; ++i) {
    if (i > 0) e = phi_ar * e + innov_std * rng.normal();
    const double t = static_cast<double>(i) * profile.sample_interval_s;
    const double diurnal = profile.qber_amplitude * std::sin(kTwoPi * t / kDaySeconds);
    const double q = clip(profile.qber_mean + diurnal + e, profile.clip_low,
                          profile.clip_high);
    TelemetryRecord rec;
    rec.timestamp = t;
    rec.qber = q;
    // SKR dips when QBER rises
    rec.skr_bps =
        std::max(0.0, profile.skr_base_bps * (1.0 - 5.0 * (q - profile.qber_mean)));
    series.records.push_back(rec);
  }
  return series;
}

TimeTagSeries simulate_timetags(double rate_hz, Eigen::Index n,
                                double ar_coefficient, std::uint64_t seed) {
  if (!(rate_hz > 0.0)) throw UsageError("simulate_timetags: rate_hz must be > 0");
  if (n < 2) throw UsageError("simulate_timetags: n must be >= 2");
  if (!(ar_coefficient >= 0.0 && ar_coefficient < 1.0)) {
    throw UsageError("simulate_timetags: ar_coefficient must be in [0,1)");
  }

  Rng rng(seed);
  TimeTagSeries series;
  series.source_id = "sim";
  series.values.resize(n);

  if (ar_coefficient == 0.0) {
    for (Eigen::Index i = 0; i < n; ++i) series.values[i] = rng.exponential(rate_hz);
    return series;
  }

  const double innov = std::sqrt(1.0 - ar_coefficient * ar_coefficient);
  double z = rng.normal();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (i > 0) z = ar_coefficient * z + innov * rng.normal();
    // exponential quantile of the Gaussian copula value
    series.values[i] = -std::log1p(-phi(z)) / rate_hz;
  }
  return series;
}

TelemetrySeries inject_disturbance(const TelemetrySeries& series,
                                   const DisturbanceSpec& spec) {
  const auto n = static_cast<Eigen::Index>(series.records.size());
  if (!(spec.start_index >= 0 && spec.start_index < spec.end_index &&
        spec.end_index <= n)) {
    throw UsageError("inject_disturbance: indices out of range");
  }

  TelemetrySeries out = series;
  auto seg_qber = [&](Eigen::Index i) -> double& { return out.records[i].qber; };

  switch (spec.kind) {
    case DisturbanceKind::level_shift:
      for (Eigen::Index i = spec.start_index; i < spec.end_index; ++i) {
        seg_qber(i) = clip(seg_qber(i) + spec.magnitude, 0.0, 1.0);
      }
      break;
    case DisturbanceKind::variance_burst: {
      double mean = 0.0;
      for (Eigen::Index i = spec.start_index; i < spec.end_index; ++i) {
        mean += seg_qber(i);
      }
      mean /= static_cast<double>(spec.end_index - spec.start_index);
      for (Eigen::Index i = spec.start_index; i < spec.end_index; ++i) {
        seg_qber(i) = clip(mean + spec.magnitude * (seg_qber(i) - mean), 0.0, 1.0);
      }
      break;
    }
    case DisturbanceKind::extra_ar_correlation: {
      const double phi_ar = spec.magnitude;
      if (!(phi_ar >= 0.0 && phi_ar < 1.0)) {
        throw UsageError("inject_disturbance: AR magnitude must be in [0,1)");
      }
      double mean = 0.0;
      for (Eigen::Index i = spec.start_index; i < spec.end_index; ++i) {
        mean += seg_qber(i);
      }
      mean /= static_cast<double>(spec.end_index - spec.start_index);
      const double innov = std::sqrt(1.0 - phi_ar * phi_ar);
      double r = seg_qber(spec.start_index) - mean;
      seg_qber(spec.start_index) = clip(mean + r, 0.0, 1.0);
      for (Eigen::Index i = spec.start_index + 1; i < spec.end_index; ++i) {
        r = phi_ar * r + innov * (seg_qber(i) - mean);
        seg_qber(i) = clip(mean + r, 0.0, 1.0);
      }
      break;
    }
  }
  return out;
}

Eigen::ArrayXd shuffle_surrogate(const Eigen::ArrayXd& values, std::uint64_t seed) {
  if (values.size() == 0) throw UsageError("shuffle_surrogate: empty input");
  Rng rng(seed);
  Eigen::ArrayXd out = values;
  for (Eigen::Index i = out.size() - 1; i > 0; --i) {
    const auto j = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(i) + 1));
    std::swap(out[i], out[j]);
  }
  return out;
}

}  // namespace qsentinel::sim
