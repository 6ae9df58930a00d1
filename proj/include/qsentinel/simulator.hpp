#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "qsentinel/telemetry.hpp"

namespace qsentinel::sim {

// Generator parameters calibrated to a field-test-like long-haul link:
// ~2 % mean QBER with a diurnal swing and AR(1)-correlated noise.
struct LinkProfile {
  double qber_mean = 0.02;
  double qber_amplitude = 0.005;  // diurnal swing
  double ar_coefficient = 0.6;    // in [0, 1)
  double noise_std = 0.005;       // stationary std of the AR component
  double clip_low = 0.001;
  double clip_high = 0.06;
  double sample_interval_s = 330.0;
  double skr_base_bps = 12.0;
  std::uint64_t seed = 2046;
};

enum class DisturbanceKind { level_shift, extra_ar_correlation, variance_burst };

struct DisturbanceSpec {
  Eigen::Index start_index = 0;
  Eigen::Index end_index = 0;  // exclusive
  DisturbanceKind kind = DisturbanceKind::level_shift;
  double magnitude = 0.0;
};

// q_t = clip(mean + amplitude*sin(2*pi*t/86400) + e_t) with e_t an AR(1)
// process at stationary std noise_std; SKR is the base rate with a mild
// perturbation anticorrelated with QBER. Deterministic for a fixed seed.
TelemetrySeries simulate_qber(const LinkProfile& profile, Eigen::Index n);

// ar_coefficient = 0: i.i.d. exponential inter-arrival times with mean
// 1/rate_hz. Otherwise a Gaussian AR(1) latent sequence is mapped through the
// exponential quantile function, keeping the exponential marginal while
// inducing serial correlation.
TimeTagSeries simulate_timetags(double rate_hz, Eigen::Index n,
                                double ar_coefficient, std::uint64_t seed);

TelemetrySeries inject_disturbance(const TelemetrySeries& series,
                                   const DisturbanceSpec& spec);

// Uniformly random permutation, deterministic per seed; preserves the
// multiset of values exactly.
Eigen::ArrayXd shuffle_surrogate(const Eigen::ArrayXd& values, std::uint64_t seed);

}  // namespace qsentinel::sim
