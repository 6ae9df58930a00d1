#pragma once

#include <Eigen/Dense>
#include <vector>

namespace qsentinel::stats {

// Sliding-window percentile bands aligned index-for-index with the input.
struct PercentileBand {
  std::vector<double> levels;          // percentile levels in (0,100)
  int window = 50;                     // smoothing width in points
  std::vector<Eigen::ArrayXd> bands;   // one series per level, input-length
};

struct AcfResult {
  int max_lag = 0;
  Eigen::ArrayXd coefficients;  // r(0..max_lag), r(0) == 1
  Eigen::Index n = 0;
  double white_noise_band = 0.0;  // 1.96 / sqrt(n)
};

struct RegressionFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual_std = 0.0;   // sqrt(SSE / (n-2)) for n > 2, else 0
  double slope_stderr = 0.0;   // residual_std / sqrt(Sxx)
  Eigen::Index n = 0;
};

struct SummaryStats {
  double mean = 0.0;
  double stddev = 0.0;  // n-1 divisor for n >= 2, else 0
  double min = 0.0;
  double max = 0.0;
  double span = 0.0;  // max - min
  Eigen::Index n = 0;
};

// Nearest-rank percentile of each centered window
// values[max(0,i-floor(w/2)) .. min(n-1, i+ceil(w/2)-1)]; windows truncate at
// the series boundaries so the bands have the input's length.
PercentileBand percentile_level_filter(const Eigen::ArrayXd& values, int window,
                                       const std::vector<double>& levels = {25, 50, 75});

// Biased autocorrelation estimator of deviations from the mean:
// r(k) = sum_{i<n-k} d_i d_{i+k} / sum d_i^2.
AcfResult acf(const Eigen::ArrayXd& values, int max_lag);

// Pearson product-moment correlation between the head and the lag-shifted
// tail, each standardized by its own mean and standard deviation.
double pearson_autocorr(const Eigen::ArrayXd& values, int lag);

RegressionFit linear_regression(const Eigen::ArrayXd& xs, const Eigen::ArrayXd& ys);

Eigen::ArrayXd forecast(const RegressionFit& fit, const Eigen::ArrayXd& xs_future);

SummaryStats summary_stats(const Eigen::ArrayXd& values);

}  // namespace qsentinel::stats
