#include "qsentinel/stats.hpp"

#include <algorithm>
#include <cmath>

#include "qsentinel/error.hpp"

namespace qsentinel::stats {

namespace {

// Nearest-rank percentile of a sorted window: the ceil(L/100 * m)-th smallest.
double nearest_rank(const std::vector<double>& sorted, double level) {
  auto m = static_cast<double>(sorted.size());
  auto rank = static_cast<std::size_t>(std::ceil(level * m / 100.0));
  if (rank < 1) rank = 1;
  if (rank > sorted.size()) rank = sorted.size();
  return sorted[rank - 1];
}

}  // namespace

PercentileBand percentile_level_filter(const Eigen::ArrayXd& values, int window,
                                       const std::vector<double>& levels) {
  const Eigen::Index n = values.size();
  if (n == 0) throw UsageError("percentile filter: empty input");
  if (window < 1) throw UsageError("percentile filter: window must be >= 1");
  if (levels.empty()) throw UsageError("percentile filter: no levels");
  for (double level : levels) {
    if (!(level > 0.0 && level < 100.0)) {
      throw UsageError("percentile filter: level must be in (0,100)");
    }
  }

  PercentileBand out;
  out.levels = levels;
  out.window = window;
  out.bands.assign(levels.size(), Eigen::ArrayXd(n));

  const Eigen::Index half_lo = window / 2;
  const Eigen::Index half_hi = (window + 1) / 2;
  std::vector<double> win;
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::Index lo = std::max<Eigen::Index>(0, i - half_lo);
    Eigen::Index hi = std::min<Eigen::Index>(n - 1, i + half_hi - 1);
    win.assign(values.data() + lo, values.data() + hi + 1);
    std::sort(win.begin(), win.end());
    for (std::size_t l = 0; l < levels.size(); ++l) {
      out.bands[l][i] = nearest_rank(win, levels[l]);
    }
  }
  return out;
}

AcfResult acf(const Eigen::ArrayXd& values, int max_lag) {
  const Eigen::Index n = values.size();
  if (max_lag < 1) throw UsageError("acf: max_lag must be >= 1");
  if (n < max_lag + 2) throw UsageError("acf: need at least max_lag + 2 samples");
  if ((values == values[0]).all()) throw DataError("acf: zero variance");
  const Eigen::ArrayXd dev = values - values.mean();
  const double denom = (dev * dev).sum();
  if (denom == 0.0) throw DataError("acf: zero variance");

  AcfResult out;
  out.max_lag = max_lag;
  out.n = n;
  out.white_noise_band = 1.96 / std::sqrt(static_cast<double>(n));
  out.coefficients.resize(max_lag + 1);
  out.coefficients[0] = 1.0;
  for (int k = 1; k <= max_lag; ++k) {
    out.coefficients[k] = (dev.head(n - k) * dev.tail(n - k)).sum() / denom;
  }
  return out;
}

double pearson_autocorr(const Eigen::ArrayXd& values, int lag) {
  const Eigen::Index n = values.size();
  if (lag < 1) throw UsageError("pearson_autocorr: lag must be >= 1");
  if (n < lag + 2) throw UsageError("pearson_autocorr: need at least lag + 2 samples");
  const Eigen::ArrayXd head = values.head(n - lag);
  const Eigen::ArrayXd tail = values.tail(n - lag);
  if ((head == head[0]).all() || (tail == tail[0]).all()) {
    throw DataError("pearson_autocorr: zero variance in a subsequence");
  }
  const Eigen::ArrayXd dh = head - head.mean();
  const Eigen::ArrayXd dt = tail - tail.mean();
  const double sh = (dh * dh).sum();
  const double st = (dt * dt).sum();
  if (sh == 0.0 || st == 0.0) {
    throw DataError("pearson_autocorr: zero variance in a subsequence");
  }
  return (dh * dt).sum() / std::sqrt(sh * st);
}

RegressionFit linear_regression(const Eigen::ArrayXd& xs, const Eigen::ArrayXd& ys) {
  const Eigen::Index n = xs.size();
  if (n != ys.size()) throw UsageError("linear_regression: length mismatch");
  if (n < 2) throw UsageError("linear_regression: need at least 2 points");
  if ((xs == xs[0]).all()) throw DataError("linear_regression: xs are all equal");
  const Eigen::ArrayXd dx = xs - xs.mean();
  const Eigen::ArrayXd dy = ys - ys.mean();
  const double sxx = (dx * dx).sum();
  if (sxx == 0.0) throw DataError("linear_regression: xs are all equal");

  RegressionFit fit;
  fit.n = n;
  fit.slope = (dx * dy).sum() / sxx;
  fit.intercept = ys.mean() - fit.slope * xs.mean();
  if (n > 2) {
    const Eigen::ArrayXd resid = ys - (fit.slope * xs + fit.intercept);
    fit.residual_std = std::sqrt((resid * resid).sum() / static_cast<double>(n - 2));
    fit.slope_stderr = fit.residual_std / std::sqrt(sxx);
  }
  return fit;
}

Eigen::ArrayXd forecast(const RegressionFit& fit, const Eigen::ArrayXd& xs_future) {
  return fit.slope * xs_future + fit.intercept;
}

SummaryStats summary_stats(const Eigen::ArrayXd& values) {
  const Eigen::Index n = values.size();
  if (n == 0) throw UsageError("summary_stats: empty input");
  SummaryStats s;
  s.n = n;
  s.mean = values.mean();
  s.min = values.minCoeff();
  s.max = values.maxCoeff();
  s.span = s.max - s.min;
  if (n >= 2) {
    const Eigen::ArrayXd dev = values - s.mean;
    s.stddev = std::sqrt((dev * dev).sum() / static_cast<double>(n - 1));
  }
  return s;
}

}  // namespace qsentinel::stats
