#include "qsentinel/rankstat.hpp"

#include <cmath>

#include "qsentinel/error.hpp"
#include "qsentinel/stats.hpp"

namespace qsentinel::rankstat {

SignSequence sign_transform(const Eigen::ArrayXd& values, double p) {
  SignSequence out;
  out.threshold_p = p;
  out.signs.resize(values.size());
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    out.signs[i] = values[i] < p ? -1 : (values[i] > p ? 1 : 0);
  }
  return out;
}

std::optional<double> qp(const Eigen::ArrayXd& values, double p) {
  const Eigen::Index n = values.size();
  if (n < 2) throw UsageError("qp: need at least 2 values");
  const SignSequence s = sign_transform(values, p);
  long sum = 0;
  for (Eigen::Index k = 0; k + 1 < n; ++k) {
    sum += s.signs[k] * s.signs[k + 1];
  }
  const double mean = static_cast<double>(sum) / static_cast<double>(n - 1);
  if (mean <= 0.0) return std::nullopt;
  return std::log10(mean);
}

QpCurve qp_curve(const Eigen::ArrayXd& values, int grid_size) {
  if (values.size() < 2) throw UsageError("qp_curve: need at least 2 values");
  if (grid_size < 2) throw UsageError("qp_curve: grid_size must be >= 2");
  const double lo = values.minCoeff();
  const double hi = values.maxCoeff();
  if (lo == hi) throw DataError("qp_curve: constant input, degenerate grid");

  QpCurve curve;
  curve.n = values.size();
  curve.p_grid = Eigen::ArrayXd::LinSpaced(grid_size, lo, hi);
  curve.q_values.reserve(grid_size);
  for (int i = 0; i < grid_size; ++i) {
    curve.q_values.push_back(qp(values, curve.p_grid[i]));
  }
  return curve;
}

std::pair<double, double> min_qp(const QpCurve& curve) {
  bool found = false;
  double best_p = 0.0;
  double best_q = 0.0;
  for (std::size_t i = 0; i < curve.q_values.size(); ++i) {
    if (!curve.q_values[i]) continue;
    if (!found || *curve.q_values[i] < best_q) {
      found = true;
      best_q = *curve.q_values[i];
      best_p = curve.p_grid[static_cast<Eigen::Index>(i)];
    }
  }
  if (!found) throw DataError("Q_p undefined on entire grid");
  return {best_p, best_q};
}

std::optional<double> log_pearson(const Eigen::ArrayXd& values) {
  if (values.size() < 3) throw UsageError("log_pearson: need at least 3 values");
  const double r = stats::pearson_autocorr(values, 1);
  if (r <= 0.0) return std::nullopt;
  return std::log10(r);
}

RandomnessComparison compare_randomness(const Eigen::ArrayXd& values,
                                        int grid_size) {
  RandomnessComparison cmp;
  cmp.log_pearson = log_pearson(values);
  const QpCurve curve = qp_curve(values, grid_size);
  try {
    auto [p_star, q_min] = min_qp(curve);
    cmp.p_star = p_star;
    cmp.q_min = q_min;
  } catch (const DataError&) {
    // all-undefined curve: leave q_min/p_star empty
  }
  if (cmp.log_pearson && cmp.q_min) {
    cmp.delta = *cmp.log_pearson - *cmp.q_min;
  }
  return cmp;
}

}  // namespace qsentinel::rankstat
