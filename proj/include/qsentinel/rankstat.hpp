#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

namespace qsentinel::rankstat {

// Element-wise three-valued sign of (value - threshold).
struct SignSequence {
  Eigen::ArrayXi signs;  // each in {-1, 0, +1}
  double threshold_p = 0.0;
};

// Sampled map p -> Q_p. Entries where the mean adjacent sign product is not
// positive are explicitly undefined (the log has no finite real value there).
struct QpCurve {
  Eigen::ArrayXd p_grid;  // strictly ascending
  std::vector<std::optional<double>> q_values;
  Eigen::Index n = 0;  // source length
};

struct RandomnessComparison {
  std::optional<double> log_pearson;
  std::optional<double> q_min;
  std::optional<double> p_star;
  std::optional<double> delta;  // log_pearson - q_min when both defined
};

SignSequence sign_transform(const Eigen::ArrayXd& values, double p);

// Q_p = log10(mean over adjacent pairs of x_k * x_{k+1}) where
// x_k = sign(y_k - p). The products lie in {-1, 0, +1}, so the stated
// integer-part/ceiling wrapping of the product is the identity and the
// formula reduces to the log of the plain product mean. A non-positive mean
// yields the undefined marker, never a NaN or complex value.
std::optional<double> qp(const Eigen::ArrayXd& values, double p);

// Q_p sampled on grid_size evenly spaced thresholds spanning
// [min(values), max(values)] inclusive.
QpCurve qp_curve(const Eigen::ArrayXd& values, int grid_size = 201);

// Minimum over defined entries; ties broken by smallest p.
// Throws DataError when the curve is undefined on the entire grid.
std::pair<double, double> min_qp(const QpCurve& curve);  // (p_star, q_min)

// log10 of the lag-1 Pearson autocorrelation when positive, else undefined.
std::optional<double> log_pearson(const Eigen::ArrayXd& values);

RandomnessComparison compare_randomness(const Eigen::ArrayXd& values,
                                        int grid_size = 201);

}  // namespace qsentinel::rankstat
