#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "qsentinel/error.hpp"
#include "qsentinel/stats.hpp"
#include "qsentinel/simulator.hpp"

using namespace qsentinel;
using namespace qsentinel::sim;

TEST_CASE("degenerate generator is constant at the mean") {
  LinkProfile p;
  p.qber_amplitude = 0.0;
  p.ar_coefficient = 0.0;
  p.noise_std = 0.0;
  auto s = simulate_qber(p, 100);
  for (const auto& rec : s.records) CHECK(rec.qber == p.qber_mean);
}

TEST_CASE("defaults at n=520: calibrated mean and clip range") {
  LinkProfile p;
  auto s = simulate_qber(p, 520);
  REQUIRE(s.records.size() == 520);
  double mean = s.qber().mean();
  CHECK(mean > 0.015);
  CHECK(mean < 0.025);
  for (const auto& rec : s.records) {
    CHECK(rec.qber >= p.clip_low);
    CHECK(rec.qber <= p.clip_high);
  }
  // timestamps follow the sampling interval
  CHECK(s.records[0].timestamp == 0.0);
  CHECK(s.records[1].timestamp == p.sample_interval_s);
}

TEST_CASE("AR component lag-1 autocorrelation near the coefficient") {
  LinkProfile p;
  p.qber_amplitude = 0.0;  // isolate the AR component
  p.clip_low = -1.0 + 1e-9;
  p.clip_high = 1.0;
  p.qber_mean = 0.02;
  auto s = simulate_qber(p, 100000);
  double r1 = stats::pearson_autocorr(s.qber(), 1);
  CHECK(std::abs(r1 - 0.6) < 0.02);
}

TEST_CASE("determinism: same seed, same bytes") {
  LinkProfile p;
  auto a = simulate_qber(p, 200);
  auto b = simulate_qber(p, 200);
  REQUIRE(a.records.size() == b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    CHECK(a.records[i].qber == b.records[i].qber);
    CHECK(a.records[i].skr_bps == b.records[i].skr_bps);
  }
  p.seed = 1;
  auto c = simulate_qber(p, 200);
  CHECK(a.records[0].qber != c.records[0].qber);
}

TEST_CASE("skr is anticorrelated with qber") {
  LinkProfile p;
  auto s = simulate_qber(p, 5000);
  Eigen::ArrayXd q = s.qber();
  Eigen::ArrayXd k = s.skr();
  Eigen::ArrayXd dq = q - q.mean();
  Eigen::ArrayXd dk = k - k.mean();
  double corr = (dq * dk).sum() /
                std::sqrt((dq * dq).sum() * (dk * dk).sum());
  CHECK(corr < -0.9);
}

TEST_CASE("invalid profiles and counts") {
  LinkProfile p;
  p.ar_coefficient = 1.0;
  CHECK_THROWS_AS(simulate_qber(p, 10), UsageError);
  p = LinkProfile{};
  p.qber_mean = 0.1;  // outside clip range
  CHECK_THROWS_AS(simulate_qber(p, 10), UsageError);
  CHECK_THROWS_AS(simulate_qber(LinkProfile{}, 0), UsageError);
}

TEST_CASE("timetags: iid mean interval and zero lag-1 correlation") {
  auto tags = simulate_timetags(1.0, 100000, 0.0, 5);
  CHECK(std::abs(tags.values.mean() - 1.0) < 0.02);
  CHECK(std::abs(stats::pearson_autocorr(tags.values, 1)) < 0.01);
  CHECK((tags.values > 0.0).all());
}

TEST_CASE("timetags: copula induces positive lag-1 correlation") {
  auto tags = simulate_timetags(1.0, 100000, 0.5, 6);
  CHECK(stats::pearson_autocorr(tags.values, 1) > 0.2);
  CHECK((tags.values > 0.0).all());
}

TEST_CASE("timetags: copula preserves the exponential marginal (KS)") {
  auto tags = simulate_timetags(2.0, 100000, 0.5, 7);
  std::vector<double> v(tags.values.data(), tags.values.data() + tags.values.size());
  std::sort(v.begin(), v.end());
  double ks = 0.0;
  const auto n = static_cast<double>(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    double cdf = 1.0 - std::exp(-2.0 * v[i]);
    ks = std::max(ks, std::abs(cdf - static_cast<double>(i + 1) / n));
    ks = std::max(ks, std::abs(cdf - static_cast<double>(i) / n));
  }
  CHECK(ks < 0.02);
}

TEST_CASE("timetags: parameter validation") {
  CHECK_THROWS_AS(simulate_timetags(0.0, 100, 0.0, 1), UsageError);
  CHECK_THROWS_AS(simulate_timetags(1.0, 1, 0.0, 1), UsageError);
  CHECK_THROWS_AS(simulate_timetags(1.0, 100, 1.0, 1), UsageError);
}

TEST_CASE("inject_disturbance: level shift and identity") {
  LinkProfile p;
  p.qber_amplitude = 0.0;
  p.ar_coefficient = 0.0;
  p.noise_std = 0.0;
  auto flat = simulate_qber(p, 100);

  DisturbanceSpec spec{20, 40, DisturbanceKind::level_shift, 0.02};
  auto shifted = inject_disturbance(flat, spec);
  for (Eigen::Index i = 0; i < 100; ++i) {
    double expected = (i >= 20 && i < 40) ? 0.04 : 0.02;
    CHECK(shifted.records[i].qber == doctest::Approx(expected).epsilon(1e-12));
  }

  spec.magnitude = 0.0;
  auto same = inject_disturbance(flat, spec);
  for (Eigen::Index i = 0; i < 100; ++i) {
    CHECK(same.records[i].qber == flat.records[i].qber);
  }
}

TEST_CASE("inject_disturbance: variance burst triples the segment std") {
  LinkProfile p;
  p.qber_amplitude = 0.0;
  p.clip_low = -0.99;
  p.clip_high = 0.99;  // avoid clipping interference
  auto s = simulate_qber(p, 400);
  DisturbanceSpec spec{100, 300, DisturbanceKind::variance_burst, 3.0};
  auto burst = inject_disturbance(s, spec);
  auto seg_std = [](const TelemetrySeries& ts, Eigen::Index lo, Eigen::Index hi) {
    Eigen::ArrayXd q(hi - lo);
    for (Eigen::Index i = lo; i < hi; ++i) q[i - lo] = ts.records[i].qber;
    return stats::summary_stats(q).stddev;
  };
  double before = seg_std(s, 100, 300);
  double after = seg_std(burst, 100, 300);
  CHECK(after == doctest::Approx(3.0 * before).epsilon(0.2));
}

TEST_CASE("inject_disturbance: extra AR correlation raises lag-1 autocorr") {
  LinkProfile p;
  p.qber_amplitude = 0.0;
  p.ar_coefficient = 0.0;
  auto s = simulate_qber(p, 2000);
  DisturbanceSpec spec{0, 2000, DisturbanceKind::extra_ar_correlation, 0.8};
  auto corr = inject_disturbance(s, spec);
  CHECK(stats::pearson_autocorr(corr.qber(), 1) > 0.5);
  CHECK(stats::pearson_autocorr(s.qber(), 1) < 0.1);
}

TEST_CASE("inject_disturbance: index validation") {
  auto s = simulate_qber(LinkProfile{}, 50);
  CHECK_THROWS_AS(inject_disturbance(s, {10, 60, DisturbanceKind::level_shift, 0.1}),
                  UsageError);
  CHECK_THROWS_AS(inject_disturbance(s, {30, 20, DisturbanceKind::level_shift, 0.1}),
                  UsageError);
}

TEST_CASE("shuffle_surrogate: permutation law and destroyed correlation") {
  auto tags = simulate_timetags(1.0, 10000, 0.6, 8);
  auto shuffled = shuffle_surrogate(tags.values, 99);

  std::vector<double> a(tags.values.data(), tags.values.data() + tags.values.size());
  std::vector<double> b(shuffled.data(), shuffled.data() + shuffled.size());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  CHECK(a == b);

  CHECK(std::abs(stats::pearson_autocorr(shuffled, 1)) < 0.05);

  Eigen::ArrayXd one(1);
  one << 3.0;
  auto same = shuffle_surrogate(one, 5);
  CHECK(same[0] == 3.0);
}
