#include "qsentinel/monitor.hpp"

#include <cmath>

#include "qsentinel/error.hpp"
#include "qsentinel/stats.hpp"

namespace qsentinel::monitor {

std::string to_string(AlertKind kind) {
  switch (kind) {
    case AlertKind::qber_threshold: return "qber_threshold";
    case AlertKind::excess_correlation: return "excess_correlation";
    case AlertKind::trend: return "trend";
  }
  return "unknown";
}

std::string to_string(Severity severity) {
  return severity == Severity::critical ? "critical" : "warning";
}

nlohmann::json AlertEvent::to_json() const {
  return {{"kind", to_string(kind)},
          {"severity", to_string(severity)},
          {"start_index", start_index},
          {"end_index", end_index},
          {"evidence", evidence},
          {"message", message}};
}

const std::vector<ReferenceRow>& reference_table() {
  static const std::vector<ReferenceRow> rows = {
      {12, 2e4, "SPAD", 7, 4, "Russia"},
      {143, 12, "SSPD", 37, 2, "Russia"},
      {67, 60, "SPAD", 14, 6, "Switzerland"},
      {45, 3e5, "SPAD", 14, 4, "Japan"},
      {66, 5e5, "SPAD", 21, 5, "China"},
      {97, 800, "SSPD", 33, 3, "Japan"},
      {90, 1e3, "SSPD", 30, 3, "Japan"},
  };
  return rows;
}

std::vector<AlertEvent> threshold_scan(const TelemetrySeries& series,
                                       const MonitorConfig& config) {
  std::vector<AlertEvent> alerts;
  const auto n = static_cast<Eigen::Index>(series.records.size());
  Eigen::Index i = 0;
  while (i < n) {
    if (series.records[i].qber < config.qber_limit) {
      ++i;
      continue;
    }
    Eigen::Index start = i;
    double max_q = series.records[i].qber;
    while (i < n && series.records[i].qber >= config.qber_limit) {
      max_q = std::max(max_q, series.records[i].qber);
      ++i;
    }
    AlertEvent ev;
    ev.kind = AlertKind::qber_threshold;
    ev.start_index = start;
    ev.end_index = i;
    ev.severity = (i - start >= 3) ? Severity::critical : Severity::warning;
    ev.evidence = {{"limit", config.qber_limit},
                   {"max_qber", max_q},
                   {"run_length", i - start}};
    ev.message = "QBER >= " + format_number(config.qber_limit) + " for " +
                 std::to_string(i - start) + " record(s), max " + format_number(max_q);
    alerts.push_back(std::move(ev));
  }
  return alerts;
}

std::optional<AlertEvent> excess_correlation_scan(const Eigen::ArrayXd& values,
                                                  const MonitorConfig& config) {
  const stats::AcfResult r = stats::acf(values, config.acf_lag_hi);
  std::vector<int> offending;
  int best_run = 0;
  int run = 0;
  for (int k = config.acf_lag_lo; k <= config.acf_lag_hi; ++k) {
    if (std::abs(r.coefficients[k]) > r.white_noise_band) {
      offending.push_back(k);
      ++run;
      best_run = std::max(best_run, run);
    } else {
      run = 0;
    }
  }
  if (best_run < config.acf_min_consecutive) return std::nullopt;

  AlertEvent ev;
  ev.kind = AlertKind::excess_correlation;
  ev.severity = Severity::warning;
  ev.start_index = 0;
  ev.end_index = r.n;
  nlohmann::json lags = nlohmann::json::array();
  for (int k : offending) {
    lags.push_back({{"lag", k}, {"r", r.coefficients[k]}});
  }
  ev.evidence = {{"band", r.white_noise_band},
                 {"lag_window", {config.acf_lag_lo, config.acf_lag_hi}},
                 {"offending_lags", lags}};
  ev.message = "excess autocorrelation in lag window [" +
               std::to_string(config.acf_lag_lo) + "," +
               std::to_string(config.acf_lag_hi) + "]";
  return ev;
}

std::optional<AlertEvent> trend_scan(const TelemetrySeries& series,
                                     const MonitorConfig& config) {
  const auto n = static_cast<Eigen::Index>(series.records.size());
  if (n < 10) throw UsageError("trend_scan: need at least 10 records");
  const Eigen::ArrayXd ts = series.timestamps();
  const stats::RegressionFit fit = stats::linear_regression(ts, series.qber());
  if (!(std::abs(fit.slope) > config.trend_slope_sigma * fit.slope_stderr)) {
    return std::nullopt;
  }
  // rounding-noise floor: predicted QBER change over the observed span must
  // be a real number, not an artifact of a numerically flat series
  if (std::abs(fit.slope) * (ts[n - 1] - ts[0]) < 1e-12) return std::nullopt;
  const double horizon = ts[n - 1] + 86400.0;
  Eigen::ArrayXd future(1);
  future[0] = horizon;
  const double forecast_qber = stats::forecast(fit, future)[0];

  AlertEvent ev;
  ev.kind = AlertKind::trend;
  ev.severity = Severity::warning;
  ev.start_index = 0;
  ev.end_index = n;
  ev.evidence = {{"slope_per_s", fit.slope},
                 {"slope_stderr", fit.slope_stderr},
                 {"sigma", config.trend_slope_sigma},
                 {"forecast_horizon_s", horizon},
                 {"forecast_qber", forecast_qber}};
  ev.message = "QBER trend slope " + format_number(fit.slope) +
               "/s; 24h forecast " + format_number(forecast_qber);
  return ev;
}

long keys_per_minute(double skr_bps, long key_len_bits) {
  if (!(skr_bps > 0.0) || key_len_bits <= 0) {
    throw UsageError("keys_per_minute: inputs must be positive");
  }
  // absorb representation error so exact boundaries (skr*60 == k*len) round down correctly
  return static_cast<long>(
      std::floor(skr_bps * 60.0 / static_cast<double>(key_len_bits) + 1e-9));
}

KeyBudget key_budget(const TelemetrySeries& series, long key_len_bits) {
  if (series.records.empty()) throw UsageError("key_budget: empty series");
  KeyBudget b;
  b.skr_bps = series.skr().mean();
  b.key_len_bits = key_len_bits;
  b.keys_per_minute = b.skr_bps > 0.0 ? keys_per_minute(b.skr_bps, key_len_bits) : 0;
  const double duration =
      series.records.back().timestamp - series.records.front().timestamp;
  b.total_key_bits = b.skr_bps * duration;
  return b;
}

double normalized_skr(double skr_bps, double clock_hz) {
  if (!(skr_bps > 0.0) || !(clock_hz > 0.0)) {
    throw UsageError("normalized_skr: inputs must be positive");
  }
  return skr_bps * (1e8 / clock_hz);
}

std::vector<AlertEvent> run_scans(const TelemetrySeries& series,
                                  const MonitorConfig& config) {
  std::vector<AlertEvent> alerts = threshold_scan(series, config);
  try {
    if (auto ev = excess_correlation_scan(series.qber(), config)) {
      alerts.push_back(std::move(*ev));
    }
  } catch (const UsageError&) {
  } catch (const DataError&) {
  }
  try {
    if (auto ev = trend_scan(series, config)) alerts.push_back(std::move(*ev));
  } catch (const UsageError&) {
  } catch (const DataError&) {
  }
  return alerts;
}

std::vector<AlertEvent> WatchState::step(const std::vector<TelemetryRecord>& new_records) {
  // validate everything before touching state
  double last_ts = series_.records.empty()
                       ? -std::numeric_limits<double>::infinity()
                       : series_.records.back().timestamp;
  for (const auto& rec : new_records) {
    validate_record(rec);
    if (rec.timestamp <= last_ts) {
      throw DataError("watch: timestamp " + format_number(rec.timestamp) +
                      " does not extend the series");
    }
    last_ts = rec.timestamp;
  }

  std::vector<AlertEvent> raised;
  for (const auto& rec : new_records) {
    series_.records.push_back(rec);
    const auto n = static_cast<Eigen::Index>(series_.records.size());
    if (n % config_.recompute_every != 0) continue;
    for (auto& ev : run_scans(series_, config_)) {
      const auto key = std::make_pair(static_cast<int>(ev.kind), ev.start_index);
      if (emitted_.insert(key).second) raised.push_back(std::move(ev));
    }
  }
  return raised;
}

}  // namespace qsentinel::monitor
