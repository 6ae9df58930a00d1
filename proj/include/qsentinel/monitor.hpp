#pragma once

#include <json.hpp>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "qsentinel/telemetry.hpp"

namespace qsentinel::monitor {

struct MonitorConfig {
  double qber_limit = 0.04;
  int acf_lag_lo = 1;
  int acf_lag_hi = 5;
  int acf_min_consecutive = 2;
  double trend_slope_sigma = 3.0;
  int percentile_window = 50;
  int recompute_every = 10;
};

enum class AlertKind { qber_threshold, excess_correlation, trend };
enum class Severity { warning, critical };

std::string to_string(AlertKind kind);
std::string to_string(Severity severity);

// A detected anomaly over the half-open record range [start_index, end_index).
// The evidence record carries the numbers needed to re-derive the trigger
// decision independently.
struct AlertEvent {
  AlertKind kind = AlertKind::qber_threshold;
  Severity severity = Severity::warning;
  Eigen::Index start_index = 0;
  Eigen::Index end_index = 0;
  nlohmann::json evidence;
  std::string message;

  nlohmann::json to_json() const;
};

struct KeyBudget {
  double skr_bps = 0.0;
  long key_len_bits = 256;
  long keys_per_minute = 0;
  double total_key_bits = 0.0;  // over the observed duration
};

struct ReferenceRow {
  double length_km = 0.0;
  double skr_bps = 0.0;
  std::string detector;  // SPAD or SSPD
  double loss_db = 0.0;
  double qber_percent = 0.0;
  std::string group;
};

// The seven bundled reference links (two Kazan lines plus five international
// commercial systems), in fixed order.
const std::vector<ReferenceRow>& reference_table();

// One alert per maximal run of consecutive records with qber >= qber_limit;
// critical when the run has 3 or more records.
std::vector<AlertEvent> threshold_scan(const TelemetrySeries& series,
                                       const MonitorConfig& config);

// Alert when at least acf_min_consecutive consecutive lags inside
// [acf_lag_lo, acf_lag_hi] exceed the 95 % white-noise band in magnitude.
std::optional<AlertEvent> excess_correlation_scan(const Eigen::ArrayXd& values,
                                                  const MonitorConfig& config);

// Regression-slope t-test of qber against time at trend_slope_sigma; evidence
// includes a QBER forecast 24 h past the last sample.
std::optional<AlertEvent> trend_scan(const TelemetrySeries& series,
                                     const MonitorConfig& config);

long keys_per_minute(double skr_bps, long key_len_bits);

KeyBudget key_budget(const TelemetrySeries& series, long key_len_bits = 256);

// Secret key rate normalized to a 100 MHz clock.
double normalized_skr(double skr_bps, double clock_hz);

// Runs all three scans, skipping any whose preconditions the series cannot
// meet (too short, zero variance).
std::vector<AlertEvent> run_scans(const TelemetrySeries& series,
                                  const MonitorConfig& config);

// Incremental monitor state. Scans re-run on the series prefix every time the
// record count crosses a multiple of recompute_every, so folding any
// partition of a series through watch_step yields the same alerts as one
// batch feed. Alerts are deduplicated by (kind, start_index) and emitted
// exactly once.
class WatchState {
 public:
  explicit WatchState(MonitorConfig config) : config_(config) { series_.link_id = "watch"; }

  // Absorbs records and returns the newly raised alerts. On a timestamp
  // regression across the boundary throws DataError and leaves the state
  // untouched.
  std::vector<AlertEvent> step(const std::vector<TelemetryRecord>& new_records);

  const TelemetrySeries& series() const { return series_; }
  const MonitorConfig& config() const { return config_; }

 private:
  MonitorConfig config_;
  TelemetrySeries series_;
  std::set<std::pair<int, Eigen::Index>> emitted_;
};

}  // namespace qsentinel::monitor
