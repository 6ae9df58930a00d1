#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

namespace qsentinel {

// One sample of link health: QBER as a fraction in [0,1], secret key rate in
// bits per second, optional channel loss in dB.
struct TelemetryRecord {
  double timestamp = 0.0;  // seconds since Unix epoch
  double qber = 0.0;       // fraction, not percent
  double skr_bps = 0.0;
  std::optional<double> loss_db;
};

// Time-ordered samples from one link. Timestamps are strictly increasing.
struct TelemetrySeries {
  std::string link_id;
  std::vector<TelemetryRecord> records;

  Eigen::ArrayXd timestamps() const;
  Eigen::ArrayXd qber() const;
  Eigen::ArrayXd skr() const;
  std::size_t size() const { return records.size(); }
};

// Raw-key time-tag differences, all strictly positive.
struct TimeTagSeries {
  std::string source_id;
  Eigen::ArrayXd values;
};

// Renders a double with up to 9 significant digits; the fixed rendering used
// by every text output so golden files are stable and write/parse/write is
// idempotent.
std::string format_number(double v);

// Throws DataError if any field violates the record invariants.
void validate_record(const TelemetryRecord& rec);

// CSV with header `timestamp,qber,skr_bps[,loss_db]`. Malformed rows raise
// DataError naming the offending 1-based line; non-increasing timestamps
// raise DataError naming both record indices.
TelemetrySeries parse_telemetry_csv(const std::string& text,
                                    const std::string& link_id = "link");

std::string write_telemetry_csv(const TelemetrySeries& series);

// One positive decimal per line.
TimeTagSeries parse_timetags(const std::string& text,
                             const std::string& source_id = "tags");

std::string write_timetags(const TimeTagSeries& series);

// Appends one CSV row to the history log, creating the file (with header) if
// needed. The record is validated before anything is written.
void append_history(const TelemetryRecord& rec, const std::string& path);

// Reads a history log, tolerating a partial trailing line from a concurrent
// writer (anything after the last '\n' is ignored). A missing or header-only
// file yields an empty vector.
std::vector<TelemetryRecord> read_history(const std::string& path);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace qsentinel
