#pragma once

#include <json.hpp>
#include <optional>
#include <string>

#include "qsentinel/monitor.hpp"
#include "qsentinel/telemetry.hpp"

namespace qsentinel::monitor {

// Plain-text report plus a machine-readable summary mirroring every number.
struct Report {
  std::string text;
  nlohmann::json summary;
  std::vector<AlertEvent> alerts;
};

// Aggregates summary statistics, percentile band endpoints, the ACF with its
// white-noise band, alerts, key budget, clock-normalized SKR, the Q_p
// comparison (when time tags are supplied), and the bundled reference table
// with the analyzed link appended. Sections whose preconditions the data
// cannot meet are marked unavailable; the report is still produced.
Report build_report(const TelemetrySeries& series,
                    const std::optional<TimeTagSeries>& timetags,
                    const MonitorConfig& config, int acf_max_lag = 20,
                    int qp_grid_size = 201, double clock_hz = 1e8);

}  // namespace qsentinel::monitor
