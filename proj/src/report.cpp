#include "qsentinel/report.hpp"

#include <cmath>
#include <sstream>

#include "qsentinel/error.hpp"
#include "qsentinel/rankstat.hpp"
#include "qsentinel/stats.hpp"

namespace qsentinel::monitor {

namespace {

std::string fmt(double v) { return format_number(v); }

void section(std::ostream& os, const std::string& title) {
  os << "\n== " << title << " ==\n";
}

}  // namespace

Report build_report(const TelemetrySeries& series,
                    const std::optional<TimeTagSeries>& timetags,
                    const MonitorConfig& config, int acf_max_lag,
                    int qp_grid_size, double clock_hz) {
  if (series.records.empty()) throw UsageError("build_report: empty series");

  Report report;
  nlohmann::json& js = report.summary;
  std::ostringstream os;
  const Eigen::ArrayXd qber = series.qber();
  const auto n = static_cast<Eigen::Index>(series.records.size());

  os << "QKD link report: " << series.link_id << " (" << n << " records)\n";
  js["link_id"] = series.link_id;
  js["n_records"] = n;

  // summary statistics
  {
    const stats::SummaryStats s = stats::summary_stats(qber);
    section(os, "QBER summary");
    os << "mean " << fmt(s.mean) << "  std " << fmt(s.stddev) << "  min "
       << fmt(s.min) << "  max " << fmt(s.max) << "  span " << fmt(s.span) << "\n";
    js["qber"] = {{"mean", s.mean}, {"std", s.stddev}, {"min", s.min},
                  {"max", s.max},   {"span", s.span}};
  }

  // percentile bands (first/last values per level)
  section(os, "Percentile level filter");
  try {
    const stats::PercentileBand band =
        stats::percentile_level_filter(qber, config.percentile_window);
    nlohmann::json jb = nlohmann::json::array();
    for (std::size_t l = 0; l < band.levels.size(); ++l) {
      os << "p" << band.levels[l] << ": first " << fmt(band.bands[l][0])
         << "  last " << fmt(band.bands[l][n - 1]) << "\n";
      jb.push_back({{"level", band.levels[l]},
                    {"first", band.bands[l][0]},
                    {"last", band.bands[l][n - 1]}});
    }
    js["percentile_bands"] = jb;
  } catch (const std::runtime_error& e) {
    os << "unavailable: " << e.what() << "\n";
    js["percentile_bands"] = nullptr;
  }

  // ACF
  section(os, "Autocorrelation of QBER deviations");
  try {
    const int max_lag = static_cast<int>(std::min<Eigen::Index>(acf_max_lag, n - 2));
    const stats::AcfResult r = stats::acf(qber, max_lag);
    os << "white-noise band +-" << fmt(r.white_noise_band) << "\n";
    nlohmann::json jr = nlohmann::json::array();
    for (int k = 0; k <= r.max_lag; ++k) {
      os << "lag " << k << ": " << fmt(r.coefficients[k]) << "\n";
      jr.push_back(r.coefficients[k]);
    }
    js["acf"] = {{"band", r.white_noise_band}, {"r", jr}};
  } catch (const std::runtime_error& e) {
    os << "unavailable: " << e.what() << "\n";
    js["acf"] = nullptr;
  }

  // alerts
  section(os, "Alerts");
  report.alerts = run_scans(series, config);
  if (report.alerts.empty()) os << "none\n";
  nlohmann::json ja = nlohmann::json::array();
  for (const auto& ev : report.alerts) {
    os << "[" << to_string(ev.severity) << "] " << to_string(ev.kind) << " ["
       << ev.start_index << "," << ev.end_index << "): " << ev.message << "\n";
    ja.push_back(ev.to_json());
  }
  js["alerts"] = ja;

  // key budget
  section(os, "Key budget");
  const KeyBudget budget = key_budget(series);
  os << "mean SKR " << fmt(budget.skr_bps) << " bps, " << budget.keys_per_minute
     << " x " << budget.key_len_bits << "-bit keys/min, total "
     << fmt(budget.total_key_bits) << " bits\n";
  js["key_budget"] = {{"skr_bps", budget.skr_bps},
                      {"key_len_bits", budget.key_len_bits},
                      {"keys_per_minute", budget.keys_per_minute},
                      {"total_key_bits", budget.total_key_bits}};

  // normalized SKR
  section(os, "Clock-normalized SKR");
  if (budget.skr_bps > 0.0) {
    const double norm = normalized_skr(budget.skr_bps, clock_hz);
    os << fmt(norm) << " bps per 100 MHz (clock " << fmt(clock_hz) << " Hz)\n";
    js["normalized_skr"] = {{"clock_hz", clock_hz}, {"bps_per_100mhz", norm}};
  } else {
    os << "unavailable: zero SKR\n";
    js["normalized_skr"] = nullptr;
  }

  // Q_p comparison
  section(os, "Randomness quality (time tags)");
  if (timetags) {
    try {
      const rankstat::RandomnessComparison cmp =
          rankstat::compare_randomness(timetags->values, qp_grid_size);
      auto opt = [&](const std::optional<double>& v) {
        return v ? fmt(*v) : std::string("undef");
      };
      os << "log10 Pearson(lag 1): " << opt(cmp.log_pearson) << "\n"
         << "min_p Q_p: " << opt(cmp.q_min) << " at p = " << opt(cmp.p_star) << "\n"
         << "delta: " << opt(cmp.delta) << "\n";
      auto jopt = [](const std::optional<double>& v) {
        return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
      };
      js["randomness"] = {{"log_pearson", jopt(cmp.log_pearson)},
                          {"q_min", jopt(cmp.q_min)},
                          {"p_star", jopt(cmp.p_star)},
                          {"delta", jopt(cmp.delta)}};
    } catch (const std::runtime_error& e) {
      os << "unavailable: " << e.what() << "\n";
      js["randomness"] = nullptr;
    }
  } else {
    os << "absent (no time tags supplied)\n";
    js["randomness"] = nullptr;
  }

  // reference table with the analyzed link appended
  section(os, "Reference links");
  os << "length_km,skr_bps,detector,loss_db,qber_percent,group\n";
  nlohmann::json jt = nlohmann::json::array();
  for (const auto& row : reference_table()) {
    os << fmt(row.length_km) << "," << fmt(row.skr_bps) << "," << row.detector
       << "," << fmt(row.loss_db) << "," << fmt(row.qber_percent) << ","
       << row.group << "\n";
    jt.push_back({{"length_km", row.length_km},
                  {"skr_bps", row.skr_bps},
                  {"detector", row.detector},
                  {"loss_db", row.loss_db},
                  {"qber_percent", row.qber_percent},
                  {"group", row.group}});
  }
  {
    double mean_loss = 0.0;
    int n_loss = 0;
    for (const auto& rec : series.records) {
      if (rec.loss_db) {
        mean_loss += *rec.loss_db;
        ++n_loss;
      }
    }
    if (n_loss > 0) mean_loss /= n_loss;
    const double qber_pct = qber.mean() * 100.0;
    os << "-," << fmt(budget.skr_bps) << ",-," << (n_loss ? fmt(mean_loss) : "-")
       << "," << fmt(qber_pct) << "," << series.link_id << " (analyzed)\n";
    jt.push_back({{"length_km", nullptr},
                  {"skr_bps", budget.skr_bps},
                  {"detector", nullptr},
                  {"loss_db", n_loss ? nlohmann::json(mean_loss) : nlohmann::json(nullptr)},
                  {"qber_percent", qber_pct},
                  {"group", series.link_id + " (analyzed)"}});
  }
  js["reference_table"] = jt;

  report.text = os.str();
  return report;
}

}  // namespace qsentinel::monitor
