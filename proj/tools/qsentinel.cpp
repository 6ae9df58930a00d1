#include <CLI11.hpp>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <thread>

#include "qsentinel/error.hpp"
#include "qsentinel/monitor.hpp"
#include "qsentinel/plot.hpp"
#include "qsentinel/rankstat.hpp"
#include "qsentinel/report.hpp"
#include "qsentinel/simulator.hpp"
#include "qsentinel/stats.hpp"
#include "qsentinel/telemetry.hpp"

namespace {

using namespace qsentinel;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitAlerts = 3;

bool verbose() {
  const char* v = std::getenv("QSENTINEL_LOG");
  return v != nullptr && std::string(v) != "0" && std::string(v) != "";
}

void log_info(const std::string& msg) {
  if (verbose()) std::cerr << "qsentinel: " << msg << "\n";
}

void emit(const std::string& out_path, const std::string& content) {
  if (out_path.empty()) {
    std::cout << content;
  } else {
    write_file(out_path, content);
  }
}

struct AnalyzeOptions {
  std::string input;
  std::string timetags_path;
  std::string output;
  int window = 50;
  std::vector<double> levels = {25, 50, 75};
  int max_lag = 20;
  int grid = 201;
  double qber_limit = 0.04;
  bool check = false;
};

void add_analyze_flags(CLI::App* cmd, AnalyzeOptions& opt, bool with_check) {
  cmd->add_option("--input,-i", opt.input, "telemetry CSV file")->required();
  cmd->add_option("--timetags", opt.timetags_path, "time-tag file (one value per line)");
  cmd->add_option("--output,-o", opt.output, "output path");
  cmd->add_option("--window", opt.window, "percentile smoothing window");
  cmd->add_option("--levels", opt.levels, "percentile levels")->delimiter(',');
  cmd->add_option("--max-lag", opt.max_lag, "maximum ACF lag");
  cmd->add_option("--grid", opt.grid, "Q_p threshold grid size");
  cmd->add_option("--qber-limit", opt.qber_limit, "QBER alarm threshold");
  if (with_check) {
    cmd->add_flag("--check", opt.check, "exit 3 when any alert is raised");
  }
}

monitor::MonitorConfig config_of(const AnalyzeOptions& opt) {
  monitor::MonitorConfig cfg;
  cfg.qber_limit = opt.qber_limit;
  cfg.percentile_window = opt.window;
  return cfg;
}

std::optional<TimeTagSeries> load_timetags(const std::string& path) {
  if (path.empty()) return std::nullopt;
  return parse_timetags(read_file(path), path);
}

int cmd_ingest(const std::string& input, const std::string& log_path) {
  TelemetrySeries series = parse_telemetry_csv(read_file(input), input);
  for (const auto& rec : series.records) append_history(rec, log_path);
  log_info("appended " + std::to_string(series.records.size()) + " records to " + log_path);
  return kExitOk;
}

int cmd_analyze(const AnalyzeOptions& opt, bool to_files) {
  TelemetrySeries series = parse_telemetry_csv(read_file(opt.input), opt.input);
  auto timetags = load_timetags(opt.timetags_path);
  monitor::Report report = monitor::build_report(series, timetags, config_of(opt),
                                                 opt.max_lag, opt.grid);
  if (to_files) {
    std::string prefix = opt.output.empty() ? "report" : opt.output;
    write_file(prefix + ".txt", report.text);
    write_file(prefix + ".json", report.summary.dump(2) + "\n");
    log_info("wrote " + prefix + ".txt and " + prefix + ".json");
  } else {
    emit(opt.output, report.text);
  }
  if (opt.check && !report.alerts.empty()) return kExitAlerts;
  return kExitOk;
}

int cmd_qp(const AnalyzeOptions& opt) {
  TimeTagSeries tags = parse_timetags(read_file(opt.input), opt.input);
  rankstat::RandomnessComparison cmp =
      rankstat::compare_randomness(tags.values, opt.grid);
  auto show = [](const std::optional<double>& v) {
    return v ? format_number(*v) : std::string("undef");
  };
  std::cout << "n: " << tags.values.size() << "\n"
            << "log_pearson: " << show(cmp.log_pearson) << "\n"
            << "q_min: " << show(cmp.q_min) << "\n"
            << "p_star: " << show(cmp.p_star) << "\n"
            << "delta: " << show(cmp.delta) << "\n";
  if (!opt.output.empty()) {
    write_file(opt.output, plot::qp_csv(rankstat::qp_curve(tags.values, opt.grid)));
  }
  return kExitOk;
}

struct SimulateOptions {
  sim::LinkProfile profile;
  long n = 520;
  bool timetags = false;
  double rate_hz = 1000.0;
  double tag_ar = 0.0;
  std::string output;
};

int cmd_simulate(const SimulateOptions& opt) {
  if (opt.timetags) {
    TimeTagSeries tags =
        sim::simulate_timetags(opt.rate_hz, opt.n, opt.tag_ar, opt.profile.seed);
    emit(opt.output, write_timetags(tags));
  } else {
    TelemetrySeries series = sim::simulate_qber(opt.profile, opt.n);
    emit(opt.output, write_telemetry_csv(series));
  }
  return kExitOk;
}

int cmd_watch(const AnalyzeOptions& opt, double poll_seconds, long max_polls) {
  monitor::WatchState state(config_of(opt));
  std::ofstream out_file;
  std::ostream* out = &std::cout;
  if (!opt.output.empty()) {
    out_file.open(opt.output, std::ios::app);
    if (!out_file) throw IoError("cannot open alert output '" + opt.output + "'");
    out = &out_file;
  }
  bool any_alert = false;
  for (long poll = 0; max_polls == 0 || poll < max_polls; ++poll) {
    if (poll > 0) {
      std::this_thread::sleep_for(
          std::chrono::milliseconds(static_cast<long>(poll_seconds * 1000)));
    }
    std::vector<TelemetryRecord> records = read_history(opt.input);
    std::size_t seen = state.series().records.size();
    if (records.size() > seen) {
      std::vector<TelemetryRecord> fresh(records.begin() + seen, records.end());
      for (const auto& ev : state.step(fresh)) {
        *out << ev.to_json().dump() << "\n";
        out->flush();
        any_alert = true;
      }
      log_info("absorbed " + std::to_string(fresh.size()) + " records");
    }
  }
  if (opt.check && any_alert) return kExitAlerts;
  return kExitOk;
}

int cmd_export_plot(const AnalyzeOptions& opt, const std::string& format) {
  TelemetrySeries series = parse_telemetry_csv(read_file(opt.input), opt.input);
  auto timetags = load_timetags(opt.timetags_path);
  const std::string prefix = opt.output.empty() ? "plot" : opt.output;
  const bool svg = format == "svg";
  const std::string ext = svg ? ".svg" : ".csv";

  const stats::PercentileBand band =
      stats::percentile_level_filter(series.qber(), opt.window, opt.levels);
  write_file(prefix + "_bands" + ext,
             svg ? plot::bands_svg(series, band) : plot::bands_csv(series, band));

  const auto n = static_cast<Eigen::Index>(series.records.size());
  const int max_lag = static_cast<int>(std::min<Eigen::Index>(opt.max_lag, n - 2));
  const stats::AcfResult acf = stats::acf(series.qber(), max_lag);
  write_file(prefix + "_acf" + ext, svg ? plot::acf_svg(acf) : plot::acf_csv(acf));

  if (timetags) {
    const rankstat::QpCurve curve = rankstat::qp_curve(timetags->values, opt.grid);
    write_file(prefix + "_qp" + ext, svg ? plot::qp_svg(curve) : plot::qp_csv(curve));
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qsentinel: prognostic monitoring for long-haul QKD link telemetry"};
  app.require_subcommand(1);

  // ingest
  std::string ingest_input, ingest_log;
  auto* ingest = app.add_subcommand("ingest", "validate a telemetry CSV and append it to a history log");
  ingest->add_option("--input,-i", ingest_input, "telemetry CSV")->required();
  ingest->add_option("--output,-o", ingest_log, "history log path")->required();

  // analyze
  AnalyzeOptions analyze_opt;
  auto* analyze = app.add_subcommand("analyze", "run diagnostics and print the report");
  add_analyze_flags(analyze, analyze_opt, true);

  // qp
  AnalyzeOptions qp_opt;
  auto* qp_cmd = app.add_subcommand("qp", "Q_p randomness curve and comparison for a time-tag file");
  qp_cmd->add_option("--input,-i", qp_opt.input, "time-tag file")->required();
  qp_cmd->add_option("--output,-o", qp_opt.output, "write the Q_p curve CSV here");
  qp_cmd->add_option("--grid", qp_opt.grid, "threshold grid size");

  // simulate
  SimulateOptions sim_opt;
  auto* simulate = app.add_subcommand("simulate", "emit synthetic telemetry or time tags");
  simulate->add_option("--n", sim_opt.n, "number of samples");
  simulate->add_option("--seed", sim_opt.profile.seed, "random seed");
  simulate->add_option("--qber-mean", sim_opt.profile.qber_mean, "mean QBER fraction");
  simulate->add_option("--amplitude", sim_opt.profile.qber_amplitude, "diurnal swing");
  simulate->add_option("--ar", sim_opt.profile.ar_coefficient, "AR(1) coefficient");
  simulate->add_option("--noise-std", sim_opt.profile.noise_std, "noise standard deviation");
  simulate->add_option("--interval", sim_opt.profile.sample_interval_s, "sample interval, seconds");
  simulate->add_option("--skr-base", sim_opt.profile.skr_base_bps, "base secret key rate, bps");
  simulate->add_flag("--timetags", sim_opt.timetags, "emit time tags instead of telemetry");
  simulate->add_option("--rate", sim_opt.rate_hz, "time-tag rate, Hz");
  simulate->add_option("--tag-ar", sim_opt.tag_ar, "time-tag AR(1) coefficient");
  simulate->add_option("--output,-o", sim_opt.output, "output path (default stdout)");

  // watch
  AnalyzeOptions watch_opt;
  double poll_seconds = 5.0;
  long max_polls = 0;
  auto* watch = app.add_subcommand("watch", "poll a history log and stream alerts as JSON lines");
  watch->add_option("--input,-i", watch_opt.input, "history log path")->required();
  watch->add_option("--output,-o", watch_opt.output, "alert stream file (default stdout)");
  watch->add_option("--qber-limit", watch_opt.qber_limit, "QBER alarm threshold");
  watch->add_option("--poll-seconds", poll_seconds, "poll interval");
  watch->add_option("--max-polls", max_polls, "stop after this many polls (0 = run forever)");
  watch->add_flag("--check", watch_opt.check, "exit 3 when any alert was raised");

  // report
  AnalyzeOptions report_opt;
  auto* report = app.add_subcommand("report", "write the report and its machine-readable summary to files");
  add_analyze_flags(report, report_opt, false);

  // export-plot
  AnalyzeOptions plot_opt;
  std::string plot_format = "csv";
  auto* export_plot = app.add_subcommand("export-plot", "write plot-ready band/ACF/Q_p data");
  add_analyze_flags(export_plot, plot_opt, false);
  export_plot->add_option("--format", plot_format, "csv or svg")
      ->check(CLI::IsMember({"csv", "svg"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*ingest) return cmd_ingest(ingest_input, ingest_log);
    if (*analyze) return cmd_analyze(analyze_opt, false);
    if (*qp_cmd) return cmd_qp(qp_opt);
    if (*simulate) return cmd_simulate(sim_opt);
    if (*watch) return cmd_watch(watch_opt, poll_seconds, max_polls);
    if (*report) return cmd_analyze(report_opt, true);
    if (*export_plot) return cmd_export_plot(plot_opt, plot_format);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}
