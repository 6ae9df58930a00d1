#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <json.hpp>
#include <sstream>
#include <sys/wait.h>

#include "qsentinel/rng.hpp"

#include "qsentinel/monitor.hpp"
#include "qsentinel/report.hpp"
#include "qsentinel/simulator.hpp"
#include "qsentinel/telemetry.hpp"

using namespace qsentinel;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string output;  // stdout only
};

RunResult run(const std::string& args) {
  std::string cmd = std::string(QSENTINEL_BIN) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  RunResult res;
  std::array<char, 4096> buf;
  std::size_t got;
  while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) {
    res.output.append(buf.data(), got);
  }
  int status = pclose(pipe);
  res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return res;
}

std::filesystem::path work_dir() {
  auto dir = std::filesystem::temp_directory_path() / "qsentinel_cli_tests";
  std::filesystem::create_directories(dir);
  return dir;
}

std::string path_of(const std::string& name) { return (work_dir() / name).string(); }

}  // namespace

TEST_CASE("analyze: clean series exits 0 with zero alerts") {
  Rng rng(1);
  std::string csv = "timestamp,qber,skr_bps\n";
  for (int i = 0; i < 60; ++i) {
    csv += format_number(i * 330.0) + "," +
           format_number(0.02 + 0.002 * rng.normal()) + ",12\n";
  }
  auto input = path_of("clean.csv");
  write_file(input, csv);
  auto res = run("analyze -i " + input + " --check");
  CHECK(res.exit_code == 0);
  CHECK(res.output.find("== Alerts ==\nnone") != std::string::npos);
}

TEST_CASE("analyze --check: breach of the 4% bound exits 3") {
  Rng rng(2);
  std::string csv = "timestamp,qber,skr_bps\n";
  for (int i = 0; i < 60; ++i) {
    double q = (i == 30) ? 0.05 : 0.02 + 0.002 * rng.normal();
    csv += format_number(i * 330.0) + "," + format_number(q) + ",12\n";
  }
  auto input = path_of("breach.csv");
  write_file(input, csv);
  auto res = run("analyze -i " + input + " --check");
  CHECK(res.exit_code == 3);
  CHECK(res.output.find("qber_threshold") != std::string::npos);
}

TEST_CASE("exit codes: usage error 1, data error 2") {
  CHECK(run("analyze --no-such-flag").exit_code == 1);
  CHECK(run("frobnicate").exit_code == 1);
  auto bad = path_of("bad.csv");
  write_file(bad, "timestamp,qber,skr_bps\n1,zebra,5\n");
  CHECK(run("analyze -i " + bad).exit_code == 2);
}

TEST_CASE("simulate: emits a parseable CSV of n rows, deterministic per seed") {
  auto res = run("simulate --n 520 --seed 7");
  REQUIRE(res.exit_code == 0);
  auto series = parse_telemetry_csv(res.output);
  CHECK(series.records.size() == 520);
  auto again = run("simulate --n 520 --seed 7");
  CHECK(again.output == res.output);
  auto other = run("simulate --n 520 --seed 8");
  CHECK(other.output != res.output);
}

TEST_CASE("simulate piped to analyze matches the in-process composition") {
  auto sim_path = path_of("sim520.csv");
  REQUIRE(run("simulate --n 520 --seed 7 -o " + sim_path).exit_code == 0);
  auto cli = run("analyze -i " + sim_path);
  REQUIRE(cli.exit_code == 0);

  sim::LinkProfile profile;
  profile.seed = 7;
  auto series = sim::simulate_qber(profile, 520);
  // the CLI sees values after wire-format quantization
  series = parse_telemetry_csv(write_telemetry_csv(series), sim_path);
  auto report = monitor::build_report(series, std::nullopt, monitor::MonitorConfig{});
  CHECK(cli.output == report.text);
}

TEST_CASE("qp subcommand: comparison output and curve CSV") {
  auto tags_path = path_of("tags.txt");
  REQUIRE(run("simulate --timetags --rate 1000 --tag-ar 0.4 --n 5000 --seed 3 -o " +
              tags_path).exit_code == 0);
  auto curve_path = path_of("curve.csv");
  auto res = run("qp -i " + tags_path + " -o " + curve_path);
  REQUIRE(res.exit_code == 0);
  CHECK(res.output.find("q_min:") != std::string::npos);
  CHECK(res.output.find("log_pearson:") != std::string::npos);
  auto curve_csv = read_file(curve_path);
  CHECK(curve_csv.rfind("p,q_p\n", 0) == 0);
  // 201 grid rows + header
  std::size_t lines = 0;
  for (char c : curve_csv) {
    if (c == '\n') ++lines;
  }
  CHECK(lines == 202);
}

TEST_CASE("ingest then analyze the history log") {
  auto input = path_of("ingest_in.csv");
  auto log = path_of("ingest_log.csv");
  std::filesystem::remove(log);
  REQUIRE(run("simulate --n 50 --seed 5 -o " + input).exit_code == 0);
  REQUIRE(run("ingest -i " + input + " -o " + log).exit_code == 0);
  auto recs = read_history(log);
  CHECK(recs.size() == 50);
  // appending the next batch keeps prior bytes intact
  auto before = read_file(log);
  auto input2 = path_of("ingest_in2.csv");
  REQUIRE(run("simulate --n 30 --seed 6 --interval 500 -o " + input2).exit_code == 0);
  // shift timestamps so they extend the log
  auto s2 = parse_telemetry_csv(read_file(input2));
  for (auto& r : s2.records) r.timestamp += 1e6;
  write_file(input2, write_telemetry_csv(s2));
  REQUIRE(run("ingest -i " + input2 + " -o " + log).exit_code == 0);
  auto after = read_file(log);
  CHECK(after.substr(0, before.size()) == before);
  CHECK(read_history(log).size() == 80);
}

TEST_CASE("watch: streams JSONL alerts from a history log and honors --check") {
  auto log = path_of("watch_log.csv");
  std::filesystem::remove(log);
  for (int i = 0; i < 40; ++i) {
    double q = (i >= 10 && i < 15) ? 0.05 : 0.02;
    append_history({i * 330.0, q, 12.0, std::nullopt}, log);
  }
  auto res = run("watch -i " + log + " --max-polls 1 --check");
  CHECK(res.exit_code == 3);
  REQUIRE(!res.output.empty());
  // every line is a standalone JSON object with the alert schema
  std::istringstream lines(res.output);
  std::string line;
  bool saw_threshold = false;
  while (std::getline(lines, line)) {
    auto js = nlohmann::json::parse(line);
    CHECK(js.contains("kind"));
    CHECK(js.contains("severity"));
    CHECK(js.contains("start_index"));
    CHECK(js.contains("end_index"));
    CHECK(js.contains("evidence"));
    CHECK(js.contains("message"));
    if (js["kind"] == "qber_threshold") {
      saw_threshold = true;
      CHECK(js["start_index"] == 10);
      CHECK(js["end_index"] == 15);
    }
  }
  CHECK(saw_threshold);

  // quiet log: no alerts, exit 0
  auto quiet = path_of("watch_quiet.csv");
  std::filesystem::remove(quiet);
  for (int i = 0; i < 40; ++i) append_history({i * 330.0, 0.02, 12.0, std::nullopt}, quiet);
  auto res2 = run("watch -i " + quiet + " --max-polls 1 --check");
  CHECK(res2.exit_code == 0);
  CHECK(res2.output.empty());
}

TEST_CASE("report: writes text and JSON files that mirror each other") {
  auto input = path_of("report_in.csv");
  REQUIRE(run("simulate --n 200 --seed 9 -o " + input).exit_code == 0);
  auto prefix = path_of("report_out");
  REQUIRE(run("report -i " + input + " -o " + prefix).exit_code == 0);
  auto text = read_file(prefix + ".txt");
  auto js = nlohmann::json::parse(read_file(prefix + ".json"));
  CHECK(js["n_records"] == 200);
  double mean = js["qber"]["mean"];
  CHECK(text.find("mean " + format_number(mean)) != std::string::npos);
  CHECK(js["reference_table"].size() == 8);
}

TEST_CASE("export-plot: csv layers with alignment, r(0) row, determinism") {
  auto input = path_of("plot_in.csv");
  auto tags = path_of("plot_tags.txt");
  REQUIRE(run("simulate --n 150 --seed 11 -o " + input).exit_code == 0);
  REQUIRE(run("simulate --timetags --n 2000 --tag-ar 0.3 --seed 12 -o " + tags)
              .exit_code == 0);
  auto prefix = path_of("plots");
  REQUIRE(run("export-plot -i " + input + " --timetags " + tags + " -o " + prefix)
              .exit_code == 0);

  auto bands = read_file(prefix + "_bands.csv");
  std::size_t band_rows = 0;
  for (char c : bands) {
    if (c == '\n') ++band_rows;
  }
  CHECK(band_rows == 151);  // header + one row per record
  CHECK(bands.rfind("index,timestamp,p25,p50,p75,qber\n", 0) == 0);

  auto acf = read_file(prefix + "_acf.csv");
  REQUIRE(acf.rfind("lag,r,band\n", 0) == 0);
  auto second_line = acf.substr(acf.find('\n') + 1);
  second_line = second_line.substr(0, second_line.find('\n'));
  CHECK(second_line.rfind("0,1,", 0) == 0);

  auto qp = read_file(prefix + "_qp.csv");
  CHECK(qp.rfind("p,q_p\n", 0) == 0);

  // byte-identical on re-run
  auto prefix2 = path_of("plots2");
  REQUIRE(run("export-plot -i " + input + " --timetags " + tags + " -o " + prefix2)
              .exit_code == 0);
  CHECK(read_file(prefix2 + "_bands.csv") == bands);
  CHECK(read_file(prefix2 + "_acf.csv") == acf);
  CHECK(read_file(prefix2 + "_qp.csv") == qp);

  // svg variant is produced and deterministic
  auto svg_prefix = path_of("plots_svg");
  REQUIRE(run("export-plot -i " + input + " --timetags " + tags + " -o " + svg_prefix +
              " --format svg").exit_code == 0);
  auto svg1 = read_file(svg_prefix + "_bands.svg");
  CHECK(svg1.rfind("<svg", 0) == 0);
  REQUIRE(run("export-plot -i " + input + " --timetags " + tags + " -o " + svg_prefix +
              " --format svg").exit_code == 0);
  CHECK(read_file(svg_prefix + "_bands.svg") == svg1);
}
