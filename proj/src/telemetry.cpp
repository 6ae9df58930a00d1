#include "qsentinel/telemetry.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "qsentinel/error.hpp"

namespace qsentinel {

namespace {

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      break;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

double parse_double(std::string_view field, std::size_t line_no) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc{} || ptr != field.data() + field.size()) {
    throw DataError("line " + std::to_string(line_no) + ": non-numeric field '" +
                    std::string(field) + "'");
  }
  return v;
}

// Lines split on '\n'; a trailing '\r' (CRLF input) is stripped.
std::vector<std::string_view> lines_of(const std::string& text) {
  std::vector<std::string_view> lines;
  for (auto line : split(text, '\n')) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
  }
  // split always yields a final element after the last '\n'; an empty one is
  // just the trailing newline.
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

std::vector<TelemetryRecord> parse_rows(const std::vector<std::string_view>& lines,
                                        bool has_loss) {
  std::vector<TelemetryRecord> records;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    std::size_t line_no = i + 1;
    if (lines[i].empty()) {
      throw DataError("line " + std::to_string(line_no) + ": blank row");
    }
    auto fields = split(lines[i], ',');
    std::size_t expected = has_loss ? 4 : 3;
    // loss_db column is optional per-row even when the header declares it
    if (fields.size() != expected && !(has_loss && fields.size() == 3)) {
      throw DataError("line " + std::to_string(line_no) + ": expected " +
                      std::to_string(expected) + " columns, got " +
                      std::to_string(fields.size()));
    }
    TelemetryRecord rec;
    rec.timestamp = parse_double(fields[0], line_no);
    rec.qber = parse_double(fields[1], line_no);
    rec.skr_bps = parse_double(fields[2], line_no);
    if (fields.size() == 4 && !fields[3].empty()) {
      rec.loss_db = parse_double(fields[3], line_no);
    }
    try {
      validate_record(rec);
    } catch (const DataError& e) {
      throw DataError("line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!records.empty() && rec.timestamp <= records.back().timestamp) {
      throw DataError("non-increasing timestamps at records " +
                      std::to_string(records.size() - 1) + " and " +
                      std::to_string(records.size()) + " (line " +
                      std::to_string(line_no) + ")");
    }
    records.push_back(rec);
  }
  return records;
}

bool header_has_loss(std::string_view header, std::size_t line_no = 1) {
  if (header == "timestamp,qber,skr_bps") return false;
  if (header == "timestamp,qber,skr_bps,loss_db") return true;
  throw DataError("line " + std::to_string(line_no) +
                  ": bad header, expected 'timestamp,qber,skr_bps[,loss_db]'");
}

}  // namespace

Eigen::ArrayXd TelemetrySeries::timestamps() const {
  Eigen::ArrayXd out(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) out[i] = records[i].timestamp;
  return out;
}

Eigen::ArrayXd TelemetrySeries::qber() const {
  Eigen::ArrayXd out(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) out[i] = records[i].qber;
  return out;
}

Eigen::ArrayXd TelemetrySeries::skr() const {
  Eigen::ArrayXd out(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) out[i] = records[i].skr_bps;
  return out;
}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

void validate_record(const TelemetryRecord& rec) {
  if (!std::isfinite(rec.timestamp) || rec.timestamp < 0.0) {
    throw DataError("timestamp must be finite and non-negative");
  }
  if (!std::isfinite(rec.qber) || rec.qber < 0.0 || rec.qber > 1.0) {
    throw DataError("qber " + format_number(rec.qber) + " outside [0,1]");
  }
  if (!std::isfinite(rec.skr_bps) || rec.skr_bps < 0.0) {
    throw DataError("skr_bps must be finite and non-negative");
  }
  if (rec.loss_db && (!std::isfinite(*rec.loss_db) || *rec.loss_db < 0.0)) {
    throw DataError("loss_db must be finite and non-negative");
  }
}

TelemetrySeries parse_telemetry_csv(const std::string& text,
                                    const std::string& link_id) {
  auto lines = lines_of(text);
  if (lines.empty()) throw DataError("empty input");
  bool has_loss = header_has_loss(lines[0]);
  TelemetrySeries series;
  series.link_id = link_id;
  series.records = parse_rows(lines, has_loss);
  if (series.records.empty()) throw DataError("empty series");
  return series;
}

namespace {

bool any_loss(const std::vector<TelemetryRecord>& records) {
  for (const auto& r : records) {
    if (r.loss_db) return true;
  }
  return false;
}

void append_row(std::string& out, const TelemetryRecord& r, bool has_loss) {
  out += format_number(r.timestamp);
  out += ',';
  out += format_number(r.qber);
  out += ',';
  out += format_number(r.skr_bps);
  if (has_loss) {
    out += ',';
    if (r.loss_db) out += format_number(*r.loss_db);
  }
  out += '\n';
}

}  // namespace

std::string write_telemetry_csv(const TelemetrySeries& series) {
  bool has_loss = any_loss(series.records);
  std::string out = has_loss ? "timestamp,qber,skr_bps,loss_db\n"
                             : "timestamp,qber,skr_bps\n";
  for (const auto& r : series.records) append_row(out, r, has_loss);
  return out;
}

TimeTagSeries parse_timetags(const std::string& text,
                             const std::string& source_id) {
  auto lines = lines_of(text);
  std::vector<double> vals;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    double v = parse_double(lines[i], i + 1);
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw DataError("line " + std::to_string(i + 1) +
                      ": time tag must be positive, got " + std::string(lines[i]));
    }
    vals.push_back(v);
  }
  if (vals.empty()) throw DataError("empty time-tag series");
  TimeTagSeries series;
  series.source_id = source_id;
  series.values = Eigen::Map<Eigen::ArrayXd>(vals.data(), vals.size());
  return series;
}

std::string write_timetags(const TimeTagSeries& series) {
  std::string out;
  for (Eigen::Index i = 0; i < series.values.size(); ++i) {
    out += format_number(series.values[i]);
    out += '\n';
  }
  return out;
}

void append_history(const TelemetryRecord& rec, const std::string& path) {
  validate_record(rec);
  std::error_code ec;
  bool fresh = !std::filesystem::exists(path, ec) ||
               std::filesystem::file_size(path, ec) == 0;
  std::ofstream out(path, std::ios::app | std::ios::binary);
  if (!out) throw IoError("cannot open history log '" + path + "' for append");
  std::string row;
  if (fresh) row = "timestamp,qber,skr_bps\n";
  append_row(row, rec, false);
  out << row;
  out.flush();
  if (!out) throw IoError("write to history log '" + path + "' failed");
}

std::vector<TelemetryRecord> read_history(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return {};
  std::ostringstream ss;
  ss << in.rdbuf();
  std::string text = ss.str();
  // drop a partial trailing line from a concurrent writer
  std::size_t last_nl = text.rfind('\n');
  if (last_nl == std::string::npos) return {};
  text.resize(last_nl + 1);
  auto lines = lines_of(text);
  if (lines.empty()) return {};
  bool has_loss = header_has_loss(lines[0]);
  return parse_rows(lines, has_loss);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << content;
  out.flush();
  if (!out) throw IoError("write to '" + path + "' failed");
}

}  // namespace qsentinel
