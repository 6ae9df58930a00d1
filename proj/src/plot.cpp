#include "qsentinel/plot.hpp"

#include <cmath>
#include <sstream>

namespace qsentinel::plot {

namespace {

constexpr int kWidth = 800;
constexpr int kHeight = 480;
constexpr int kMargin = 40;

struct Scale {
  double x_lo, x_hi, y_lo, y_hi;

  double sx(double x) const {
    double t = x_hi > x_lo ? (x - x_lo) / (x_hi - x_lo) : 0.5;
    return kMargin + t * (kWidth - 2 * kMargin);
  }
  double sy(double y) const {
    double t = y_hi > y_lo ? (y - y_lo) / (y_hi - y_lo) : 0.5;
    return kHeight - kMargin - t * (kHeight - 2 * kMargin);
  }
};

std::string fmt(double v) { return format_number(v); }

void svg_open(std::ostream& os, const std::string& title) {
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
     << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << " "
     << kHeight << "\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
     << "<text x=\"" << kMargin << "\" y=\"24\" font-family=\"monospace\" "
        "font-size=\"14\">"
     << title << "</text>\n";
}

void svg_polyline(std::ostream& os, const std::vector<std::pair<double, double>>& pts,
                  const Scale& sc, const std::string& color) {
  if (pts.empty()) return;
  os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1\" points=\"";
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (i) os << ' ';
    os << fmt(sc.sx(pts[i].first)) << ',' << fmt(sc.sy(pts[i].second));
  }
  os << "\"/>\n";
}

void svg_hline(std::ostream& os, double y, const Scale& sc, const std::string& color) {
  os << "<line x1=\"" << kMargin << "\" x2=\"" << kWidth - kMargin << "\" y1=\""
     << fmt(sc.sy(y)) << "\" y2=\"" << fmt(sc.sy(y)) << "\" stroke=\"" << color
     << "\" stroke-dasharray=\"4,3\"/>\n";
}

const char* kColors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd"};

}  // namespace

std::string bands_csv(const TelemetrySeries& series, const stats::PercentileBand& band) {
  std::ostringstream os;
  os << "index,timestamp";
  for (double level : band.levels) os << ",p" << fmt(level);
  os << ",qber\n";
  for (std::size_t i = 0; i < series.records.size(); ++i) {
    os << i << ',' << fmt(series.records[i].timestamp);
    for (const auto& b : band.bands) os << ',' << fmt(b[static_cast<Eigen::Index>(i)]);
    os << ',' << fmt(series.records[i].qber) << '\n';
  }
  return os.str();
}

std::string acf_csv(const stats::AcfResult& acf) {
  std::ostringstream os;
  os << "lag,r,band\n";
  for (int k = 0; k <= acf.max_lag; ++k) {
    os << k << ',' << fmt(acf.coefficients[k]) << ',' << fmt(acf.white_noise_band)
       << '\n';
  }
  return os.str();
}

std::string qp_csv(const rankstat::QpCurve& curve) {
  std::ostringstream os;
  os << "p,q_p\n";
  for (std::size_t i = 0; i < curve.q_values.size(); ++i) {
    os << fmt(curve.p_grid[static_cast<Eigen::Index>(i)]) << ',';
    if (curve.q_values[i]) {
      os << fmt(*curve.q_values[i]);
    } else {
      os << "undef";
    }
    os << '\n';
  }
  return os.str();
}

std::string bands_svg(const TelemetrySeries& series, const stats::PercentileBand& band) {
  const Eigen::ArrayXd qber = series.qber();
  Scale sc{0, static_cast<double>(series.records.size() - 1), qber.minCoeff(),
           qber.maxCoeff()};
  std::ostringstream os;
  svg_open(os, "QBER percentile level filters");
  std::vector<std::pair<double, double>> pts(series.records.size());
  for (std::size_t i = 0; i < series.records.size(); ++i) {
    pts[i] = {static_cast<double>(i), qber[static_cast<Eigen::Index>(i)]};
  }
  svg_polyline(os, pts, sc, "#cccccc");
  for (std::size_t l = 0; l < band.bands.size(); ++l) {
    for (std::size_t i = 0; i < pts.size(); ++i) {
      pts[i].second = band.bands[l][static_cast<Eigen::Index>(i)];
    }
    svg_polyline(os, pts, sc, kColors[l % 5]);
  }
  os << "</svg>\n";
  return os.str();
}

std::string acf_svg(const stats::AcfResult& acf) {
  double lo = std::min(0.0, acf.coefficients.minCoeff());
  Scale sc{0, static_cast<double>(acf.max_lag), lo - 0.05, 1.0};
  std::ostringstream os;
  svg_open(os, "ACF of QBER deviations");
  svg_hline(os, 0.0, sc, "#888888");
  svg_hline(os, acf.white_noise_band, sc, "#d62728");
  svg_hline(os, -acf.white_noise_band, sc, "#d62728");
  for (int k = 0; k <= acf.max_lag; ++k) {
    // stem per lag
    os << "<line x1=\"" << fmt(sc.sx(k)) << "\" x2=\"" << fmt(sc.sx(k))
       << "\" y1=\"" << fmt(sc.sy(0.0)) << "\" y2=\"" << fmt(sc.sy(acf.coefficients[k]))
       << "\" stroke=\"#1f77b4\" stroke-width=\"2\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::string qp_svg(const rankstat::QpCurve& curve) {
  double lo = 0.0;
  bool any = false;
  for (const auto& q : curve.q_values) {
    if (q) {
      lo = any ? std::min(lo, *q) : *q;
      any = true;
    }
  }
  Scale sc{curve.p_grid[0], curve.p_grid[curve.p_grid.size() - 1],
           any ? lo - 0.05 : -1.0, 0.05};
  std::ostringstream os;
  svg_open(os, "Randomness quality factor Q_p");
  // draw defined segments, breaking at undefined gaps
  std::vector<std::pair<double, double>> seg;
  for (std::size_t i = 0; i <= curve.q_values.size(); ++i) {
    if (i < curve.q_values.size() && curve.q_values[i]) {
      seg.emplace_back(curve.p_grid[static_cast<Eigen::Index>(i)], *curve.q_values[i]);
    } else {
      svg_polyline(os, seg, sc, "#1f77b4");
      seg.clear();
    }
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace qsentinel::plot
