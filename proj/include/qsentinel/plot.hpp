#pragma once

#include <string>

#include "qsentinel/rankstat.hpp"
#include "qsentinel/stats.hpp"
#include "qsentinel/telemetry.hpp"

namespace qsentinel::plot {

// Plot-ready data layers. CSV output is the primary format; SVG renders a
// single 800x480 line chart with deterministic bytes for fixed input.

std::string bands_csv(const TelemetrySeries& series, const stats::PercentileBand& band);
std::string acf_csv(const stats::AcfResult& acf);
std::string qp_csv(const rankstat::QpCurve& curve);  // `undef` token for gaps

std::string bands_svg(const TelemetrySeries& series, const stats::PercentileBand& band);
std::string acf_svg(const stats::AcfResult& acf);
std::string qp_svg(const rankstat::QpCurve& curve);

}  // namespace qsentinel::plot
