#pragma once

#include <filesystem>
#include <span>
#include <string>

#include "gcnal/alloop.hpp"

namespace gcnal {

/// Header `cycle,labelled,metric_mean,metric_std,trial_0,...,trial_{T-1}`,
/// one row per stage, reals printed with 9 significant digits.
std::string format_curve_csv(const Curve& curve);
void write_curve_csv(const Curve& curve, const std::filesystem::path& path);

// Same columns prefixed by `strategy`; rows grouped by curve.
std::string format_compare_csv(std::span<const Curve> curves);
void write_compare_csv(std::span<const Curve> curves, const std::filesystem::path& path);

/// SVG chart: per curve a mean line over a ±1 std band, legend by label.
std::string render_plot_svg(std::span<const Curve> curves, const std::string& y_label);
void emit_plot(std::span<const Curve> curves, const std::filesystem::path& path,
               const std::string& y_label = "metric");

}  // namespace gcnal
