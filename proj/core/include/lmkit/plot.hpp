#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lmkit/infer.hpp"

namespace lmkit {

enum class PlotKind {
  ScatterCurve,
  Interaction,
  GroupedLines,
  ResidualPanels,
  TransformedPair,
};

struct Series {
  enum class Type { Points, Line, Band, Bars };
  std::string label;
  Type type = Type::Points;
  std::vector<double> x, y;
  // Band: pointwise lower/upper bounds. Bars: left/right bin edges.
  std::vector<double> lo, hi;
};

struct Panel {
  std::string title, x_label, y_label;
  // Non-empty for interaction plots: level names at x positions 0, 1, ...
  std::vector<std::string> x_tick_labels;
  std::vector<Series> series;
};

struct PlotSpec {
  PlotKind kind = PlotKind::ScatterCurve;
  std::vector<Panel> panels;
  std::optional<double> band_alpha;
  std::vector<std::string> warnings;
};

struct PlotOptions {
  std::optional<double> confidence_band;
  std::optional<double> prediction_band;
  std::optional<std::string> x_var;
};

// Chooses the visualization from the model's structure: one underlying
// quantitative variable and no categoricals gives a scatter with the
// fitted curve, only categoricals gives an interaction plot, a mix puts
// the quantitative variable on the x-axis with one line per combination
// of categorical levels. More than one quantitative variable requires
// x_var; the others are held at their means in the supplied data. The
// response is drawn in the original (back-transformed) space when the
// response transformation is invertible.
PlotSpec choose_plot(const FitResult& f, const DataTable& data,
                     const PlotOptions& opts);

// Two panels: the original response space on the left, the transformed
// space on the right. Falls back to the transformed space alone (with a
// warning) when the response transformation has no inverse.
PlotSpec transformed_space_pair(const FitResult& f, const DataTable& data,
                                const PlotOptions& opts);

// Four residual panels: normal Q-Q, histogram, fitted vs residuals, and
// residuals in data order.
PlotSpec residual_panels(const FitResult& f);

// Self-contained SVG next to a structured series data file so plot
// content is testable without pixel comparison.
void render_svg(const PlotSpec& spec, const std::string& path);
void write_series_data(const PlotSpec& spec, const std::string& path);

}  // namespace lmkit
