#include "lmkit/plot.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "lmkit/model_io.hpp"
#include "lmkit/text_table.hpp"

namespace lmkit {

namespace {

// ---------------------------------------------------------------------------
// Response space handling

// The stack of invertible transformations wrapped around the response,
// outermost first, used to map predictions back to the original scale.
struct ResponseChain {
  bool invertible = true;
  std::vector<std::pair<TransformKind, SiteStats>> chain;
  std::string original_label;
};

ResponseChain response_chain(const FitResult& f) {
  ResponseChain rc;
  const Term& term = f.model().response();
  rc.original_label = term.display();
  if (term.size() != 1) return rc;  // a product is its own scale
  Factor fac = term.factors().front();
  for (;;) {
    if (fac.is_variable()) {
      rc.original_label = fac.display();
      return rc;
    }
    // A powered transformation cannot be unwound.
    if (fac.power() > 1) {
      rc.invertible = false;
      return rc;
    }
    const TransformKind kind = fac.transform();
    if (!transform_invertible(kind)) {
      rc.invertible = false;
      return rc;
    }
    SiteStats stats;
    if (kind == TransformKind::Center || kind == TransformKind::Standardize) {
      const SiteStats* s = f.encoding.site(fac.base_key());
      if (!s) {
        rc.invertible = false;
        return rc;
      }
      stats = *s;
    }
    rc.chain.emplace_back(kind, stats);
    const Expression& inner = fac.inner();
    if (inner.terms().size() != 1 || inner.terms().front().size() != 1) {
      rc.original_label = inner.display();
      return rc;
    }
    rc.original_label = inner.display();
    fac = inner.terms().front().factors().front();
  }
}

std::vector<double> apply_inverse(const ResponseChain& rc, std::vector<double> v) {
  for (const auto& [kind, stats] : rc.chain) {
    v = inverse_transform(kind, v, &stats);
  }
  return v;
}

// ---------------------------------------------------------------------------
// Model structure classification

void classify_term(const Term& t, std::set<std::string>& quant,
                   std::set<std::string>& cats);

void classify_expression(const Expression& e, std::set<std::string>& quant,
                         std::set<std::string>& cats) {
  for (const Term& t : e.terms()) classify_term(t, quant, cats);
}

void classify_term(const Term& t, std::set<std::string>& quant,
                   std::set<std::string>& cats) {
  for (const Factor& f : t.factors()) {
    if (f.is_variable()) {
      (f.known_categorical() ? cats : quant).insert(f.name());
    } else {
      classify_expression(f.inner(), quant, cats);
    }
  }
}

struct Combo {
  std::vector<std::pair<std::string, std::string>> assignment;  // (var, level)
  std::string label() const {
    std::string s;
    for (const auto& [var, level] : assignment) {
      if (!s.empty()) s += ", ";
      s += var + "=" + level;
    }
    return s;
  }
};

std::vector<Combo> enumerate_combos(const std::vector<std::string>& cats,
                                    const EncodingState& enc) {
  std::vector<Combo> combos{{}};
  for (const std::string& var : cats) {
    std::vector<Combo> next;
    for (const Combo& c : combos) {
      for (const std::string& level : enc.category(var).levels) {
        Combo e = c;
        e.assignment.emplace_back(var, level);
        next.push_back(std::move(e));
      }
    }
    combos = std::move(next);
  }
  return combos;
}

DataTable synth_table(std::size_t nrows,
                      const std::vector<std::pair<std::string, std::vector<double>>>& numeric,
                      const std::vector<std::pair<std::string, std::string>>& levels) {
  DataTable t;
  for (const auto& [name, values] : numeric) {
    t.add_column(name, Column::numeric(values));
  }
  for (const auto& [name, level] : levels) {
    t.add_column(name, Column::text(std::vector<std::string>(nrows, level)));
  }
  return t;
}

enum class Space { Original, Transformed };

struct ContentOptions {
  std::optional<double> band_alpha;
  IntervalKind band_kind = IntervalKind::None;
  std::optional<std::string> x_var;
};

// Builds the single panel showing data and fitted curves for one response
// space; the plot kind falls out of the model structure.
std::pair<PlotKind, Panel> build_content(const FitResult& f, const DataTable& data,
                                         const ContentOptions& opts, Space space,
                                         const ResponseChain& rc) {
  const ModelSpec& model = f.model();
  std::set<std::string> quant_set, cat_set;
  for (const Term& t : model.terms()) classify_term(t, quant_set, cat_set);
  std::vector<std::string> quant(quant_set.begin(), quant_set.end());
  std::vector<std::string> cats(cat_set.begin(), cat_set.end());
  if (quant.empty() && cats.empty()) {
    throw Error("the model has no explanatory variables to plot");
  }

  RowFilterResult rows = drop_incomplete_rows(model, data);
  if (rows.table.nrows() == 0) throw Error("no complete rows to plot");
  Eigen::VectorXd resp = eval_response(model, rows.table, f.encoding);
  std::vector<double> resp_points(resp.data(), resp.data() + resp.size());
  if (space == Space::Original) resp_points = apply_inverse(rc, resp_points);

  Panel panel;
  panel.y_label = (space == Space::Original) ? rc.original_label : f.response_label;

  auto to_space = [&](std::vector<double> v) {
    return space == Space::Original ? apply_inverse(rc, std::move(v)) : v;
  };
  auto add_prediction_series = [&](const DataTable& at, const std::vector<double>& xs,
                                   const std::string& suffix) {
    PredictionTable pred = predict(f, at, opts.band_kind,
                                   opts.band_alpha.value_or(0.05));
    if (opts.band_kind != IntervalKind::None) {
      Series band;
      band.type = Series::Type::Band;
      const int pct = static_cast<int>(std::lround((1.0 - *opts.band_alpha) * 100));
      band.label = std::to_string(pct) + "% " +
                   (opts.band_kind == IntervalKind::Confidence ? "confidence" : "prediction") +
                   " band" + suffix;
      band.x = xs;
      band.lo = to_space(pred.lower);
      band.hi = to_space(pred.upper);
      band.y = to_space(pred.values);
      panel.series.push_back(std::move(band));
    }
    Series line;
    line.type = Series::Type::Line;
    line.label = "fit" + suffix;
    line.x = xs;
    line.y = to_space(pred.values);
    panel.series.push_back(std::move(line));
  };

  if (quant.empty()) {
    // Interaction plot: the first categorical on the x-axis, one line per
    // combination of the remaining categoricals.
    const std::string& x_cat = cats.front();
    const auto& levels = f.encoding.category(x_cat).levels;
    panel.x_label = x_cat;
    panel.x_tick_labels = levels;
    panel.title = model.display();

    Series points;
    points.type = Series::Type::Points;
    points.label = "data";
    const Column& col = rows.table.column(x_cat);
    for (std::size_t i = 0; i < rows.table.nrows(); ++i) {
      const std::string label =
          col.is_numeric() ? fmt_full(col.number(i)) : col.text_value(i);
      auto it = std::find(levels.begin(), levels.end(), label);
      if (it == levels.end()) continue;
      points.x.push_back(static_cast<double>(it - levels.begin()));
      points.y.push_back(resp_points[i]);
    }
    panel.series.push_back(std::move(points));

    std::vector<std::string> others(cats.begin() + 1, cats.end());
    std::vector<double> xs(levels.size());
    for (std::size_t i = 0; i < levels.size(); ++i) xs[i] = static_cast<double>(i);
    for (const Combo& combo : enumerate_combos(others, f.encoding)) {
      std::vector<std::pair<std::string, std::string>> cat_cols = combo.assignment;
      DataTable at;
      std::vector<std::string> xvals(levels.begin(), levels.end());
      at.add_column(x_cat, Column::text(std::move(xvals)));
      for (const auto& [name, level] : cat_cols) {
        at.add_column(name, Column::text(std::vector<std::string>(levels.size(), level)));
      }
      const std::string suffix =
          combo.assignment.empty() ? "" : " [" + combo.label() + "]";
      add_prediction_series(at, xs, suffix);
    }
    return {PlotKind::Interaction, std::move(panel)};
  }

  // A quantitative x-axis.
  std::string x_name;
  if (quant.size() == 1) {
    x_name = quant.front();
    if (opts.x_var && *opts.x_var != x_name) {
      throw Error("x-var '" + *opts.x_var + "' is not a quantitative model variable");
    }
  } else {
    if (!opts.x_var) {
      throw Error("ambiguous x-axis: the model has " + std::to_string(quant.size()) +
                  " quantitative variables, specify --x-var");
    }
    if (std::find(quant.begin(), quant.end(), *opts.x_var) == quant.end()) {
      throw Error("x-var '" + *opts.x_var + "' is not a quantitative model variable");
    }
    x_name = *opts.x_var;
  }
  panel.x_label = x_name;
  panel.title = model.display();

  const Column& xcol = rows.table.column(x_name);
  if (!xcol.is_numeric()) throw Error("x variable '" + x_name + "' is not numeric");
  Series points;
  points.type = Series::Type::Points;
  points.label = "data";
  for (std::size_t i = 0; i < rows.table.nrows(); ++i) {
    points.x.push_back(xcol.number(i));
    points.y.push_back(resp_points[i]);
  }
  panel.series.push_back(std::move(points));

  const double x_min = *std::min_element(points.x.begin(), points.x.end());
  const double x_max = *std::max_element(points.x.begin(), points.x.end());
  constexpr int kGridPoints = 100;
  std::vector<double> grid(kGridPoints);
  for (int i = 0; i < kGridPoints; ++i) {
    grid[static_cast<std::size_t>(i)] =
        x_min + (x_max - x_min) * static_cast<double>(i) / (kGridPoints - 1);
  }

  // Other quantitative variables are held at their observed means.
  std::vector<std::pair<std::string, std::vector<double>>> numeric_cols;
  numeric_cols.emplace_back(x_name, grid);
  for (const std::string& q : quant) {
    if (q == x_name) continue;
    const Column& c = rows.table.column(q);
    double mean = 0.0;
    for (std::size_t i = 0; i < rows.table.nrows(); ++i) mean += c.number(i);
    mean /= static_cast<double>(rows.table.nrows());
    numeric_cols.emplace_back(q, std::vector<double>(grid.size(), mean));
  }

  for (const Combo& combo : enumerate_combos(cats, f.encoding)) {
    DataTable at = synth_table(grid.size(), numeric_cols, combo.assignment);
    const std::string suffix =
        combo.assignment.empty() ? "" : " [" + combo.label() + "]";
    add_prediction_series(at, grid, suffix);
  }
  const PlotKind kind = cats.empty() ? PlotKind::ScatterCurve : PlotKind::GroupedLines;
  return {kind, std::move(panel)};
}

ContentOptions make_content_options(const PlotOptions& opts) {
  ContentOptions c;
  if (opts.confidence_band && opts.prediction_band) {
    throw Error("confidence and prediction bands are mutually exclusive");
  }
  if (opts.confidence_band) {
    c.band_alpha = *opts.confidence_band;
    c.band_kind = IntervalKind::Confidence;
  } else if (opts.prediction_band) {
    c.band_alpha = *opts.prediction_band;
    c.band_kind = IntervalKind::Prediction;
  }
  c.x_var = opts.x_var;
  return c;
}

}  // namespace

PlotSpec choose_plot(const FitResult& f, const DataTable& data,
                     const PlotOptions& opts) {
  ContentOptions c = make_content_options(opts);
  ResponseChain rc = response_chain(f);
  PlotSpec spec;
  spec.band_alpha = c.band_alpha;
  Space space = Space::Original;
  if (!rc.invertible) {
    space = Space::Transformed;
    spec.warnings.push_back(
        "response transformation is not invertible; plotting in transformed space");
  }
  auto [kind, panel] = build_content(f, data, c, space, rc);
  spec.kind = kind;
  spec.panels.push_back(std::move(panel));
  return spec;
}

PlotSpec transformed_space_pair(const FitResult& f, const DataTable& data,
                                const PlotOptions& opts) {
  ContentOptions c = make_content_options(opts);
  ResponseChain rc = response_chain(f);
  PlotSpec spec;
  spec.band_alpha = c.band_alpha;
  if (!rc.invertible) {
    spec.warnings.push_back(
        "response transformation is not invertible; showing the transformed space only");
    auto [kind, panel] = build_content(f, data, c, Space::Transformed, rc);
    spec.kind = kind;
    spec.panels.push_back(std::move(panel));
    return spec;
  }
  spec.kind = PlotKind::TransformedPair;
  auto [k1, original] = build_content(f, data, c, Space::Original, rc);
  auto [k2, transformed] = build_content(f, data, c, Space::Transformed, rc);
  original.title = "Original response space";
  transformed.title = "Transformed response space";
  spec.panels.push_back(std::move(original));
  spec.panels.push_back(std::move(transformed));
  return spec;
}

PlotSpec residual_panels(const FitResult& f) {
  DiagnosticPanels d = residual_diagnostics(f);
  PlotSpec spec;
  spec.kind = PlotKind::ResidualPanels;

  Panel qq;
  qq.title = "Normal Q-Q";
  qq.x_label = "Theoretical quantiles";
  qq.y_label = "Sample quantiles";
  Series qq_pts;
  qq_pts.type = Series::Type::Points;
  qq_pts.label = "residual quantiles";
  for (const auto& [t, s] : d.qq) {
    qq_pts.x.push_back(t);
    qq_pts.y.push_back(s);
  }
  qq.series.push_back(std::move(qq_pts));
  spec.panels.push_back(std::move(qq));

  Panel hist;
  hist.title = "Residual histogram";
  hist.x_label = "Residual";
  hist.y_label = "Count";
  Series bars;
  bars.type = Series::Type::Bars;
  bars.label = "histogram";
  for (std::size_t b = 0; b + 1 < d.histogram.edges.size(); ++b) {
    bars.lo.push_back(d.histogram.edges[b]);
    bars.hi.push_back(d.histogram.edges[b + 1]);
    bars.x.push_back(0.5 * (d.histogram.edges[b] + d.histogram.edges[b + 1]));
    bars.y.push_back(static_cast<double>(d.histogram.counts[b]));
  }
  hist.series.push_back(std::move(bars));
  spec.panels.push_back(std::move(hist));

  Panel fitted;
  fitted.title = "Fitted values vs residuals";
  fitted.x_label = "Fitted value";
  fitted.y_label = "Residual";
  Series fit_pts;
  fit_pts.type = Series::Type::Points;
  fit_pts.label = "residuals";
  for (const auto& [x, y] : d.fitted_vs_residual) {
    fit_pts.x.push_back(x);
    fit_pts.y.push_back(y);
  }
  fitted.series.push_back(std::move(fit_pts));
  spec.panels.push_back(std::move(fitted));

  Panel order;
  order.title = "Residuals in data order";
  order.x_label = "Observation";
  order.y_label = "Residual";
  Series order_line;
  order_line.type = Series::Type::Line;
  order_line.label = "residuals";
  for (const auto& [x, y] : d.order_vs_residual) {
    order_line.x.push_back(x);
    order_line.y.push_back(y);
  }
  order.series.push_back(std::move(order_line));
  spec.panels.push_back(std::move(order));
  return spec;
}

// ---------------------------------------------------------------------------
// SVG rendering

namespace {

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

const char* kPalette[] = {"#d62728", "#1f77b4", "#2ca02c", "#ff7f0e",
                          "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};
constexpr int kPaletteSize = 8;

struct Bounds {
  double x_lo = 0, x_hi = 1, y_lo = 0, y_hi = 1;
};

Bounds panel_bounds(const Panel& p) {
  Bounds b;
  bool first = true;
  auto extend = [&](double x, double y) {
    if (!std::isfinite(x) || !std::isfinite(y)) return;
    if (first) {
      b.x_lo = b.x_hi = x;
      b.y_lo = b.y_hi = y;
      first = false;
      return;
    }
    b.x_lo = std::min(b.x_lo, x);
    b.x_hi = std::max(b.x_hi, x);
    b.y_lo = std::min(b.y_lo, y);
    b.y_hi = std::max(b.y_hi, y);
  };
  for (const Series& s : p.series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (s.type == Series::Type::Bars) {
        extend(s.lo[i], 0.0);
        extend(s.hi[i], s.y[i]);
      } else if (s.type == Series::Type::Band) {
        extend(s.x[i], s.lo[i]);
        extend(s.x[i], s.hi[i]);
      } else {
        extend(s.x[i], s.y[i]);
      }
    }
  }
  if (first) {
    b = {0, 1, 0, 1};
  }
  if (b.x_hi == b.x_lo) {
    b.x_lo -= 0.5;
    b.x_hi += 0.5;
  }
  if (b.y_hi == b.y_lo) {
    b.y_lo -= 0.5;
    b.y_hi += 0.5;
  }
  const double xpad = 0.04 * (b.x_hi - b.x_lo);
  const double ypad = 0.06 * (b.y_hi - b.y_lo);
  b.x_lo -= xpad;
  b.x_hi += xpad;
  b.y_lo -= ypad;
  b.y_hi += ypad;
  return b;
}

std::vector<double> nice_ticks(double lo, double hi, int target = 5) {
  const double range = hi - lo;
  double step = std::pow(10.0, std::floor(std::log10(range / target)));
  for (double mult : {1.0, 2.0, 5.0, 10.0}) {
    if (range / (step * mult) <= target) {
      step *= mult;
      break;
    }
  }
  std::vector<double> ticks;
  double t = std::ceil(lo / step) * step;
  for (; t <= hi + 1e-12 * range; t += step) ticks.push_back(t);
  return ticks;
}

void render_panel(std::ostringstream& svg, const Panel& p, double ox, double oy,
                  double width, double height) {
  const double ml = 62, mr = 16, mt = 30, mb = 46;
  const double px = ox + ml, py = oy + mt;
  const double pw = width - ml - mr, ph = height - mt - mb;
  Bounds b = panel_bounds(p);
  auto sx = [&](double x) { return px + (x - b.x_lo) / (b.x_hi - b.x_lo) * pw; };
  auto sy = [&](double y) { return py + ph - (y - b.y_lo) / (b.y_hi - b.y_lo) * ph; };

  svg << "<rect x=\"" << px << "\" y=\"" << py << "\" width=\"" << pw
      << "\" height=\"" << ph << "\" fill=\"white\" stroke=\"#444\"/>\n";
  if (!p.title.empty()) {
    svg << "<text x=\"" << px + pw / 2 << "\" y=\"" << oy + 18
        << "\" text-anchor=\"middle\" font-size=\"12\">" << xml_escape(p.title)
        << "</text>\n";
  }

  // Ticks: categorical x positions get level names, numeric axes get nice
  // round values.
  if (!p.x_tick_labels.empty()) {
    for (std::size_t i = 0; i < p.x_tick_labels.size(); ++i) {
      const double x = sx(static_cast<double>(i));
      svg << "<line x1=\"" << x << "\" y1=\"" << py + ph << "\" x2=\"" << x
          << "\" y2=\"" << py + ph + 4 << "\" stroke=\"#444\"/>\n";
      svg << "<text x=\"" << x << "\" y=\"" << py + ph + 16
          << "\" text-anchor=\"middle\" font-size=\"10\">"
          << xml_escape(p.x_tick_labels[i]) << "</text>\n";
    }
  } else {
    for (double t : nice_ticks(b.x_lo, b.x_hi)) {
      const double x = sx(t);
      svg << "<line x1=\"" << x << "\" y1=\"" << py + ph << "\" x2=\"" << x
          << "\" y2=\"" << py + ph + 4 << "\" stroke=\"#444\"/>\n";
      svg << "<text x=\"" << x << "\" y=\"" << py + ph + 16
          << "\" text-anchor=\"middle\" font-size=\"10\">" << fmt_sig(t)
          << "</text>\n";
    }
  }
  for (double t : nice_ticks(b.y_lo, b.y_hi)) {
    const double y = sy(t);
    svg << "<line x1=\"" << px - 4 << "\" y1=\"" << y << "\" x2=\"" << px
        << "\" y2=\"" << y << "\" stroke=\"#444\"/>\n";
    svg << "<text x=\"" << px - 6 << "\" y=\"" << y + 3
        << "\" text-anchor=\"end\" font-size=\"10\">" << fmt_sig(t) << "</text>\n";
  }
  if (!p.x_label.empty()) {
    svg << "<text x=\"" << px + pw / 2 << "\" y=\"" << py + ph + 34
        << "\" text-anchor=\"middle\" font-size=\"11\">" << xml_escape(p.x_label)
        << "</text>\n";
  }
  if (!p.y_label.empty()) {
    svg << "<text x=\"" << ox + 14 << "\" y=\"" << py + ph / 2
        << "\" text-anchor=\"middle\" font-size=\"11\" transform=\"rotate(-90 "
        << ox + 14 << " " << py + ph / 2 << ")\">" << xml_escape(p.y_label)
        << "</text>\n";
  }

  // Bands under lines under points; band and line colors pair up by order.
  int band_idx = 0, line_idx = 0;
  for (const Series& s : p.series) {
    if (s.type != Series::Type::Band) continue;
    const char* color = kPalette[band_idx++ % kPaletteSize];
    svg << "<polygon fill=\"" << color << "\" fill-opacity=\"0.18\" stroke=\"none\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      svg << sx(s.x[i]) << "," << sy(s.lo[i]) << " ";
    }
    for (std::size_t i = s.x.size(); i-- > 0;) {
      svg << sx(s.x[i]) << "," << sy(s.hi[i]) << " ";
    }
    svg << "\"/>\n";
  }
  for (const Series& s : p.series) {
    if (s.type == Series::Type::Bars) {
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        const double x0 = sx(s.lo[i]), x1 = sx(s.hi[i]);
        const double y0 = sy(0.0), y1 = sy(s.y[i]);
        svg << "<rect x=\"" << x0 << "\" y=\"" << std::min(y0, y1) << "\" width=\""
            << x1 - x0 << "\" height=\"" << std::abs(y0 - y1)
            << "\" fill=\"#1f77b4\" fill-opacity=\"0.8\" stroke=\"white\"/>\n";
      }
    }
    if (s.type != Series::Type::Line) continue;
    const char* color = kPalette[line_idx++ % kPaletteSize];
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.6\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      svg << sx(s.x[i]) << "," << sy(s.y[i]) << " ";
    }
    svg << "\"/>\n";
  }
  for (const Series& s : p.series) {
    if (s.type != Series::Type::Points) continue;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      svg << "<circle cx=\"" << sx(s.x[i]) << "\" cy=\"" << sy(s.y[i])
          << "\" r=\"2\" fill=\"#222\" fill-opacity=\"0.55\"/>\n";
    }
  }

  // Legend for multi-line panels.
  int nlines = 0;
  for (const Series& s : p.series) {
    if (s.type == Series::Type::Line) ++nlines;
  }
  if (nlines > 1) {
    int row = 0, idx = 0;
    for (const Series& s : p.series) {
      if (s.type != Series::Type::Line) continue;
      const double lx = px + pw - 150, ly = py + 12 + 13 * row;
      svg << "<line x1=\"" << lx << "\" y1=\"" << ly << "\" x2=\"" << lx + 18
          << "\" y2=\"" << ly << "\" stroke=\"" << kPalette[idx % kPaletteSize]
          << "\" stroke-width=\"2\"/>\n";
      svg << "<text x=\"" << lx + 22 << "\" y=\"" << ly + 3
          << "\" font-size=\"9\">" << xml_escape(s.label) << "</text>\n";
      ++row;
      ++idx;
    }
  }
}

}  // namespace

void render_svg(const PlotSpec& spec, const std::string& path) {
  const std::size_t n = spec.panels.size();
  const int cols = (n <= 1) ? 1 : 2;
  const int rows = static_cast<int>((n + static_cast<std::size_t>(cols) - 1) /
                                    static_cast<std::size_t>(cols));
  const double pw = (n == 1) ? 720 : 460;
  const double ph = (n == 1) ? 540 : 380;
  const double width = pw * cols, height = ph * rows;

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " " << height
      << "\" font-family=\"sans-serif\">\n";
  svg << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
  for (std::size_t i = 0; i < n; ++i) {
    const double ox = static_cast<double>(i % static_cast<std::size_t>(cols)) * pw;
    const double oy = static_cast<double>(i / static_cast<std::size_t>(cols)) * ph;
    render_panel(svg, spec.panels[i], ox, oy, pw, ph);
  }
  svg << "</svg>\n";
  write_file_atomic(path, svg.str());
}

void write_series_data(const PlotSpec& spec, const std::string& path) {
  TextTable t;
  t.header = {"panel", "series", "type", "x", "y", "lo", "hi"};
  const char* type_names[] = {"points", "line", "band", "bars"};
  for (std::size_t pi = 0; pi < spec.panels.size(); ++pi) {
    const Panel& p = spec.panels[pi];
    for (const Series& s : p.series) {
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        std::vector<std::string> row(7);
        row[0] = std::to_string(pi);
        row[1] = s.label;
        row[2] = type_names[static_cast<int>(s.type)];
        row[3] = fmt_full(s.x[i]);
        row[4] = fmt_full(s.y[i]);
        row[5] = i < s.lo.size() ? fmt_full(s.lo[i]) : "";
        row[6] = i < s.hi.size() ? fmt_full(s.hi[i]) : "";
        t.rows.push_back(std::move(row));
      }
    }
  }
  std::ostringstream out;
  write_tsv(t, out);
  write_file_atomic(path, out.str());
}

}  // namespace lmkit
