#include "lmkit/cli.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "lmkit/anova.hpp"
#include "lmkit/infer.hpp"
#include "lmkit/model_io.hpp"
#include "lmkit/parser.hpp"
#include "lmkit/plot.hpp"
#include "lmkit/stepwise.hpp"
#include "lmkit/table.hpp"
#include "lmkit/text_table.hpp"

namespace lmkit::cli {

namespace {

struct CommonData {
  std::string data_path;
  std::string delimiter = ",";
};

DataTable load_data(const CommonData& d) {
  ReadOptions opts;
  if (d.delimiter.size() != 1) throw Error("delimiter must be a single character");
  opts.delimiter = d.delimiter[0];
  return read_delimited(d.data_path, opts);
}

TextTable coefficient_text(const CoefficientTable& ct, bool full_precision) {
  auto fmt = full_precision ? [](double v) { return fmt_full(v); }
                            : [](double v) { return fmt_sig(v); };
  TextTable t;
  const std::string lo_pct = fmt_sig(100.0 * ct.alpha / 2.0);
  const std::string hi_pct = fmt_sig(100.0 * (1.0 - ct.alpha / 2.0));
  t.header = {"", "Coefficients", "SE", "t", "p", lo_pct + "% CI", hi_pct + "% CI"};
  for (const CoefficientRow& r : ct.rows) {
    t.rows.push_back({r.label, fmt(r.estimate), fmt(r.std_error), fmt(r.t_stat),
                      fmt(r.p_value), fmt(r.ci_lower), fmt(r.ci_upper)});
  }
  return t;
}

TextTable anova_text(const AnovaTable& at, bool full_precision) {
  auto fmt = full_precision ? [](double v) { return fmt_full(v); }
                            : [](double v) { return fmt_sig(v); };
  auto opt = [&](const std::optional<double>& v) {
    return v ? fmt(*v) : std::string();
  };
  TextTable t;
  t.header = {"", "DF", "SS Err.", "SS Reg.", "F", "p"};
  for (const AnovaRow& r : at.rows) {
    t.rows.push_back({r.label, std::to_string(r.df), opt(r.ss_error),
                      opt(r.ss_regression), opt(r.f_stat), opt(r.p_value)});
  }
  return t;
}

TextTable prediction_text(const PredictionTable& pt, bool full_precision) {
  auto fmt = full_precision ? [](double v) { return fmt_full(v); }
                            : [](double v) { return fmt_sig(v); };
  TextTable t;
  if (pt.kind == IntervalKind::None) {
    t.header = {"", pt.header};
    for (std::size_t i = 0; i < pt.values.size(); ++i) {
      t.rows.push_back({std::to_string(i), fmt(pt.values[i])});
    }
    return t;
  }
  const std::string lo_pct = fmt_sig(100.0 * pt.alpha / 2.0);
  const std::string hi_pct = fmt_sig(100.0 * (1.0 - pt.alpha / 2.0));
  t.header = {"", pt.header, lo_pct + "%", hi_pct + "%"};
  for (std::size_t i = 0; i < pt.values.size(); ++i) {
    t.rows.push_back({std::to_string(i), fmt(pt.values[i]), fmt(pt.lower[i]),
                      fmt(pt.upper[i])});
  }
  return t;
}

void save_tsv(const TextTable& t, const std::string& path) {
  std::ostringstream ss;
  write_tsv(t, ss);
  write_file_atomic(path, ss.str());
}

std::string data_file_for(const std::string& svg_path) {
  std::string base = svg_path;
  if (base.size() >= 4 && base.substr(base.size() - 4) == ".svg") {
    base = base.substr(0, base.size() - 4);
  }
  return base + ".data.tsv";
}

void report_dropped(const FitResult& f, std::ostream& out) {
  if (f.dropped_rows > 0) {
    out << "note: dropped " << f.dropped_rows
        << " row(s) with missing values in model columns\n";
  }
}

int cmd_fit(const CommonData& data_opts, const std::string& formula, double alpha,
            const std::string& save_path, const std::string& table_out,
            std::ostream& out) {
  DataTable data = load_data(data_opts);
  ModelSpec spec = parse_formula(formula);
  FitResult fit = fit_model(spec, data);
  report_dropped(fit, out);
  out << fit.model().display() << "\n\n";
  CoefficientTable ct = coefficient_table(fit, alpha);
  out << render_aligned(coefficient_text(ct, false));
  out << "\n";
  out << "n = " << fit.n << ", residual df = " << fit.df_resid << "\n";
  if (!fit.intercept_col) {
    out << "note: no intercept; R^2 uses the uncentered total sum of squares\n";
  }
  out << "R^2 = " << fmt_sig(r_squared(fit, false), 6)
      << ", adjusted R^2 = " << fmt_sig(r_squared(fit, true), 6) << "\n";
  if (fit.sse > 0.0) {
    auto [aic, bic] = information_criteria(fit);
    out << "AIC = " << fmt_sig(aic, 6) << ", BIC = " << fmt_sig(bic, 6) << "\n";
  }
  if (!save_path.empty()) {
    save_model(fit, save_path);
    out << "model saved to " << save_path << "\n";
  }
  if (!table_out.empty()) save_tsv(coefficient_text(ct, true), table_out);
  return 0;
}

int cmd_predict(const CommonData& data_opts, const std::string& model_path,
                double conf, double pred, const std::string& table_out,
                std::ostream& out) {
  if (conf > 0.0 && pred > 0.0) {
    throw Error("confidence and prediction intervals are mutually exclusive");
  }
  FitResult fit = load_model(model_path);
  DataTable data = load_data(data_opts);
  IntervalKind kind = IntervalKind::None;
  double alpha = 0.05;
  if (conf > 0.0) {
    kind = IntervalKind::Confidence;
    alpha = conf;
  } else if (pred > 0.0) {
    kind = IntervalKind::Prediction;
    alpha = pred;
  }
  PredictionTable pt = predict(fit, data, kind, alpha);
  out << render_aligned(prediction_text(pt, false));
  if (!table_out.empty()) save_tsv(prediction_text(pt, true), table_out);
  return 0;
}

int cmd_anova(const std::vector<std::string>& models, const CommonData& data_opts,
              const std::string& table_out, std::ostream& out) {
  AnovaTable table;
  if (models.size() == 1) {
    if (data_opts.data_path.empty()) {
      throw Error("single-model anova needs --data to refit without each term");
    }
    FitResult stored = load_model(models[0]);
    DataTable data = load_data(data_opts);
    FitResult fit = fit_model(stored.model(), data);
    table = anova_single(fit);
  } else {
    FitResult full = load_model(models[0]);
    FitResult reduced = load_model(models[1]);
    table = anova_nested(full, reduced);
  }
  out << render_aligned(anova_text(table, false));
  if (!table_out.empty()) save_tsv(anova_text(table, true), table_out);
  return 0;
}

int cmd_stepwise(const CommonData& data_opts, const std::string& formula,
                 const std::string& metric, const std::string& direction,
                 bool hierarchy, const std::string& save_path,
                 const std::string& trace_out, std::ostream& out) {
  DataTable data = load_data(data_opts);
  ModelSpec full = parse_formula(formula);
  Direction dir;
  if (direction == "forward") {
    dir = Direction::Forward;
  } else if (direction == "backward") {
    dir = Direction::Backward;
  } else {
    throw Error("direction must be 'forward' or 'backward'");
  }
  StepwiseResult res = stepwise(full, data, metric_from_name(metric), dir, hierarchy);

  TextTable t;
  t.header = {"step", "action", "term", res.metric};
  for (const StepEntry& e : res.trace) {
    t.rows.push_back({std::to_string(e.step), e.action, e.term, fmt_sig(e.metric, 10)});
  }
  out << render_aligned(t);
  out << "\n" << res.metric << " | " << fmt_full(res.metric_value) << "\n";
  out << res.best_model.display() << "\n";
  if (!trace_out.empty()) {
    TextTable full_t;
    full_t.header = t.header;
    for (const StepEntry& e : res.trace) {
      full_t.rows.push_back({std::to_string(e.step), e.action, e.term, fmt_full(e.metric)});
    }
    save_tsv(full_t, trace_out);
  }
  if (!save_path.empty()) {
    FitResult best = fit_model(res.best_model, data);
    save_model(best, save_path);
    out << "best model saved to " << save_path << "\n";
  }
  return 0;
}

int cmd_plot(const CommonData& data_opts, const std::string& model_path,
             const std::string& out_path, double conf, double pred,
             const std::string& x_var, bool transformed_space,
             const std::string& data_out, std::ostream& out) {
  FitResult fit = load_model(model_path);
  DataTable data = load_data(data_opts);
  PlotOptions opts;
  if (conf > 0.0) opts.confidence_band = conf;
  if (pred > 0.0) opts.prediction_band = pred;
  if (!x_var.empty()) opts.x_var = x_var;
  PlotSpec spec = transformed_space ? transformed_space_pair(fit, data, opts)
                                    : choose_plot(fit, data, opts);
  for (const std::string& w : spec.warnings) out << "warning: " << w << "\n";
  render_svg(spec, out_path);
  const std::string series_path = data_out.empty() ? data_file_for(out_path) : data_out;
  write_series_data(spec, series_path);
  out << "wrote " << out_path << " and " << series_path << "\n";
  return 0;
}

int cmd_diagnose(const CommonData& data_opts, const std::string& model_path,
                 const std::string& out_path, const std::string& data_out,
                 std::ostream& out) {
  FitResult stored = load_model(model_path);
  DataTable data = load_data(data_opts);
  FitResult fit = fit_model(stored.model(), data);
  PlotSpec spec = residual_panels(fit);
  render_svg(spec, out_path);
  const std::string series_path = data_out.empty() ? data_file_for(out_path) : data_out;
  write_series_data(spec, series_path);
  out << "wrote " << out_path << " and " << series_path << "\n";
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"formula-driven linear regression"};
  app.require_subcommand(1);

  CommonData data_opts;
  auto add_data = [&](CLI::App* cmd, bool required) {
    auto* opt = cmd->add_option("--data", data_opts.data_path, "delimited data file");
    if (required) opt->required();
    cmd->add_option("--delimiter", data_opts.delimiter, "field delimiter (default ,)");
  };

  std::string formula, model_path, save_path, table_out, trace_out, x_var, out_path,
      data_out;
  std::vector<std::string> models;
  double alpha = 0.05, conf = 0.0, pred = 0.0;
  std::string metric = "BIC", direction = "forward";
  bool hierarchy = false, transformed_space = false;

  CLI::App* fit = app.add_subcommand("fit", "fit a model and print the coefficient table");
  add_data(fit, true);
  fit->add_option("--formula", formula, "model formula, e.g. \"y ~ 1 + x\"")->required();
  fit->add_option("--alpha", alpha, "error rate for confidence intervals (default 0.05)");
  fit->add_option("--save", save_path, "write the fitted model to this file");
  fit->add_option("--table-out", table_out, "write the coefficient table as TSV");

  CLI::App* predict_cmd = app.add_subcommand("predict", "predict from a saved model");
  add_data(predict_cmd, true);
  predict_cmd->add_option("--model", model_path, "saved model file")->required();
  predict_cmd->add_option("--confidence-interval", conf,
                          "error rate alpha for confidence intervals");
  predict_cmd->add_option("--prediction-interval", pred,
                          "error rate alpha for prediction intervals");
  predict_cmd->add_option("--table-out", table_out, "write predictions as TSV");

  CLI::App* anova_cmd =
      app.add_subcommand("anova", "F-tests for one model or a nested pair");
  anova_cmd->add_option("models", models, "model file (or full reduced)")
      ->required()
      ->expected(1, 2);
  add_data(anova_cmd, false);
  anova_cmd->add_option("--table-out", table_out, "write the table as TSV");

  CLI::App* step = app.add_subcommand("stepwise", "greedy model search");
  add_data(step, true);
  step->add_option("--formula", formula, "full model formula")->required();
  step->add_option("--metric", metric, "AIC, BIC, or R2_adj (default BIC)");
  step->add_option("--direction", direction, "forward or backward (default forward)");
  step->add_flag("--hierarchy", hierarchy, "respect effect hierarchy");
  step->add_option("--save", save_path, "write the selected model to this file");
  step->add_option("--trace-out", trace_out, "write the step trace as TSV");

  CLI::App* plot = app.add_subcommand("plot", "plot a fitted model over data");
  add_data(plot, true);
  plot->add_option("--model", model_path, "saved model file")->required();
  plot->add_option("--out", out_path, "output SVG path")->required();
  plot->add_option("--confidence-band", conf, "error rate alpha for confidence bands");
  plot->add_option("--prediction-band", pred, "error rate alpha for prediction bands");
  plot->add_option("--x-var", x_var, "x-axis variable when several are quantitative");
  plot->add_flag("--transformed-space", transformed_space,
                 "show original and transformed response panels side by side");
  plot->add_option("--data-out", data_out, "series data file (default <out>.data.tsv)");

  CLI::App* diag = app.add_subcommand("diagnose", "residual diagnostic panels");
  add_data(diag, true);
  diag->add_option("--model", model_path, "saved model file")->required();
  diag->add_option("--out", out_path, "output SVG path")->required();
  diag->add_option("--data-out", data_out, "series data file (default <out>.data.tsv)");

  std::vector<const char*> argv;
  argv.push_back("lmkit");
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    std::ostringstream usage_out;
    const int code = app.exit(e, usage_out, usage_out);
    (code == 0 ? out : err) << usage_out.str();
    return code;
  }

  try {
    if (app.got_subcommand(fit)) {
      return cmd_fit(data_opts, formula, alpha, save_path, table_out, out);
    }
    if (app.got_subcommand(predict_cmd)) {
      return cmd_predict(data_opts, model_path, conf, pred, table_out, out);
    }
    if (app.got_subcommand(anova_cmd)) {
      return cmd_anova(models, data_opts, table_out, out);
    }
    if (app.got_subcommand(step)) {
      return cmd_stepwise(data_opts, formula, metric, direction, hierarchy, save_path,
                          trace_out, out);
    }
    if (app.got_subcommand(plot)) {
      return cmd_plot(data_opts, model_path, out_path, conf, pred, x_var,
                      transformed_space, data_out, out);
    }
    if (app.got_subcommand(diag)) {
      return cmd_diagnose(data_opts, model_path, out_path, data_out, out);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace lmkit::cli
