#include "lmkit/anova.hpp"

#include <algorithm>
#include <cmath>

#include "lmkit/distributions.hpp"

namespace lmkit {

namespace {

// Least-squares SSE of y against a column subset of X.
double subset_sse(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                  const std::vector<Eigen::Index>& cols) {
  if (cols.empty()) return y.squaredNorm();
  Eigen::MatrixXd sub(X.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t i = 0; i < cols.size(); ++i) {
    sub.col(static_cast<Eigen::Index>(i)) = X.col(cols[i]);
  }
  Eigen::VectorXd beta = sub.colPivHouseholderQr().solve(y);
  return (y - sub * beta).squaredNorm();
}

}  // namespace

AnovaTable anova_single(const FitResult& f) {
  if (!f.has_training_data()) {
    throw Error("per-term ANOVA requires a model fit with training data");
  }
  if (!f.intercept_col) {
    throw Error("the omnibus F-test requires a model with an intercept");
  }
  AnovaTable table;
  const double ss_reg = f.ss_total - f.sse;
  const long df_model = f.rank - 1;
  const double mse = f.sigma2();

  AnovaRow global;
  global.label = "Global Test";
  global.df = df_model;
  global.ss_error = ss_reg;
  global.ss_regression = ss_reg;
  if (df_model > 0) {
    global.f_stat = (ss_reg / static_cast<double>(df_model)) / mse;
    global.p_value = f_sf(*global.f_stat, static_cast<double>(df_model),
                          static_cast<double>(f.df_resid));
  }
  table.rows.push_back(std::move(global));

  for (const TermGroup& g : f.groups) {
    std::vector<Eigen::Index> cols;
    for (Eigen::Index c = 0; c < f.X.cols(); ++c) {
      if (c >= g.start && c < g.start + g.count) continue;
      cols.push_back(c);
    }
    const double sse_reduced = subset_sse(f.X, f.y, cols);
    AnovaRow row;
    row.label = "- " + g.term.display();
    row.df = g.count;
    row.ss_error = sse_reduced;
    row.ss_regression = f.ss_total - sse_reduced;
    const double delta = std::max(0.0, sse_reduced - f.sse);
    row.f_stat = (delta / static_cast<double>(g.count)) / mse;
    row.p_value = f_sf(*row.f_stat, static_cast<double>(g.count),
                       static_cast<double>(f.df_resid));
    table.rows.push_back(std::move(row));
  }

  AnovaRow error;
  error.label = "Error";
  error.df = f.df_resid;
  table.rows.push_back(std::move(error));
  return table;
}

AnovaTable anova_nested(const FitResult& full, const FitResult& reduced) {
  if (full.response_label != reduced.response_label) {
    throw Error("models have different responses: '" + full.response_label +
                "' vs '" + reduced.response_label + "'");
  }
  if (full.n != reduced.n) {
    throw Error("models were fit on different row counts: " +
                std::to_string(full.n) + " vs " + std::to_string(reduced.n));
  }
  const ModelSpec& fm = full.model();
  const ModelSpec& rm = reduced.model();
  if (rm.intercept() && !fm.intercept()) {
    throw Error("reduced model has an intercept but the full model does not");
  }
  std::string extra;
  for (const Term& t : rm.terms()) {
    bool in_full = std::any_of(fm.terms().begin(), fm.terms().end(),
                               [&](const Term& u) { return u == t; });
    if (!in_full) {
      if (!extra.empty()) extra += ", ";
      extra += t.display();
    }
  }
  if (!extra.empty()) {
    throw Error("reduced model contains terms not in the full model: " + extra);
  }
  if (rm.terms().size() == fm.terms().size() && rm.intercept() == fm.intercept()) {
    throw Error("models are identical; nothing to test");
  }

  const long delta_df = full.rank - reduced.rank;
  if (delta_df <= 0) throw Error("models are not nested: no extra degrees of freedom");
  const double delta_ss = reduced.sse - full.sse;
  if (delta_ss < -1e-8 * std::max(1.0, full.sse)) {
    throw Error("reduced model has smaller error sum of squares; the models were "
                "not fit to the same data");
  }
  const double mse = full.sigma2();
  const double f_stat = (std::max(0.0, delta_ss) / static_cast<double>(delta_df)) / mse;

  AnovaTable table;
  AnovaRow top;
  top.label = "Full Model";
  top.df = full.rank - (full.intercept_col ? 1 : 0);
  top.ss_error = full.sse;
  top.ss_regression = full.ss_total - full.sse;
  table.rows.push_back(std::move(top));

  AnovaRow cmp;
  cmp.label = "- Reduced Model";
  cmp.df = delta_df;
  cmp.ss_error = reduced.sse;
  cmp.ss_regression = reduced.ss_total - reduced.sse;
  cmp.f_stat = f_stat;
  cmp.p_value = f_sf(f_stat, static_cast<double>(delta_df),
                     static_cast<double>(full.df_resid));
  table.rows.push_back(std::move(cmp));

  AnovaRow error;
  error.label = "Error";
  error.df = full.df_resid;
  table.rows.push_back(std::move(error));
  return table;
}

}  // namespace lmkit
