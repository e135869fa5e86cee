#include "lmkit/infer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "lmkit/distributions.hpp"

namespace lmkit {

const ModelSpec& FitResult::model() const {
  if (!spec) throw Error("fit result carries no model specification");
  return *spec;
}

FitResult ols_fit(const DesignMatrix& dm, const Eigen::VectorXd& y) {
  const Eigen::Index n = dm.values.rows();
  const Eigen::Index p = dm.values.cols();
  if (y.size() != n) {
    throw Error("design has " + std::to_string(n) + " rows but response has " +
                std::to_string(y.size()));
  }
  if (p == 0) throw Error("design matrix has no columns");
  if (n <= p) {
    throw Error("need more observations than columns: n = " + std::to_string(n) +
                ", columns = " + std::to_string(p));
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(dm.values);
  const Eigen::Index rank = qr.rank();
  if (rank < p) {
    // The pivots beyond the numerical rank identify a dependent set.
    std::string cols;
    const auto& perm = qr.colsPermutation().indices();
    for (Eigen::Index i = rank; i < p; ++i) {
      if (!cols.empty()) cols += ", ";
      cols += dm.labels[static_cast<std::size_t>(perm(i))];
    }
    throw Error("design matrix is rank deficient; linearly dependent columns: " +
                cols);
  }

  FitResult f;
  f.coefficients = qr.solve(y);
  // X P = Q R  =>  (X'X)^-1 = P R^-1 R^-T P'
  Eigen::MatrixXd rinv = qr.matrixQR()
                             .topLeftCorner(p, p)
                             .triangularView<Eigen::Upper>()
                             .solve(Eigen::MatrixXd::Identity(p, p));
  Eigen::MatrixXd m = rinv * rinv.transpose();
  f.cov_unscaled = qr.colsPermutation() * m * qr.colsPermutation().transpose();

  f.fitted = dm.values * f.coefficients;
  f.residuals = y - f.fitted;
  f.sse = f.residuals.squaredNorm();
  f.ss_total = dm.intercept_col
                   ? (y.array() - y.mean()).square().sum()
                   : y.squaredNorm();
  f.n = n;
  f.rank = rank;
  f.df_resid = n - rank;
  f.column_labels = dm.labels;
  f.groups = dm.groups;
  f.intercept_col = dm.intercept_col;
  f.X = dm.values;
  f.y = y;
  return f;
}

FitResult fit_model(const ModelSpec& m, const DataTable& data) {
  RowFilterResult rows = drop_incomplete_rows(m, data);
  EncodingState enc = fit_encoding(m, rows.table);
  ModelSpec resolved = enc.resolve(m);
  DesignMatrix dm = build_matrix(resolved, rows.table, enc);
  Eigen::VectorXd y = eval_response(resolved, rows.table, enc);
  FitResult f = ols_fit(dm, y);
  f.spec = resolved;
  f.encoding = enc;
  f.response_label = resolved.response().display();
  f.dropped_rows = rows.dropped;
  return f;
}

CoefficientTable coefficient_table(const FitResult& f, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error("alpha must be in (0, 1)");
  CoefficientTable table;
  table.alpha = alpha;
  const double s2 = f.sigma2();
  const double tq = t_quantile(1.0 - alpha / 2.0, static_cast<double>(f.df_resid));
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (Eigen::Index j = 0; j < f.coefficients.size(); ++j) {
    CoefficientRow row;
    row.label = f.column_labels[static_cast<std::size_t>(j)];
    row.estimate = f.coefficients(j);
    const double var = std::max(0.0, s2 * f.cov_unscaled(j, j));
    row.std_error = std::sqrt(var);
    if (row.std_error > 0.0) {
      row.t_stat = row.estimate / row.std_error;
      row.p_value = student_t_two_sided_p(row.t_stat, static_cast<double>(f.df_resid));
    } else {
      row.t_stat = nan;
      row.p_value = nan;
    }
    row.ci_lower = row.estimate - tq * row.std_error;
    row.ci_upper = row.estimate + tq * row.std_error;
    table.rows.push_back(std::move(row));
  }
  return table;
}

PredictionTable predict(const FitResult& f, const DataTable& data,
                        IntervalKind kind, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error("alpha must be in (0, 1)");
  const ModelSpec& spec = f.model();
  DesignMatrix dm = build_matrix(spec, data, f.encoding);
  if (dm.values.cols() != f.coefficients.size()) {
    throw Error("design built for prediction has a different column count");
  }
  PredictionTable out;
  out.header = "Predicted " + f.response_label;
  out.kind = kind;
  out.alpha = alpha;
  Eigen::VectorXd yhat = dm.values * f.coefficients;
  out.values.assign(yhat.data(), yhat.data() + yhat.size());
  if (kind == IntervalKind::None) return out;

  const double tq = t_quantile(1.0 - alpha / 2.0, static_cast<double>(f.df_resid));
  const double s2 = f.sigma2();
  // rowwise x' (X'X)^-1 x
  Eigen::VectorXd leverage =
      (dm.values * f.cov_unscaled).cwiseProduct(dm.values).rowwise().sum();
  const double extra = (kind == IntervalKind::Prediction) ? 1.0 : 0.0;
  out.lower.resize(out.values.size());
  out.upper.resize(out.values.size());
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    const double half =
        tq * std::sqrt(s2 * (extra + std::max(0.0, leverage(static_cast<Eigen::Index>(i)))));
    out.lower[i] = out.values[i] - half;
    out.upper[i] = out.values[i] + half;
  }
  return out;
}

double r_squared(const FitResult& f, bool adjusted) {
  if (!(f.ss_total > 0.0)) throw Error("response has zero total variance");
  const double r2 = 1.0 - f.sse / f.ss_total;
  if (!adjusted) return r2;
  return 1.0 - (1.0 - r2) * static_cast<double>(f.n - 1) /
                   static_cast<double>(f.df_resid);
}

double log_likelihood(const FitResult& f) {
  if (!(f.sse > 0.0)) throw Error("log-likelihood unbounded: residual sum of squares is zero");
  const double n = static_cast<double>(f.n);
  return -0.5 * n * (std::log(2.0 * std::numbers::pi) + std::log(f.sse / n) + 1.0);
}

std::pair<double, double> information_criteria(const FitResult& f) {
  const double ll = log_likelihood(f);
  const double k = static_cast<double>(f.rank + 1);  // error variance counted
  const double aic = 2.0 * k - 2.0 * ll;
  const double bic = k * std::log(static_cast<double>(f.n)) - 2.0 * ll;
  return {aic, bic};
}

DiagnosticPanels residual_diagnostics(const FitResult& f) {
  if (!f.has_training_data()) {
    throw Error("residual diagnostics require a model fit with training data");
  }
  DiagnosticPanels out;
  const Eigen::Index n = f.residuals.size();

  std::vector<double> sorted(f.residuals.data(), f.residuals.data() + n);
  std::sort(sorted.begin(), sorted.end());
  out.qq.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    const double prob = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
    out.qq.emplace_back(normal_quantile(prob), sorted[static_cast<std::size_t>(i)]);
  }

  // Sturges' rule
  const int bins = static_cast<int>(std::ceil(std::log2(static_cast<double>(n)))) + 1;
  const double lo = sorted.front();
  const double hi = sorted.back();
  const double width = (hi > lo) ? (hi - lo) / bins : 1.0;
  out.histogram.edges.resize(static_cast<std::size_t>(bins) + 1);
  for (int b = 0; b <= bins; ++b) out.histogram.edges[static_cast<std::size_t>(b)] = lo + b * width;
  out.histogram.counts.assign(static_cast<std::size_t>(bins), 0);
  for (double r : sorted) {
    int b = static_cast<int>((r - lo) / width);
    b = std::clamp(b, 0, bins - 1);
    ++out.histogram.counts[static_cast<std::size_t>(b)];
  }

  out.fitted_vs_residual.reserve(static_cast<std::size_t>(n));
  out.order_vs_residual.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    out.fitted_vs_residual.emplace_back(f.fitted(i), f.residuals(i));
    out.order_vs_residual.emplace_back(static_cast<double>(i), f.residuals(i));
  }
  return out;
}

namespace {

// Column index of the plain power-1 column of a quantitative variable.
Eigen::Index variable_column(const FitResult& f, const std::string& variable) {
  for (const TermGroup& g : f.groups) {
    if (g.term.size() != 1 || g.count != 1) continue;
    const Factor& fac = g.term.factors().front();
    if (fac.is_variable() && !fac.known_categorical() && fac.power() == 1 &&
        fac.name() == variable) {
      return g.start;
    }
  }
  throw Error("variable '" + variable + "' is not a quantitative model term");
}

Eigen::VectorXd residualize(const Eigen::MatrixXd& others, const Eigen::VectorXd& v) {
  if (others.cols() == 0) return v;
  Eigen::VectorXd beta = others.colPivHouseholderQr().solve(v);
  return v - others * beta;
}

}  // namespace

std::vector<std::pair<double, double>> residual_vs_predictor(
    const FitResult& f, const std::string& variable) {
  if (!f.has_training_data()) throw Error("residual plots require training data");
  const Eigen::Index j = variable_column(f, variable);
  std::vector<std::pair<double, double>> out;
  out.reserve(static_cast<std::size_t>(f.n));
  for (Eigen::Index i = 0; i < f.X.rows(); ++i) {
    out.emplace_back(f.X(i, j), f.residuals(i));
  }
  return out;
}

std::vector<std::pair<double, double>> partial_regression(
    const FitResult& f, const std::string& variable) {
  if (!f.has_training_data()) throw Error("partial regression requires training data");
  const Eigen::Index j = variable_column(f, variable);
  const Eigen::Index p = f.X.cols();
  Eigen::MatrixXd others(f.X.rows(), p - 1);
  Eigen::Index c = 0;
  for (Eigen::Index k = 0; k < p; ++k) {
    if (k == j) continue;
    others.col(c++) = f.X.col(k);
  }
  Eigen::VectorXd rx = residualize(others, f.X.col(j));
  Eigen::VectorXd ry = residualize(others, f.y);
  std::vector<std::pair<double, double>> out;
  out.reserve(static_cast<std::size_t>(f.n));
  for (Eigen::Index i = 0; i < rx.size(); ++i) out.emplace_back(rx(i), ry(i));
  return out;
}

}  // namespace lmkit
