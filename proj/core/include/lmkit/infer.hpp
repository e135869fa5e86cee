#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lmkit/design.hpp"
#include "lmkit/expr.hpp"
#include "lmkit/table.hpp"

namespace lmkit {

// A fitted least-squares model. Carries everything needed for inference
// (coefficients, the unscaled covariance factor (X'X)^-1, sums of squares,
// degrees of freedom) plus, when fit in-process, the training design and
// response for diagnostics and per-term refits. Models loaded from disk
// have no training data attached.
struct FitResult {
  std::optional<ModelSpec> spec;  // resolved spec
  EncodingState encoding;
  Eigen::VectorXd coefficients;
  Eigen::MatrixXd cov_unscaled;  // (X'X)^-1
  double sse = 0.0;
  double ss_total = 0.0;  // about the mean when an intercept is present
  long n = 0;
  long rank = 0;
  long df_resid = 0;
  std::vector<std::string> column_labels;
  std::vector<TermGroup> groups;
  std::optional<int> intercept_col;
  Eigen::VectorXd fitted;
  Eigen::VectorXd residuals;
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  std::string response_label;
  std::size_t dropped_rows = 0;

  bool has_training_data() const { return X.size() > 0; }
  double sigma2() const { return sse / static_cast<double>(df_resid); }
  const ModelSpec& model() const;
};

// Solves min ||y - X b|| by column-pivoted QR. Rank-deficient designs are
// an error naming a linearly dependent column set.
FitResult ols_fit(const DesignMatrix& dm, const Eigen::VectorXd& y);

// Full pipeline: drop incomplete rows, learn the encoding, materialize the
// design, evaluate the response, and solve.
FitResult fit_model(const ModelSpec& m, const DataTable& data);

struct CoefficientRow {
  std::string label;
  double estimate;
  double std_error;
  double t_stat;   // NaN when the standard error is zero
  double p_value;  // NaN when the standard error is zero
  double ci_lower;
  double ci_upper;
};

struct CoefficientTable {
  std::vector<CoefficientRow> rows;
  double alpha = 0.05;
};

CoefficientTable coefficient_table(const FitResult& f, double alpha = 0.05);

enum class IntervalKind { None, Confidence, Prediction };

struct PredictionTable {
  std::string header;  // "Predicted <response>"
  std::vector<double> values;
  std::vector<double> lower, upper;  // empty when no interval requested
  IntervalKind kind = IntervalKind::None;
  double alpha = 0.05;
};

// Predictions in the (possibly transformed) response space.
PredictionTable predict(const FitResult& f, const DataTable& data,
                        IntervalKind kind = IntervalKind::None, double alpha = 0.05);

double r_squared(const FitResult& f, bool adjusted = false);

// Gaussian maximum-likelihood AIC and BIC with the error variance counted
// as a parameter (k = rank + 1).
std::pair<double, double> information_criteria(const FitResult& f);
double log_likelihood(const FitResult& f);

struct Histogram {
  std::vector<double> edges;  // size bins + 1
  std::vector<long> counts;   // size bins
};

struct DiagnosticPanels {
  std::vector<std::pair<double, double>> qq;  // (theoretical, sample) quantiles
  Histogram histogram;                        // Sturges bins
  std::vector<std::pair<double, double>> fitted_vs_residual;
  std::vector<std::pair<double, double>> order_vs_residual;
};

DiagnosticPanels residual_diagnostics(const FitResult& f);

// (predictor value, residual) pairs for one quantitative model variable.
std::vector<std::pair<double, double>> residual_vs_predictor(
    const FitResult& f, const std::string& variable);

// Partial regression (added-variable) pairs: the variable's design column
// and the response, each residualized against the other columns.
std::vector<std::pair<double, double>> partial_regression(
    const FitResult& f, const std::string& variable);

}  // namespace lmkit
