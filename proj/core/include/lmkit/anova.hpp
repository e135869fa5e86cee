#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lmkit/infer.hpp"

namespace lmkit {

struct AnovaRow {
  std::string label;
  long df = 0;
  std::optional<double> ss_error;
  std::optional<double> ss_regression;
  std::optional<double> f_stat;
  std::optional<double> p_value;
};

struct AnovaTable {
  std::vector<AnovaRow> rows;  // trailing Error row carries df_resid only
};

// Omnibus F-test plus one drop-one-group partial F-test per term. The
// per-term rows report the reduced fit's error and regression sums of
// squares; the global row reports the full model's regression sum of
// squares.
AnovaTable anova_single(const FitResult& f);

// Nested-model partial F-test. The reduced model's terms must be a proper
// subset of the full model's, fit to the same response on the same rows.
AnovaTable anova_nested(const FitResult& full, const FitResult& reduced);

}  // namespace lmkit
