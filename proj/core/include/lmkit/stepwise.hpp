#pragma once

#include <string>
#include <vector>

#include "lmkit/infer.hpp"

namespace lmkit {

enum class Metric { AIC, BIC, AdjR2 };
enum class Direction { Forward, Backward };

const char* metric_name(Metric m);
Metric metric_from_name(const std::string& name);

struct StepEntry {
  int step = 0;
  std::string action;  // "start", "add", "remove"
  std::string term;    // empty for "start"
  double metric = 0.0;
};

struct StepwiseResult {
  ModelSpec best_model;
  std::string metric;
  double metric_value = 0.0;
  std::vector<StepEntry> trace;
};

// All proper sub-terms of t: every term whose factor multiset is contained
// in t's with at least one power strictly reduced (the empty term
// excluded). These are the lower-order terms effect hierarchy requires.
std::vector<Term> hierarchy_parents(const Term& t);

// Greedy stepwise search over the terms of the full model. Forward starts
// from the intercept-only model and adds the single best-improving term;
// backward starts from the full model and removes likewise; the search
// stops when no move strictly improves the metric. With hierarchy on,
// forward only considers terms whose parents are all present and backward
// only removes terms with no dependent term still present. AIC and BIC are
// minimized, adjusted R^2 is maximized. Every candidate is refit on the
// same rows with the same encoding so metric values are comparable.
StepwiseResult stepwise(const ModelSpec& full, const DataTable& data,
                        Metric metric, Direction direction, bool hierarchy);

}  // namespace lmkit
