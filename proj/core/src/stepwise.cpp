#include "lmkit/stepwise.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>

namespace lmkit {

const char* metric_name(Metric m) {
  switch (m) {
    case Metric::AIC: return "AIC";
    case Metric::BIC: return "BIC";
    case Metric::AdjR2: return "R2_adj";
  }
  return "?";
}

Metric metric_from_name(const std::string& name) {
  if (name == "AIC") return Metric::AIC;
  if (name == "BIC") return Metric::BIC;
  if (name == "R2_adj") return Metric::AdjR2;
  throw Error("unknown metric '" + name + "' (expected AIC, BIC, or R2_adj)");
}

namespace {

// t contained in u with every power <=, at least one strictly smaller.
bool is_proper_subterm(const Term& t, const Term& u) {
  if (t.is_constant() || t.key() == u.key()) return false;
  for (const auto& [base, pow] : t.key()) {
    auto it = std::find_if(u.key().begin(), u.key().end(),
                           [&](const auto& kv) { return kv.first == base; });
    if (it == u.key().end() || it->second < pow) return false;
  }
  return true;
}

}  // namespace

std::vector<Term> hierarchy_parents(const Term& t) {
  std::vector<Term> parents;
  const auto& fs = t.factors();
  if (fs.empty()) return parents;
  std::vector<int> powers(fs.size(), 0);
  for (;;) {
    // odometer over 0..power per factor
    std::size_t k = 0;
    while (k < fs.size()) {
      if (++powers[k] <= fs[k].power()) break;
      powers[k] = 0;
      ++k;
    }
    if (k == fs.size()) break;
    bool full = true;
    bool empty = true;
    for (std::size_t i = 0; i < fs.size(); ++i) {
      if (powers[i] != fs[i].power()) full = false;
      if (powers[i] != 0) empty = false;
    }
    if (full || empty) continue;
    std::vector<Factor> sub;
    for (std::size_t i = 0; i < fs.size(); ++i) {
      if (powers[i] > 0) sub.push_back(fs[i].with_power(powers[i]));
    }
    parents.emplace_back(std::move(sub));
  }
  std::sort(parents.begin(), parents.end());
  return parents;
}

namespace {

struct SearchState {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  std::vector<TermGroup> groups;
  std::optional<int> intercept_col;
  double ss_total = 0.0;
  long n = 0;
};

// Lower is better for every metric; adjusted R^2 is negated.
double evaluate(const SearchState& st, const std::vector<bool>& included,
                Metric metric) {
  std::vector<Eigen::Index> cols;
  if (st.intercept_col) cols.push_back(*st.intercept_col);
  for (std::size_t i = 0; i < st.groups.size(); ++i) {
    if (!included[i]) continue;
    for (int c = 0; c < st.groups[i].count; ++c) {
      cols.push_back(st.groups[i].start + c);
    }
  }
  if (cols.empty()) throw Error("cannot evaluate a model with no columns");
  const long p = static_cast<long>(cols.size());
  if (st.n <= p) throw Error("not enough observations for candidate model");
  Eigen::MatrixXd sub(st.X.rows(), p);
  for (long i = 0; i < p; ++i) sub.col(i) = st.X.col(cols[static_cast<std::size_t>(i)]);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(sub);
  if (qr.rank() < p) throw Error("candidate model is rank deficient");
  const double sse = (st.y - sub * qr.solve(st.y)).squaredNorm();
  const double n = static_cast<double>(st.n);
  switch (metric) {
    case Metric::AIC:
    case Metric::BIC: {
      if (!(sse > 0.0)) {
        throw Error("metric unavailable: residual sum of squares is zero");
      }
      const double ll = -0.5 * n * (std::log(2.0 * std::numbers::pi) +
                                    std::log(sse / n) + 1.0);
      const double k = static_cast<double>(p + 1);
      return metric == Metric::AIC ? 2.0 * k - 2.0 * ll
                                   : k * std::log(n) - 2.0 * ll;
    }
    case Metric::AdjR2: {
      if (!(st.ss_total > 0.0)) throw Error("response has zero total variance");
      const double r2 = 1.0 - sse / st.ss_total;
      const double adj = 1.0 - (1.0 - r2) * (n - 1.0) / (n - static_cast<double>(p));
      return -adj;
    }
  }
  throw Error("unknown metric");
}

double oriented(double v, Metric m) { return m == Metric::AdjR2 ? -v : v; }

}  // namespace

StepwiseResult stepwise(const ModelSpec& full, const DataTable& data,
                        Metric metric, Direction direction, bool hierarchy) {
  if (full.terms().empty()) throw Error("the full model has no terms to search over");
  if (!full.intercept() && direction == Direction::Forward) {
    throw Error("forward selection starts from the intercept-only model; the full "
                "model must include an intercept");
  }

  // One row filter and one encoding, shared by every candidate refit.
  RowFilterResult rows = drop_incomplete_rows(full, data);
  EncodingState enc = fit_encoding(full, rows.table);
  ModelSpec resolved = enc.resolve(full);

  SearchState st;
  DesignMatrix dm = build_matrix(resolved, rows.table, enc);
  st.X = std::move(dm.values);
  st.groups = std::move(dm.groups);
  st.intercept_col = dm.intercept_col;
  st.y = eval_response(resolved, rows.table, enc);
  st.n = st.X.rows();
  st.ss_total = st.intercept_col ? (st.y.array() - st.y.mean()).square().sum()
                                 : st.y.squaredNorm();

  const std::size_t nterms = st.groups.size();
  std::vector<bool> included(nterms, direction == Direction::Backward);
  if (direction == Direction::Backward && nterms == 0) {
    throw Error("backward selection requires at least one term");
  }

  auto all_parents_present = [&](std::size_t i) {
    const std::vector<Term> parents = hierarchy_parents(st.groups[i].term);
    for (const Term& p : parents) {
      bool present = false;
      for (std::size_t j = 0; j < nterms; ++j) {
        if (included[j] && st.groups[j].term == p) {
          present = true;
          break;
        }
      }
      if (!present) return false;
    }
    return true;
  };
  auto has_present_child = [&](std::size_t i) {
    for (std::size_t j = 0; j < nterms; ++j) {
      if (i != j && included[j]) {
        // i is a parent of j when term i is a proper sub-term of term j
        if (is_proper_subterm(st.groups[i].term, st.groups[j].term)) return true;
      }
    }
    return false;
  };

  std::vector<StepEntry> trace;
  double current = evaluate(st, included, metric);
  trace.push_back({0, "start", "", oriented(current, metric)});

  int step = 1;
  for (;;) {
    std::optional<std::size_t> best;
    double best_value = current;
    for (std::size_t i = 0; i < nterms; ++i) {
      if (direction == Direction::Forward) {
        if (included[i]) continue;
        if (hierarchy && !all_parents_present(i)) continue;
      } else {
        if (!included[i]) continue;
        if (hierarchy && has_present_child(i)) continue;
      }
      std::vector<bool> candidate = included;
      candidate[i] = (direction == Direction::Forward);
      double value;
      try {
        value = evaluate(st, candidate, metric);
      } catch (const Error&) {
        continue;  // rank-deficient or unfittable candidate
      }
      if (value < best_value) {  // strict improvement; ties keep the earlier term
        best_value = value;
        best = i;
      }
    }
    if (!best) break;
    included[*best] = (direction == Direction::Forward);
    current = best_value;
    trace.push_back({step++, direction == Direction::Forward ? "add" : "remove",
                     st.groups[*best].term.display(), oriented(current, metric)});
  }

  std::vector<Term> selected;
  for (std::size_t i = 0; i < nterms; ++i) {
    if (included[i]) selected.push_back(st.groups[i].term);
  }
  return StepwiseResult{resolved.with_terms(std::move(selected)), metric_name(metric),
                        oriented(current, metric), std::move(trace)};
}

}  // namespace lmkit
