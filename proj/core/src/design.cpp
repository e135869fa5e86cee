#include "lmkit/design.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>

namespace lmkit {

namespace {

std::string number_label(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, p);
}

// Collects every variable name referenced by a term, transform inners
// included.
void collect_variables(const Term& t, std::set<std::string>& out);

void collect_variables(const Expression& e, std::set<std::string>& out) {
  for (const Term& t : e.terms()) collect_variables(t, out);
}

void collect_variables(const Term& t, std::set<std::string>& out) {
  for (const Factor& f : t.factors()) {
    if (f.is_variable()) {
      out.insert(f.name());
    } else {
      collect_variables(f.inner(), out);
    }
  }
}

std::set<std::string> referenced_variables(const ModelSpec& m) {
  std::set<std::string> vars;
  for (const Term& t : m.terms()) collect_variables(t, vars);
  collect_variables(m.response(), vars);
  return vars;
}

Factor resolve_factor(const Factor& f, const EncodingState& s) {
  if (f.is_transformed()) {
    std::vector<Term> ts;
    for (const Term& t : f.inner().terms()) ts.push_back(s.resolve_term(t));
    Expression inner(std::move(ts));
    return Factor::transformed(f.transform(), std::move(inner)).with_power(f.power());
  }
  if (f.var_type() != VarType::Untyped) return f;
  VarType resolved = s.resolved_type(f.name());
  if (resolved == VarType::Untyped) return f;
  return f.with_type(resolved);
}

}  // namespace

bool EncodingState::has_category(const std::string& var) const {
  return categories_.count(var) != 0;
}

const CategoricalEncoding& EncodingState::category(const std::string& var) const {
  auto it = categories_.find(var);
  if (it == categories_.end()) {
    throw Error("no categorical encoding for variable '" + var + "'");
  }
  return it->second;
}

const SiteStats* EncodingState::site(const std::string& key) const {
  auto it = sites_.find(key);
  return it == sites_.end() ? nullptr : &it->second;
}

VarType EncodingState::resolved_type(const std::string& name) const {
  auto it = resolved_.find(name);
  return it == resolved_.end() ? VarType::Untyped : it->second;
}

Term EncodingState::resolve_term(const Term& t) const {
  std::vector<Factor> fs;
  fs.reserve(t.size());
  for (const Factor& f : t.factors()) fs.push_back(resolve_factor(f, *this));
  return Term(std::move(fs));
}

ModelSpec EncodingState::resolve(const ModelSpec& m) const {
  std::vector<Term> ts;
  ts.reserve(m.terms().size());
  for (const Term& t : m.terms()) ts.push_back(resolve_term(t));
  ModelSpec out = m.with_terms(std::move(ts));
  Term resp = resolve_term(m.response());
  return ModelSpec(Expression(out.terms()), Expression({resp}), out.intercept())
      .with_intercept(m.intercept());
}

void EncodingState::set_category(const std::string& var, CategoricalEncoding enc) {
  categories_[var] = std::move(enc);
}

void EncodingState::set_site(const std::string& key, SiteStats stats) {
  sites_[key] = stats;
}

void EncodingState::set_resolved(const std::string& name, VarType type) {
  resolved_[name] = type;
}

RowFilterResult drop_incomplete_rows(const ModelSpec& m, const DataTable& t) {
  auto vars = referenced_variables(m);
  std::vector<bool> keep(t.nrows(), true);
  std::size_t dropped = 0;
  for (const std::string& v : vars) {
    const Column& col = t.column(v);
    for (std::size_t i = 0; i < t.nrows(); ++i) {
      if (keep[i] && col.is_missing(i)) {
        keep[i] = false;
        ++dropped;
      }
    }
  }
  if (dropped == 0) return {t, 0};
  return {t.filter(keep), dropped};
}

namespace {

// Value of a cell as a level label; numeric categorical columns use the
// round-trip number representation.
std::string level_label(const Column& col, std::size_t row) {
  return col.is_numeric() ? number_label(col.number(row)) : col.text_value(row);
}

class Evaluator {
 public:
  // When fitting, Center/Standardize statistics are computed and recorded;
  // otherwise they are looked up and missing sites are an error.
  Evaluator(const DataTable& t, EncodingState& s, bool fitting)
      : t_(t), s_(s), fitting_(fitting) {}

  std::vector<double> eval_expression(const Expression& e) {
    std::vector<double> acc(t_.nrows(), 0.0);
    for (const Term& term : e.terms()) {
      std::vector<double> prod(t_.nrows(), 1.0);
      for (const Factor& f : term.factors()) {
        std::vector<double> base = eval_base(f);
        for (std::size_t i = 0; i < prod.size(); ++i) {
          prod[i] *= std::pow(base[i], f.power());
        }
      }
      for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += prod[i];
    }
    return acc;
  }

  // Numeric column for a non-categorical factor base (power not applied).
  std::vector<double> eval_base(const Factor& f) {
    if (f.is_variable()) {
      if (f.known_categorical()) {
        throw Error("categorical variable '" + f.name() +
                    "' used where a numeric value is required");
      }
      const Column& col = t_.column(f.name());
      if (!col.is_numeric()) {
        throw Error("variable '" + f.name() +
                    "' is a text column and cannot be used as quantitative");
      }
      std::vector<double> out(t_.nrows());
      for (std::size_t i = 0; i < t_.nrows(); ++i) {
        if (col.is_missing(i)) {
          throw Error("missing value in column '" + f.name() + "' at row " +
                      std::to_string(i));
        }
        out[i] = col.number(i);
      }
      return out;
    }
    std::vector<double> inner = eval_expression(f.inner());
    const TransformKind kind = f.transform();
    const SiteStats* stats = nullptr;
    SiteStats fitted;
    if (kind == TransformKind::Center || kind == TransformKind::Standardize) {
      if (fitting_) {
        fitted = fit_site(f, inner);
        s_.set_site(f.base_key(), fitted);
        stats = &fitted;
      } else {
        stats = s_.site(f.base_key());
        if (!stats) {
          throw Error("encoding state has no statistics for " + f.display_base());
        }
      }
    }
    try {
      return eval_transform(kind, inner, stats);
    } catch (const Error& e) {
      throw Error(std::string(e.what()) + " in " + f.display_base());
    }
  }

 private:
  SiteStats fit_site(const Factor& f, const std::vector<double>& values) {
    SiteStats st;
    const std::size_t n = values.size();
    if (n == 0) throw Error("cannot fit statistics on an empty table");
    double sum = 0.0;
    for (double v : values) sum += v;
    st.mean = sum / static_cast<double>(n);
    if (f.transform() == TransformKind::Standardize) {
      if (n < 2) throw Error("Std() requires at least two rows");
      double ss = 0.0;
      for (double v : values) ss += (v - st.mean) * (v - st.mean);
      st.stddev = std::sqrt(ss / static_cast<double>(n - 1));
      if (!(st.stddev > 0.0)) {
        throw Error("standard deviation is zero for " + f.display_base());
      }
    }
    return st;
  }

  const DataTable& t_;
  EncodingState& s_;
  bool fitting_;
};

void fit_sites_in_term(const Term& t, Evaluator& ev) {
  for (const Factor& f : t.factors()) {
    if (f.is_transformed()) ev.eval_base(f);  // recurses and records sites
  }
}

}  // namespace

EncodingState fit_encoding(const ModelSpec& m, const DataTable& t) {
  for (const std::string& v : referenced_variables(m)) {
    if (!t.has_column(v)) throw Error("unknown column '" + v + "'");
  }
  RowFilterResult rows = drop_incomplete_rows(m, t);
  const DataTable& data = rows.table;

  EncodingState s;
  // Resolve untyped variables by column content.
  std::set<std::string> vars = referenced_variables(m);
  for (const std::string& v : vars) {
    s.set_resolved(v, data.column(v).is_numeric() ? VarType::Quantitative
                                                  : VarType::Categorical);
  }
  ModelSpec resolved = s.resolve(m);

  // Categorical levels and baselines.
  std::map<std::string, std::optional<std::string>> overrides;
  auto visit_categoricals = [&](const Term& term) {
    for (const Factor& f : term.factors()) {
      if (!f.is_variable() || !f.known_categorical()) continue;
      auto [it, fresh] = overrides.emplace(f.name(), f.baseline());
      if (!fresh && f.baseline()) {
        if (it->second && *it->second != *f.baseline()) {
          throw Error("conflicting baseline levels for variable '" + f.name() + "'");
        }
        it->second = f.baseline();
      }
    }
  };
  for (const Term& term : resolved.terms()) visit_categoricals(term);
  for (const auto& [name, baseline] : overrides) {
    const Column& col = data.column(name);
    std::set<std::string> levels;
    for (std::size_t i = 0; i < data.nrows(); ++i) levels.insert(level_label(col, i));
    if (levels.size() < 2) {
      throw Error("categorical variable '" + name + "' has fewer than two levels");
    }
    CategoricalEncoding enc;
    enc.levels.assign(levels.begin(), levels.end());
    if (baseline) {
      if (!levels.count(*baseline)) {
        throw Error("baseline level '" + *baseline + "' not observed in column '" +
                    name + "'");
      }
      enc.baseline = *baseline;
    } else {
      enc.baseline = enc.levels.front();
    }
    s.set_category(name, enc);
  }

  // Center/Standardize statistics, computed bottom-up on retained rows.
  Evaluator ev(data, s, /*fitting=*/true);
  for (const Term& term : resolved.terms()) fit_sites_in_term(term, ev);
  fit_sites_in_term(resolved.response(), ev);
  return s;
}

namespace {

// Indicator columns for one categorical factor: one column per
// non-baseline level, in level order.
struct FactorColumns {
  std::vector<std::string> label_parts;   // e.g. "Style{2 Story}"
  std::vector<std::vector<double>> cols;
};

FactorColumns factor_columns(const Factor& f, const DataTable& t,
                             const EncodingState& s, Evaluator& ev) {
  FactorColumns out;
  if (f.is_variable() && f.known_categorical()) {
    const CategoricalEncoding& enc = s.category(f.name());
    const Column& col = t.column(f.name());
    std::vector<std::size_t> level_of(t.nrows());
    for (std::size_t i = 0; i < t.nrows(); ++i) {
      if (col.is_missing(i)) {
        throw Error("missing value in column '" + f.name() + "' at row " +
                    std::to_string(i));
      }
      const std::string label = level_label(col, i);
      auto it = std::find(enc.levels.begin(), enc.levels.end(), label);
      if (it == enc.levels.end()) {
        throw Error("unseen level '" + label + "' for variable '" + f.name() +
                    "' at row " + std::to_string(i));
      }
      level_of[i] = static_cast<std::size_t>(it - enc.levels.begin());
    }
    for (std::size_t l = 0; l < enc.levels.size(); ++l) {
      if (enc.levels[l] == enc.baseline) continue;
      std::vector<double> indicator(t.nrows(), 0.0);
      for (std::size_t i = 0; i < t.nrows(); ++i) {
        if (level_of[i] == l) indicator[i] = 1.0;
      }
      out.label_parts.push_back(display_name(f.name()) + "{" + enc.levels[l] + "}");
      out.cols.push_back(std::move(indicator));
    }
    return out;
  }
  std::vector<double> base = ev.eval_base(f);
  if (f.power() > 1) {
    for (double& v : base) v = std::pow(v, f.power());
  }
  out.label_parts.push_back(f.display());
  out.cols.push_back(std::move(base));
  return out;
}

}  // namespace

DesignMatrix build_matrix(const ModelSpec& m, const DataTable& t,
                          const EncodingState& s) {
  ModelSpec resolved = s.resolve(m);
  const std::size_t n = t.nrows();
  EncodingState scratch = s;  // sites are read-only here
  Evaluator ev(t, scratch, /*fitting=*/false);

  std::vector<std::string> labels;
  std::vector<std::vector<double>> columns;
  std::vector<TermGroup> groups;
  std::optional<int> intercept_col;

  if (resolved.intercept()) {
    labels.emplace_back("Intercept");
    columns.emplace_back(n, 1.0);
    intercept_col = 0;
  }

  for (const Term& term : resolved.terms()) {
    std::vector<FactorColumns> parts;
    parts.reserve(term.size());
    for (const Factor& f : term.factors()) {
      parts.push_back(factor_columns(f, t, s, ev));
    }
    TermGroup group;
    group.term = term;
    group.start = static_cast<int>(columns.size());
    // Cartesian product over the factors' column blocks, last factor
    // cycling fastest.
    std::vector<std::size_t> idx(parts.size(), 0);
    const bool multi = term.size() > 1;
    for (;;) {
      std::vector<double> col(n, 1.0);
      std::string label;
      for (std::size_t k = 0; k < parts.size(); ++k) {
        const auto& part = parts[k];
        const auto& v = part.cols[idx[k]];
        for (std::size_t i = 0; i < n; ++i) col[i] *= v[i];
        if (multi) {
          label += "(" + part.label_parts[idx[k]] + ")";
        } else {
          label = part.label_parts[idx[k]];
        }
      }
      labels.push_back(std::move(label));
      columns.push_back(std::move(col));
      ++group.count;
      // odometer increment
      std::size_t k = parts.size();
      while (k > 0) {
        --k;
        if (++idx[k] < parts[k].cols.size()) break;
        idx[k] = 0;
        if (k == 0) goto done;
      }
      if (parts.empty()) break;
    }
  done:
    groups.push_back(std::move(group));
  }

  DesignMatrix dm;
  dm.values.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(columns.size()));
  for (std::size_t c = 0; c < columns.size(); ++c) {
    for (std::size_t i = 0; i < n; ++i) {
      dm.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) =
          columns[c][i];
    }
  }
  dm.labels = std::move(labels);
  dm.groups = std::move(groups);
  dm.intercept_col = intercept_col;
  return dm;
}

Eigen::VectorXd eval_response(const ModelSpec& m, const DataTable& t,
                              const EncodingState& s) {
  ModelSpec resolved = s.resolve(m);
  const Term& resp = resolved.response();
  for (const Factor& f : resp.factors()) {
    if (f.is_variable() && f.known_categorical()) {
      throw Error("response variable '" + f.name() + "' is categorical");
    }
  }
  EncodingState scratch = s;
  Evaluator ev(t, scratch, /*fitting=*/false);
  std::vector<double> prod(t.nrows(), 1.0);
  for (const Factor& f : resp.factors()) {
    std::vector<double> base = ev.eval_base(f);
    for (std::size_t i = 0; i < prod.size(); ++i) {
      prod[i] *= std::pow(base[i], f.power());
    }
  }
  return Eigen::Map<Eigen::VectorXd>(prod.data(), static_cast<Eigen::Index>(prod.size()));
}

std::vector<double> eval_transform(TransformKind kind, std::span<const double> x,
                                   const SiteStats* stats) {
  std::vector<double> out(x.begin(), x.end());
  switch (kind) {
    case TransformKind::Identity:
      break;
    case TransformKind::Log:
      for (std::size_t i = 0; i < out.size(); ++i) {
        if (!(out[i] > 0.0)) {
          throw Error("Log of non-positive value at row " + std::to_string(i));
        }
        out[i] = std::log(out[i]);
      }
      break;
    case TransformKind::Log10:
      for (std::size_t i = 0; i < out.size(); ++i) {
        if (!(out[i] > 0.0)) {
          throw Error("Log10 of non-positive value at row " + std::to_string(i));
        }
        out[i] = std::log10(out[i]);
      }
      break;
    case TransformKind::Sin:
      for (double& v : out) v = std::sin(v);
      break;
    case TransformKind::Cos:
      for (double& v : out) v = std::cos(v);
      break;
    case TransformKind::Exp:
      for (double& v : out) v = std::exp(v);
      break;
    case TransformKind::Center:
      if (!stats) throw Error("Center requires stored statistics");
      for (double& v : out) v -= stats->mean;
      break;
    case TransformKind::Standardize:
      if (!stats) throw Error("Standardize requires stored statistics");
      if (!(stats->stddev > 0.0)) throw Error("Standardize requires a positive stddev");
      for (double& v : out) v = (v - stats->mean) / stats->stddev;
      break;
  }
  return out;
}

std::vector<double> inverse_transform(TransformKind kind, std::span<const double> y,
                                      const SiteStats* stats) {
  std::vector<double> out(y.begin(), y.end());
  switch (kind) {
    case TransformKind::Identity:
      break;
    case TransformKind::Log:
      for (double& v : out) v = std::exp(v);
      break;
    case TransformKind::Log10:
      for (double& v : out) v = std::pow(10.0, v);
      break;
    case TransformKind::Exp:
      for (std::size_t i = 0; i < out.size(); ++i) {
        if (!(out[i] > 0.0)) {
          throw Error("inverse of Exp undefined for non-positive value at row " +
                      std::to_string(i));
        }
        out[i] = std::log(out[i]);
      }
      break;
    case TransformKind::Center:
      if (!stats) throw Error("Center requires stored statistics");
      for (double& v : out) v += stats->mean;
      break;
    case TransformKind::Standardize:
      if (!stats) throw Error("Standardize requires stored statistics");
      for (double& v : out) v = v * stats->stddev + stats->mean;
      break;
    case TransformKind::Sin:
    case TransformKind::Cos:
      throw Error(std::string(transform_name(kind)) + " is not invertible");
  }
  return out;
}

}  // namespace lmkit
