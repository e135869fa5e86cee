#include "lmkit/expr.hpp"

#include <algorithm>
#include <cctype>
#include <map>

namespace lmkit {

const char* transform_name(TransformKind kind) {
  switch (kind) {
    case TransformKind::Log: return "Log";
    case TransformKind::Log10: return "Log10";
    case TransformKind::Sin: return "Sin";
    case TransformKind::Cos: return "Cos";
    case TransformKind::Exp: return "Exp";
    case TransformKind::Standardize: return "Std";
    case TransformKind::Center: return "Cen";
    case TransformKind::Identity: return "Identity";
  }
  return "?";
}

std::optional<TransformKind> transform_from_name(const std::string& name) {
  if (name == "Log") return TransformKind::Log;
  if (name == "Log10") return TransformKind::Log10;
  if (name == "Sin") return TransformKind::Sin;
  if (name == "Cos") return TransformKind::Cos;
  if (name == "Exp") return TransformKind::Exp;
  if (name == "Std" || name == "Standardize") return TransformKind::Standardize;
  if (name == "Cen" || name == "Center") return TransformKind::Center;
  if (name == "Identity") return TransformKind::Identity;
  return std::nullopt;
}

bool transform_invertible(TransformKind kind) {
  return kind != TransformKind::Sin && kind != TransformKind::Cos;
}

std::string display_name(const std::string& name) {
  bool bare = !name.empty() &&
              (std::isalpha(static_cast<unsigned char>(name[0])) || name[0] == '_');
  for (char c : name) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') bare = false;
  }
  if (bare) return name;
  std::string out = "\"";
  for (char c : name) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += '"';
  return out;
}

// ---------------------------------------------------------------------------
// Factor

Factor Factor::quantitative(std::string name) {
  Factor f;
  f.name_ = std::move(name);
  f.type_ = VarType::Quantitative;
  f.refresh_key();
  return f;
}

Factor Factor::categorical(std::string name, std::optional<std::string> baseline) {
  Factor f;
  f.name_ = std::move(name);
  f.type_ = VarType::Categorical;
  f.baseline_ = std::move(baseline);
  f.refresh_key();
  return f;
}

Factor Factor::untyped(std::string name) {
  Factor f;
  f.name_ = std::move(name);
  f.type_ = VarType::Untyped;
  f.refresh_key();
  return f;
}

Factor Factor::transformed(TransformKind kind, Expression inner) {
  if (inner.empty()) throw Error("transformation of an empty expression");
  for (const Term& t : inner.terms()) {
    for (const Factor& f : t.factors()) {
      if (f.known_categorical()) {
        throw Error("categorical variable '" + f.name() +
                    "' cannot appear inside a numeric transformation");
      }
    }
  }
  Factor f;
  f.kind_ = kind;
  f.inner_ = std::make_shared<const Expression>(std::move(inner));
  f.refresh_key();
  return f;
}

const std::string& Factor::name() const {
  if (is_transformed()) throw Error("transformed factor has no variable name");
  return name_;
}

TransformKind Factor::transform() const {
  if (!is_transformed()) throw Error("variable factor has no transformation");
  return *kind_;
}

const Expression& Factor::inner() const {
  if (!is_transformed()) throw Error("variable factor has no inner expression");
  return *inner_;
}

Factor Factor::with_power(int power) const {
  if (power < 1) throw Error("factor power must be a positive integer");
  Factor f = *this;
  f.power_ = known_categorical() ? 1 : power;
  return f;
}

Factor Factor::with_type(VarType type, std::optional<std::string> baseline) const {
  if (is_transformed()) throw Error("cannot retype a transformed factor");
  Factor f = *this;
  f.type_ = type;
  if (baseline) f.baseline_ = std::move(baseline);
  if (f.known_categorical()) f.power_ = 1;
  f.refresh_key();
  return f;
}

void Factor::refresh_key() { base_key_ = display_base(); }

std::string Factor::display_base() const {
  if (is_variable()) return display_name(name_);
  const std::string inner = inner_->display();
  if (*kind_ == TransformKind::Center) {
    return "(" + inner + "-E(" + inner + "))";
  }
  return std::string(transform_name(*kind_)) + "(" + inner + ")";
}

std::string Factor::display() const {
  std::string s = display_base();
  if (power_ > 1) s += "^" + std::to_string(power_);
  return s;
}

std::string Factor::display_typed() const {
  std::string s;
  if (is_transformed()) {
    s = std::string(transform_name(*kind_)) + "(" + inner_->display_typed() + ")";
  } else {
    switch (type_) {
      case VarType::Untyped:
        s = display_name(name_);
        break;
      case VarType::Quantitative:
        s = "Q(" + display_name(name_) + ")";
        break;
      case VarType::Categorical:
        s = "C(" + display_name(name_);
        if (baseline_) s += ", baseline=" + display_name(*baseline_);
        s += ")";
        break;
    }
  }
  if (power_ > 1) s += "^" + std::to_string(power_);
  return s;
}

// ---------------------------------------------------------------------------
// Term

namespace {

// Merge the type tags of two factors over the same base. An explicit type
// wins over untyped; contradictory explicit types are an error.
Factor merge_tags(const Factor& a, const Factor& b, int merged_power) {
  if (a.is_transformed() || b.is_transformed()) {
    return a.with_power(merged_power);
  }
  VarType ta = a.var_type(), tb = b.var_type();
  if (ta != VarType::Untyped && tb != VarType::Untyped && ta != tb) {
    throw Error("variable '" + a.name() +
                "' declared both quantitative and categorical");
  }
  const Factor& typed = (ta != VarType::Untyped) ? a : b;
  std::optional<std::string> baseline = a.baseline();
  if (b.baseline()) {
    if (baseline && *baseline != *b.baseline()) {
      throw Error("conflicting baseline levels for variable '" + a.name() + "'");
    }
    baseline = b.baseline();
  }
  Factor out = typed.with_type(typed.var_type(), baseline);
  return out.with_power(merged_power);
}

}  // namespace

Term::Term(std::vector<Factor> factors) {
  std::map<std::string, Factor> by_base;
  for (Factor& f : factors) {
    auto it = by_base.find(f.base_key());
    if (it == by_base.end()) {
      by_base.emplace(f.base_key(), std::move(f));
    } else {
      int p = it->second.power() + f.power();
      it->second = merge_tags(it->second, f, p);
    }
  }
  factors_.reserve(by_base.size());
  for (auto& [key, f] : by_base) {
    if (f.known_categorical() && f.power() > 1) f = f.with_power(1);
    factors_.push_back(std::move(f));
  }
  // Display order: quantitative-like before categorical, then by base.
  std::stable_sort(factors_.begin(), factors_.end(),
                   [](const Factor& a, const Factor& b) {
                     int ra = a.known_categorical() ? 1 : 0;
                     int rb = b.known_categorical() ? 1 : 0;
                     if (ra != rb) return ra < rb;
                     return a.base_key() < b.base_key();
                   });
  key_.reserve(factors_.size());
  for (const Factor& f : factors_) key_.emplace_back(f.base_key(), f.power());
  std::sort(key_.begin(), key_.end());
}

std::string Term::display() const {
  if (is_constant()) return "1";
  if (factors_.size() == 1) return factors_[0].display();
  std::string s;
  for (const Factor& f : factors_) s += "(" + f.display() + ")";
  return s;
}

std::string Term::display_typed() const {
  if (is_constant()) return "1";
  if (factors_.size() == 1) return factors_[0].display_typed();
  std::string s;
  bool first = true;
  for (const Factor& f : factors_) {
    if (!first) s += " * ";
    s += "(" + f.display_typed() + ")";
    first = false;
  }
  return s;
}

bool operator==(const Term& a, const Term& b) { return a.key() == b.key(); }

std::strong_ordering operator<=>(const Term& a, const Term& b) {
  if (auto c = a.size() <=> b.size(); c != 0) return c;
  return a.key() <=> b.key();
}

// ---------------------------------------------------------------------------
// Expression

Expression::Expression(std::vector<Term> terms) {
  std::sort(terms.begin(), terms.end());
  for (Term& t : terms) {
    if (!terms_.empty() && terms_.back() == t) {
      // Same structural term seen twice: merge the type tags factor by
      // factor (powers are already equal by key equality).
      std::vector<Factor> merged;
      const auto& a = terms_.back().factors();
      const auto& b = t.factors();
      for (const Factor& fa : a) {
        auto it = std::find_if(b.begin(), b.end(), [&](const Factor& fb) {
          return fb.base_key() == fa.base_key();
        });
        merged.push_back(it == b.end() ? fa : merge_tags(fa, *it, fa.power()));
      }
      terms_.back() = Term(std::move(merged));
      continue;
    }
    terms_.push_back(std::move(t));
  }
}

Expression Expression::from_factor(Factor f) {
  return Expression({Term({std::move(f)})});
}

bool Expression::has_constant_term() const {
  return !terms_.empty() && terms_.front().is_constant();
}

Expression Expression::without_constant_term() const {
  if (!has_constant_term()) return *this;
  std::vector<Term> rest(terms_.begin() + 1, terms_.end());
  return Expression(std::move(rest));
}

std::string Expression::display() const {
  std::string s;
  for (const Term& t : terms_) {
    if (!s.empty()) s += " + ";
    s += t.display();
  }
  return s;
}

std::string Expression::display_typed() const {
  std::string s;
  for (const Term& t : terms_) {
    if (!s.empty()) s += " + ";
    s += t.display_typed();
  }
  return s;
}

bool operator==(const Expression& a, const Expression& b) {
  const auto& ta = a.terms();
  const auto& tb = b.terms();
  if (ta.size() != tb.size()) return false;
  for (std::size_t i = 0; i < ta.size(); ++i) {
    if (!(ta[i] == tb[i])) return false;
  }
  return true;
}

Expression add(const Expression& a, const Expression& b) {
  std::vector<Term> ts = a.terms();
  ts.insert(ts.end(), b.terms().begin(), b.terms().end());
  return Expression(std::move(ts));
}

Expression subtract(const Expression& a, const Expression& b) {
  std::vector<Term> out;
  for (const Term& t : a.terms()) {
    bool removed = std::any_of(b.terms().begin(), b.terms().end(),
                               [&](const Term& u) { return u == t; });
    if (!removed) out.push_back(t);
  }
  return Expression(std::move(out));
}

Expression multiply(const Expression& a, const Expression& b) {
  std::vector<Term> out;
  for (const Term& ta : a.terms()) {
    for (const Term& tb : b.terms()) {
      std::vector<Factor> fs = ta.factors();
      fs.insert(fs.end(), tb.factors().begin(), tb.factors().end());
      out.emplace_back(std::move(fs));
    }
  }
  return Expression(std::move(out));
}

Expression power(const Expression& a, int k) {
  if (k < 1) throw Error("power must be a positive integer");
  if (a.terms().size() == 1) {
    const Term& t = a.terms().front();
    if (t.is_constant()) return a;
    std::vector<Factor> fs;
    fs.reserve(t.size());
    for (const Factor& f : t.factors()) fs.push_back(f.with_power(f.power() * k));
    return Expression({Term(std::move(fs))});
  }
  Expression acc = a;
  for (int i = 1; i < k; ++i) acc = multiply(acc, a);
  return acc;
}

Expression poly(const Factor& v, int k) {
  if (k < 1) throw Error("polynomial degree must be a positive integer");
  if (v.known_categorical()) {
    throw Error("Poly of a categorical variable '" + v.name() + "' is not defined");
  }
  std::vector<Term> ts;
  ts.reserve(static_cast<std::size_t>(k));
  for (int i = 1; i <= k; ++i) ts.push_back(Term({v.with_power(v.power() * i)}));
  return Expression(std::move(ts));
}

// ---------------------------------------------------------------------------
// ModelSpec

ModelSpec::ModelSpec(Expression explanatory, Expression response, bool intercept) {
  intercept_ = intercept || explanatory.has_constant_term();
  terms_ = explanatory.without_constant_term().terms();
  const auto& rts = response.terms();
  if (rts.size() != 1 || rts.front().is_constant()) {
    throw Error("response must be a single non-constant term");
  }
  response_ = rts.front();
}

ModelSpec ModelSpec::with_intercept(bool intercept) const {
  ModelSpec m = *this;
  m.intercept_ = intercept;
  return m;
}

ModelSpec ModelSpec::with_terms(std::vector<Term> terms) const {
  ModelSpec m = *this;
  m.terms_ = Expression(std::move(terms)).without_constant_term().terms();
  return m;
}

std::string ModelSpec::display() const {
  std::string s = response_.display() + " ~ ";
  bool first = true;
  if (intercept_) {
    s += "1";
    first = false;
  }
  for (const Term& t : terms_) {
    if (!first) s += " + ";
    s += t.display();
    first = false;
  }
  if (first) s += "0";
  return s;
}

std::string ModelSpec::display_typed() const {
  std::string s = response_.display_typed() + " ~ ";
  bool first = true;
  if (intercept_) {
    s += "1";
    first = false;
  }
  for (const Term& t : terms_) {
    if (!first) s += " + ";
    s += t.display_typed();
    first = false;
  }
  if (first) s += "0";
  return s;
}

ModelSpec remove_intercept(const ModelSpec& m) { return m.with_intercept(false); }

bool operator==(const ModelSpec& a, const ModelSpec& b) {
  if (a.intercept() != b.intercept()) return false;
  if (!(a.response() == b.response())) return false;
  const auto& ta = a.terms();
  const auto& tb = b.terms();
  if (ta.size() != tb.size()) return false;
  for (std::size_t i = 0; i < ta.size(); ++i) {
    if (!(ta[i] == tb[i])) return false;
  }
  return true;
}

}  // namespace lmkit
