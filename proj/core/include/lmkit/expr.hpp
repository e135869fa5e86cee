#pragma once

#include <compare>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lmkit/errors.hpp"

namespace lmkit {

// Elementwise column transformations. Center and Standardize depend on
// statistics learned from the training data (see EncodingState).
enum class TransformKind {
  Log,
  Log10,
  Sin,
  Cos,
  Exp,
  Standardize,
  Center,
  Identity,
};

// Canonical short name ("Log", "Std", "Cen", ...).
const char* transform_name(TransformKind kind);
// Accepts the short and long spellings ("Std"/"Standardize", "Cen"/"Center").
std::optional<TransformKind> transform_from_name(const std::string& name);
bool transform_invertible(TransformKind kind);

// How a variable binds to data. Untyped variables are resolved to
// quantitative or categorical from the column content when a model is fit.
enum class VarType { Untyped, Quantitative, Categorical };

class Expression;

// One multiplicand of a term: either a named data variable or a
// transformation applied to an inner expression, raised to an integer
// power >= 1. Categorical variables never carry a power > 1 (an indicator
// squared is itself), which canonicalization enforces.
class Factor {
 public:
  static Factor quantitative(std::string name);
  static Factor categorical(std::string name,
                            std::optional<std::string> baseline = std::nullopt);
  static Factor untyped(std::string name);
  static Factor transformed(TransformKind kind, Expression inner);

  bool is_transformed() const { return kind_.has_value(); }
  bool is_variable() const { return !is_transformed(); }
  VarType var_type() const { return type_; }
  bool known_categorical() const {
    return is_variable() && type_ == VarType::Categorical;
  }

  // Variable factors only.
  const std::string& name() const;
  const std::optional<std::string>& baseline() const { return baseline_; }

  // Transformed factors only.
  TransformKind transform() const;
  const Expression& inner() const;

  int power() const { return power_; }
  Factor with_power(int power) const;
  Factor with_type(VarType type,
                   std::optional<std::string> baseline = std::nullopt) const;

  // Identity of the base (power excluded, type tag and baseline excluded).
  // Two factors with equal keys denote the same column content.
  const std::string& base_key() const { return base_key_; }

  // Printable base, e.g. "SqFt", "Log(SqFt)", "(SqFt-E(SqFt))".
  std::string display_base() const;
  // display_base with the power suffix, e.g. "SqFt^2".
  std::string display() const;
  // Persistence form that keeps type tags: Q(...), C(..., baseline=...),
  // and Cen(...) instead of the (x-E(x)) sugar.
  std::string display_typed() const;

 private:
  Factor() = default;
  void refresh_key();

  std::string name_;
  VarType type_ = VarType::Untyped;
  std::optional<std::string> baseline_;
  std::optional<TransformKind> kind_;
  std::shared_ptr<const Expression> inner_;
  int power_ = 1;
  std::string base_key_;
};

// A product of factors; the unit of model selection and ANOVA granularity.
// A term with zero factors is the constant 1. Construction canonicalizes:
// factors over the same base merge by adding powers, categorical powers
// collapse to 1, and factors are stored in display order (quantitative
// before categorical, then by name).
class Term {
 public:
  Term() = default;
  explicit Term(std::vector<Factor> factors);

  const std::vector<Factor>& factors() const { return factors_; }
  bool is_constant() const { return factors_.empty(); }
  std::size_t size() const { return factors_.size(); }

  // Tag-blind identity: sorted (base_key, power) pairs. Type tags and
  // baselines are data-binding hints, not part of the formula structure.
  const std::vector<std::pair<std::string, int>>& key() const { return key_; }

  std::string display() const;
  std::string display_typed() const;

 private:
  std::vector<Factor> factors_;
  std::vector<std::pair<std::string, int>> key_;
};

bool operator==(const Term& a, const Term& b);
// Canonical order: (number of factors, lexicographic factor keys).
std::strong_ordering operator<=>(const Term& a, const Term& b);

// A flat sum of distinct terms (set semantics), stored in canonical order.
class Expression {
 public:
  Expression() = default;
  explicit Expression(std::vector<Term> terms);
  static Expression constant_one() { return Expression({Term()}); }
  static Expression from_factor(Factor f);

  const std::vector<Term>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }
  bool has_constant_term() const;
  Expression without_constant_term() const;

  std::string display() const;
  std::string display_typed() const;

 private:
  std::vector<Term> terms_;
};

bool operator==(const Expression& a, const Expression& b);

Expression add(const Expression& a, const Expression& b);
// Term-set removal; removing an absent term is a no-op.
Expression subtract(const Expression& a, const Expression& b);
// Full distribution: cross product of term pairs with power merging.
Expression multiply(const Expression& a, const Expression& b);
// k >= 1. Single-term expressions scale factor powers; general
// expressions reduce to repeated multiplication.
Expression power(const Expression& a, int k);
// Sum of powers 1..k of a non-categorical factor.
Expression poly(const Factor& v, int k);

// response ~ [1 +] explanatory. The intercept is a flag, not a term; a
// constant term on the explanatory side is absorbed into the flag.
class ModelSpec {
 public:
  ModelSpec(Expression explanatory, Expression response, bool intercept = true);

  // Canonically ordered, no constant term.
  const std::vector<Term>& terms() const { return terms_; }
  const Term& response() const { return response_; }
  bool intercept() const { return intercept_; }

  ModelSpec with_intercept(bool intercept) const;
  ModelSpec with_terms(std::vector<Term> terms) const;

  std::string display() const;
  std::string display_typed() const;

 private:
  std::vector<Term> terms_;
  Term response_;
  bool intercept_ = true;
};

ModelSpec remove_intercept(const ModelSpec& m);
bool operator==(const ModelSpec& a, const ModelSpec& b);

// Quotes the name when it is not a bare identifier.
std::string display_name(const std::string& name);

}  // namespace lmkit
