#pragma once

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lmkit/expr.hpp"
#include "lmkit/table.hpp"

namespace lmkit {

struct CategoricalEncoding {
  std::vector<std::string> levels;  // sorted lexicographically
  std::string baseline;             // member of levels
};

// Training statistics for one Center/Standardize site.
struct SiteStats {
  double mean = 0.0;
  double stddev = 1.0;
};

// Everything learned from the training data that is needed to rebuild
// design columns on unseen data: categorical levels and baselines,
// centering/standardization statistics, and resolved types for variables
// that were written without a Q()/C() marker.
class EncodingState {
 public:
  bool has_category(const std::string& var) const;
  const CategoricalEncoding& category(const std::string& var) const;
  const SiteStats* site(const std::string& key) const;
  VarType resolved_type(const std::string& name) const;

  // Replaces untyped factors with their resolved types and
  // re-canonicalizes (an untyped variable that resolves to categorical
  // loses its powers, which can merge terms).
  ModelSpec resolve(const ModelSpec& m) const;
  Term resolve_term(const Term& t) const;

  void set_category(const std::string& var, CategoricalEncoding enc);
  void set_site(const std::string& key, SiteStats stats);
  void set_resolved(const std::string& name, VarType type);

  const std::map<std::string, CategoricalEncoding>& categories() const {
    return categories_;
  }
  const std::map<std::string, SiteStats>& sites() const { return sites_; }
  const std::map<std::string, VarType>& resolved() const { return resolved_; }

 private:
  std::map<std::string, CategoricalEncoding> categories_;
  std::map<std::string, SiteStats> sites_;
  std::map<std::string, VarType> resolved_;
};

// Columns of one term occupy the contiguous range [start, start + count).
struct TermGroup {
  Term term;
  int start = 0;
  int count = 0;
};

struct DesignMatrix {
  Eigen::MatrixXd values;
  std::vector<std::string> labels;
  std::vector<TermGroup> groups;
  std::optional<int> intercept_col;
};

struct RowFilterResult {
  DataTable table;
  std::size_t dropped = 0;
};

// Listwise deletion: drops every row with a missing cell in any column the
// model references (response included).
RowFilterResult drop_incomplete_rows(const ModelSpec& m, const DataTable& t);

// Learns levels, baselines, centering statistics and type resolutions from
// the training table. Statistics are computed on the retained (complete)
// rows only.
EncodingState fit_encoding(const ModelSpec& m, const DataTable& t);

// Materializes the explanatory side of the model against a table. Rows
// with missing referenced cells, unseen categorical levels, and transform
// domain violations are reported as errors naming the row and variable.
DesignMatrix build_matrix(const ModelSpec& m, const DataTable& t,
                          const EncodingState& s);

// Evaluates the (possibly transformed) response column.
Eigen::VectorXd eval_response(const ModelSpec& m, const DataTable& t,
                              const EncodingState& s);

// Elementwise transformation. Center/Standardize require site statistics.
std::vector<double> eval_transform(TransformKind kind, std::span<const double> x,
                                   const SiteStats* stats = nullptr);
// Exact inverse composed with the stored statistics. Sin/Cos are not
// invertible and raise an error.
std::vector<double> inverse_transform(TransformKind kind, std::span<const double> y,
                                      const SiteStats* stats = nullptr);

}  // namespace lmkit
