#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "lmkit/errors.hpp"

namespace lmkit {

// A typed column: numeric when every non-missing cell parses as a finite
// number, text otherwise. Missing cells (empty fields) are masked.
class Column {
 public:
  static Column numeric(std::vector<double> values, std::vector<bool> missing = {});
  static Column text(std::vector<std::string> values, std::vector<bool> missing = {});

  bool is_numeric() const { return numeric_; }
  std::size_t size() const { return missing_.size(); }
  bool is_missing(std::size_t i) const { return missing_[i]; }
  bool has_missing() const;

  double number(std::size_t i) const;
  const std::string& text_value(std::size_t i) const;
  // Printable cell value; numeric values use a round-trip representation.
  std::string label(std::size_t i) const;

  const std::vector<double>& numbers() const;
  const std::vector<std::string>& texts() const;
  const std::vector<bool>& missing_mask() const { return missing_; }

 private:
  bool numeric_ = true;
  std::vector<double> num_;
  std::vector<std::string> txt_;
  std::vector<bool> missing_;
};

bool operator==(const Column& a, const Column& b);

// An immutable table of named columns sharing one row count.
class DataTable {
 public:
  DataTable() = default;

  void add_column(const std::string& name, Column col);
  std::size_t nrows() const { return nrows_; }
  std::size_t ncols() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  bool has_column(const std::string& name) const;
  const Column& column(const std::string& name) const;

  DataTable select(std::span<const std::string> names) const;
  DataTable filter(const std::vector<bool>& keep) const;

 private:
  std::vector<std::string> names_;
  std::vector<Column> cols_;
  std::size_t nrows_ = 0;
};

bool operator==(const DataTable& a, const DataTable& b);

struct ReadOptions {
  char delimiter = ',';
};

DataTable read_delimited(const std::string& path, const ReadOptions& opts = {});
DataTable read_delimited_text(const std::string& content, const ReadOptions& opts = {});
void write_delimited(const DataTable& t, std::ostream& out, const ReadOptions& opts = {});
std::string write_delimited_text(const DataTable& t, const ReadOptions& opts = {});

}  // namespace lmkit
