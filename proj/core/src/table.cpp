#include "lmkit/table.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace lmkit {

namespace {

std::string format_number(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, p);
}

bool parse_number(const std::string& cell, double& out) {
  std::size_t b = cell.find_first_not_of(" \t");
  if (b == std::string::npos) return false;
  std::size_t e = cell.find_last_not_of(" \t") + 1;
  const char* first = cell.data() + b;
  const char* last = cell.data() + e;
  if (*first == '+') ++first;
  auto [p, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && p == last && std::isfinite(out);
}

}  // namespace

Column Column::numeric(std::vector<double> values, std::vector<bool> missing) {
  Column c;
  c.numeric_ = true;
  if (missing.empty()) missing.assign(values.size(), false);
  if (missing.size() != values.size()) throw Error("missing mask size mismatch");
  c.num_ = std::move(values);
  c.missing_ = std::move(missing);
  return c;
}

Column Column::text(std::vector<std::string> values, std::vector<bool> missing) {
  Column c;
  c.numeric_ = false;
  if (missing.empty()) missing.assign(values.size(), false);
  if (missing.size() != values.size()) throw Error("missing mask size mismatch");
  c.txt_ = std::move(values);
  c.missing_ = std::move(missing);
  return c;
}

bool Column::has_missing() const {
  return std::find(missing_.begin(), missing_.end(), true) != missing_.end();
}

double Column::number(std::size_t i) const {
  if (!numeric_) throw Error("column is not numeric");
  return num_[i];
}

const std::string& Column::text_value(std::size_t i) const {
  if (numeric_) throw Error("column is not text");
  return txt_[i];
}

std::string Column::label(std::size_t i) const {
  if (missing_[i]) return "";
  return numeric_ ? format_number(num_[i]) : txt_[i];
}

const std::vector<double>& Column::numbers() const {
  if (!numeric_) throw Error("column is not numeric");
  return num_;
}

const std::vector<std::string>& Column::texts() const {
  if (numeric_) throw Error("column is not text");
  return txt_;
}

bool operator==(const Column& a, const Column& b) {
  if (a.is_numeric() != b.is_numeric() || a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a.is_missing(i) != b.is_missing(i)) return false;
    if (a.is_missing(i)) continue;
    if (a.is_numeric()) {
      if (a.number(i) != b.number(i)) return false;
    } else if (a.text_value(i) != b.text_value(i)) {
      return false;
    }
  }
  return true;
}

void DataTable::add_column(const std::string& name, Column col) {
  if (has_column(name)) throw Error("duplicate column name '" + name + "'");
  if (!names_.empty() && col.size() != nrows_) {
    throw Error("column '" + name + "' has " + std::to_string(col.size()) +
                " rows, expected " + std::to_string(nrows_));
  }
  nrows_ = col.size();
  names_.push_back(name);
  cols_.push_back(std::move(col));
}

bool DataTable::has_column(const std::string& name) const {
  return std::find(names_.begin(), names_.end(), name) != names_.end();
}

const Column& DataTable::column(const std::string& name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) throw Error("unknown column '" + name + "'");
  return cols_[static_cast<std::size_t>(it - names_.begin())];
}

DataTable DataTable::select(std::span<const std::string> names) const {
  DataTable out;
  for (const std::string& n : names) out.add_column(n, column(n));
  return out;
}

DataTable DataTable::filter(const std::vector<bool>& keep) const {
  if (keep.size() != nrows_) throw Error("filter mask size mismatch");
  DataTable out;
  for (std::size_t c = 0; c < cols_.size(); ++c) {
    const Column& col = cols_[c];
    std::vector<bool> missing;
    if (col.is_numeric()) {
      std::vector<double> vals;
      for (std::size_t i = 0; i < nrows_; ++i) {
        if (!keep[i]) continue;
        vals.push_back(col.is_missing(i) ? 0.0 : col.number(i));
        missing.push_back(col.is_missing(i));
      }
      out.add_column(names_[c], Column::numeric(std::move(vals), std::move(missing)));
    } else {
      std::vector<std::string> vals;
      for (std::size_t i = 0; i < nrows_; ++i) {
        if (!keep[i]) continue;
        vals.push_back(col.is_missing(i) ? std::string() : col.text_value(i));
        missing.push_back(col.is_missing(i));
      }
      out.add_column(names_[c], Column::text(std::move(vals), std::move(missing)));
    }
  }
  return out;
}

bool operator==(const DataTable& a, const DataTable& b) {
  if (a.names() != b.names() || a.nrows() != b.nrows()) return false;
  for (const std::string& n : a.names()) {
    if (!(a.column(n) == b.column(n))) return false;
  }
  return true;
}

namespace {

// Splits delimited content into records of fields, honoring quoted fields
// with "" escapes. Newlines inside quotes are preserved.
std::vector<std::vector<std::string>> split_records(const std::string& content,
                                                    char delim) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    records.push_back(std::move(record));
    record.clear();
  };
  for (std::size_t i = 0; i < content.size(); ++i) {
    char c = content[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < content.size() && content[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"' && !field_started) {
      in_quotes = true;
      field_started = true;
    } else if (c == delim) {
      end_field();
    } else if (c == '\n') {
      if (!field.empty() && field.back() == '\r') field.pop_back();
      end_record();
    } else {
      field += c;
      field_started = true;
    }
  }
  if (in_quotes) throw Error("unterminated quoted field");
  if (!field.empty() || !record.empty()) {
    if (!field.empty() && field.back() == '\r') field.pop_back();
    end_record();
  }
  return records;
}

}  // namespace

DataTable read_delimited_text(const std::string& content, const ReadOptions& opts) {
  auto records = split_records(content, opts.delimiter);
  if (records.empty()) throw Error("empty file");
  const auto& header = records.front();
  std::set<std::string> seen;
  for (const std::string& name : header) {
    if (!seen.insert(name).second) {
      throw Error("duplicate column name '" + name + "'");
    }
  }
  const std::size_t ncols = header.size();
  const std::size_t nrows = records.size() - 1;
  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != ncols) {
      throw Error("row " + std::to_string(r) + " has " +
                  std::to_string(records[r].size()) + " fields, expected " +
                  std::to_string(ncols));
    }
  }
  DataTable out;
  for (std::size_t c = 0; c < ncols; ++c) {
    std::vector<bool> missing(nrows, false);
    bool all_numeric = true;
    std::vector<double> nums(nrows, 0.0);
    for (std::size_t r = 0; r < nrows; ++r) {
      const std::string& cell = records[r + 1][c];
      if (cell.empty()) {
        missing[r] = true;
        continue;
      }
      if (all_numeric && !parse_number(cell, nums[r])) all_numeric = false;
    }
    if (all_numeric) {
      out.add_column(header[c], Column::numeric(std::move(nums), std::move(missing)));
    } else {
      std::vector<std::string> vals(nrows);
      for (std::size_t r = 0; r < nrows; ++r) {
        if (!missing[r]) vals[r] = records[r + 1][c];
      }
      out.add_column(header[c], Column::text(std::move(vals), std::move(missing)));
    }
  }
  return out;
}

DataTable read_delimited(const std::string& path, const ReadOptions& opts) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return read_delimited_text(ss.str(), opts);
}

namespace {

std::string quote_field(const std::string& field, char delim) {
  bool needs_quotes = field.find(delim) != std::string::npos ||
                      field.find('"') != std::string::npos ||
                      field.find('\n') != std::string::npos ||
                      field.find('\r') != std::string::npos;
  if (!needs_quotes) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += '"';
  return out;
}

}  // namespace

void write_delimited(const DataTable& t, std::ostream& out, const ReadOptions& opts) {
  const auto& names = t.names();
  for (std::size_t c = 0; c < names.size(); ++c) {
    if (c) out << opts.delimiter;
    out << quote_field(names[c], opts.delimiter);
  }
  out << '\n';
  for (std::size_t r = 0; r < t.nrows(); ++r) {
    for (std::size_t c = 0; c < names.size(); ++c) {
      if (c) out << opts.delimiter;
      out << quote_field(t.column(names[c]).label(r), opts.delimiter);
    }
    out << '\n';
  }
}

std::string write_delimited_text(const DataTable& t, const ReadOptions& opts) {
  std::ostringstream ss;
  write_delimited(t, ss, opts);
  return ss.str();
}

}  // namespace lmkit
