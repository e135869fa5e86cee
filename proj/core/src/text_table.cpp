#include "lmkit/text_table.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

namespace lmkit {

std::string fmt_sig(double v, int digits) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
  return buf;
}

std::string fmt_full(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, p);
}

std::string render_aligned(const TextTable& t) {
  std::size_t ncols = t.header.size();
  for (const auto& row : t.rows) ncols = std::max(ncols, row.size());
  std::vector<std::size_t> widths(ncols, 0);
  auto measure = [&](const std::vector<std::string>& row) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      widths[c] = std::max(widths[c], row[c].size());
    }
  };
  measure(t.header);
  for (const auto& row : t.rows) measure(row);

  std::ostringstream out;
  auto emit = [&](const std::vector<std::string>& row) {
    for (std::size_t c = 0; c < ncols; ++c) {
      const std::string& cell = c < row.size() ? row[c] : std::string();
      if (c > 0) out << "  ";
      if (c == 0) {
        out << cell << std::string(widths[c] - cell.size(), ' ');
      } else {
        out << std::string(widths[c] - cell.size(), ' ') << cell;
      }
    }
    out << '\n';
  };
  if (!t.header.empty()) emit(t.header);
  for (const auto& row : t.rows) emit(row);
  return out.str();
}

void write_tsv(const TextTable& t, std::ostream& out) {
  auto emit = [&](const std::vector<std::string>& row) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out << '\t';
      out << row[c];
    }
    out << '\n';
  };
  emit(t.header);
  for (const auto& row : t.rows) emit(row);
}

}  // namespace lmkit
