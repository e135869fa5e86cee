#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lmkit {

// Rows of pre-formatted cells rendered with aligned columns: the first
// column left-aligned, the rest right-aligned.
struct TextTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

std::string render_aligned(const TextTable& t);
void write_tsv(const TextTable& t, std::ostream& out);

// 4 significant digits for display; full round-trip precision for files.
std::string fmt_sig(double v, int digits = 4);
std::string fmt_full(double v);

}  // namespace lmkit
