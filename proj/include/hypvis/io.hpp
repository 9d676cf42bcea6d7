#pragma once

// Result-file helpers: round-trip-exact number formatting, CSV assembly, and
// small file utilities.  CSV outputs must be byte-stable across runs and
// worker counts, so all numbers go through one fixed "%.17g" formatter.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "hypvis/errors.hpp"

namespace hypvis {

inline std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// Row-oriented CSV assembly; cells are preformatted strings.
class CsvBuilder {
 public:
  explicit CsvBuilder(const std::vector<std::string>& header) { line(header); }
  void line(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      out_ << cells[i];
    }
    out_ << '\n';
  }
  std::string str() const { return out_.str(); }

 private:
  std::ostringstream out_;
};

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw validation_error("cannot open output file " + path.string());
  os << content;
  if (!os) throw validation_error("failed writing output file " + path.string());
}

}  // namespace hypvis
