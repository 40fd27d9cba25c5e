#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "motkit/errors.hpp"

namespace motkit {

/// Fixed 6-decimal formatting for every float that reaches an output file.
/// snprintf with an explicit format is locale-independent and stable across
/// platforms, which keeps reruns byte-identical.
inline std::string format_fixed(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", value);
  return std::string(buf);
}

/// Minimal CSV emitter: caller supplies a header once, then rows of
/// already-formatted cells. No quoting (no cell written by this project
/// contains commas or newlines).
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header)
      : out_(path, std::ios::binary) {
    if (!out_) throw IoError("cannot open for writing: " + path);
    write_row(header);
  }

  void write_row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      out_ << cells[i];
    }
    out_ << '\n';
  }

  void close() { out_.close(); }

 private:
  std::ofstream out_;
};

}  // namespace motkit
