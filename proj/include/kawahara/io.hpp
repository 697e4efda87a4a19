#pragma once

// Bit-stable text output: every double is written with 17 significant digits.

#include <filesystem>
#include "json.hpp"
#include <string>
#include <vector>

namespace kawahara::io {

/// "%.17g"; non-finite values become "nan", "inf" or "-inf".
std::string format_double(double value);

/// JSON text with two-space indentation and keys in insertion order.
/// Doubles use format_double; non-finite doubles become null.
std::string dump_json(const nlohmann::ordered_json& value);

void write_text(const std::filesystem::path& path, const std::string& text);

/// CSV with an optional leading "# ..." schema line, a header row and LF
/// line endings.
class CsvWriter {
 public:
  CsvWriter(std::string schema, std::vector<std::string> header);
  void row(const std::vector<double>& values);
  void row(const std::vector<std::string>& cells);
  std::string str() const { return text_; }

 private:
  std::size_t columns_;
  std::string text_;
};

}  // namespace kawahara::io
