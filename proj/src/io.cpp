#include "kawahara/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "kawahara/error.hpp"

namespace kawahara::io {

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

namespace {

void dump(const nlohmann::ordered_json& v, std::string& out, int depth) {
  using value_t = nlohmann::ordered_json::value_t;
  const std::string pad(static_cast<std::size_t>(2 * (depth + 1)), ' ');
  const std::string close_pad(static_cast<std::size_t>(2 * depth), ' ');
  switch (v.type()) {
    case value_t::number_float: {
      const double d = v.get<double>();
      out += std::isfinite(d) ? format_double(d) : "null";
      break;
    }
    case value_t::object: {
      if (v.empty()) {
        out += "{}";
        break;
      }
      out += "{\n";
      bool first = true;
      for (const auto& [key, item] : v.items()) {
        if (!first) out += ",\n";
        first = false;
        out += pad + nlohmann::ordered_json(key).dump() + ": ";
        dump(item, out, depth + 1);
      }
      out += "\n" + close_pad + "}";
      break;
    }
    case value_t::array: {
      if (v.empty()) {
        out += "[]";
        break;
      }
      out += "[\n";
      bool first = true;
      for (const auto& item : v) {
        if (!first) out += ",\n";
        first = false;
        out += pad;
        dump(item, out, depth + 1);
      }
      out += "\n" + close_pad + "]";
      break;
    }
    default:
      out += v.dump();
  }
}

}  // namespace

std::string dump_json(const nlohmann::ordered_json& value) {
  std::string out;
  dump(value, out, 0);
  out += "\n";
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorKind::io, "cannot open " + path.string() + " for writing");
  f << text;
  if (!f) throw Error(ErrorKind::io, "write failed for " + path.string());
}

CsvWriter::CsvWriter(std::string schema, std::vector<std::string> header)
    : columns_(header.size()) {
  if (!schema.empty()) text_ += "# " + schema + "\n";
  row(header);
}

void CsvWriter::row(const std::vector<double>& values) {
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (double v : values) cells.push_back(format_double(v));
  row(cells);
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_)
    throw Error(ErrorKind::precondition, "CSV row has " + std::to_string(cells.size()) +
                                             " cells, header has " + std::to_string(columns_));
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) text_ += ',';
    text_ += cells[i];
  }
  text_ += '\n';
}

}  // namespace kawahara::io
