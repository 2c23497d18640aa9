#include "ctxsal/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include "ctxsal/error.hpp"

namespace ctxsal {

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw NumericError("format_double: conversion failed");
  return std::string(buf, end);
}

std::string matrix_to_csv(const EegMatrix& m) {
  std::string out;
  out.reserve(m.size() * 12);
  for (std::size_t ch = 0; ch < m.channels(); ++ch) {
    auto row = m.row(ch);
    for (std::size_t t = 0; t < row.size(); ++t) {
      if (t > 0) out.push_back(',');
      out += format_double(row[t]);
    }
    out.push_back('\n');
  }
  return out;
}

EegMatrix matrix_from_csv(std::string_view text, const std::string& source) {
  std::vector<double> values;
  std::size_t width = 0;
  std::size_t rows = 0;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const std::size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;

    std::size_t cols = 0;
    while (true) {
      const std::size_t comma = line.find(',');
      std::string_view cell = line.substr(0, comma);
      while (!cell.empty() && cell.front() == ' ') cell.remove_prefix(1);
      while (!cell.empty() && cell.back() == ' ') cell.remove_suffix(1);
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(v)) {
        throw FormatError(source + ": row " + std::to_string(line_no) + ", column " +
                          std::to_string(cols + 1) + ": cannot parse '" + std::string(cell) + "'");
      }
      values.push_back(v);
      ++cols;
      if (comma == std::string_view::npos) break;
      line.remove_prefix(comma + 1);
    }
    if (rows == 0) {
      width = cols;
    } else if (cols != width) {
      throw FormatError(source + ": row " + std::to_string(line_no) + " has " +
                        std::to_string(cols) + " columns, expected " + std::to_string(width));
    }
    ++rows;
  }
  if (rows == 0) throw FormatError(source + ": no data rows");
  return EegMatrix(rows, width, std::move(values));
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw FormatError("write failed for " + path.string());
}

EegMatrix read_matrix_csv(const std::filesystem::path& path) {
  return matrix_from_csv(read_text_file(path), path.string());
}

void write_matrix_csv(const std::filesystem::path& path, const EegMatrix& m) {
  write_text_file(path, matrix_to_csv(m));
}

}  // namespace ctxsal
