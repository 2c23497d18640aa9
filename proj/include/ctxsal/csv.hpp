#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "ctxsal/matrix.hpp"

namespace ctxsal {

// Shortest decimal that round-trips to the same double.
std::string format_double(double v);

// Ch lines of T comma-separated values, '.' decimal separator, no header.
std::string matrix_to_csv(const EegMatrix& m);

// `source` names the origin in error messages. Throws FormatError naming the
// offending row when rows are ragged or a cell does not parse.
EegMatrix matrix_from_csv(std::string_view text, const std::string& source);

EegMatrix read_matrix_csv(const std::filesystem::path& path);
void write_matrix_csv(const std::filesystem::path& path, const EegMatrix& m);

// Whole-file helpers; throw FormatError on I/O failure.
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace ctxsal
