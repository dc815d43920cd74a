#pragma once

#include <filesystem>
#include <string>

#include "mgprof/dataset.hpp"

namespace mgp::io {

/// Plain CSV, one row per line, no header. Throws LoadError on I/O or parse
/// failure; shape is not checked here.
Matrix read_matrix_csv(const std::filesystem::path& path);

/// Writes with round-trip precision (max_digits10).
void write_matrix_csv(const Matrix& m, const std::filesystem::path& path);

/// Shortest text that parses back to exactly `v`.
std::string format_double(double v);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace mgp::io
