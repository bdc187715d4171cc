#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "sr/linalg.hpp"
#include "sr/text.hpp"

namespace sr {

/// Header plus stringified rows; every row must match the header width.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// UTF-8, '\n' line ends, header row first. IoError with path context on
/// failure; ShapeError on a ragged row.
void write_csv(const CsvTable& table, const std::filesystem::path& path);

/// Header-less numeric CSV -> Matrix. EmptyInput for an empty file,
/// ParseError naming the 1-based line for ragged or malformed rows.
Matrix load_matrix_csv(const std::filesystem::path& path);

/// Header-less numeric CSV from a Matrix, full round-trip precision.
void save_matrix_csv(const Matrix& matrix, const std::filesystem::path& path);

}  // namespace sr
