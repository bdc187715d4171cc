#include "sr/csv.hpp"

#include <fstream>
#include <string_view>

#include "sr/errors.hpp"

namespace sr {

void write_csv(const CsvTable& table, const std::filesystem::path& path) {
  for (size_t i = 0; i < table.rows.size(); ++i)
    if (table.rows[i].size() != table.header.size())
      raise(ErrorKind::ShapeError,
            "write_csv: row " + std::to_string(i + 1) + " width differs from "
            "header");
  std::ofstream out(path, std::ios::binary);
  if (!out)
    raise(ErrorKind::IoError, "cannot open '" + path.string() + "' for write");
  auto emit = [&out](const std::vector<std::string>& fields) {
    for (size_t i = 0; i < fields.size(); ++i) {
      if (i) out << ',';
      out << fields[i];
    }
    out << '\n';
  };
  emit(table.header);
  for (const auto& row : table.rows) emit(row);
  out.flush();
  if (!out)
    raise(ErrorKind::IoError, "write failed for '" + path.string() + "'");
}

Matrix load_matrix_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    raise(ErrorKind::IoError, "cannot open '" + path.string() + "' for read");

  std::vector<double> data;
  int cols = -1;
  int rows = 0;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string_view> fields;
    size_t start = 0;
    const std::string_view view(line);
    while (true) {
      const size_t comma = view.find(',', start);
      fields.push_back(view.substr(
          start, comma == std::string_view::npos ? comma : comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (cols < 0) cols = static_cast<int>(fields.size());
    if (static_cast<int>(fields.size()) != cols)
      raise(ErrorKind::ParseError,
            path.string() + ": ragged row at line " +
                std::to_string(line_number));
    for (const std::string_view field : fields)
      data.push_back(parse_double(
          field, path.string() + " line " + std::to_string(line_number)));
    ++rows;
  }
  if (rows == 0)
    raise(ErrorKind::EmptyInput, path.string() + ": no data rows");
  return Matrix(rows, cols, std::move(data));
}

void save_matrix_csv(const Matrix& matrix, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    raise(ErrorKind::IoError, "cannot open '" + path.string() + "' for write");
  for (int i = 0; i < matrix.rows; ++i) {
    for (int j = 0; j < matrix.cols; ++j) {
      if (j) out << ',';
      out << format_double(matrix.at(i, j));
    }
    out << '\n';
  }
  out.flush();
  if (!out)
    raise(ErrorKind::IoError, "write failed for '" + path.string() + "'");
}

}  // namespace sr
