#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace qmem {

/// A numeric table written as CSV: `# key: value` metadata lines, one
/// header row, then the rows. Non-finite values are written as `nan`,
/// `inf` or `-inf`.
struct Table {
  std::string name;  ///< file stem
  std::vector<std::pair<std::string, std::string>> metadata;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  void add_meta(const std::string& key, const std::string& value) { metadata.emplace_back(key, value); }
  void add_meta(const std::string& key, double value);
  /// Throws std::invalid_argument when the row width differs from the header.
  void add_row(std::vector<double> row);
  std::size_t column_index(const std::string& column) const;
  std::vector<double> column(const std::string& column) const;
  std::string to_csv() const;
};

/// Shortest round-trip decimal representation ("%.17g" trimmed to the
/// fewest digits that parse back to the same double).
std::string format_number(double v);

/// Parses a CSV produced by Table::to_csv (metadata, header and rows).
Table parse_csv(const std::string& text, const std::string& name = "");

/// Writes `content` to a temporary file in the target directory and renames
/// it into place, so readers never see a partial file.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

std::string read_file(const std::filesystem::path& path);

/// Lower-case hex SHA-256 of the bytes.
std::string sha256_hex(const std::string& bytes);

}  // namespace qmem
