#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dynpol {

/// The delimited text container shared by every data file:
///
///     # kind=potential label=X lambda=0 unit_R=bohr unit_V=cm-1
///     R_bohr,V_cm-1            <- optional column-name line
///     4.5,1234.5
///     ...
///
/// Fields are separated by commas and/or whitespace. Lines starting with '#'
/// contribute key=value pairs; blank lines are ignored.
struct TableFile {
  std::map<std::string, std::string> header;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> row_lines;  // 1-based source line of each row

  std::optional<std::string> get(const std::string& key) const;
  const std::string& require(const std::string& key) const;
  double number(std::size_t row, std::size_t col) const;
};

TableFile read_table(std::istream& in);
TableFile read_table(const std::filesystem::path& path);

/// Shortest decimal form that parses back to the identical double.
std::string format_double(double v);

/// Writes header, optional column names and rows (already formatted fields).
void write_table(std::ostream& out, const std::map<std::string, std::string>& header,
                 std::span<const std::string> columns,
                 std::span<const std::vector<std::string>> rows,
                 std::span<const std::string> header_order = {});

/// Writes through a temporary sibling and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace dynpol
