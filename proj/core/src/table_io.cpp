#include "dynpol/table_io.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

#include "dynpol/error.hpp"

namespace dynpol {

namespace {

std::vector<std::string> split_fields(std::string_view line) {
  std::vector<std::string> out;
  std::string cur;
  bool in_field = false;
  auto flush = [&] {
    if (in_field) out.push_back(cur);
    cur.clear();
    in_field = false;
  };
  for (char c : line) {
    if (c == ',') {
      // An explicit comma always terminates the field, even an empty one.
      out.push_back(cur);
      cur.clear();
      in_field = false;
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      flush();
    } else {
      cur.push_back(c);
      in_field = true;
    }
  }
  flush();
  out.erase(std::remove_if(out.begin(), out.end(), [](const std::string& s) { return s.empty(); }),
            out.end());
  return out;
}

bool parse_double(std::string_view s, double& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

bool looks_numeric(const std::vector<std::string>& fields) {
  double tmp = 0.0;
  return !fields.empty() && parse_double(fields.front(), tmp);
}

}  // namespace

std::optional<std::string> TableFile::get(const std::string& key) const {
  auto it = header.find(key);
  if (it == header.end()) return std::nullopt;
  return it->second;
}

const std::string& TableFile::require(const std::string& key) const {
  auto it = header.find(key);
  if (it == header.end()) throw ParseError("missing header key '" + key + "'", 1);
  return it->second;
}

double TableFile::number(std::size_t row, std::size_t col) const {
  const auto& fields = rows.at(row);
  if (col >= fields.size()) {
    throw ParseError("expected at least " + std::to_string(col + 1) + " columns", row_lines[row]);
  }
  double v = 0.0;
  if (!parse_double(fields[col], v)) {
    throw ParseError("'" + fields[col] + "' is not a number", row_lines[row]);
  }
  if (!std::isfinite(v)) throw ParseError("non-finite value '" + fields[col] + "'", row_lines[row]);
  return v;
}

TableFile read_table(std::istream& in) {
  TableFile t;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string_view view(line);
    while (!view.empty() && std::isspace(static_cast<unsigned char>(view.front()))) view.remove_prefix(1);
    if (view.empty()) continue;
    if (view.front() == '#') {
      view.remove_prefix(1);
      for (const auto& tok : split_fields(view)) {
        auto eq = tok.find('=');
        if (eq == std::string::npos || eq == 0) continue;
        t.header[tok.substr(0, eq)] = tok.substr(eq + 1);
      }
      continue;
    }
    auto fields = split_fields(view);
    if (t.rows.empty() && t.columns.empty() && !looks_numeric(fields)) {
      t.columns = std::move(fields);
      continue;
    }
    t.rows.push_back(std::move(fields));
    t.row_lines.push_back(lineno);
  }
  return t;
}

TableFile read_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path.string() + "'", 0);
  return read_table(in);
}

std::string format_double(double v) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

void write_table(std::ostream& out, const std::map<std::string, std::string>& header,
                 std::span<const std::string> columns,
                 std::span<const std::vector<std::string>> rows,
                 std::span<const std::string> header_order) {
  out << '#';
  for (const auto& key : header_order) {
    auto it = header.find(key);
    if (it != header.end()) out << ' ' << it->first << '=' << it->second;
  }
  for (const auto& [key, value] : header) {
    if (std::find(header_order.begin(), header_order.end(), key) != header_order.end()) continue;
    out << ' ' << key << '=' << value;
  }
  out << '\n';
  auto join = [&out](std::span<const std::string> fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out << ',';
      out << fields[i];
    }
    out << '\n';
  };
  if (!columns.empty()) join(columns);
  for (const auto& r : rows) join(r);
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + tmp.string() + "'");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw Error("short write to '" + tmp.string() + "'");
  }
  fs::rename(tmp, path);
}

}  // namespace dynpol
