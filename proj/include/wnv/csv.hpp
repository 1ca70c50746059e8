#pragma once

#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace wnv {
namespace csv {

// Minimal RFC-4180-style CSV support: comma delimiter, double-quoted fields
// with "" escapes, embedded newlines inside quotes, CRLF tolerated. The
// reader is total: any byte stream yields a (possibly odd) list of rows,
// never an exception. Structural complaints belong to the schema layer.

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;  // data rows, raw fields
};

inline std::vector<std::vector<std::string>> read_rows(std::istream& in) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool in_quotes = false;
  bool row_has_content = false;
  char c;
  while (in.get(c)) {
    if (in_quotes) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          field.push_back('"');
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        in_quotes = true;
        row_has_content = true;
        break;
      case ',':
        row.push_back(std::move(field));
        field.clear();
        row_has_content = true;
        break;
      case '\r':
        break;
      case '\n':
        if (row_has_content || !field.empty() || !row.empty()) {
          row.push_back(std::move(field));
          field.clear();
          rows.push_back(std::move(row));
          row.clear();
        }
        row_has_content = false;
        break;
      default:
        field.push_back(c);
        row_has_content = true;
        break;
    }
  }
  // trailing row without newline (or unterminated quote at EOF)
  if (row_has_content || !field.empty() || !row.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Table read_table(std::istream& in) {
  Table t;
  auto rows = read_rows(in);
  if (!rows.empty()) {
    t.header = std::move(rows.front());
    t.rows.assign(std::make_move_iterator(rows.begin() + 1),
                  std::make_move_iterator(rows.end()));
  }
  return t;
}

inline Table read_table(std::string_view text) {
  std::istringstream in{std::string(text)};
  return read_table(in);
}

inline std::string escape(std::string_view field) {
  bool needs_quotes = field.find_first_of(",\"\n\r") != std::string_view::npos;
  if (!needs_quotes) return std::string(field);
  std::string out;
  out.reserve(field.size() + 2);
  out.push_back('"');
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

template <typename Range>
void write_row(std::ostream& out, const Range& fields) {
  bool first = true;
  for (const auto& f : fields) {
    if (!first) out.put(',');
    out << escape(f);
    first = false;
  }
  out.put('\n');
}

}  // namespace csv
}  // namespace wnv
