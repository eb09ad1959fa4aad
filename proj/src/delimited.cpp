#include <optional>
#include <set>

#include "mdv/errors.hpp"
#include "mdv/ingest.hpp"

namespace mdv {

std::optional<std::size_t> Table::column_index(const std::string& key) const {
  for (std::size_t i = 0; i < headers.size(); ++i)
    if (headers[i] == key) return i;
  return std::nullopt;
}

const Cell* Table::cell_at(std::size_t row_index, const std::string& key) const {
  auto col = column_index(key);
  if (!col) return nullptr;
  for (const auto& rec : records)
    if (rec.row_index == row_index) return &rec.cells[*col];
  return nullptr;
}

namespace {

// RFC-4180 field states, generalized over the separator.
std::vector<std::vector<std::string>> split_rows(const std::string& text, char sep) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool in_quotes = false;
  bool field_started_quoted = false;
  std::size_t line = 1;
  std::size_t i = 0;

  auto end_field = [&] {
    row.push_back(std::move(field));
    field.clear();
    field_started_quoted = false;
  };
  auto end_row = [&] {
    end_field();
    rows.push_back(std::move(row));
    row.clear();
  };

  while (i < text.size()) {
    char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          i += 2;
          continue;
        }
        in_quotes = false;
        ++i;
        continue;
      }
      if (c == '\n') ++line;
      field.push_back(c);
      ++i;
      continue;
    }
    if (c == '"' && field.empty() && !field_started_quoted) {
      in_quotes = true;
      field_started_quoted = true;
      ++i;
      continue;
    }
    if (c == sep) {
      end_field();
      ++i;
      continue;
    }
    if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') {
      end_row();
      ++line;
      i += 2;
      continue;
    }
    if (c == '\n' || c == '\r') {
      end_row();
      ++line;
      ++i;
      continue;
    }
    field.push_back(c);
    ++i;
  }
  if (in_quotes) throw ParseError("unclosed quote in delimited input", line, 0);
  if (!field.empty() || !row.empty()) end_row();
  return rows;
}

bool needs_quoting(const std::string& s, char sep) {
  return s.find_first_of(std::string("\"\r\n") + sep) != std::string::npos;
}

std::string quote_field(const std::string& s, char sep) {
  if (!needs_quoting(s, sep)) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace

Table parse_delimited(const std::string& text, Separator sep) {
  if (text.empty()) throw ParseError("empty delimited input");
  auto rows = split_rows(text, static_cast<char>(sep));
  // A trailing blank line is not a record.
  while (rows.size() > 1 && rows.back().size() == 1 && rows.back()[0].empty())
    rows.pop_back();
  if (rows.empty()) throw ParseError("empty delimited input");

  Table t;
  t.headers = rows[0];
  {
    std::set<std::string> seen;
    for (const auto& h : t.headers)
      if (!seen.insert(h).second) throw ParseError("duplicate header key \"" + h + "\"");
  }
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != t.headers.size())
      throw ParseError("ragged row: row " + std::to_string(r + 1) + " has " +
                       std::to_string(rows[r].size()) + " cells, expected " +
                       std::to_string(t.headers.size()),
                       r + 1);
    Record rec;
    rec.row_index = r;
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      Cell cell;
      cell.column_key = t.headers[c];
      cell.raw = rows[r][c];
      cell.was_blank = cell.raw.empty();
      rec.cells.push_back(std::move(cell));
    }
    t.records.push_back(std::move(rec));
  }
  // Stray blank lines below the data are not records.
  auto all_blank = [](const Record& rec) {
    for (const auto& c : rec.cells)
      if (!c.was_blank) return false;
    return true;
  };
  while (!t.records.empty() && all_blank(t.records.back())) t.records.pop_back();
  return t;
}

std::string serialize_delimited(const Table& t, Separator sep) {
  char s = static_cast<char>(sep);
  std::string out;
  for (std::size_t i = 0; i < t.headers.size(); ++i) {
    if (i) out.push_back(s);
    out += quote_field(t.headers[i], s);
  }
  out.push_back('\n');
  for (const auto& rec : t.records) {
    for (std::size_t i = 0; i < rec.cells.size(); ++i) {
      if (i) out.push_back(s);
      out += quote_field(rec.cells[i].raw, s);
    }
    out.push_back('\n');
  }
  return out;
}

}  // namespace mdv
