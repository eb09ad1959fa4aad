#pragma once

#include <optional>
#include <string>
#include <vector>

namespace mdv {

struct Cell {
  std::string column_key;
  std::string raw;         // value as entered, "" for blank
  bool was_blank = false;  // truly empty cell vs. entered empty string

  bool operator==(const Cell&) const = default;
};

struct Record {
  std::size_t row_index = 0;  // 1-based; record 1 is spreadsheet row 2
  std::vector<Cell> cells;    // one per table header, in header order

  bool operator==(const Record&) const = default;
};

struct Provenance {
  std::string template_id;
  std::string version;

  bool operator==(const Provenance&) const = default;
};

struct Table {
  std::vector<std::string> headers;
  std::vector<Record> records;
  std::optional<Provenance> provenance;

  bool operator==(const Table&) const = default;

  std::optional<std::size_t> column_index(const std::string& key) const;
  const Cell* cell_at(std::size_t row_index, const std::string& key) const;
};

}  // namespace mdv
