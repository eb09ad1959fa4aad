#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace mdv::xlsx {

// One cell value as written or read. Strings are stored as inline strings
// on write; shared strings are resolved on read.
struct CellValue {
  enum class Kind { Blank, String, Number, Boolean };
  Kind kind = Kind::Blank;
  std::string text;   // String
  double number = 0;  // Number
  bool flag = false;  // Boolean
};

// Standard data-validation record attached to a cell range.
struct DataValidation {
  std::string type;      // whole, decimal, textLength, date, list
  std::string op;        // between, greaterThanOrEqual, lessThanOrEqual (empty for list)
  std::string formula1;
  std::string formula2;
  std::string sqref;     // e.g. "B2:B10001"
  std::string prompt;    // optional input message
};

struct Sheet {
  std::string name;
  bool hidden = false;
  // rows[r][c]; ragged rows allowed, missing trailing cells are blank.
  std::vector<std::vector<CellValue>> rows;
  std::vector<DataValidation> validations;
};

struct Workbook {
  std::vector<Sheet> sheets;

  Sheet* find_sheet(const std::string& name);
  const Sheet* find_sheet(const std::string& name) const;
  const Sheet* first_visible() const;
};

std::string write_xlsx(const Workbook& wb);

// Throws ParseError for files that are not readable XLSX.
Workbook read_xlsx(const std::string& bytes);

// "A1"-style helpers.
std::string column_name(std::size_t index);  // 0 -> "A", 25 -> "Z", 26 -> "AA"
std::string cell_ref(std::size_t row, std::size_t col);  // 0-based -> "A1"

}  // namespace mdv::xlsx
