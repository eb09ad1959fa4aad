#include "mdv/xlsx.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <map>

#include "mdv/errors.hpp"
#include "mdv/xml.hpp"
#include "mdv/zip.hpp"

namespace mdv::xlsx {

Sheet* Workbook::find_sheet(const std::string& name) {
  for (auto& s : sheets)
    if (s.name == name) return &s;
  return nullptr;
}

const Sheet* Workbook::find_sheet(const std::string& name) const {
  for (const auto& s : sheets)
    if (s.name == name) return &s;
  return nullptr;
}

const Sheet* Workbook::first_visible() const {
  for (const auto& s : sheets)
    if (!s.hidden) return &s;
  return nullptr;
}

std::string column_name(std::size_t index) {
  std::string out;
  std::size_t n = index + 1;
  while (n > 0) {
    out.insert(out.begin(), static_cast<char>('A' + (n - 1) % 26));
    n = (n - 1) / 26;
  }
  return out;
}

std::string cell_ref(std::size_t row, std::size_t col) {
  return column_name(col) + std::to_string(row + 1);
}

namespace {

// "BC23" -> (22, 54); returns false for malformed refs.
bool parse_ref(const std::string& ref, std::size_t& row, std::size_t& col) {
  std::size_t i = 0;
  std::size_t c = 0;
  while (i < ref.size() && ref[i] >= 'A' && ref[i] <= 'Z') {
    c = c * 26 + (ref[i] - 'A' + 1);
    ++i;
  }
  if (i == 0 || i == ref.size()) return false;
  std::size_t r = 0;
  for (; i < ref.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(ref[i]))) return false;
    r = r * 10 + (ref[i] - '0');
  }
  if (r == 0 || c == 0) return false;
  row = r - 1;
  col = c - 1;
  return true;
}

std::string number_text(double v) {
  char buf[64];
  if (v == static_cast<double>(static_cast<long long>(v)) && std::abs(v) < 1e15) {
    std::snprintf(buf, sizeof(buf), "%lld", static_cast<long long>(v));
  } else {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
  }
  return buf;
}

std::string text_element(const std::string& value) {
  bool preserve = !value.empty() && (std::isspace(static_cast<unsigned char>(value.front())) ||
                                     std::isspace(static_cast<unsigned char>(value.back())));
  std::string out = preserve ? "<t xml:space=\"preserve\">" : "<t>";
  out += xml::escape(value);
  out += "</t>";
  return out;
}

std::string sheet_xml(const Sheet& sheet) {
  std::string out =
      "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"yes\"?>\n"
      "<worksheet xmlns=\"http://schemas.openxmlformats.org/spreadsheetml/2006/main\">"
      "<sheetData>";
  for (std::size_t r = 0; r < sheet.rows.size(); ++r) {
    const auto& row = sheet.rows[r];
    if (row.empty()) continue;
    out += "<row r=\"" + std::to_string(r + 1) + "\">";
    for (std::size_t c = 0; c < row.size(); ++c) {
      const CellValue& cell = row[c];
      if (cell.kind == CellValue::Kind::Blank) continue;
      std::string ref = cell_ref(r, c);
      switch (cell.kind) {
        case CellValue::Kind::String:
          out += "<c r=\"" + ref + "\" t=\"inlineStr\"><is>" + text_element(cell.text) +
                 "</is></c>";
          break;
        case CellValue::Kind::Number:
          out += "<c r=\"" + ref + "\"><v>" + number_text(cell.number) + "</v></c>";
          break;
        case CellValue::Kind::Boolean:
          out += "<c r=\"" + ref + "\" t=\"b\"><v>" + (cell.flag ? std::string("1") : "0") +
                 "</v></c>";
          break;
        case CellValue::Kind::Blank:
          break;
      }
    }
    out += "</row>";
  }
  out += "</sheetData>";
  if (!sheet.validations.empty()) {
    out += "<dataValidations count=\"" + std::to_string(sheet.validations.size()) + "\">";
    for (const auto& dv : sheet.validations) {
      out += "<dataValidation type=\"" + dv.type + "\"";
      if (!dv.op.empty()) out += " operator=\"" + dv.op + "\"";
      out += " allowBlank=\"1\" showInputMessage=\"1\" showErrorMessage=\"1\"";
      if (!dv.prompt.empty()) out += " prompt=\"" + xml::escape(dv.prompt) + "\"";
      out += " sqref=\"" + dv.sqref + "\">";
      if (!dv.formula1.empty()) out += "<formula1>" + xml::escape(dv.formula1) + "</formula1>";
      if (!dv.formula2.empty()) out += "<formula2>" + xml::escape(dv.formula2) + "</formula2>";
      out += "</dataValidation>";
    }
    out += "</dataValidations>";
  }
  out += "</worksheet>";
  return out;
}

}  // namespace

std::string write_xlsx(const Workbook& wb) {
  std::vector<zip::Entry> entries;

  std::string content_types =
      "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"yes\"?>\n"
      "<Types xmlns=\"http://schemas.openxmlformats.org/package/2006/content-types\">"
      "<Default Extension=\"rels\" "
      "ContentType=\"application/vnd.openxmlformats-package.relationships+xml\"/>"
      "<Default Extension=\"xml\" ContentType=\"application/xml\"/>"
      "<Override PartName=\"/xl/workbook.xml\" "
      "ContentType=\"application/vnd.openxmlformats-officedocument.spreadsheetml.sheet.main+xml\"/>";
  for (std::size_t i = 0; i < wb.sheets.size(); ++i) {
    content_types += "<Override PartName=\"/xl/worksheets/sheet" + std::to_string(i + 1) +
                     ".xml\" ContentType=\"application/vnd.openxmlformats-officedocument."
                     "spreadsheetml.worksheet+xml\"/>";
  }
  content_types += "</Types>";
  entries.push_back({"[Content_Types].xml", content_types});

  entries.push_back(
      {"_rels/.rels",
       "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"yes\"?>\n"
       "<Relationships xmlns=\"http://schemas.openxmlformats.org/package/2006/relationships\">"
       "<Relationship Id=\"rId1\" "
       "Type=\"http://schemas.openxmlformats.org/officeDocument/2006/relationships/"
       "officeDocument\" Target=\"xl/workbook.xml\"/>"
       "</Relationships>"});

  std::string workbook_xml =
      "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"yes\"?>\n"
      "<workbook xmlns=\"http://schemas.openxmlformats.org/spreadsheetml/2006/main\" "
      "xmlns:r=\"http://schemas.openxmlformats.org/officeDocument/2006/relationships\">"
      "<sheets>";
  std::string rels =
      "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"yes\"?>\n"
      "<Relationships xmlns=\"http://schemas.openxmlformats.org/package/2006/relationships\">";
  for (std::size_t i = 0; i < wb.sheets.size(); ++i) {
    const Sheet& s = wb.sheets[i];
    workbook_xml += "<sheet name=\"" + xml::escape(s.name) + "\" sheetId=\"" +
                    std::to_string(i + 1) + "\"" +
                    (s.hidden ? std::string(" state=\"hidden\"") : std::string()) +
                    " r:id=\"rId" + std::to_string(i + 1) + "\"/>";
    rels += "<Relationship Id=\"rId" + std::to_string(i + 1) +
            "\" Type=\"http://schemas.openxmlformats.org/officeDocument/2006/relationships/"
            "worksheet\" Target=\"worksheets/sheet" +
            std::to_string(i + 1) + ".xml\"/>";
  }
  workbook_xml += "</sheets></workbook>";
  rels += "</Relationships>";
  entries.push_back({"xl/workbook.xml", workbook_xml});
  entries.push_back({"xl/_rels/workbook.xml.rels", rels});

  for (std::size_t i = 0; i < wb.sheets.size(); ++i)
    entries.push_back({"xl/worksheets/sheet" + std::to_string(i + 1) + ".xml",
                       sheet_xml(wb.sheets[i])});

  return zip::write_archive(entries);
}

namespace {

std::vector<std::string> read_shared_strings(const zip::Archive& ar) {
  std::vector<std::string> out;
  if (!ar.contains("xl/sharedStrings.xml")) return out;
  std::string doc = ar.read("xl/sharedStrings.xml");
  xml::Parser parser(doc);
  std::string current;
  int si_depth = 0;
  bool in_t = false;
  for (;;) {
    auto ev = parser.next();
    if (ev.type == xml::Parser::EventType::End) break;
    if (ev.type == xml::Parser::EventType::StartElement) {
      if (ev.name == "si") {
        si_depth = 1;
        current.clear();
        if (ev.self_closing) {
          out.push_back("");
          si_depth = 0;
        }
      } else if (si_depth && ev.name == "t" && !ev.self_closing) {
        in_t = true;
      }
    } else if (ev.type == xml::Parser::EventType::Text) {
      if (in_t) current += ev.text;
    } else if (ev.type == xml::Parser::EventType::EndElement) {
      if (ev.name == "t") in_t = false;
      if (ev.name == "si") {
        out.push_back(current);
        si_depth = 0;
      }
    }
  }
  return out;
}

Sheet parse_sheet(const std::string& doc, const std::vector<std::string>& shared) {
  Sheet sheet;
  xml::Parser parser(doc);
  std::size_t cur_row = 0;
  std::size_t next_col = 0;
  bool in_cell = false, in_v = false, in_is_t = false;
  std::size_t cell_row = 0, cell_col = 0;
  std::string cell_type;
  std::string cell_text;
  DataValidation dv;
  bool in_dv = false;
  int formula_no = 0;

  auto ensure_cell = [&](std::size_t r, std::size_t c) -> CellValue& {
    if (sheet.rows.size() <= r) sheet.rows.resize(r + 1);
    if (sheet.rows[r].size() <= c) sheet.rows[r].resize(c + 1);
    return sheet.rows[r][c];
  };

  for (;;) {
    auto ev = parser.next();
    if (ev.type == xml::Parser::EventType::End) break;
    if (ev.type == xml::Parser::EventType::StartElement) {
      if (ev.name == "row") {
        auto it = ev.attrs.find("r");
        if (it != ev.attrs.end())
          cur_row = std::stoull(it->second) - 1;
        next_col = 0;
      } else if (ev.name == "c") {
        cell_row = cur_row;
        cell_col = next_col;
        auto it = ev.attrs.find("r");
        if (it != ev.attrs.end()) parse_ref(it->second, cell_row, cell_col);
        next_col = cell_col + 1;
        auto t = ev.attrs.find("t");
        cell_type = t != ev.attrs.end() ? t->second : "";
        cell_text.clear();
        in_cell = !ev.self_closing;
        if (ev.self_closing) ensure_cell(cell_row, cell_col);
      } else if (in_cell && ev.name == "v" && !ev.self_closing) {
        in_v = true;
      } else if (in_cell && ev.name == "t" && !ev.self_closing) {
        in_is_t = true;
      } else if (ev.name == "dataValidation") {
        dv = DataValidation{};
        auto get = [&](const char* k) {
          auto a = ev.attrs.find(k);
          return a != ev.attrs.end() ? a->second : std::string();
        };
        dv.type = get("type");
        dv.op = get("operator");
        dv.sqref = get("sqref");
        dv.prompt = get("prompt");
        in_dv = !ev.self_closing;
        formula_no = 0;
        if (ev.self_closing) sheet.validations.push_back(dv);
      } else if (in_dv && (ev.name == "formula1" || ev.name == "formula2")) {
        formula_no = ev.name == "formula1" ? 1 : 2;
      }
    } else if (ev.type == xml::Parser::EventType::Text) {
      if (in_v || in_is_t) cell_text += ev.text;
      else if (formula_no == 1) dv.formula1 += ev.text;
      else if (formula_no == 2) dv.formula2 += ev.text;
    } else if (ev.type == xml::Parser::EventType::EndElement) {
      if (ev.name == "v") in_v = false;
      else if (ev.name == "t") in_is_t = false;
      else if (ev.name == "formula1" || ev.name == "formula2") formula_no = 0;
      else if (ev.name == "dataValidation") {
        sheet.validations.push_back(dv);
        in_dv = false;
      } else if (ev.name == "c" && in_cell) {
        CellValue& cell = ensure_cell(cell_row, cell_col);
        if (cell_type == "s") {
          std::size_t idx = std::stoull(cell_text);
          cell.kind = CellValue::Kind::String;
          cell.text = idx < shared.size() ? shared[idx] : "";
        } else if (cell_type == "inlineStr" || cell_type == "str") {
          cell.kind = CellValue::Kind::String;
          cell.text = cell_text;
        } else if (cell_type == "b") {
          cell.kind = CellValue::Kind::Boolean;
          cell.flag = cell_text == "1" || cell_text == "true";
        } else if (!cell_text.empty()) {
          cell.kind = CellValue::Kind::Number;
          try {
            cell.number = std::stod(cell_text);
          } catch (...) {
            cell.kind = CellValue::Kind::String;
            cell.text = cell_text;
          }
        }
        in_cell = false;
      } else if (ev.name == "row") {
        ++cur_row;
      }
    }
  }
  return sheet;
}

}  // namespace

Workbook read_xlsx(const std::string& bytes) {
  zip::Archive ar(bytes);
  if (!ar.contains("xl/workbook.xml"))
    throw ParseError("not an XLSX workbook: xl/workbook.xml missing");

  // rId -> worksheet part path
  std::map<std::string, std::string> targets;
  if (ar.contains("xl/_rels/workbook.xml.rels")) {
    std::string doc = ar.read("xl/_rels/workbook.xml.rels");
    xml::Parser parser(doc);
    for (;;) {
      auto ev = parser.next();
      if (ev.type == xml::Parser::EventType::End) break;
      if (ev.type != xml::Parser::EventType::StartElement || ev.name != "Relationship") continue;
      std::string target = ev.attrs["Target"];
      if (target.rfind("/", 0) == 0) target = target.substr(1);
      else target = "xl/" + target;
      targets[ev.attrs["Id"]] = target;
    }
  }

  std::vector<std::string> shared = read_shared_strings(ar);

  Workbook wb;
  std::string doc = ar.read("xl/workbook.xml");
  xml::Parser parser(doc);
  for (;;) {
    auto ev = parser.next();
    if (ev.type == xml::Parser::EventType::End) break;
    if (ev.type != xml::Parser::EventType::StartElement || ev.name != "sheet") continue;
    std::string rid = ev.attrs.count("r:id") ? ev.attrs["r:id"] : ev.attrs["id"];
    auto it = targets.find(rid);
    if (it == targets.end() || !ar.contains(it->second))
      throw ParseError("workbook sheet part missing for " + ev.attrs["name"]);
    Sheet sheet = parse_sheet(ar.read(it->second), shared);
    sheet.name = ev.attrs["name"];
    sheet.hidden = ev.attrs.count("state") &&
                   (ev.attrs["state"] == "hidden" || ev.attrs["state"] == "veryHidden");
    wb.sheets.push_back(std::move(sheet));
  }
  if (wb.sheets.empty()) throw ParseError("workbook has no sheets");
  return wb;
}

}  // namespace mdv::xlsx
