#include "mdv/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <unordered_set>

#include "mdv/errors.hpp"
#include "mdv/workbook.hpp"
#include "mdv/xlsx.hpp"

namespace mdv {

namespace {

std::string render_cell(const xlsx::CellValue& v) {
  switch (v.kind) {
    case xlsx::CellValue::Kind::Blank:
      return "";
    case xlsx::CellValue::Kind::String:
      return v.text;
    case xlsx::CellValue::Kind::Boolean:
      return v.flag ? "TRUE" : "FALSE";
    case xlsx::CellValue::Kind::Number: {
      char buf[64];
      if (v.number == static_cast<double>(static_cast<long long>(v.number)) &&
          std::abs(v.number) < 1e15)
        std::snprintf(buf, sizeof(buf), "%lld", static_cast<long long>(v.number));
      else
        std::snprintf(buf, sizeof(buf), "%.15g", v.number);
      return buf;
    }
  }
  return "";
}

bool row_blank(const std::vector<xlsx::CellValue>& row) {
  return std::all_of(row.begin(), row.end(), [](const xlsx::CellValue& v) {
    return v.kind == xlsx::CellValue::Kind::Blank ||
           (v.kind == xlsx::CellValue::Kind::String && v.text.empty());
  });
}

}  // namespace

Table parse_workbook(const std::string& bytes) {
  xlsx::Workbook wb = xlsx::read_xlsx(bytes);
  const xlsx::Sheet* data = wb.first_visible();
  if (!data || data->rows.empty() || row_blank(data->rows[0]))
    throw ParseError("workbook has no usable data sheet");

  Table t;
  const auto& header_row = data->rows[0];
  std::size_t width = header_row.size();
  while (width > 0 && (header_row[width - 1].kind == xlsx::CellValue::Kind::Blank ||
                       (header_row[width - 1].kind == xlsx::CellValue::Kind::String &&
                        header_row[width - 1].text.empty())))
    --width;
  std::unordered_set<std::string> seen;
  for (std::size_t c = 0; c < width; ++c) {
    std::string key = render_cell(header_row[c]);
    if (!seen.insert(key).second)
      throw ParseError("duplicate header key \"" + key + "\"");
    t.headers.push_back(std::move(key));
  }

  std::size_t last = data->rows.size();
  while (last > 1 && row_blank(data->rows[last - 1])) --last;

  for (std::size_t r = 1; r < last; ++r) {
    Record rec;
    rec.row_index = r;  // record 1 is spreadsheet row 2
    for (std::size_t c = 0; c < t.headers.size(); ++c) {
      Cell cell;
      cell.column_key = t.headers[c];
      if (c < data->rows[r].size()) {
        const auto& v = data->rows[r][c];
        cell.raw = render_cell(v);
        cell.was_blank = v.kind == xlsx::CellValue::Kind::Blank;
      } else {
        cell.was_blank = true;
      }
      rec.cells.push_back(std::move(cell));
    }
    t.records.push_back(std::move(rec));
  }

  if (const xlsx::Sheet* prov = wb.find_sheet(kProvenanceSheet)) {
    if (!prov->rows.empty() && prov->rows[0].size() >= 2) {
      Provenance p;
      p.template_id = render_cell(prov->rows[0][0]);
      p.version = render_cell(prov->rows[0][1]);
      if (!p.template_id.empty()) t.provenance = std::move(p);
    }
  }
  return t;
}

FileFormat sniff_format(const std::string& bytes, const std::string& name_hint) {
  if (bytes.size() >= 4 && bytes[0] == 'P' && bytes[1] == 'K' && bytes[2] == '\x03' &&
      bytes[3] == '\x04')
    return FileFormat::Xlsx;
  auto dot = name_hint.rfind('.');
  std::string ext = dot == std::string::npos ? "" : name_hint.substr(dot);
  std::transform(ext.begin(), ext.end(), ext.begin(), ::tolower);
  if (ext == ".csv") return FileFormat::Csv;
  return FileFormat::Tsv;
}

Table parse_any(const std::string& bytes, const std::string& name_hint) {
  switch (sniff_format(bytes, name_hint)) {
    case FileFormat::Xlsx:
      return parse_workbook(bytes);
    case FileFormat::Csv:
      return parse_delimited(bytes, Separator::Comma);
    case FileFormat::Tsv:
      return parse_delimited(bytes, Separator::Tab);
  }
  throw ParseError("unrecognized file format");
}

Template link_template(const Table& t, const TemplateLookup& lookup,
                       const TemplateList& list_all,
                       const std::optional<TemplateRef>& override_ref) {
  if (override_ref) {
    auto found = lookup(override_ref->id, override_ref->version);
    if (!found)
      throw NotFoundError("template " + override_ref->id + "@" + override_ref->version +
                          " is not registered");
    return *found;
  }
  if (t.provenance) {
    auto found = lookup(t.provenance->template_id, t.provenance->version);
    if (!found)
      throw NotFoundError("provenance names unregistered template " +
                          t.provenance->template_id + "@" + t.provenance->version);
    return *found;
  }

  // Header-set matching: order-insensitive comparison of key sets.
  std::set<std::string> header_set(t.headers.begin(), t.headers.end());
  std::vector<Template> matches;
  for (const auto& cand : list_all()) {
    std::set<std::string> keys;
    for (const auto& f : cand.fields) keys.insert(f.key);
    if (keys == header_set) matches.push_back(cand);
  }
  if (matches.empty())
    throw NotFoundError("no template found: no provenance and no registered template matches "
                        "the table headers");
  if (matches.size() > 1) {
    std::string names;
    for (const auto& m : matches) {
      if (!names.empty()) names += ", ";
      names += m.id + "@" + m.version.str();
    }
    throw SemanticError("ambiguous template match: " + names);
  }
  return matches[0];
}

}  // namespace mdv
