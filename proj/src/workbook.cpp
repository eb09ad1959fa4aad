#include "mdv/workbook.hpp"

#include <cstdio>
#include <functional>

#include "mdv/errors.hpp"
#include "mdv/xlsx.hpp"

namespace mdv {

std::string value_sheet_name(const std::string& field_key) {
  std::string name = "_vs_" + field_key;
  if (name.size() <= 31) return name;
  // 4-hex-digit hash suffix disambiguates keys that collide after truncation.
  std::size_t h = std::hash<std::string>{}(field_key) & 0xffff;
  char suffix[6];
  std::snprintf(suffix, sizeof(suffix), "~%04zx", h);
  return name.substr(0, 31 - 5) + suffix;
}

namespace {

std::string number_literal(double v) {
  char buf[64];
  if (v == static_cast<double>(static_cast<long long>(v)))
    std::snprintf(buf, sizeof(buf), "%lld", static_cast<long long>(v));
  else
    std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string column_range(std::size_t col) {
  std::string name = xlsx::column_name(col);
  return name + "2:" + name + std::to_string(kConstraintRowCap + 1);
}

void add_validation_for_field(xlsx::Sheet& data, const Field& f, std::size_t col) {
  const Constraints& c = f.constraints;
  xlsx::DataValidation dv;
  dv.sqref = column_range(col);
  switch (f.datatype) {
    case Datatype::Integer:
    case Datatype::Decimal: {
      dv.type = f.datatype == Datatype::Integer ? "whole" : "decimal";
      double lo = c.min_value.value_or(-1e15);
      double hi = c.max_value.value_or(1e15);
      dv.op = "between";
      dv.formula1 = number_literal(lo);
      dv.formula2 = number_literal(hi);
      break;
    }
    case Datatype::Text: {
      if (!c.min_length && !c.max_length) return;
      dv.type = "textLength";
      dv.op = "between";
      dv.formula1 = std::to_string(c.min_length.value_or(0));
      dv.formula2 = std::to_string(c.max_length.value_or(32767));
      break;
    }
    case Datatype::Temporal: {
      dv.type = "date";
      dv.op = "between";
      dv.formula1 = "1";        // 1900-01-01
      dv.formula2 = "2958465";  // 9999-12-31
      dv.prompt = "Format: " +
                  c.temporal_format.value_or(canonical_temporal_format(f.granularity()));
      break;
    }
    case Datatype::Categorical: {
      dv.type = "list";
      std::size_t n = f.value_set ? f.value_set->inline_terms.size() : 0;
      dv.formula1 =
          "'" + value_sheet_name(f.key) + "'!$A$1:$A$" + std::to_string(n);
      break;
    }
    case Datatype::Boolean: {
      dv.type = "list";
      const auto& lex = f.boolean_lexicon();
      dv.formula1 = "\"" + lex.first + "," + lex.second + "\"";
      break;
    }
    case Datatype::Uri:
    case Datatype::Email:
      // No portable rule type; validated downstream only.
      return;
  }
  data.validations.push_back(std::move(dv));
}

}  // namespace

GeneratedWorkbook generate_workbook(const ResolvedTemplate& rt,
                                    const std::vector<Record>& records) {
  const Template& t = rt.tmpl;
  for (const auto& f : t.fields) {
    if (f.value_set && f.value_set->source != ValueSetRef::Source::Inline)
      throw SemanticError("template is not resolved: field \"" + f.key + "\"", f.key);
  }

  xlsx::Workbook wb;
  xlsx::Sheet data;
  data.name = "Data";
  data.rows.emplace_back();
  for (const auto& f : t.fields)
    data.rows[0].push_back({xlsx::CellValue::Kind::String, f.key});
  for (const auto& rec : records) {
    std::vector<xlsx::CellValue> row;
    for (const auto& cell : rec.cells) {
      xlsx::CellValue v;
      if (!cell.was_blank) {
        v.kind = xlsx::CellValue::Kind::String;
        v.text = cell.raw;
      }
      row.push_back(std::move(v));
    }
    // row r of the data sheet is record rec.row_index + 1
    if (data.rows.size() <= rec.row_index) data.rows.resize(rec.row_index + 1);
    data.rows[rec.row_index] = std::move(row);
  }
  for (std::size_t i = 0; i < t.fields.size(); ++i)
    add_validation_for_field(data, t.fields[i], i);
  wb.sheets.push_back(std::move(data));

  GeneratedWorkbook out;
  out.sheet_inventory.push_back("Data");

  for (const auto& f : t.fields) {
    if (f.datatype != Datatype::Categorical) continue;
    xlsx::Sheet vs;
    vs.name = value_sheet_name(f.key);
    vs.hidden = true;
    for (const auto& term : f.value_set->inline_terms)
      vs.rows.push_back({{xlsx::CellValue::Kind::String, term.label}});
    out.sheet_inventory.push_back(vs.name);
    wb.sheets.push_back(std::move(vs));
  }

  xlsx::Sheet prov;
  prov.name = kProvenanceSheet;
  prov.hidden = true;
  prov.rows.push_back({{xlsx::CellValue::Kind::String, t.id},
                       {xlsx::CellValue::Kind::String, t.version.str()}});
  out.sheet_inventory.push_back(prov.name);
  wb.sheets.push_back(std::move(prov));

  out.bytes = xlsx::write_xlsx(wb);
  return out;
}

std::string generate_delimited_skeleton(const ResolvedTemplate& rt) {
  std::string out;
  for (std::size_t i = 0; i < rt.tmpl.fields.size(); ++i) {
    if (i) out.push_back('\t');
    out += rt.tmpl.fields[i].key;
  }
  out.push_back('\n');
  return out;
}

namespace {

std::string describe_constraints(const Field& f) {
  const Constraints& c = f.constraints;
  std::vector<std::string> parts;
  if (c.min_value) parts.push_back("min " + number_literal(*c.min_value));
  if (c.max_value) parts.push_back("max " + number_literal(*c.max_value));
  if (c.min_length) parts.push_back("min length " + std::to_string(*c.min_length));
  if (c.max_length) parts.push_back("max length " + std::to_string(*c.max_length));
  if (f.datatype == Datatype::Temporal) {
    parts.push_back("granularity " + to_string(f.granularity()));
    parts.push_back("format " +
                    c.temporal_format.value_or(canonical_temporal_format(f.granularity())));
  }
  if (f.datatype == Datatype::Boolean) {
    const auto& lex = f.boolean_lexicon();
    parts.push_back("values " + lex.first + " / " + lex.second);
  }
  if (parts.empty()) return "";
  std::string out = parts[0];
  for (std::size_t i = 1; i < parts.size(); ++i) out += ", " + parts[i];
  return out;
}

}  // namespace

std::string render_spec_doc(const ResolvedTemplate& rt) {
  const Template& t = rt.tmpl;
  std::string out = "# " + t.name + "\n\n";
  out += "Template `" + t.id + "`, version " + t.version.str() + ".\n\n";
  out += t.description.value_or("(no description)") + "\n";
  for (const auto& f : t.fields) {
    out += "\n## " + f.key + "\n\n";
    out += "- Label: " + f.label + "\n";
    out += "- Datatype: " + to_string(f.datatype) + "\n";
    out += std::string("- Required: ") + (f.required ? "yes" : "no") + "\n";
    std::string cons = describe_constraints(f);
    if (!cons.empty()) out += "- Constraints: " + cons + "\n";
    out += "- Description: " + f.description.value_or("(no description)") + "\n";
    if (f.datatype == Datatype::Categorical) {
      out += "- Permissible values:\n";
      for (const auto& term : f.value_set->inline_terms) out += "  - " + term.label + "\n";
    }
  }
  return out;
}

}  // namespace mdv
