#pragma once

#include <string>
#include <vector>

#include "mdv/table.hpp"
#include "mdv/template_model.hpp"

namespace mdv {

struct GeneratedWorkbook {
  std::string bytes;
  std::vector<std::string> sheet_inventory;  // data sheet first, then hidden sheets
};

// Hidden value-set sheet name for a field: "_vs_" + key, truncated to the
// 31-character sheet-name budget with a 4-hex-digit hash suffix on collision.
std::string value_sheet_name(const std::string& field_key);

inline constexpr const char* kProvenanceSheet = "_template";
inline constexpr std::size_t kConstraintRowCap = 10000;  // rows 2..10001 carry rules

// Data sheet headers in field order, per-column data-validation rules,
// one hidden sheet per categorical field, hidden provenance sheet with
// template id and version in A1,B1. Optional records are written as data
// rows (used when re-emitting a repaired workbook).
GeneratedWorkbook generate_workbook(const ResolvedTemplate& rt,
                                    const std::vector<Record>& records = {});

// One tab-separated header line, LF-terminated, no data rows.
std::string generate_delimited_skeleton(const ResolvedTemplate& rt);

// Markdown document with one section per field; deterministic output.
std::string render_spec_doc(const ResolvedTemplate& rt);

}  // namespace mdv
