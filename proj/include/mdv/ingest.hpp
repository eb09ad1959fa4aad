#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mdv/table.hpp"
#include "mdv/template_model.hpp"

namespace mdv {

enum class Separator : char { Tab = '\t', Comma = ',' };

// RFC-4180-style parsing generalized to the chosen separator: quoted fields,
// doubled quotes, quoted separators and newlines. Throws ParseError for
// ragged rows (with the row number) and unclosed quotes.
Table parse_delimited(const std::string& text, Separator sep);

// Canonical serializer; parse_delimited(serialize_delimited(t, sep), sep) == t
// up to provenance (the format has no carrier for it).
std::string serialize_delimited(const Table& t, Separator sep);

// First visible sheet: row 1 headers, subsequent rows as records; trailing
// fully-blank rows dropped, interior blank rows kept. Provenance read from
// the "_template" sheet when present.
Table parse_workbook(const std::string& bytes);

enum class FileFormat { Xlsx, Tsv, Csv };

// Zip magic -> workbook, else delimited with separator from the extension
// hint (".csv" -> comma, anything else -> tab).
FileFormat sniff_format(const std::string& bytes, const std::string& name_hint);

Table parse_any(const std::string& bytes, const std::string& name_hint);

struct TemplateRef {
  std::string id;
  std::string version;
};

// Read-only view of registered templates used for linking.
using TemplateLookup = std::function<std::optional<Template>(const std::string& id,
                                                             const std::string& version)>;
using TemplateList = std::function<std::vector<Template>()>;

// Ambiguous header matches are an error, never a guess. Lists candidate
// template ids in the error message.
Template link_template(const Table& t, const TemplateLookup& lookup,
                       const TemplateList& list_all,
                       const std::optional<TemplateRef>& override_ref);

}  // namespace mdv
