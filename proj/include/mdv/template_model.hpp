#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mdv/errors.hpp"

namespace mdv {

enum class Datatype {
  Text,
  Integer,
  Decimal,
  Boolean,
  Temporal,
  Categorical,
  Uri,
  Email,
};

std::string to_string(Datatype dt);
std::optional<Datatype> datatype_from_string(const std::string& s);

enum class TemporalGranularity { Year, Month, Day, Minute, Second };

std::string to_string(TemporalGranularity g);
std::optional<TemporalGranularity> granularity_from_string(const std::string& s);

// Canonical format name for a granularity (ISO-8601 calendar forms).
// year -> YYYY, month -> YYYY-MM, day -> YYYY-MM-DD,
// minute -> YYYY-MM-DDTHH:MM, second -> YYYY-MM-DDTHH:MM:SS.
std::string canonical_temporal_format(TemporalGranularity g);

struct Constraints {
  std::optional<double> min_value;
  std::optional<double> max_value;
  std::optional<std::uint64_t> min_length;
  std::optional<std::uint64_t> max_length;
  std::optional<TemporalGranularity> temporal_granularity;
  std::optional<std::string> temporal_format;
  std::optional<std::pair<std::string, std::string>> boolean_lexicon;

  bool operator==(const Constraints&) const = default;
};

// Default lexicon when a boolean field does not override it.
inline const std::pair<std::string, std::string> kDefaultBooleanLexicon{"Yes", "No"};

struct Term {
  std::string label;
  std::vector<std::string> synonyms;
  std::optional<std::string> iri;

  bool operator==(const Term&) const = default;
};

struct ValueSetRef {
  enum class Source { Inline, TerminologyService };
  Source source = Source::Inline;
  std::string set_id;
  std::vector<Term> inline_terms;  // non-empty iff source == Inline

  bool operator==(const ValueSetRef&) const = default;
};

struct Field {
  std::string key;    // [a-z][a-z0-9_]*
  std::string label;
  Datatype datatype = Datatype::Text;
  bool required = false;
  Constraints constraints;
  std::optional<ValueSetRef> value_set;  // present iff datatype == Categorical
  std::optional<std::string> description;

  bool operator==(const Field&) const = default;

  // The pair of canonical boolean strings in effect for this field.
  const std::pair<std::string, std::string>& boolean_lexicon() const {
    return constraints.boolean_lexicon ? *constraints.boolean_lexicon
                                       : kDefaultBooleanLexicon;
  }
  TemporalGranularity granularity() const {
    return constraints.temporal_granularity.value_or(TemporalGranularity::Day);
  }
};

struct Version {
  std::uint32_t major = 0;
  std::uint32_t minor = 0;
  std::uint32_t patch = 0;

  bool operator==(const Version&) const = default;
  std::string str() const;
  static Version parse(const std::string& s);  // throws SemanticError
};

struct Template {
  std::string id;
  std::string name;
  Version version;
  std::vector<Field> fields;  // order defines column order
  std::optional<std::string> description;

  bool operator==(const Template&) const = default;

  const Field* find_field(const std::string& key) const;
};

// A template whose categorical value sets are all materialized inline.
struct ResolvedTemplate {
  Template tmpl;

  const std::vector<Term>& terms_for(const std::string& field_key) const;
};

struct LintFinding {
  enum class Kind { MissingDescription, NearDuplicateLabels, NonstandardBooleanLexicon };
  Kind kind;
  std::string field_key;  // empty for template-level findings
  std::string message;
};

struct ChangeClass {
  enum class Level { Major, Minor, PatchEquivalent };
  Level level = Level::PatchEquivalent;
  std::vector<std::string> reasons;
};

class TerminologyClient;  // terms.hpp

// Parses the template document format (UTF-8 JSON). Throws ParseError for
// malformed documents and SemanticError for invariant violations.
Template parse_template(const std::string& doc);

// Canonical writer: key order id, name, version, description, fields;
// 2-space indentation. parse_template(render_template(t)) == t.
std::string render_template(const Template& t);

std::vector<LintFinding> lint_template(const Template& t);

// Materializes every terminology-service value set through the client.
// Throws NotFoundError / SemanticError per the resolution contract.
ResolvedTemplate resolve_template(const Template& t, TerminologyClient& terms);

// Resolution for templates whose categorical sets are all inline already.
ResolvedTemplate resolve_template(const Template& t);

ChangeClass compare_versions(const Template& old_t, const Template& new_t);

}  // namespace mdv
