#include "mdv/template_model.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <unordered_set>

#include "json.hpp"
#include "mdv/repair.hpp"
#include "mdv/terms.hpp"

namespace mdv {

using json = nlohmann::ordered_json;

std::string to_string(Datatype dt) {
  switch (dt) {
    case Datatype::Text: return "text";
    case Datatype::Integer: return "integer";
    case Datatype::Decimal: return "decimal";
    case Datatype::Boolean: return "boolean";
    case Datatype::Temporal: return "temporal";
    case Datatype::Categorical: return "categorical";
    case Datatype::Uri: return "uri";
    case Datatype::Email: return "email";
  }
  return "text";
}

std::optional<Datatype> datatype_from_string(const std::string& s) {
  if (s == "text") return Datatype::Text;
  if (s == "integer") return Datatype::Integer;
  if (s == "decimal") return Datatype::Decimal;
  if (s == "boolean") return Datatype::Boolean;
  if (s == "temporal") return Datatype::Temporal;
  if (s == "categorical") return Datatype::Categorical;
  if (s == "uri") return Datatype::Uri;
  if (s == "email") return Datatype::Email;
  return std::nullopt;
}

std::string to_string(TemporalGranularity g) {
  switch (g) {
    case TemporalGranularity::Year: return "year";
    case TemporalGranularity::Month: return "month";
    case TemporalGranularity::Day: return "day";
    case TemporalGranularity::Minute: return "minute";
    case TemporalGranularity::Second: return "second";
  }
  return "day";
}

std::optional<TemporalGranularity> granularity_from_string(const std::string& s) {
  if (s == "year") return TemporalGranularity::Year;
  if (s == "month") return TemporalGranularity::Month;
  if (s == "day") return TemporalGranularity::Day;
  if (s == "minute") return TemporalGranularity::Minute;
  if (s == "second") return TemporalGranularity::Second;
  return std::nullopt;
}

std::string canonical_temporal_format(TemporalGranularity g) {
  switch (g) {
    case TemporalGranularity::Year: return "YYYY";
    case TemporalGranularity::Month: return "YYYY-MM";
    case TemporalGranularity::Day: return "YYYY-MM-DD";
    case TemporalGranularity::Minute: return "YYYY-MM-DDTHH:MM";
    case TemporalGranularity::Second: return "YYYY-MM-DDTHH:MM:SS";
  }
  return "YYYY-MM-DD";
}

std::string Version::str() const {
  return std::to_string(major) + "." + std::to_string(minor) + "." + std::to_string(patch);
}

Version Version::parse(const std::string& s) {
  Version v;
  std::uint32_t* parts[3] = {&v.major, &v.minor, &v.patch};
  std::size_t pos = 0;
  for (int i = 0; i < 3; ++i) {
    std::size_t start = pos;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
    if (pos == start) throw SemanticError("invalid version \"" + s + "\"");
    *parts[i] = static_cast<std::uint32_t>(std::stoul(s.substr(start, pos - start)));
    if (i < 2) {
      if (pos >= s.size() || s[pos] != '.') throw SemanticError("invalid version \"" + s + "\"");
      ++pos;
    }
  }
  if (pos != s.size()) throw SemanticError("invalid version \"" + s + "\"");
  return v;
}

const Field* Template::find_field(const std::string& key) const {
  for (const auto& f : fields)
    if (f.key == key) return &f;
  return nullptr;
}

const std::vector<Term>& ResolvedTemplate::terms_for(const std::string& field_key) const {
  const Field* f = tmpl.find_field(field_key);
  if (!f || !f->value_set) throw SemanticError("no value set for field", field_key);
  return f->value_set->inline_terms;
}

namespace {

bool valid_field_key(const std::string& k) {
  if (k.empty() || k[0] < 'a' || k[0] > 'z') return false;
  return std::all_of(k.begin(), k.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
  });
}

[[noreturn]] void rethrow_with_position(const std::string& doc, const json::parse_error& e) {
  std::size_t line = 1, col = 1;
  std::size_t byte = e.byte > 0 ? e.byte - 1 : 0;
  for (std::size_t i = 0; i < byte && i < doc.size(); ++i) {
    if (doc[i] == '\n') { ++line; col = 1; } else { ++col; }
  }
  throw ParseError(std::string("malformed template document: ") + e.what(), line, col);
}

Term term_from_json(const json& j, const std::string& field_key) {
  if (!j.is_object() || !j.contains("label") || !j["label"].is_string())
    throw SemanticError("value-set term missing label", field_key);
  Term t;
  t.label = j["label"].get<std::string>();
  if (j.contains("synonyms")) {
    for (const auto& s : j["synonyms"]) t.synonyms.push_back(s.get<std::string>());
  }
  if (j.contains("iri") && !j["iri"].is_null()) t.iri = j["iri"].get<std::string>();
  return t;
}

Constraints constraints_from_json(const json& j, const Field& f) {
  Constraints c;
  auto fail = [&](const std::string& name) {
    throw SemanticError("constraint \"" + name + "\" not applicable to datatype " +
                            to_string(f.datatype) + " in field \"" + f.key + "\"",
                        f.key);
  };
  bool numeric = f.datatype == Datatype::Integer || f.datatype == Datatype::Decimal;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& name = it.key();
    if (name == "min_value" || name == "max_value") {
      if (!numeric) fail(name);
      (name == "min_value" ? c.min_value : c.max_value) = it.value().get<double>();
    } else if (name == "min_length" || name == "max_length") {
      if (f.datatype != Datatype::Text) fail(name);
      (name == "min_length" ? c.min_length : c.max_length) =
          it.value().get<std::uint64_t>();
    } else if (name == "temporal_granularity") {
      if (f.datatype != Datatype::Temporal) fail(name);
      auto g = granularity_from_string(it.value().get<std::string>());
      if (!g)
        throw SemanticError("unknown temporal granularity in field \"" + f.key + "\"", f.key);
      c.temporal_granularity = g;
    } else if (name == "temporal_format") {
      if (f.datatype != Datatype::Temporal) fail(name);
      c.temporal_format = it.value().get<std::string>();
    } else if (name == "boolean_lexicon") {
      if (f.datatype != Datatype::Boolean) fail(name);
      if (!it.value().is_array() || it.value().size() != 2)
        throw SemanticError("boolean_lexicon must be a pair in field \"" + f.key + "\"", f.key);
      c.boolean_lexicon = {it.value()[0].get<std::string>(), it.value()[1].get<std::string>()};
    } else {
      throw SemanticError("unknown constraint \"" + name + "\" in field \"" + f.key + "\"",
                          f.key);
    }
  }
  if (c.min_value && c.max_value && *c.min_value > *c.max_value)
    throw SemanticError("min_value exceeds max_value in field \"" + f.key + "\"", f.key);
  if (c.min_length && c.max_length && *c.min_length > *c.max_length)
    throw SemanticError("min_length exceeds max_length in field \"" + f.key + "\"", f.key);
  return c;
}

void check_inline_terms(const std::vector<Term>& terms, const std::string& field_key) {
  if (terms.empty())
    throw SemanticError("inline value set is empty in field \"" + field_key + "\"", field_key);
  std::unordered_set<std::string> seen;
  for (const auto& t : terms) {
    if (!seen.insert(t.label).second)
      throw SemanticError("duplicate value-set label \"" + t.label + "\" in field \"" +
                              field_key + "\"",
                          field_key);
  }
}

Field field_from_json(const json& j) {
  if (!j.is_object()) throw SemanticError("field entry is not an object");
  for (const char* req : {"key", "label", "datatype", "required"}) {
    if (!j.contains(req))
      throw SemanticError(std::string("field missing \"") + req + "\"",
                          j.value("key", std::string{}));
  }
  Field f;
  f.key = j["key"].get<std::string>();
  if (!valid_field_key(f.key))
    throw SemanticError("invalid field key \"" + f.key + "\"", f.key);
  f.label = j["label"].get<std::string>();
  auto dt = datatype_from_string(j["datatype"].get<std::string>());
  if (!dt)
    throw SemanticError("unknown datatype \"" + j["datatype"].get<std::string>() +
                            "\" in field \"" + f.key + "\"",
                        f.key);
  f.datatype = *dt;
  f.required = j["required"].get<bool>();
  if (j.contains("description") && !j["description"].is_null())
    f.description = j["description"].get<std::string>();
  if (j.contains("constraints")) f.constraints = constraints_from_json(j["constraints"], f);

  if (j.contains("value_set")) {
    const json& vs = j["value_set"];
    ValueSetRef ref;
    std::string source = vs.value("source", std::string{});
    if (source == "inline") {
      ref.source = ValueSetRef::Source::Inline;
      ref.set_id = vs.value("set_id", f.key);
      if (!vs.contains("terms") || !vs["terms"].is_array())
        throw SemanticError("inline value set without terms in field \"" + f.key + "\"", f.key);
      for (const auto& tj : vs["terms"]) ref.inline_terms.push_back(term_from_json(tj, f.key));
      check_inline_terms(ref.inline_terms, f.key);
    } else if (source == "terminology-service") {
      ref.source = ValueSetRef::Source::TerminologyService;
      if (!vs.contains("set_id"))
        throw SemanticError("terminology-service value set without set_id in field \"" +
                                f.key + "\"",
                            f.key);
      ref.set_id = vs["set_id"].get<std::string>();
    } else {
      throw SemanticError("unknown value-set source \"" + source + "\" in field \"" + f.key +
                              "\"",
                          f.key);
    }
    f.value_set = std::move(ref);
  }

  if (f.datatype == Datatype::Categorical && !f.value_set)
    throw SemanticError("categorical field \"" + f.key + "\" has no value set", f.key);
  if (f.datatype != Datatype::Categorical && f.value_set)
    throw SemanticError("non-categorical field \"" + f.key + "\" has a value set", f.key);
  return f;
}

}  // namespace

Template parse_template(const std::string& doc) {
  json j;
  try {
    j = json::parse(doc);
  } catch (const json::parse_error& e) {
    rethrow_with_position(doc, e);
  }
  if (!j.is_object()) throw SemanticError("template document is not an object");
  for (const char* req : {"id", "name", "version", "fields"}) {
    if (!j.contains(req)) throw SemanticError(std::string("template missing \"") + req + "\"");
  }
  Template t;
  t.id = j["id"].get<std::string>();
  if (t.id.empty()) throw SemanticError("template id is empty");
  t.name = j["name"].get<std::string>();
  t.version = Version::parse(j["version"].get<std::string>());
  if (j.contains("description") && !j["description"].is_null())
    t.description = j["description"].get<std::string>();
  if (!j["fields"].is_array()) throw SemanticError("\"fields\" is not an array");
  for (const auto& fj : j["fields"]) t.fields.push_back(field_from_json(fj));
  if (t.fields.empty()) throw SemanticError("template has no fields");

  std::unordered_set<std::string> keys;
  for (const auto& f : t.fields) {
    if (!keys.insert(f.key).second)
      throw SemanticError("duplicate field key \"" + f.key + "\"", f.key);
  }
  return t;
}

namespace {

json term_to_json(const Term& t) {
  json j;
  j["label"] = t.label;
  j["synonyms"] = t.synonyms;
  if (t.iri) j["iri"] = *t.iri;
  return j;
}

json number_json(double v) {
  // Integral constraint bounds render without a fractional part.
  if (v == static_cast<double>(static_cast<long long>(v)))
    return json(static_cast<long long>(v));
  return json(v);
}

json field_to_json(const Field& f) {
  json j;
  j["key"] = f.key;
  j["label"] = f.label;
  j["datatype"] = to_string(f.datatype);
  j["required"] = f.required;
  const Constraints& c = f.constraints;
  if (c != Constraints{}) {
    json cj;
    if (c.min_value) cj["min_value"] = number_json(*c.min_value);
    if (c.max_value) cj["max_value"] = number_json(*c.max_value);
    if (c.min_length) cj["min_length"] = *c.min_length;
    if (c.max_length) cj["max_length"] = *c.max_length;
    if (c.temporal_granularity) cj["temporal_granularity"] = to_string(*c.temporal_granularity);
    if (c.temporal_format) cj["temporal_format"] = *c.temporal_format;
    if (c.boolean_lexicon)
      cj["boolean_lexicon"] = json::array({c.boolean_lexicon->first, c.boolean_lexicon->second});
    j["constraints"] = std::move(cj);
  }
  if (f.value_set) {
    json vj;
    if (f.value_set->source == ValueSetRef::Source::Inline) {
      vj["source"] = "inline";
      if (f.value_set->set_id != f.key) vj["set_id"] = f.value_set->set_id;
      json terms = json::array();
      for (const auto& t : f.value_set->inline_terms) terms.push_back(term_to_json(t));
      vj["terms"] = std::move(terms);
    } else {
      vj["source"] = "terminology-service";
      vj["set_id"] = f.value_set->set_id;
    }
    j["value_set"] = std::move(vj);
  }
  if (f.description) j["description"] = *f.description;
  return j;
}

}  // namespace

std::string render_template(const Template& t) {
  json j;
  j["id"] = t.id;
  j["name"] = t.name;
  j["version"] = t.version.str();
  if (t.description) j["description"] = *t.description;
  json fields = json::array();
  for (const auto& f : t.fields) fields.push_back(field_to_json(f));
  j["fields"] = std::move(fields);
  return j.dump(2) + "\n";
}

std::vector<LintFinding> lint_template(const Template& t) {
  std::vector<LintFinding> out;
  if (!t.description || t.description->empty())
    out.push_back({LintFinding::Kind::MissingDescription, "", "template has no description"});
  for (const auto& f : t.fields) {
    if (!f.description || f.description->empty())
      out.push_back({LintFinding::Kind::MissingDescription, f.key,
                     "field \"" + f.key + "\" has no description"});
    if (f.datatype == Datatype::Boolean && f.boolean_lexicon() != kDefaultBooleanLexicon)
      out.push_back({LintFinding::Kind::NonstandardBooleanLexicon, f.key,
                     "field \"" + f.key + "\" uses a nonstandard boolean lexicon (" +
                         f.boolean_lexicon().first + "/" + f.boolean_lexicon().second + ")"});
    if (f.value_set && f.value_set->source == ValueSetRef::Source::Inline) {
      const auto& terms = f.value_set->inline_terms;
      for (std::size_t i = 0; i < terms.size(); ++i) {
        for (std::size_t k = i + 1; k < terms.size(); ++k) {
          if (edit_distance(terms[i].label, terms[k].label) == 1)
            out.push_back({LintFinding::Kind::NearDuplicateLabels, f.key,
                           "field \"" + f.key + "\" value set has near-duplicate labels \"" +
                               terms[i].label + "\" and \"" + terms[k].label + "\""});
        }
      }
    }
  }
  return out;
}

ResolvedTemplate resolve_template(const Template& t, TerminologyClient& terms) {
  Template out = t;
  for (auto& f : out.fields) {
    if (!f.value_set || f.value_set->source != ValueSetRef::Source::TerminologyService)
      continue;
    ValueSet vs;
    try {
      vs = terms.fetch_value_set(f.value_set->set_id);
    } catch (const NotFoundError&) {
      throw NotFoundError("value set \"" + f.value_set->set_id +
                          "\" for field \"" + f.key + "\" is not resolvable");
    }
    if (vs.terms.empty())
      throw SemanticError("value set \"" + f.value_set->set_id + "\" resolved empty for field \"" +
                              f.key + "\"",
                          f.key);
    f.value_set->source = ValueSetRef::Source::Inline;
    f.value_set->inline_terms = std::move(vs.terms);
  }
  return ResolvedTemplate{std::move(out)};
}

ResolvedTemplate resolve_template(const Template& t) {
  for (const auto& f : t.fields) {
    if (f.value_set && f.value_set->source == ValueSetRef::Source::TerminologyService)
      throw SemanticError("field \"" + f.key + "\" requires a terminology source", f.key);
  }
  return ResolvedTemplate{t};
}

namespace {

bool range_narrowed(const Constraints& o, const Constraints& n) {
  auto low = [](const std::optional<double>& v) { return v.value_or(-1e308); };
  auto high = [](const std::optional<double>& v) { return v.value_or(1e308); };
  if (low(n.min_value) > low(o.min_value) || high(n.max_value) < high(o.max_value)) return true;
  auto lowL = [](const std::optional<std::uint64_t>& v) { return v.value_or(0); };
  auto highL = [](const std::optional<std::uint64_t>& v) {
    return v.value_or(std::uint64_t(-1));
  };
  return lowL(n.min_length) > lowL(o.min_length) || highL(n.max_length) < highL(o.max_length);
}

bool range_widened(const Constraints& o, const Constraints& n) {
  return range_narrowed(n, o);
}

}  // namespace

ChangeClass compare_versions(const Template& old_t, const Template& new_t) {
  if (old_t.id != new_t.id)
    throw SemanticError("template id mismatch: \"" + old_t.id + "\" vs \"" + new_t.id + "\"");

  std::vector<std::string> breaking, minor;
  for (const auto& of : old_t.fields) {
    const Field* nf = new_t.find_field(of.key);
    if (!nf) {
      breaking.push_back("removed field \"" + of.key + "\"");
      continue;
    }
    if (nf->datatype != of.datatype)
      breaking.push_back("changed datatype of \"" + of.key + "\"");
    if (!of.required && nf->required)
      breaking.push_back("field \"" + of.key + "\" became required");
    if (of.required && !nf->required)
      minor.push_back("field \"" + of.key + "\" became optional");
    if (range_narrowed(of.constraints, nf->constraints))
      breaking.push_back("narrowed range of \"" + of.key + "\"");
    else if (range_widened(of.constraints, nf->constraints))
      minor.push_back("widened range of \"" + of.key + "\"");
  }
  for (const auto& nf : new_t.fields) {
    if (old_t.find_field(nf.key)) continue;
    if (nf.required)
      breaking.push_back("added required field \"" + nf.key + "\"");
    else
      minor.push_back("added optional field \"" + nf.key + "\"");
  }

  ChangeClass cc;
  if (!breaking.empty()) {
    cc.level = ChangeClass::Level::Major;
    cc.reasons = std::move(breaking);
    cc.reasons.insert(cc.reasons.end(), minor.begin(), minor.end());
  } else if (!minor.empty()) {
    cc.level = ChangeClass::Level::Minor;
    cc.reasons = std::move(minor);
  } else {
    cc.level = ChangeClass::Level::PatchEquivalent;
  }
  return cc;
}

}  // namespace mdv
