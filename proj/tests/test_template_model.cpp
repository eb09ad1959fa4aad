#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "mdv/template_model.hpp"
#include "mdv/terms.hpp"
#include "test_util.hpp"

using namespace mdv;

namespace {

Template minimal_template() {
  Template t;
  t.id = "rnaseq";
  t.name = "RNAseq";
  t.version = Version::parse("5.0.0");
  Field a;
  a.key = "parent_sample_id";
  a.datatype = Datatype::Text;
  a.label = "Parent sample ID";
  a.required = true;
  Field b;
  b.key = "analyte_class";
  b.label = "Analyte class";
  b.datatype = Datatype::Categorical;
  b.required = true;
  b.value_set = ValueSetRef{ValueSetRef::Source::Inline, "analyte_class",
                            {{"RNA", {}, {}}, {"Protein", {}, {}}}};
  t.fields = {a, b};
  return t;
}

}  // namespace

TEST_CASE("parse_template keeps field order from the document") {
  std::string doc = R"({
    "id": "rnaseq", "name": "RNAseq", "version": "5.0.0",
    "fields": [
      {"key": "parent_sample_id", "label": "Parent sample ID", "datatype": "text", "required": true},
      {"key": "analyte_class", "label": "Analyte class", "datatype": "categorical", "required": true,
       "value_set": {"source": "inline", "terms": [{"label": "RNA"}]}}
    ]})";
  Template t = parse_template(doc);
  REQUIRE(t.fields.size() == 2);
  CHECK(t.fields[0].key == "parent_sample_id");
  CHECK(t.fields[1].key == "analyte_class");
  CHECK(t.version.str() == "5.0.0");
}

TEST_CASE("parse_template rejects a template with zero fields") {
  std::string doc = R"({"id": "x", "name": "X", "version": "1.0.0", "fields": []})";
  CHECK_THROWS_WITH_AS(parse_template(doc), "template has no fields", SemanticError);
}

TEST_CASE("parse_template rejects inverted numeric ranges, naming the field") {
  std::string doc = R"({
    "id": "x", "name": "X", "version": "1.0.0",
    "fields": [{"key": "conc", "label": "C", "datatype": "decimal", "required": false,
                "constraints": {"min_value": 10, "max_value": 5}}]})";
  try {
    parse_template(doc);
    FAIL("expected SemanticError");
  } catch (const SemanticError& e) {
    CHECK(e.field_key == "conc");
    CHECK(std::string(e.what()).find("conc") != std::string::npos);
  }
}

TEST_CASE("parse_template reports malformed JSON with a position") {
  try {
    parse_template("{\n  \"id\": }");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line == 2);
  }
}

TEST_CASE("parse_template rejects duplicate keys and bad key patterns") {
  std::string dup = R"({
    "id": "x", "name": "X", "version": "1.0.0",
    "fields": [
      {"key": "lab_id", "label": "A", "datatype": "text", "required": false},
      {"key": "lab_id", "label": "B", "datatype": "text", "required": false}
    ]})";
  CHECK_THROWS_AS(parse_template(dup), SemanticError);

  std::string bad_key = R"({
    "id": "x", "name": "X", "version": "1.0.0",
    "fields": [{"key": "Lab-ID", "label": "A", "datatype": "text", "required": false}]})";
  CHECK_THROWS_AS(parse_template(bad_key), SemanticError);
}

TEST_CASE("categorical fields require a value set, and only categoricals get one") {
  std::string no_set = R"({
    "id": "x", "name": "X", "version": "1.0.0",
    "fields": [{"key": "a", "label": "A", "datatype": "categorical", "required": false}]})";
  CHECK_THROWS_AS(parse_template(no_set), SemanticError);

  std::string text_with_set = R"({
    "id": "x", "name": "X", "version": "1.0.0",
    "fields": [{"key": "a", "label": "A", "datatype": "text", "required": false,
                "value_set": {"source": "inline", "terms": [{"label": "v"}]}}]})";
  CHECK_THROWS_AS(parse_template(text_with_set), SemanticError);
}

TEST_CASE("constraints must be applicable to the field datatype") {
  std::string doc = R"({
    "id": "x", "name": "X", "version": "1.0.0",
    "fields": [{"key": "a", "label": "A", "datatype": "text", "required": false,
                "constraints": {"min_value": 1}}]})";
  CHECK_THROWS_AS(parse_template(doc), SemanticError);
}

TEST_CASE("render/parse round trip is the identity") {
  Template t = minimal_template();
  t.description = "desc";
  t.fields[0].constraints.min_length = 2;
  t.fields[0].constraints.max_length = 40;
  CHECK(parse_template(render_template(t)) == t);

  // Fixture templates round-trip through the canonical writer too.
  for (const char* name : {"rnaseq", "sample_block", "histology"}) {
    Template f = testutil::load_template(name);
    CHECK(parse_template(render_template(f)) == f);
  }
}

TEST_CASE("render/parse round trip holds for randomized templates") {
  std::mt19937 rng(7);
  for (int iter = 0; iter < 50; ++iter) {
    Template t;
    t.id = "t" + std::to_string(iter);
    t.name = "T";
    t.version = {static_cast<std::uint32_t>(rng() % 9), static_cast<std::uint32_t>(rng() % 9),
                 static_cast<std::uint32_t>(rng() % 9)};
    std::size_t n = 1 + rng() % 5;
    for (std::size_t i = 0; i < n; ++i) {
      Field f;
      f.key = "field_" + std::to_string(i);
      f.label = "Field " + std::to_string(i);
      f.required = rng() % 2 == 0;
      switch (rng() % 6) {
        case 0: f.datatype = Datatype::Text;
          if (rng() % 2) f.constraints.max_length = 10 + rng() % 90;
          break;
        case 1: f.datatype = Datatype::Integer;
          f.constraints.min_value = static_cast<double>(rng() % 10);
          f.constraints.max_value = *f.constraints.min_value + 100;
          break;
        case 2: f.datatype = Datatype::Decimal; break;
        case 3: f.datatype = Datatype::Boolean;
          if (rng() % 2) f.constraints.boolean_lexicon = {{"True"}, {"False"}};
          break;
        case 4: f.datatype = Datatype::Temporal;
          f.constraints.temporal_granularity = TemporalGranularity::Day;
          break;
        case 5: f.datatype = Datatype::Categorical;
          f.value_set = ValueSetRef{ValueSetRef::Source::Inline, f.key,
                                    {{"A", {"alpha"}, {}}, {"B", {}, std::string("urn:b")}}};
          break;
      }
      t.fields.push_back(std::move(f));
    }
    CHECK(parse_template(render_template(t)) == t);
  }
}

TEST_CASE("lint flags near-duplicate labels, missing descriptions, odd lexicons") {
  Template t = minimal_template();
  t.description = "d";
  for (auto& f : t.fields) f.description = "d";
  CHECK(lint_template(t).empty());

  Template dup = t;
  dup.fields[1].value_set->inline_terms = {{"Day", {}, {}}, {"Days", {}, {}}};
  auto findings = lint_template(dup);
  REQUIRE(findings.size() == 1);
  CHECK(findings[0].kind == LintFinding::Kind::NearDuplicateLabels);

  Template missing = t;
  missing.fields[0].description.reset();
  findings = lint_template(missing);
  REQUIRE(findings.size() == 1);
  CHECK(findings[0].kind == LintFinding::Kind::MissingDescription);
  CHECK(findings[0].field_key == "parent_sample_id");

  Template lex = t;
  Field b;
  b.key = "flag";
  b.label = "Flag";
  b.datatype = Datatype::Boolean;
  b.description = "d";
  b.constraints.boolean_lexicon = {{"Oui"}, {"Non"}};
  lex.fields.push_back(b);
  findings = lint_template(lex);
  REQUIRE(findings.size() == 1);
  CHECK(findings[0].kind == LintFinding::Kind::NonstandardBooleanLexicon);
}

TEST_CASE("resolve_template materializes terminology-service sets") {
  auto client = mdv::make_fixture_client(testutil::fixture_path("value-sets"));
  Template t = testutil::load_template("rnaseq");
  ResolvedTemplate rt = resolve_template(t, client);
  const auto& terms = rt.terms_for("analyte_class");
  REQUIRE(terms.size() == 10);
  std::vector<std::string> labels;
  for (const auto& term : terms) labels.push_back(term.label);
  for (const char* expected : {"Chromatin", "Collagen", "DNA", "DNA + RNA",
                               "Endogenous fluorophores", "Fluorochrome", "Lipid", "RNA"})
    CHECK(std::find(labels.begin(), labels.end(), expected) != labels.end());
}

TEST_CASE("resolve_template passes inline sets through and is identity without categoricals") {
  auto client = mdv::make_fixture_client(testutil::fixture_path("value-sets"));

  Template inline_t = minimal_template();
  inline_t.fields[1].value_set->inline_terms = {{"Year", {}, {}}, {"Month", {}, {}},
                                                {"Day", {}, {}}};
  ResolvedTemplate rt = resolve_template(inline_t, client);
  CHECK(rt.tmpl == inline_t);

  Template plain = minimal_template();
  plain.fields.pop_back();  // drop the categorical
  CHECK(resolve_template(plain, client).tmpl == plain);
}

TEST_CASE("resolve_template reports unresolvable set ids") {
  auto client = mdv::make_fixture_client(testutil::fixture_path("value-sets"));
  Template t = minimal_template();
  t.fields[1].value_set = ValueSetRef{ValueSetRef::Source::TerminologyService, "no_such_set", {}};
  try {
    resolve_template(t, client);
    FAIL("expected NotFoundError");
  } catch (const NotFoundError& e) {
    std::string msg = e.what();
    CHECK(msg.find("no_such_set") != std::string::npos);
    CHECK(msg.find("analyte_class") != std::string::npos);  // names the field
  }
}

TEST_CASE("compare_versions classifies additions") {
  Template old_t = minimal_template();
  Template new_t = old_t;

  SUBCASE("identity is patch-equivalent") {
    ChangeClass cc = compare_versions(old_t, new_t);
    CHECK(cc.level == ChangeClass::Level::PatchEquivalent);
    CHECK(cc.reasons.empty());
  }

  SUBCASE("adding a required field is major") {
    Field f;
    f.key = "acquisition_instrument_model";
    f.label = "Acquisition instrument model";
    f.datatype = Datatype::Text;
    f.required = true;
    new_t.fields.push_back(f);
    ChangeClass cc = compare_versions(old_t, new_t);
    CHECK(cc.level == ChangeClass::Level::Major);
    REQUIRE(cc.reasons.size() == 1);
    CHECK(cc.reasons[0].find("added required field") != std::string::npos);
  }

  SUBCASE("adding only an optional text field is minor") {
    Field f;
    f.key = "notes";
    f.label = "Notes";
    f.datatype = Datatype::Text;
    f.required = false;
    new_t.fields.push_back(f);
    CHECK(compare_versions(old_t, new_t).level == ChangeClass::Level::Minor);
  }

  SUBCASE("value-set content changes alone are patch-equivalent") {
    new_t.fields[1].value_set->inline_terms.push_back({"Protein", {}, {}});
    CHECK(compare_versions(old_t, new_t).level == ChangeClass::Level::PatchEquivalent);
  }

  SUBCASE("removing, retyping, or narrowing is major") {
    Template removed = old_t;
    removed.fields.pop_back();
    CHECK(compare_versions(old_t, removed).level == ChangeClass::Level::Major);

    Template retyped = old_t;
    retyped.fields[0].datatype = Datatype::Integer;
    CHECK(compare_versions(old_t, retyped).level == ChangeClass::Level::Major);

    Template narrowed = old_t;
    narrowed.fields[0].constraints.max_length = 5;
    CHECK(compare_versions(old_t, narrowed).level == ChangeClass::Level::Major);
  }

  SUBCASE("id mismatch is an error") {
    new_t.id = "other";
    CHECK_THROWS_AS(compare_versions(old_t, new_t), SemanticError);
  }
}

TEST_CASE("compare_versions severity is anti-symmetric for pure optional additions") {
  Template old_t = minimal_template();
  Template new_t = old_t;
  Field f;
  f.key = "notes";
  f.label = "Notes";
  f.datatype = Datatype::Text;
  f.required = false;
  new_t.fields.push_back(f);
  CHECK(compare_versions(old_t, new_t).level == ChangeClass::Level::Minor);
  CHECK(compare_versions(new_t, old_t).level == ChangeClass::Level::Major);
}

TEST_CASE("version strings parse strictly") {
  CHECK(Version::parse("2.1.0") == Version{2, 1, 0});
  CHECK_THROWS_AS(Version::parse("2.1"), SemanticError);
  CHECK_THROWS_AS(Version::parse("2.1.0-beta"), SemanticError);
  CHECK_THROWS_AS(Version::parse("a.b.c"), SemanticError);
}
