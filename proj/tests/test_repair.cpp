#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <random>

#include "mdv/errors.hpp"
#include "mdv/repair.hpp"
#include "test_util.hpp"

using namespace mdv;

namespace {

const Field& field(const ResolvedTemplate& rt, const std::string& key) {
  const Field* f = rt.tmpl.find_field(key);
  REQUIRE(f);
  return *f;
}

SynonymIndex index_for(const Field& f) {
  return build_synonym_index({f.key, f.value_set->inline_terms});
}

std::string random_word(std::mt19937& rng, std::size_t max_len) {
  static const std::string alphabet = "abcde";
  std::string s;
  std::size_t len = rng() % (max_len + 1);
  for (std::size_t i = 0; i < len; ++i) s += alphabet[rng() % alphabet.size()];
  return s;
}

}  // namespace

TEST_CASE("edit distance matches the exhaustive oracle on random pairs") {
  std::mt19937 rng(424242);
  for (int trial = 0; trial < 300; ++trial) {
    std::string a = random_word(rng, 8);
    std::string b = random_word(rng, 8);
    CHECK(edit_distance(a, b) == testutil::brute_force_distance(a, b));
  }
}

TEST_CASE("edit distance spot values") {
  CHECK(edit_distance("days", "day") == 1);
  CHECK(edit_distance("", "Day") == 3);
  CHECK(edit_distance("kitten", "sitting") == 3);
  CHECK(edit_distance("flaw", "lawn") == 2);
  CHECK(edit_distance("same", "same") == 0);
}

TEST_CASE("edit distance metric properties") {
  std::mt19937 rng(99);
  for (int trial = 0; trial < 100; ++trial) {
    std::string a = random_word(rng, 7);
    std::string b = random_word(rng, 7);
    std::string c = random_word(rng, 7);
    CHECK(edit_distance(a, a) == 0);
    CHECK(edit_distance(a, b) == edit_distance(b, a));
    CHECK(edit_distance(a, c) <= edit_distance(a, b) + edit_distance(b, c));
    if (a != b) CHECK(edit_distance(a, b) >= 1);
  }
}

TEST_CASE("synonym hits outrank everything and score 1.0") {
  ResolvedTemplate rt = testutil::resolved_sample_block();
  const Field& unit = field(rt, "source_storage_duration_unit");
  SynonymIndex idx = index_for(unit);

  auto days = suggest_categorical(unit, "days", idx);
  REQUIRE_FALSE(days.empty());
  CHECK(days[0].value == "Day");
  CHECK(days[0].score == 1.0);
  CHECK(days[0].provenance == SuggestionProvenance::Synonym);

  // case and whitespace are normalized before the lookup
  auto noisy = suggest_categorical(unit, "  DAYS ", idx);
  REQUIRE_FALSE(noisy.empty());
  CHECK(noisy[0].value == "Day");
  CHECK(noisy[0].score == 1.0);
}

TEST_CASE("label case errors resolve through the synonym index") {
  ResolvedTemplate rt = testutil::resolved_rnaseq();
  const Field& f = field(rt, "analyte_class");
  SynonymIndex idx = index_for(f);
  auto s = suggest_categorical(f, "rna", idx);
  REQUIRE_FALSE(s.empty());
  CHECK(s[0].value == "RNA");
  CHECK(s[0].score == 1.0);
}

TEST_CASE("typos within the distance threshold surface the right label") {
  ResolvedTemplate rt = testutil::resolved_rnaseq();
  const Field& f = field(rt, "analyte_class");
  SynonymIndex idx = index_for(f);

  auto s = suggest_categorical(f, "Fluorochrme", idx);  // one deletion
  REQUIRE_FALSE(s.empty());
  CHECK(s[0].value == "Fluorochrome");
  CHECK(s[0].provenance == SuggestionProvenance::Distance);
  CHECK(s[0].score > 0.9);

  // gibberish far from every label gets nothing
  CHECK(suggest_categorical(f, "zzzzqqqqzzzz", idx).empty());
  CHECK(suggest_categorical(f, "", idx).empty());
}

TEST_CASE("suggestions are capped at three, deduped, and deterministically ordered") {
  Field f;
  f.key = "k";
  f.label = "K";
  f.datatype = Datatype::Categorical;
  f.value_set = ValueSetRef{ValueSetRef::Source::Inline, "k",
                            {{"cat", {"kat"}, {}},
                             {"car", {}, {}},
                             {"can", {}, {}},
                             {"cap", {}, {}},
                             {"cut", {}, {}}}};
  SynonymIndex idx = index_for(f);
  auto s = suggest_categorical(f, "caq", idx);
  REQUIRE(s.size() == 3);
  // all distance-1 candidates tie; lexicographic order breaks the tie
  CHECK(s[0].value == "can");
  CHECK(s[1].value == "cap");
  CHECK(s[2].value == "car");
  std::set<std::string> distinct{s[0].value, s[1].value, s[2].value};
  CHECK(distinct.size() == 3);

  auto again = suggest_categorical(f, "caq", idx);
  CHECK(s == again);
}

TEST_CASE("quoted integers coerce to the bare literal") {
  ResolvedTemplate rt = testutil::resolved_sample_block();
  const Field& f = field(rt, "section_count");
  auto s = coerce_literal(f, "\"42\"");
  REQUIRE(s);
  CHECK(s->value == "42");
  CHECK(s->score == 0.9);
  CHECK(s->provenance == SuggestionProvenance::Coercion);

  auto padded = coerce_literal(f, "  17 ");
  REQUIRE(padded);
  CHECK(padded->value == "17");

  auto grouped = coerce_literal(f, "1,000");
  REQUIRE(grouped);
  CHECK(grouped->value == "1000");
}

TEST_CASE("boolean and temporal coercions") {
  ResolvedTemplate rt = testutil::resolved_sample_block();
  const Field& processed = field(rt, "processed");
  auto lower = coerce_literal(processed, "no");
  REQUIRE(lower);
  CHECK(lower->value == "No");
  auto shouty = coerce_literal(processed, "YES");
  REQUIRE(shouty);
  CHECK(shouty->value == "Yes");
  CHECK_FALSE(coerce_literal(processed, "maybe"));

  const Field& date = field(rt, "preparation_date");
  auto slashes = coerce_literal(date, "2023/08/15");
  REQUIRE(slashes);
  CHECK(slashes->value == "2023-08-15");
  auto us_unambiguous = coerce_literal(date, "08/15/2023");  // day 15 > 12
  REQUIRE(us_unambiguous);
  CHECK(us_unambiguous->value == "2023-08-15");
  // ambiguous between month-first and day-first: refuse to guess
  CHECK_FALSE(coerce_literal(date, "05/04/2023"));
}

TEST_CASE("coercions never propose a value that fails validation") {
  ResolvedTemplate rt = testutil::resolved_sample_block();
  const Field& dec = field(rt, "source_storage_duration_value");
  // de-quoting works but 150 is out of range, so no suggestion
  CHECK_FALSE(coerce_literal(dec, "\"150\""));
  auto ok = coerce_literal(dec, "\"42.5\"");
  REQUIRE(ok);
  CHECK(ok->value == "42.5");
  // a value that is already valid yields no coercion
  CHECK_FALSE(coerce_literal(dec, "42.5"));
}

TEST_CASE("the default ranker is a permutation of its candidates") {
  ResolvedTemplate rt = testutil::resolved_rnaseq();
  const Field& f = field(rt, "analyte_class");
  const auto& terms = f.value_set->inline_terms;
  DefaultRanker ranker;
  auto ranked = rank_semantic(f, "ribonucleic acid stuff", terms, ranker);
  REQUIRE(ranked.size() == terms.size());
  std::set<std::string> in, out;
  for (const auto& t : terms) in.insert(t.label);
  for (const auto& s : ranked) {
    out.insert(s.value);
    CHECK(s.score >= 0.0);
    CHECK(s.score <= 1.0);
    CHECK(s.provenance == SuggestionProvenance::Semantic);
  }
  CHECK(in == out);
  CHECK(std::is_sorted(ranked.begin(), ranked.end(),
                       [](const Suggestion& a, const Suggestion& b) {
                         return a.score > b.score;
                       }));
}

namespace {

struct ThrowingRanker : SemanticRanker {
  std::vector<Suggestion> rank(const Context&, const std::string&,
                               const std::vector<Term>&) override {
    throw std::runtime_error("backend down");
  }
};

struct InventingRanker : SemanticRanker {
  std::vector<Suggestion> rank(const Context&, const std::string&,
                               const std::vector<Term>&) override {
    return {{"NotARealLabel", 5.0, SuggestionProvenance::Distance}};
  }
};

}  // namespace

TEST_CASE("misbehaving rankers are contained") {
  ResolvedTemplate rt = testutil::resolved_rnaseq();
  const Field& f = field(rt, "analyte_class");
  const auto& terms = f.value_set->inline_terms;

  ThrowingRanker boom;
  CHECK(rank_semantic(f, "x", terms, boom).empty());

  InventingRanker liar;
  CHECK(rank_semantic(f, "x", terms, liar).empty());  // invented value filtered out
}

TEST_CASE("suggest_for_issue routes by datatype and issue kind") {
  ResolvedTemplate rt = testutil::resolved_sample_block();

  Issue cat{2, "source_storage_duration_unit", IssueKind::NotInValueSet, "days", ""};
  auto s = suggest_for_issue(rt, cat);
  REQUIRE_FALSE(s.empty());
  CHECK(s[0].value == "Day");

  Issue quoted{1, "section_count", IssueKind::TypeMismatch, "\"42\"", ""};
  auto q = suggest_for_issue(rt, quoted);
  REQUIRE_FALSE(q.empty());
  CHECK(q[0].value == "42");

  // boolean typo falls back to a distance pass over the lexicon
  Issue boolean{1, "processed", IssueKind::BadBoolean, "Nio", ""};
  auto b = suggest_for_issue(rt, boolean);
  REQUIRE_FALSE(b.empty());
  CHECK(b[0].value == "No");

  Issue missing{1, "sample_id", IssueKind::MissingRequired, "", ""};
  CHECK(suggest_for_issue(rt, missing).empty());

  Issue unknown{0, "operator_name", IssueKind::UnknownColumn, "operator_name", ""};
  CHECK(suggest_for_issue(rt, unknown).empty());
}

TEST_CASE("every suggestion validates against its field") {
  // Soundness sweep over a batch of malformed observations.
  ResolvedTemplate rt = testutil::resolved_sample_block();
  const std::vector<std::pair<std::string, std::string>> faults = {
      {"source_storage_duration_unit", "dayz"},
      {"source_storage_duration_unit", "MONTHS"},
      {"section_count", "'7'"},
      {"source_storage_duration_value", "3,5"},
      {"preparation_date", "2021/01/09"},
      {"processed", "yes "},
      {"processed", "nope"},
  };
  for (const auto& [key, observed] : faults) {
    Issue issue{1, key, IssueKind::TypeMismatch, observed, ""};
    const Field* f = rt.tmpl.find_field(key);
    for (const auto& s : suggest_for_issue(rt, issue)) {
      Cell probe{key, s.value, s.value.empty()};
      CHECK_MESSAGE(validate_cell(*f, probe).empty(), key << " <- " << s.value);
    }
  }
}

TEST_CASE("patches apply by address and leave the original table alone") {
  Table t = testutil::figure1_table();
  std::string before = t.cell_at(3, "analyte_class")->raw;
  Table patched = apply_patches(t, {{3, "analyte_class", "DNA"},
                                    {1, "lab_id", "LAB-9"}});
  CHECK(patched.cell_at(3, "analyte_class")->raw == "DNA");
  CHECK(patched.cell_at(1, "lab_id")->raw == "LAB-9");
  CHECK_FALSE(patched.cell_at(1, "lab_id")->was_blank);
  CHECK(t.cell_at(3, "analyte_class")->raw == before);  // input untouched

  CHECK(apply_patches(t, {}) == t);
}

TEST_CASE("bad patch addresses and duplicates are rejected") {
  Table t = testutil::figure1_table();
  CHECK_THROWS_AS(apply_patches(t, {{999, "lab_id", "x"}}), SemanticError);
  CHECK_THROWS_AS(apply_patches(t, {{1, "no_such_column", "x"}}), SemanticError);
  CHECK_THROWS_AS(apply_patches(t, {{1, "lab_id", "x"}, {1, "lab_id", "y"}}), SemanticError);
}

TEST_CASE("patch lists round-trip through json") {
  std::vector<Patch> patches = {{3, "analyte_class", "DNA"}, {5, "is_target", "No"}};
  std::string text = patches_to_json(patches);
  auto back = patches_from_json(text);
  REQUIRE(back.size() == 2);
  CHECK(back[0].row_index == 3);
  CHECK(back[0].column_key == "analyte_class");
  CHECK(back[0].new_value == "DNA");
  CHECK(back[1].row_index == 5);

  CHECK_THROWS_AS(patches_from_json("{not json"), ParseError);
  CHECK_THROWS_AS(patches_from_json("{\"row\":1}"), ParseError);
  CHECK_THROWS_AS(patches_from_json("[{\"row\":1}]"), ParseError);
}

TEST_CASE("accepting top suggestions converges within two passes") {
  ResolvedTemplate rt = testutil::resolved_sample_block();
  Table t;
  for (const auto& f : rt.tmpl.fields) t.headers.push_back(f.key);
  auto add_row = [&](std::size_t idx, std::vector<std::string> vals) {
    Record rec;
    rec.row_index = idx;
    for (std::size_t c = 0; c < t.headers.size(); ++c)
      rec.cells.push_back({t.headers[c], vals[c], vals[c].empty()});
    t.records.push_back(std::move(rec));
  };
  add_row(1, {"BLK-0001", "\"4.5\"", "days", "12", "2023/08/15", "yes", ""});
  add_row(2, {"BLK-0002", "3,5", "MONTH", "", "2024-02-29", "Nio", "ok"});

  int passes = 0;
  ValidationReport report = validate_table(rt, t);
  while (!report.issues.empty() && passes < 5) {
    std::vector<Patch> patches;
    for (const auto& issue : report.issues) {
      auto s = suggest_for_issue(rt, issue);
      if (!s.empty()) patches.push_back({issue.row_index, issue.column_key, s[0].value});
    }
    REQUIRE_FALSE(patches.empty());
    t = apply_patches(t, patches);
    report = validate_table(rt, t);
    ++passes;
  }
  CHECK(report.issues.empty());
  CHECK(passes <= 2);
  CHECK(t.cell_at(1, "source_storage_duration_unit")->raw == "Day");
  CHECK(t.cell_at(1, "preparation_date")->raw == "2023-08-15");
  CHECK(t.cell_at(2, "processed")->raw == "No");
}
