#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>

#include "mdv/ingest.hpp"
#include "mdv/workbook.hpp"
#include "mdv/xlsx.hpp"
#include "test_util.hpp"

using namespace mdv;

TEST_CASE("generated workbook has headers in template order on the data sheet") {
  ResolvedTemplate rt = testutil::resolved_rnaseq();
  GeneratedWorkbook gw = generate_workbook(rt);
  xlsx::Workbook wb = xlsx::read_xlsx(gw.bytes);

  const xlsx::Sheet* data = wb.first_visible();
  REQUIRE(data);
  REQUIRE_FALSE(data->rows.empty());
  std::vector<std::string> headers;
  for (const auto& c : data->rows[0]) headers.push_back(c.text);
  CHECK(headers == std::vector<std::string>{"parent_sample_id", "lab_id",
                                            "preparation_protocol_doi", "dataset_type",
                                            "analyte_class", "is_target"});
}

TEST_CASE("one hidden sheet per categorical field carries the value-set labels in order") {
  ResolvedTemplate rt = testutil::resolved_rnaseq();
  xlsx::Workbook wb = xlsx::read_xlsx(generate_workbook(rt).bytes);

  const xlsx::Sheet* vs = wb.find_sheet("_vs_analyte_class");
  REQUIRE(vs);
  CHECK(vs->hidden);
  std::vector<std::string> labels;
  for (const auto& row : vs->rows) labels.push_back(row.at(0).text);
  std::vector<std::string> expected;
  for (const auto& term : rt.terms_for("analyte_class")) expected.push_back(term.label);
  CHECK(labels == expected);

  // The categorical column's list rule points at the hidden sheet range.
  const xlsx::Sheet* data = wb.first_visible();
  auto it = std::find_if(data->validations.begin(), data->validations.end(),
                         [](const xlsx::DataValidation& dv) {
                           return dv.type == "list" &&
                                  dv.formula1.find("_vs_analyte_class") != std::string::npos;
                         });
  REQUIRE(it != data->validations.end());
  CHECK(it->sqref == "E2:E10001");
  CHECK(it->formula1 == "'_vs_analyte_class'!$A$1:$A$10");
}

TEST_CASE("provenance sheet stores template id and version in A1,B1") {
  ResolvedTemplate rt = testutil::resolved_rnaseq();
  xlsx::Workbook wb = xlsx::read_xlsx(generate_workbook(rt).bytes);
  const xlsx::Sheet* prov = wb.find_sheet("_template");
  REQUIRE(prov);
  CHECK(prov->hidden);
  CHECK(prov->rows.at(0).at(0).text == "rnaseq");
  CHECK(prov->rows.at(0).at(1).text == "5.0.0");
}

TEST_CASE("template with zero categorical fields gets exactly one hidden sheet") {
  Template t;
  t.id = "plain";
  t.name = "Plain";
  t.version = Version::parse("1.0.0");
  Field f;
  f.key = "name";
  f.label = "Name";
  f.datatype = Datatype::Text;
  t.fields = {f};
  xlsx::Workbook wb = xlsx::read_xlsx(generate_workbook(resolve_template(t)).bytes);
  std::size_t hidden = 0;
  for (const auto& s : wb.sheets)
    if (s.hidden) ++hidden;
  CHECK(hidden == 1);
  CHECK(wb.find_sheet("_template") != nullptr);
}

TEST_CASE("column rules reflect the field datatypes and constraints") {
  ResolvedTemplate rt = testutil::resolved_sample_block();
  xlsx::Workbook wb = xlsx::read_xlsx(generate_workbook(rt).bytes);
  const xlsx::Sheet* data = wb.first_visible();

  auto rule_for = [&](const std::string& col) -> const xlsx::DataValidation* {
    for (const auto& dv : data->validations)
      if (dv.sqref.rfind(col, 0) == 0) return &dv;
    return nullptr;
  };

  // sample_id: text with length bounds -> textLength rule on column A
  const auto* text_rule = rule_for("A2");
  REQUIRE(text_rule);
  CHECK(text_rule->type == "textLength");
  CHECK(text_rule->formula1 == "3");
  CHECK(text_rule->formula2 == "64");

  // source_storage_duration_value: decimal [0,100] on column B
  const auto* dec_rule = rule_for("B2");
  REQUIRE(dec_rule);
  CHECK(dec_rule->type == "decimal");
  CHECK(dec_rule->formula1 == "0");
  CHECK(dec_rule->formula2 == "100");

  // section_count: integer -> whole-number rule on column D
  const auto* int_rule = rule_for("D2");
  REQUIRE(int_rule);
  CHECK(int_rule->type == "whole");
  CHECK(int_rule->formula1 == "1");
  CHECK(int_rule->formula2 == "1000");

  // preparation_date: temporal -> date rule on column E
  const auto* date_rule = rule_for("E2");
  REQUIRE(date_rule);
  CHECK(date_rule->type == "date");

  // processed: boolean -> inline list over the lexicon on column F
  const auto* bool_rule = rule_for("F2");
  REQUIRE(bool_rule);
  CHECK(bool_rule->type == "list");
  CHECK(bool_rule->formula1 == "\"Yes,No\"");

  // notes: unconstrained text -> no rule on column G
  CHECK(rule_for("G2") == nullptr);
}

TEST_CASE("unresolved templates are rejected") {
  Template t = testutil::load_template("rnaseq");  // terminology-service ref, unresolved
  ResolvedTemplate rt{t};
  CHECK_THROWS_AS(generate_workbook(rt), SemanticError);
}

TEST_CASE("long field keys map to budget-respecting unique hidden sheet names") {
  CHECK(value_sheet_name("analyte_class") == "_vs_analyte_class");
  std::string long_a(40, 'a');
  std::string long_b = long_a;
  long_b.back() = 'b';
  std::string sa = value_sheet_name(long_a);
  std::string sb = value_sheet_name(long_b);
  CHECK(sa.size() <= 31);
  CHECK(sb.size() <= 31);
  CHECK(sa != sb);
}

TEST_CASE("round trip: generated workbook parses to an empty provenance-linked table") {
  ResolvedTemplate rt = testutil::resolved_rnaseq();
  Table t = parse_workbook(generate_workbook(rt).bytes);
  CHECK(t.records.empty());
  REQUIRE(t.headers.size() == rt.tmpl.fields.size());
  for (std::size_t i = 0; i < t.headers.size(); ++i)
    CHECK(t.headers[i] == rt.tmpl.fields[i].key);
  REQUIRE(t.provenance);
  CHECK(t.provenance->template_id == "rnaseq");
  CHECK(t.provenance->version == "5.0.0");
}

TEST_CASE("delimited skeleton is one LF-terminated header line") {
  ResolvedTemplate rt = testutil::resolved_rnaseq();
  std::string skel = generate_delimited_skeleton(rt);
  CHECK(skel ==
        "parent_sample_id\tlab_id\tpreparation_protocol_doi\tdataset_type\tanalyte_class\t"
        "is_target\n");

  Template one;
  one.id = "one";
  one.name = "One";
  one.version = Version::parse("1.0.0");
  Field f;
  f.key = "only_key";
  f.label = "Only";
  f.datatype = Datatype::Text;
  one.fields = {f};
  CHECK(generate_delimited_skeleton(resolve_template(one)) == "only_key\n");
}

TEST_CASE("skeleton splits back into one token per field") {
  ResolvedTemplate rt = testutil::resolved_sample_block();
  std::string skel = generate_delimited_skeleton(rt);
  std::size_t tabs = std::count(skel.begin(), skel.end(), '\t');
  CHECK(tabs == rt.tmpl.fields.size() - 1);
}

TEST_CASE("spec doc lists permissible values and is deterministic") {
  ResolvedTemplate rt = testutil::resolved_rnaseq();
  std::string doc = render_spec_doc(rt);
  CHECK(doc.find("## analyte_class") != std::string::npos);
  for (const auto& term : rt.terms_for("analyte_class"))
    CHECK(doc.find("- " + term.label) != std::string::npos);
  CHECK(doc == render_spec_doc(rt));

  Template t = rt.tmpl;
  t.fields[0].description.reset();
  std::string doc2 = render_spec_doc(ResolvedTemplate{t});
  CHECK(doc2.find("(no description)") != std::string::npos);
}
