#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mdv/table.hpp"
#include "mdv/template_model.hpp"

namespace mdv {

enum class IssueKind {
  MissingRequired,
  TypeMismatch,
  OutOfRange,
  BadLength,
  NotInValueSet,
  BadTemporal,
  BadUri,
  BadEmail,
  BadBoolean,
  UnknownColumn,
  MissingColumn,
};

std::string to_string(IssueKind k);

enum class IssueCategory { Completeness, Adherence };

// Completeness iff MissingRequired; everything else is adherence.
IssueCategory category_of(IssueKind k);

struct Issue {
  std::size_t row_index = 0;  // 0 for table-level issues
  std::string column_key;
  IssueKind kind = IssueKind::TypeMismatch;
  std::string observed;
  std::string expected;  // human-readable expectation

  IssueCategory category() const { return category_of(kind); }
  bool operator==(const Issue&) const = default;
};

struct IssueCluster {
  IssueKind kind;
  std::string column_key;
  std::vector<std::size_t> issue_indices;  // into ValidationReport::issues
};

struct Summary {
  std::size_t total_records = 0;
  std::size_t erroneous_records = 0;  // distinct row_index >= 1 with >= 1 issue
  std::map<IssueKind, std::size_t> issue_counts;
  std::size_t completeness_count = 0;
  std::size_t adherence_count = 0;
};

struct ValidationReport {
  std::string template_id;
  std::string template_version;
  std::vector<Issue> issues;         // row-major, then template field order
  std::vector<IssueCluster> clusters;  // keyed by (kind, column_key)
  Summary summary;
};

// Issues are data, not failures; always returns.
std::vector<Issue> validate_cell(const Field& f, const Cell& c);

ValidationReport validate_table(const ResolvedTemplate& rt, const Table& t);

// Pure derivation from the issue list; validate_table already populates this.
Summary summarize(const ValidationReport& report, std::size_t total_records);

// Report serialization: top-level keys template {id, version}, summary,
// clusters, issues. This exact document is the service contract.
std::string report_to_json(const ValidationReport& report);

}  // namespace mdv
