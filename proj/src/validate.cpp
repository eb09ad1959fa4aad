#include "mdv/validate.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <map>
#include <set>
#include <unordered_set>

#include "json.hpp"

namespace mdv {

std::string to_string(IssueKind k) {
  switch (k) {
    case IssueKind::MissingRequired: return "missing_required";
    case IssueKind::TypeMismatch: return "type_mismatch";
    case IssueKind::OutOfRange: return "out_of_range";
    case IssueKind::BadLength: return "bad_length";
    case IssueKind::NotInValueSet: return "not_in_value_set";
    case IssueKind::BadTemporal: return "bad_temporal";
    case IssueKind::BadUri: return "bad_uri";
    case IssueKind::BadEmail: return "bad_email";
    case IssueKind::BadBoolean: return "bad_boolean";
    case IssueKind::UnknownColumn: return "unknown_column";
    case IssueKind::MissingColumn: return "missing_column";
  }
  return "type_mismatch";
}

IssueCategory category_of(IssueKind k) {
  return k == IssueKind::MissingRequired ? IssueCategory::Completeness
                                         : IssueCategory::Adherence;
}

namespace detail {

bool is_integer_literal(const std::string& s) {
  std::size_t i = 0;
  if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
  if (i >= s.size()) return false;
  for (; i < s.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  return true;
}

bool is_decimal_literal(const std::string& s) {
  std::size_t i = 0;
  if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
  std::size_t digits = 0;
  while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i, ++digits;
  if (i < s.size() && s[i] == '.') {
    ++i;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i, ++digits;
  }
  if (digits == 0) return false;
  if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
    ++i;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
    std::size_t exp_digits = 0;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i, ++exp_digits;
    if (exp_digits == 0) return false;
  }
  return i == s.size();
}

namespace {

bool match_digits(const std::string& s, std::size_t pos, std::size_t count) {
  if (pos + count > s.size()) return false;
  for (std::size_t i = 0; i < count; ++i)
    if (!std::isdigit(static_cast<unsigned char>(s[pos + i]))) return false;
  return true;
}

int num(const std::string& s, std::size_t pos, std::size_t count) {
  return std::atoi(s.substr(pos, count).c_str());
}

bool valid_date_parts(int y, int mo, int d) {
  if (mo < 1 || mo > 12) return false;
  static const int days[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  int dim = days[mo - 1];
  bool leap = (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
  if (mo == 2 && leap) dim = 29;
  return d >= 1 && d <= dim;
}

}  // namespace

// Exact match against the canonical format for the granularity, with
// calendar validity.
bool is_valid_temporal(const std::string& s, TemporalGranularity g) {
  switch (g) {
    case TemporalGranularity::Year:
      return s.size() == 4 && match_digits(s, 0, 4);
    case TemporalGranularity::Month:
      return s.size() == 7 && match_digits(s, 0, 4) && s[4] == '-' && match_digits(s, 5, 2) &&
             num(s, 5, 2) >= 1 && num(s, 5, 2) <= 12;
    case TemporalGranularity::Day:
      return s.size() == 10 && match_digits(s, 0, 4) && s[4] == '-' && match_digits(s, 5, 2) &&
             s[7] == '-' && match_digits(s, 8, 2) &&
             valid_date_parts(num(s, 0, 4), num(s, 5, 2), num(s, 8, 2));
    case TemporalGranularity::Minute:
      return s.size() == 16 && is_valid_temporal(s.substr(0, 10), TemporalGranularity::Day) &&
             s[10] == 'T' && match_digits(s, 11, 2) && s[13] == ':' && match_digits(s, 14, 2) &&
             num(s, 11, 2) < 24 && num(s, 14, 2) < 60;
    case TemporalGranularity::Second:
      return s.size() == 19 &&
             is_valid_temporal(s.substr(0, 16), TemporalGranularity::Minute) && s[16] == ':' &&
             match_digits(s, 17, 2) && num(s, 17, 2) < 60;
  }
  return false;
}

bool is_valid_uri(const std::string& s) {
  auto pos = s.find("://");
  if (pos == std::string::npos) return false;
  std::string scheme = s.substr(0, pos);
  std::transform(scheme.begin(), scheme.end(), scheme.begin(), ::tolower);
  if (scheme != "http" && scheme != "https" && scheme != "ftp") return false;
  return pos + 3 < s.size();  // non-empty authority/path
}

bool is_valid_email(const std::string& s) {
  auto at = s.find('@');
  if (at == std::string::npos || at == 0 || at + 1 >= s.size()) return false;
  if (s.find('@', at + 1) != std::string::npos) return false;
  std::string domain = s.substr(at + 1);
  auto dot = domain.find('.');
  if (dot == std::string::npos || dot == 0 || dot + 1 >= domain.size()) return false;
  return s.find(' ') == std::string::npos;
}

bool iequals(const std::string& a, const std::string& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::tolower(static_cast<unsigned char>(a[i])) !=
        std::tolower(static_cast<unsigned char>(b[i])))
      return false;
  return true;
}

}  // namespace detail

std::vector<Issue> validate_cell(const Field& f, const Cell& c) {
  std::vector<Issue> out;
  auto add = [&](IssueKind kind, std::string expected) {
    out.push_back({0, f.key, kind, c.raw, std::move(expected)});
  };

  if (c.raw.empty()) {
    if (f.required) add(IssueKind::MissingRequired, "a value is required");
    return out;  // missing_required suppresses other checks; blank optional is fine
  }

  const Constraints& cons = f.constraints;
  switch (f.datatype) {
    case Datatype::Integer: {
      if (!detail::is_integer_literal(c.raw)) {
        add(IssueKind::TypeMismatch, "integer");
        break;
      }
      double v = std::strtod(c.raw.c_str(), nullptr);
      if ((cons.min_value && v < *cons.min_value) || (cons.max_value && v > *cons.max_value))
        add(IssueKind::OutOfRange,
            "integer between " +
                (cons.min_value ? std::to_string(static_cast<long long>(*cons.min_value))
                                : std::string("-inf")) +
                " and " +
                (cons.max_value ? std::to_string(static_cast<long long>(*cons.max_value))
                                : std::string("+inf")));
      break;
    }
    case Datatype::Decimal: {
      if (!detail::is_decimal_literal(c.raw)) {
        add(IssueKind::TypeMismatch, "decimal number");
        break;
      }
      double v = std::strtod(c.raw.c_str(), nullptr);
      if ((cons.min_value && v < *cons.min_value) || (cons.max_value && v > *cons.max_value))
        add(IssueKind::OutOfRange,
            "number between " +
                (cons.min_value ? std::to_string(*cons.min_value) : std::string("-inf")) +
                " and " +
                (cons.max_value ? std::to_string(*cons.max_value) : std::string("+inf")));
      break;
    }
    case Datatype::Text: {
      std::size_t len = c.raw.size();
      if ((cons.min_length && len < *cons.min_length) ||
          (cons.max_length && len > *cons.max_length))
        add(IssueKind::BadLength,
            "text of length " + std::to_string(cons.min_length.value_or(0)) + ".." +
                (cons.max_length ? std::to_string(*cons.max_length) : std::string("*")));
      break;
    }
    case Datatype::Temporal: {
      TemporalGranularity g = f.granularity();
      if (!detail::is_valid_temporal(c.raw, g))
        add(IssueKind::BadTemporal,
            cons.temporal_format.value_or(canonical_temporal_format(g)));
      break;
    }
    case Datatype::Categorical: {
      const auto& terms = f.value_set ? f.value_set->inline_terms : std::vector<Term>{};
      bool hit = std::any_of(terms.begin(), terms.end(),
                             [&](const Term& t) { return t.label == c.raw; });
      if (!hit) add(IssueKind::NotInValueSet, "one of the permissible values for " + f.key);
      break;
    }
    case Datatype::Boolean: {
      const auto& lex = f.boolean_lexicon();
      if (!detail::iequals(c.raw, lex.first) && !detail::iequals(c.raw, lex.second))
        add(IssueKind::BadBoolean, lex.first + " or " + lex.second);
      break;
    }
    case Datatype::Uri: {
      if (!detail::is_valid_uri(c.raw))
        add(IssueKind::BadUri, "absolute http/https/ftp URI");
      break;
    }
    case Datatype::Email: {
      if (!detail::is_valid_email(c.raw))
        add(IssueKind::BadEmail, "address of the form local@domain");
      break;
    }
  }
  return out;
}

ValidationReport validate_table(const ResolvedTemplate& rt, const Table& t) {
  const Template& tmpl = rt.tmpl;
  ValidationReport report;
  report.template_id = tmpl.id;
  report.template_version = tmpl.version.str();

  std::set<std::string> headers(t.headers.begin(), t.headers.end());
  std::unordered_set<std::string> known;
  for (const auto& f : tmpl.fields) known.insert(f.key);

  for (const auto& f : tmpl.fields) {
    if (!headers.count(f.key))
      report.issues.push_back(
          {0, f.key, IssueKind::MissingColumn, "", "column \"" + f.key + "\" is required"});
  }
  for (const auto& h : t.headers) {
    if (!known.count(h))
      report.issues.push_back(
          {0, h, IssueKind::UnknownColumn, h, "no such field in template " + tmpl.id});
  }

  // Row-major, then template field order.
  for (const auto& rec : t.records) {
    for (const auto& f : tmpl.fields) {
      auto col = t.column_index(f.key);
      if (!col) continue;  // missing column already reported
      const Cell& cell = rec.cells[*col];
      for (Issue issue : validate_cell(f, cell)) {
        issue.row_index = rec.row_index;
        report.issues.push_back(std::move(issue));
      }
    }
  }

  // Clusters keyed by (kind, column), in first-appearance order.
  for (std::size_t i = 0; i < report.issues.size(); ++i) {
    const Issue& issue = report.issues[i];
    auto it = std::find_if(report.clusters.begin(), report.clusters.end(),
                           [&](const IssueCluster& cl) {
                             return cl.kind == issue.kind && cl.column_key == issue.column_key;
                           });
    if (it == report.clusters.end()) {
      report.clusters.push_back({issue.kind, issue.column_key, {i}});
    } else {
      it->issue_indices.push_back(i);
    }
  }

  report.summary = summarize(report, t.records.size());
  return report;
}

Summary summarize(const ValidationReport& report, std::size_t total_records) {
  Summary s;
  s.total_records = total_records;
  std::set<std::size_t> rows;
  for (const auto& issue : report.issues) {
    ++s.issue_counts[issue.kind];
    if (issue.category() == IssueCategory::Completeness)
      ++s.completeness_count;
    else
      ++s.adherence_count;
    if (issue.row_index >= 1) rows.insert(issue.row_index);
  }
  s.erroneous_records = rows.size();
  return s;
}

std::string report_to_json(const ValidationReport& report) {
  using json = nlohmann::ordered_json;
  json j;
  j["template"] = {{"id", report.template_id}, {"version", report.template_version}};

  json counts = json::object();
  for (const auto& [kind, n] : report.summary.issue_counts) counts[to_string(kind)] = n;
  j["summary"] = {{"total_records", report.summary.total_records},
                  {"erroneous_records", report.summary.erroneous_records},
                  {"issue_counts", std::move(counts)},
                  {"completeness_count", report.summary.completeness_count},
                  {"adherence_count", report.summary.adherence_count}};

  json clusters = json::array();
  for (const auto& cl : report.clusters) {
    clusters.push_back({{"kind", to_string(cl.kind)},
                        {"column", cl.column_key},
                        {"count", cl.issue_indices.size()},
                        {"issues", cl.issue_indices}});
  }
  j["clusters"] = std::move(clusters);

  json issues = json::array();
  for (const auto& issue : report.issues) {
    issues.push_back({{"row", issue.row_index},
                      {"column", issue.column_key},
                      {"kind", to_string(issue.kind)},
                      {"observed", issue.observed},
                      {"expected", issue.expected},
                      {"category", issue.category() == IssueCategory::Completeness
                                       ? "completeness"
                                       : "adherence"}});
  }
  j["issues"] = std::move(issues);
  return j.dump(2) + "\n";
}

}  // namespace mdv
