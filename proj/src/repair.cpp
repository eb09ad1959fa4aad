#include "mdv/repair.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>
#include <sstream>
#include <unordered_set>

#include "json.hpp"
#include "mdv/errors.hpp"

namespace mdv {

std::size_t edit_distance(const std::string& a, const std::string& b) {
  const std::size_t m = a.size(), n = b.size();
  if (m == 0) return n;
  if (n == 0) return m;
  std::vector<std::size_t> prev(n + 1), cur(n + 1);
  for (std::size_t j = 0; j <= n; ++j) prev[j] = j;
  for (std::size_t i = 1; i <= m; ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= n; ++j) {
      std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[n];
}

std::string to_string(SuggestionProvenance p) {
  switch (p) {
    case SuggestionProvenance::Distance: return "distance";
    case SuggestionProvenance::Synonym: return "synonym";
    case SuggestionProvenance::Coercion: return "coercion";
    case SuggestionProvenance::Semantic: return "semantic";
  }
  return "distance";
}

namespace {

void sort_suggestions(std::vector<Suggestion>& s) {
  std::stable_sort(s.begin(), s.end(), [](const Suggestion& a, const Suggestion& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.value < b.value;
  });
}

std::string strip_quotes_and_spaces(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  if (e - b >= 2 && ((s[b] == '"' && s[e - 1] == '"') || (s[b] == '\'' && s[e - 1] == '\''))) {
    ++b;
    --e;
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  }
  return s.substr(b, e - b);
}

}  // namespace

std::vector<Suggestion> suggest_categorical(const Field& f, const std::string& observed,
                                            const SynonymIndex& idx) {
  std::string norm = normalize_token(strip_quotes_and_spaces(observed));
  if (norm.empty()) return {};

  // Exact synonym-index hit wins outright.
  auto hit = idx.entries.find(norm);
  if (hit != idx.entries.end())
    return {{hit->second, 1.0, SuggestionProvenance::Synonym}};

  if (!f.value_set) return {};
  std::size_t threshold = std::max<std::size_t>(
      2, static_cast<std::size_t>(std::ceil(0.34 * static_cast<double>(norm.size()))));

  // label -> best score among the label and its synonyms
  std::vector<Suggestion> best;
  auto consider = [&](const std::string& candidate_text, const std::string& label) {
    std::string cnorm = normalize_token(candidate_text);
    std::size_t d = edit_distance(norm, cnorm);
    if (d > threshold) return;
    double denom = static_cast<double>(std::max(norm.size(), cnorm.size()));
    double score = denom > 0 ? 1.0 - static_cast<double>(d) / denom : 0.0;
    auto it = std::find_if(best.begin(), best.end(),
                           [&](const Suggestion& s) { return s.value == label; });
    if (it == best.end())
      best.push_back({label, score, SuggestionProvenance::Distance});
    else if (score > it->score)
      it->score = score;
  };
  for (const auto& term : f.value_set->inline_terms) {
    consider(term.label, term.label);
    for (const auto& syn : term.synonyms) consider(syn, term.label);
  }
  sort_suggestions(best);
  if (best.size() > 3) best.resize(3);
  return best;
}

namespace {

bool validates_cleanly(const Field& f, const std::string& value) {
  Cell probe{f.key, value, value.empty()};
  return validate_cell(f, probe).empty();
}

// Removes thousands separators and converts a lone comma decimal mark.
std::string normalize_number(const std::string& s) {
  std::string out = s;
  std::size_t commas = std::count(out.begin(), out.end(), ',');
  std::size_t dots = std::count(out.begin(), out.end(), '.');
  if (commas == 1 && dots == 0) {
    // 3,14 -> 3.14 unless it looks like a thousands group (1,234)
    std::size_t pos = out.find(',');
    if (out.size() - pos - 1 == 3)
      out.erase(pos, 1);
    else
      out[pos] = '.';
  } else if (commas > 0) {
    out.erase(std::remove(out.begin(), out.end(), ','), out.end());
  }
  return out;
}

std::optional<std::string> coerce_temporal(const std::string& s, const Field& f) {
  auto two = [](int v) {
    std::string t = std::to_string(v);
    return t.size() == 1 ? "0" + t : t;
  };
  // YYYY/MM/DD -> YYYY-MM-DD
  if (s.size() == 10 && s[4] == '/' && s[7] == '/') {
    std::string fixed = s;
    fixed[4] = '-';
    fixed[7] = '-';
    return fixed;
  }
  // MM/DD/YYYY only when unambiguous (day > 12); DD-MM-YYYY stays rejected.
  if (s.size() == 10 && s[2] == '/' && s[5] == '/') {
    int mo = std::atoi(s.substr(0, 2).c_str());
    int d = std::atoi(s.substr(3, 2).c_str());
    if (d > 12 && mo >= 1 && mo <= 12)
      return s.substr(6, 4) + "-" + two(mo) + "-" + two(d);
    return std::nullopt;
  }
  (void)f;
  return std::nullopt;
}

}  // namespace

std::optional<Suggestion> coerce_literal(const Field& f, const std::string& observed) {
  if (f.datatype == Datatype::Categorical) return std::nullopt;

  std::string v = strip_quotes_and_spaces(observed);

  if (f.datatype == Datatype::Integer || f.datatype == Datatype::Decimal)
    v = normalize_number(v);

  if (f.datatype == Datatype::Boolean) {
    const auto& lex = f.boolean_lexicon();
    auto iequals = [](const std::string& a, const std::string& b) {
      return a.size() == b.size() &&
             std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
               return std::tolower(static_cast<unsigned char>(x)) ==
                      std::tolower(static_cast<unsigned char>(y));
             });
    };
    if (iequals(v, lex.first)) v = lex.first;
    else if (iequals(v, lex.second)) v = lex.second;
  }

  if (f.datatype == Datatype::Temporal && !validates_cleanly(f, v)) {
    if (auto fixed = coerce_temporal(v, f)) v = *fixed;
  }

  if (v == observed) return std::nullopt;  // nothing changed
  if (!validates_cleanly(f, v)) return std::nullopt;
  return Suggestion{v, 0.9, SuggestionProvenance::Coercion};
}

std::vector<Suggestion> DefaultRanker::rank(const Context& ctx, const std::string& observed,
                                            const std::vector<Term>& candidates) {
  (void)ctx;
  std::string norm = normalize_token(observed);
  std::set<std::string> observed_tokens;
  {
    std::istringstream in(norm);
    std::string tok;
    while (in >> tok) observed_tokens.insert(tok);
  }
  std::vector<Suggestion> out;
  for (const auto& cand : candidates) {
    std::set<std::string> cand_tokens;
    auto add_tokens = [&](const std::string& text) {
      std::istringstream in(normalize_token(text));
      std::string tok;
      while (in >> tok) cand_tokens.insert(tok);
    };
    add_tokens(cand.label);
    for (const auto& syn : cand.synonyms) add_tokens(syn);

    std::size_t overlap = 0;
    for (const auto& tok : observed_tokens)
      if (cand_tokens.count(tok)) ++overlap;
    double score;
    if (!observed_tokens.empty() && overlap > 0) {
      score = static_cast<double>(overlap) /
              static_cast<double>(std::max(observed_tokens.size(), cand_tokens.size()));
    } else {
      std::string cnorm = normalize_token(cand.label);
      std::size_t d = edit_distance(norm, cnorm);
      double denom = static_cast<double>(std::max(norm.size(), cnorm.size()));
      score = denom > 0 ? 1.0 - static_cast<double>(d) / denom : 0.0;
    }
    out.push_back({cand.label, std::clamp(score, 0.0, 1.0), SuggestionProvenance::Semantic});
  }
  sort_suggestions(out);
  return out;
}

std::vector<Suggestion> rank_semantic(const Field& f, const std::string& observed,
                                      const std::vector<Term>& candidates,
                                      SemanticRanker& ranker) {
  if (candidates.empty()) return {};
  SemanticRanker::Context ctx{f.key, f.label, f.description.value_or("")};
  std::vector<Suggestion> out;
  try {
    out = ranker.rank(ctx, observed, candidates);
  } catch (...) {
    return {};  // ranker failure never blocks validation
  }
  // Enforce the interface contract: results must come from the candidates.
  std::unordered_set<std::string> allowed;
  for (const auto& c : candidates) allowed.insert(c.label);
  std::erase_if(out, [&](const Suggestion& s) { return !allowed.count(s.value); });
  for (auto& s : out) {
    s.score = std::clamp(s.score, 0.0, 1.0);
    s.provenance = SuggestionProvenance::Semantic;
  }
  return out;
}

std::vector<Suggestion> suggest_for_issue(const ResolvedTemplate& rt, const Issue& issue,
                                          SemanticRanker* ranker) {
  const Field* f = rt.tmpl.find_field(issue.column_key);
  if (!f) return {};
  if (issue.kind == IssueKind::MissingRequired || issue.kind == IssueKind::UnknownColumn ||
      issue.kind == IssueKind::MissingColumn)
    return {};

  std::vector<Suggestion> out;
  if (f->datatype == Datatype::Categorical) {
    SynonymIndex idx = build_synonym_index({f->key, f->value_set->inline_terms});
    out = suggest_categorical(*f, issue.observed, idx);
    if (out.empty() && ranker)
      out = rank_semantic(*f, issue.observed, f->value_set->inline_terms, *ranker);
  } else {
    if (auto coerced = coerce_literal(*f, issue.observed)) out.push_back(*coerced);
    if (out.empty() && f->datatype == Datatype::Boolean) {
      // Distance pass over the lexicon treated as a two-term value set.
      const auto& lex = f->boolean_lexicon();
      Field pseudo = *f;
      pseudo.datatype = Datatype::Categorical;
      pseudo.value_set = ValueSetRef{ValueSetRef::Source::Inline, f->key,
                                     {{lex.first, {}, {}}, {lex.second, {}, {}}}};
      SynonymIndex idx = build_synonym_index({f->key, pseudo.value_set->inline_terms});
      out = suggest_categorical(pseudo, issue.observed, idx);
    }
  }
  // Suggestion soundness: drop anything that would not validate.
  std::erase_if(out, [&](const Suggestion& s) { return !validates_cleanly(*f, s.value); });
  return out;
}

Table apply_patches(const Table& t, const std::vector<Patch>& patches) {
  Table out = t;
  std::set<std::pair<std::size_t, std::string>> seen;
  for (const auto& p : patches) {
    if (!seen.insert({p.row_index, p.column_key}).second)
      throw SemanticError("duplicate patch for row " + std::to_string(p.row_index) +
                          ", column \"" + p.column_key + "\"");
    auto col = out.column_index(p.column_key);
    if (!col)
      throw SemanticError("patch addresses unknown column \"" + p.column_key + "\"");
    Record* rec = nullptr;
    for (auto& r : out.records)
      if (r.row_index == p.row_index) rec = &r;
    if (!rec)
      throw SemanticError("patch addresses nonexistent row " + std::to_string(p.row_index));
    rec->cells[*col].raw = p.new_value;
    rec->cells[*col].was_blank = false;
  }
  return out;
}

std::vector<Patch> patches_from_json(const std::string& json_text) {
  using json = nlohmann::json;
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed patch list: ") + e.what());
  }
  if (!j.is_array()) throw ParseError("patch list must be a JSON array");
  std::vector<Patch> out;
  for (const auto& pj : j) {
    if (!pj.is_object() || !pj.contains("row") || !pj.contains("column") ||
        !pj.contains("value"))
      throw ParseError("each patch needs row, column, value");
    out.push_back({pj["row"].get<std::size_t>(), pj["column"].get<std::string>(),
                   pj["value"].get<std::string>()});
  }
  return out;
}

std::string patches_to_json(const std::vector<Patch>& patches) {
  using json = nlohmann::ordered_json;
  json j = json::array();
  for (const auto& p : patches)
    j.push_back({{"row", p.row_index}, {"column", p.column_key}, {"value", p.new_value}});
  return j.dump(2) + "\n";
}

}  // namespace mdv
