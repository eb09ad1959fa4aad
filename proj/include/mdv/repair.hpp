#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mdv/table.hpp"
#include "mdv/terms.hpp"
#include "mdv/validate.hpp"

namespace mdv {

// Classic unit-cost Levenshtein distance.
std::size_t edit_distance(const std::string& a, const std::string& b);

enum class SuggestionProvenance { Distance, Synonym, Coercion, Semantic };

std::string to_string(SuggestionProvenance p);

struct Suggestion {
  std::string value;
  double score = 0;  // in [0,1], higher is better
  SuggestionProvenance provenance = SuggestionProvenance::Distance;

  bool operator==(const Suggestion&) const = default;
};

struct Patch {
  std::size_t row_index = 0;
  std::string column_key;
  std::string new_value;
};

// Scores candidate labels for an observed value; must return a
// permutation-with-scores of its input, never invented values.
class SemanticRanker {
public:
  virtual ~SemanticRanker() = default;
  struct Context {
    std::string field_key;
    std::string field_label;
    std::string field_description;
  };
  virtual std::vector<Suggestion> rank(const Context& ctx, const std::string& observed,
                                       const std::vector<Term>& candidates) = 0;
};

// Deterministic default: token-overlap ratio between observed and
// label+synonyms, falling back to 1 - normalized edit distance.
class DefaultRanker : public SemanticRanker {
public:
  std::vector<Suggestion> rank(const Context& ctx, const std::string& observed,
                               const std::vector<Term>& candidates) override;
};

// Pipeline: synonym-index exact hit (score 1.0), else distance candidates
// within max(2, ceil(0.34 * len)), scored 1 - d/max(len), deduped by label,
// top 3. Sorted by descending score, ties lexicographic by value.
std::vector<Suggestion> suggest_categorical(const Field& f, const std::string& observed,
                                            const SynonymIndex& idx);

// Mechanical fixes (de-quote, trim, separator and case normalization, date
// reformatting); returns a score-0.9 coercion Suggestion only when the
// coerced value validates.
std::optional<Suggestion> coerce_literal(const Field& f, const std::string& observed);

// Delegates to the ranker; a throwing ranker yields an empty list.
std::vector<Suggestion> rank_semantic(const Field& f, const std::string& observed,
                                      const std::vector<Term>& candidates,
                                      SemanticRanker& ranker);

// Full pipeline for one adherence issue; MissingRequired gets no suggestions.
std::vector<Suggestion> suggest_for_issue(const ResolvedTemplate& rt, const Issue& issue,
                                          SemanticRanker* ranker = nullptr);

// Returns a new Table with patched raw values; throws SemanticError for
// out-of-range addresses or duplicate cell addresses.
Table apply_patches(const Table& t, const std::vector<Patch>& patches);

// JSON array of {row, column, value}; shared with the service contract.
std::vector<Patch> patches_from_json(const std::string& json_text);
std::string patches_to_json(const std::vector<Patch>& patches);

}  // namespace mdv
