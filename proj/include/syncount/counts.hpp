#pragma once

#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "syncount/lexicon.hpp"

namespace syncount {

// Surface form -> nonnegative token count.
class CountTable {
 public:
  using Map = std::map<std::string, double, std::less<>>;

  // Accumulates; throws std::invalid_argument for negative or non-finite counts.
  void add(std::string_view form, double count);
  double get(std::string_view form) const;

  // Sum in form order.
  double total() const;
  std::size_t size() const { return counts_.size(); }
  bool empty() const { return counts_.empty(); }
  bool integral() const;

  Map::const_iterator begin() const { return counts_.begin(); }
  Map::const_iterator end() const { return counts_.end(); }

  bool operator==(const CountTable&) const = default;

 private:
  Map counts_;
};

// Counts resolved against a lexicon, in form order.
struct IndexedCounts {
  std::vector<std::pair<FormId, double>> counts;
  double total = 0.0;
};

struct FilteredCounts {
  CountTable kept;
  double dropped_tokens = 0.0;
  std::size_t dropped_types = 0;
};

// Splits off forms the lexicon does not list.
FilteredCounts filter_counts(const Lexicon& lexicon, const CountTable& counts);
// Throws LexiconError on the first form the lexicon does not list.
IndexedCounts index_counts(const Lexicon& lexicon, const CountTable& counts);

// `form TAB count` per line; blank lines and lines starting with '#' are skipped.
CountTable parse_counts(std::string_view text);
std::string write_counts(const CountTable& counts);

// Supervised (disambiguated) token counts keyed by ⟨t, ℓ, s, f⟩.
class ReferenceCounts {
 public:
  using PerForm = std::map<AnalysisKey, double>;
  using Map = std::map<std::string, PerForm, std::less<>>;

  void add(const AnalysisKey& analysis, std::string_view form, double count);
  double total() const;
  bool empty() const { return by_form_.empty(); }
  const Map& by_form() const { return by_form_; }
  // Surface counts obtained by summing out the analyses.
  CountTable surface_counts() const;

  // Tokens removed by filter_reference because the lexicon does not list them.
  double dropped_tokens() const { return dropped_tokens_; }
  void set_dropped_tokens(double tokens) { dropped_tokens_ = tokens; }

  bool operator==(const ReferenceCounts&) const = default;

 private:
  Map by_form_;
  double dropped_tokens_ = 0.0;
};

// Keeps the entries whose ⟨t, ℓ, s⟩ -> f is listed in the lexicon; the rest are
// counted in dropped_tokens().
ReferenceCounts filter_reference(const Lexicon& lexicon, const ReferenceCounts& reference);

// Header line, then `lemma TAB form TAB features TAB count`.
ReferenceCounts parse_reference(std::string_view text);
std::string write_reference(const ReferenceCounts& reference, std::string_view count_column = "count");

// Shortest decimal text that parses back to the same double.
std::string format_number(double value);
double parse_number(std::string_view text, std::size_t line = 0);

}  // namespace syncount
