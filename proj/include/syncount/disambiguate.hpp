#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "syncount/counts.hpp"
#include "syncount/model.hpp"

namespace syncount {

// c(f) partitioned among the analyses of f.
struct FormPartition {
  std::string form;
  double count = 0.0;
  std::vector<std::pair<AnalysisKey, double>> shares;
};

struct FractionalCounts {
  std::vector<FormPartition> forms;  // in form order

  // Σ over forms of Σ over shares, summed form by form.
  double total() const;
  // Same data as supervised-style reference counts.
  ReferenceCounts to_reference() const;
};

// c(f) · p(t, ℓ, s | f) for every analysis of every counted form. The shares of
// a form add up to exactly c(f) in floating point. Throws LexiconError on a
// form the lexicon does not list.
FractionalCounts fractional_counts(const Model& model, const CountTable& counts);

enum class SampleMode { kTuples, kForms };

std::string to_string(SampleMode mode);
std::optional<SampleMode> parse_sample_mode(std::string_view name);

struct SampledType {
  FormId form = 0;
  // Unset in kForms mode.
  std::optional<Analysis> analysis;
};

struct SampleOptions {
  SampleMode mode = SampleMode::kTuples;
  // Draws allowed before giving up.
  std::uint64_t max_draws = 50'000'000;
};

// Number of distinct items (tuples or forms) that have positive probability.
std::size_t support_size(const Model& model, SampleMode mode);

// The first n distinct items seen while drawing ⟨t, ℓ, s, f⟩ i.i.d. from the
// model, in discovery order. Draws landing on an unlisted ⟨t, ℓ, s⟩ are
// discarded. Throws std::invalid_argument when n exceeds the support and
// NumericalError when the draw budget runs out.
std::vector<SampledType> sample_types(const Model& model, std::size_t n, std::uint64_t seed,
                                      const SampleOptions& options = {});

}  // namespace syncount
