#pragma once

#include <map>
#include <string>

#include "syncount/counts.hpp"
#include "syncount/model.hpp"

namespace syncount {

struct PerplexityReport {
  double perplexity = 0.0;
  double token_count = 0.0;  // in-lexicon tokens scored
  double oov_tokens_dropped = 0.0;
  std::size_t oov_types_dropped = 0;
};

// 2^(-(1/N) Σ_f c(f) log₂ p(f)) over in-lexicon forms; OOV tokens are excluded
// and reported. Throws std::invalid_argument when no in-lexicon tokens remain.
PerplexityReport perplexity(const Model& model, const CountTable& counts);

// p̂(t, ℓ, s | f) per form, from supervised counts.
using SupervisedTable = std::map<std::string, AnalysisDistribution, std::less<>>;
SupervisedTable supervised_mle(const ReferenceCounts& reference);

struct KlReport {
  double weighted_kl_bits = 0.0;   // Σ_f p̂(f) KL(p̂(·|f) ‖ p(·|f))
  double token_average_bits = 0.0; // (1/N) Σ_i log₂ p̂(a_i|f_i) / p(a_i|f_i)
  double token_count = 0.0;
  double dropped_tokens = 0.0;     // carried over from the (filtered) reference
};

// Both forms of the supervised KL evaluation. The reference must already be
// filtered to the lexicon; an unlisted analysis throws LexiconError.
KlReport kl_eval(const Model& model, const ReferenceCounts& reference);

}  // namespace syncount
