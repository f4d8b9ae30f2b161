#include "syncount/eval.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "syncount/numeric.hpp"

namespace syncount {

PerplexityReport perplexity(const Model& model, const CountTable& counts) {
  const auto& lex = model.lexicon();
  PerplexityReport report;
  CompensatedSum<double> log2_sum;
  CompensatedSum<double> tokens;
  for (const auto& [form, c] : counts) {
    auto f = lex.form_id(form);
    if (!f) {
      report.oov_tokens_dropped += c;
      ++report.oov_types_dropped;
      continue;
    }
    if (c == 0.0) continue;
    const double lp = model.log_form_marginal(*f);
    if (!std::isfinite(lp)) throw NumericalError("form '" + form + "' has zero probability");
    log2_sum.add(c * lp / std::numbers::ln2);
    tokens.add(c);
  }
  report.token_count = tokens.value();
  if (report.token_count <= 0.0) throw std::invalid_argument("no in-lexicon tokens to evaluate");
  report.perplexity = std::exp2(-log2_sum.value() / report.token_count);
  return report;
}

SupervisedTable supervised_mle(const ReferenceCounts& reference) {
  SupervisedTable table;
  for (const auto& [form, per] : reference.by_form()) {
    double total = 0.0;
    for (const auto& [a, c] : per) total += c;
    if (total <= 0.0) continue;
    AnalysisDistribution dist{form, {}};
    for (const auto& [a, c] : per)
      if (c > 0.0) dist.entries.emplace_back(a, c / total);
    table.emplace(form, std::move(dist));
  }
  return table;
}

KlReport kl_eval(const Model& model, const ReferenceCounts& reference) {
  const auto& lex = model.lexicon();
  KlReport report;
  report.dropped_tokens = reference.dropped_tokens();
  const double n = reference.total();
  if (n <= 0.0) throw std::invalid_argument("reference has no tokens");
  report.token_count = n;

  // Model posterior of one listed analysis of `form`.
  auto model_prob = [&](FormId f, const VectorXd& post, const AnalysisKey& key) {
    auto l = lex.lexeme_index(key.lexeme);
    auto t = lex.tag_index(key.tag);
    auto s = t ? lex.slot_index(*t, key.slot) : std::nullopt;
    if (l && s && key.lexeme.tag == key.tag) {
      const auto analyses = lex.analyses(f);
      for (std::size_t i = 0; i < analyses.size(); ++i)
        if (analyses[i].lexeme == *l && analyses[i].slot == *s) return post(static_cast<Eigen::Index>(i));
    }
    throw LexiconError("reference analysis " + key.lexeme.lemma + " " + format_bundle(key.tag, key.slot) +
                       " of '" + lex.forms()[f] + "' is not in the lexicon");
  };

  CompensatedSum<double> weighted;
  CompensatedSum<double> token_sum;
  for (const auto& [form, per] : reference.by_form()) {
    auto f = lex.form_id(form);
    if (!f) throw LexiconError("reference form '" + form + "' is not in the lexicon");
    double n_f = 0.0;
    for (const auto& [a, c] : per) n_f += c;
    if (n_f <= 0.0) continue;
    const VectorXd post = model.posterior(*f);

    // (a) p̂(f) · Σ_a p̂(a|f) log₂ p̂(a|f)/p(a|f)
    CompensatedSum<double> kl_f;
    for (const auto& [a, c] : per) {
      if (c <= 0.0) continue;
      const double p_hat = c / n_f;
      kl_f.add(p_hat * std::log2(p_hat / model_prob(*f, post, a)));
    }
    weighted.add((n_f / n) * kl_f.value());

    // (b) one term per token, grouped by identical tokens
    for (const auto& [a, c] : per) {
      if (c <= 0.0) continue;
      token_sum.add(c * (std::log2(c / n_f) - std::log2(model_prob(*f, post, a))));
    }
  }
  report.weighted_kl_bits = weighted.value();
  report.token_average_bits = token_sum.value() / n;
  return report;
}

}  // namespace syncount
