#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "syncount/counts.hpp"
#include "syncount/lexicon.hpp"
#include "syncount/slot_network.hpp"
#include "syncount/types.hpp"

namespace syncount {

enum class SlotModelKind { kUnif, kFree, kLinear, kNeural };

std::string to_string(SlotModelKind kind);
std::optional<SlotModelKind> parse_slot_model_kind(std::string_view name);

// Which p(s | t) to use. `layers` and `hidden` only matter for kNeural; the
// linear model is the zero-layer network.
struct SlotModelSpec {
  SlotModelKind kind = SlotModelKind::kFree;
  int layers = 1;
  int hidden = 100;
  bool biases = false;

  static SlotModelSpec unif() { return {SlotModelKind::kUnif, 0, 0, false}; }
  static SlotModelSpec free() { return {SlotModelKind::kFree, 0, 0, false}; }
  static SlotModelSpec linear() { return {SlotModelKind::kLinear, 0, 0, false}; }
  static SlotModelSpec neural(int layers, int hidden = 100, bool biases = false) {
    return {SlotModelKind::kNeural, layers, hidden, biases};
  }

  // Number of hidden layers: 0 for everything except kNeural.
  int depth() const { return kind == SlotModelKind::kNeural ? layers : 0; }
  bool has_network() const { return kind == SlotModelKind::kLinear || kind == SlotModelKind::kNeural; }
  // "unif", "free", "linear", "neural-k2-d100" (+ "-bias")
  std::string name() const;
  // Throws std::invalid_argument.
  void validate() const;

  bool operator==(const SlotModelSpec&) const = default;
};

// Where each parameter group sits in the flat θ: tag logits, then lexeme
// logits (flat ⟨t, ℓ⟩ order), then slot parameters (FREE logits or network).
struct ParameterLayout {
  std::size_t tag_offset = 0;
  std::size_t num_tag = 0;
  std::size_t lexeme_offset = 0;
  std::size_t num_lexeme = 0;
  std::size_t slot_offset = 0;
  std::size_t num_slot = 0;

  std::size_t size() const { return slot_offset + num_slot; }
};

// p(t, ℓ, s | f) over the analyses of one form.
struct AnalysisDistribution {
  std::string form;
  std::vector<std::pair<AnalysisKey, double>> entries;

  double probability(const AnalysisKey& analysis) const;
};

// The Bayesian network p(t) p(ℓ | t) p(s | t) δ(f | t, ℓ, s) over one lexicon.
// Log-probability tables are cached and refreshed by set_parameters.
class Model {
 public:
  // All parameters zero.
  Model(std::shared_ptr<const Lexicon> lexicon, SlotModelSpec spec);

  const Lexicon& lexicon() const { return *lexicon_; }
  const std::shared_ptr<const Lexicon>& lexicon_ptr() const { return lexicon_; }
  const FeatureSpace& feature_space() const { return lexicon_->feature_space(); }
  const SlotModelSpec& spec() const { return spec_; }
  const ParameterLayout& layout() const { return layout_; }

  const VectorXd& parameters() const { return theta_; }
  // Throws std::invalid_argument on a size mismatch, NumericalError on non-finite values.
  void set_parameters(VectorXd theta);
  std::size_t parameter_count() const { return layout_.size(); }

  // Present for LINEAR and NEURAL.
  const std::optional<SlotNetwork<double>>& network() const { return network_; }
  // Multi-hot encodings of every listed ⟨t, s⟩, one column per flat slot index.
  const MatrixXd& slot_features() const { return slot_features_; }

  VectorXd tag_distribution() const;
  VectorXd lexeme_distribution(const Tag& tag) const;
  VectorXd slot_distribution(const Tag& tag) const;

  // Flat log-probability tables.
  const VectorXd& log_tag_probs() const { return log_tag_; }
  const VectorXd& log_lexeme_probs() const { return log_lexeme_; }
  const VectorXd& log_slot_probs() const { return log_slot_; }
  // Unnormalized slot scores (flat ⟨t, s⟩ order).
  const VectorXd& slot_scores() const { return slot_scores_; }

  // log p(t) + log p(ℓ | t) + log p(s | t) + log δ
  double log_joint(const Analysis& analysis) const;

  // p(f); 0 for forms outside the lexicon.
  double form_marginal(std::string_view form) const;
  double log_form_marginal(FormId form) const;

  // Posterior over lexicon.analyses(form), aligned with that span.
  VectorXd posterior(FormId form) const;
  // Throws LexiconError for a form the lexicon does not list.
  AnalysisDistribution posterior(std::string_view form) const;

 private:
  void refresh();

  std::shared_ptr<const Lexicon> lexicon_;
  SlotModelSpec spec_;
  ParameterLayout layout_;
  std::optional<SlotNetwork<double>> network_;
  MatrixXd slot_features_;
  VectorXd theta_;

  VectorXd log_tag_;
  VectorXd log_lexeme_;
  VectorXd slot_scores_;
  VectorXd log_slot_;
};

// Posterior-weighted counts of every tag, ⟨t, ℓ⟩ and ⟨t, s⟩ (flat order).
struct ExpectedCounts {
  VectorXd tag;
  VectorXd lexeme;
  VectorXd slot;
  double total = 0.0;
};

// E-step: partition each count among its analyses under the current model.
ExpectedCounts expected_counts(const Model& model, const IndexedCounts& counts);

// Σ_f c(f) log p(f)
double log_likelihood(const Model& model, const IndexedCounts& counts);
// Σ_f c(f) log p(f) - (λ/2)‖θ‖². Throws NumericalError if a counted form has p(f) = 0.
double objective(const Model& model, const IndexedCounts& counts, double lambda);
double objective(const Model& model, const CountTable& counts, double lambda);

// Supervised objective of fractional counts:
//   Σ_t n_t log p(t) + Σ n_{t,ℓ} log p(ℓ|t) + Σ n_{t,s} log p(s|t) - (λ/2)‖θ‖²
double complete_data_objective(const Model& model, const ExpectedCounts& counts, double lambda);
VectorXd complete_data_gradient(const Model& model, const ExpectedCounts& counts, double lambda);

// Exact gradient of objective() in the canonical parameter order.
VectorXd gradient(const Model& model, const IndexedCounts& counts, double lambda);
VectorXd gradient(const Model& model, const CountTable& counts, double lambda);

}  // namespace syncount
