#include "syncount/model.hpp"

#include <cmath>
#include <stdexcept>

#include "syncount/numeric.hpp"

namespace syncount {

std::string to_string(SlotModelKind kind) {
  switch (kind) {
    case SlotModelKind::kUnif:
      return "unif";
    case SlotModelKind::kFree:
      return "free";
    case SlotModelKind::kLinear:
      return "linear";
    case SlotModelKind::kNeural:
      return "neural";
  }
  return "?";
}

std::optional<SlotModelKind> parse_slot_model_kind(std::string_view name) {
  if (name == "unif") return SlotModelKind::kUnif;
  if (name == "free") return SlotModelKind::kFree;
  if (name == "linear") return SlotModelKind::kLinear;
  if (name == "neural") return SlotModelKind::kNeural;
  return std::nullopt;
}

std::string SlotModelSpec::name() const {
  if (kind != SlotModelKind::kNeural) return to_string(kind);
  std::string n = "neural-k" + std::to_string(layers) + "-d" + std::to_string(hidden);
  if (biases) n += "-bias";
  return n;
}

void SlotModelSpec::validate() const {
  if (kind == SlotModelKind::kNeural) {
    if (layers < 1) throw std::invalid_argument("neural slot model needs at least one layer");
    if (hidden < 1) throw std::invalid_argument("neural slot model needs a positive hidden width");
  }
}

double AnalysisDistribution::probability(const AnalysisKey& analysis) const {
  for (const auto& [a, p] : entries)
    if (a == analysis) return p;
  return 0.0;
}

// ---------------------------------------------------------------------------

Model::Model(std::shared_ptr<const Lexicon> lexicon, SlotModelSpec spec)
    : lexicon_(std::move(lexicon)), spec_(spec) {
  if (!lexicon_) throw std::invalid_argument("model needs a lexicon");
  spec_.validate();
  if (spec_.kind != SlotModelKind::kNeural) {
    spec_.layers = 0;
    spec_.hidden = 0;
    spec_.biases = false;
  }
  const auto& lex = *lexicon_;

  layout_.tag_offset = 0;
  layout_.num_tag = lex.num_tags();
  layout_.lexeme_offset = layout_.num_tag;
  layout_.num_lexeme = lex.num_lexemes();
  layout_.slot_offset = layout_.lexeme_offset + layout_.num_lexeme;

  const auto dim = static_cast<Eigen::Index>(lex.feature_space().size());
  slot_features_.resize(dim, static_cast<Eigen::Index>(lex.num_slots()));
  for (std::size_t s = 0; s < lex.num_slots(); ++s) {
    slot_features_.col(static_cast<Eigen::Index>(s)) =
        lex.feature_space().featurize(lex.tags()[lex.tag_of_slot(s)], lex.slot(s));
  }

  switch (spec_.kind) {
    case SlotModelKind::kUnif:
      layout_.num_slot = 0;
      break;
    case SlotModelKind::kFree:
      layout_.num_slot = lex.num_slots();
      break;
    case SlotModelKind::kLinear:
    case SlotModelKind::kNeural:
      network_.emplace(dim, spec_.depth(), spec_.hidden, spec_.biases);
      layout_.num_slot = static_cast<std::size_t>(network_->parameter_count());
      break;
  }

  theta_ = VectorXd::Zero(static_cast<Eigen::Index>(layout_.size()));
  refresh();
}

void Model::set_parameters(VectorXd theta) {
  if (static_cast<std::size_t>(theta.size()) != layout_.size())
    throw std::invalid_argument("parameter vector has " + std::to_string(theta.size()) + " entries, model needs " +
                                std::to_string(layout_.size()));
  if (!theta.allFinite()) throw NumericalError("non-finite model parameter");
  theta_ = std::move(theta);
  refresh();
}

void Model::refresh() {
  const auto& lex = *lexicon_;
  log_tag_ = log_softmax(theta_.segment(static_cast<Eigen::Index>(layout_.tag_offset),
                                        static_cast<Eigen::Index>(layout_.num_tag)));

  log_lexeme_.resize(static_cast<Eigen::Index>(lex.num_lexemes()));
  for (std::size_t t = 0; t < lex.num_tags(); ++t) {
    const auto first = static_cast<Eigen::Index>(lex.lexeme_offset(t));
    const auto n = static_cast<Eigen::Index>(lex.lexemes(t).size());
    log_lexeme_.segment(first, n) =
        log_softmax(theta_.segment(static_cast<Eigen::Index>(layout_.lexeme_offset) + first, n));
  }

  const auto num_slots = static_cast<Eigen::Index>(lex.num_slots());
  switch (spec_.kind) {
    case SlotModelKind::kUnif:
      slot_scores_ = VectorXd::Zero(num_slots);
      break;
    case SlotModelKind::kFree:
      slot_scores_ = theta_.segment(static_cast<Eigen::Index>(layout_.slot_offset), num_slots);
      break;
    case SlotModelKind::kLinear:
    case SlotModelKind::kNeural:
      slot_scores_ = network_->forward(theta_.data() + layout_.slot_offset, slot_features_);
      break;
  }

  log_slot_.resize(num_slots);
  for (std::size_t t = 0; t < lex.num_tags(); ++t) {
    const auto first = static_cast<Eigen::Index>(lex.slot_offset(t));
    const auto n = static_cast<Eigen::Index>(lex.slots(t).size());
    log_slot_.segment(first, n) = log_softmax(slot_scores_.segment(first, n));
  }
}

VectorXd Model::tag_distribution() const { return log_tag_.array().exp(); }

VectorXd Model::lexeme_distribution(const Tag& tag) const {
  const auto t = lexicon_->require_tag(tag);
  return log_lexeme_
      .segment(static_cast<Eigen::Index>(lexicon_->lexeme_offset(t)),
               static_cast<Eigen::Index>(lexicon_->lexemes(t).size()))
      .array()
      .exp();
}

VectorXd Model::slot_distribution(const Tag& tag) const {
  const auto t = lexicon_->require_tag(tag);
  return log_slot_
      .segment(static_cast<Eigen::Index>(lexicon_->slot_offset(t)),
               static_cast<Eigen::Index>(lexicon_->slots(t).size()))
      .array()
      .exp();
}

double Model::log_joint(const Analysis& a) const {
  return log_tag_(static_cast<Eigen::Index>(a.tag)) + log_lexeme_(static_cast<Eigen::Index>(a.lexeme)) +
         log_slot_(static_cast<Eigen::Index>(a.slot)) + std::log(a.weight);
}

double Model::log_form_marginal(FormId form) const {
  const auto analyses = lexicon_->analyses(form);
  VectorXd terms(static_cast<Eigen::Index>(analyses.size()));
  for (std::size_t i = 0; i < analyses.size(); ++i) terms(static_cast<Eigen::Index>(i)) = log_joint(analyses[i]);
  return log_sum_exp(terms);
}

double Model::form_marginal(std::string_view form) const {
  auto f = lexicon_->form_id(form);
  if (!f) return 0.0;
  return std::exp(log_form_marginal(*f));
}

VectorXd Model::posterior(FormId form) const {
  const auto analyses = lexicon_->analyses(form);
  VectorXd terms(static_cast<Eigen::Index>(analyses.size()));
  for (std::size_t i = 0; i < analyses.size(); ++i) terms(static_cast<Eigen::Index>(i)) = log_joint(analyses[i]);
  return softmax(terms);
}

AnalysisDistribution Model::posterior(std::string_view form) const {
  auto f = lexicon_->form_id(form);
  if (!f) throw LexiconError("form '" + std::string(form) + "' is not in the lexicon");
  const VectorXd p = posterior(*f);
  AnalysisDistribution out{std::string(form), {}};
  const auto analyses = lexicon_->analyses(*f);
  for (std::size_t i = 0; i < analyses.size(); ++i)
    out.entries.emplace_back(lexicon_->key(analyses[i]), p(static_cast<Eigen::Index>(i)));
  return out;
}

// ---------------------------------------------------------------------------

ExpectedCounts expected_counts(const Model& model, const IndexedCounts& counts) {
  const auto& lex = model.lexicon();
  ExpectedCounts e;
  e.tag = VectorXd::Zero(static_cast<Eigen::Index>(lex.num_tags()));
  e.lexeme = VectorXd::Zero(static_cast<Eigen::Index>(lex.num_lexemes()));
  e.slot = VectorXd::Zero(static_cast<Eigen::Index>(lex.num_slots()));
  for (const auto& [f, c] : counts.counts) {
    if (c == 0.0) continue;
    const VectorXd post = model.posterior(f);
    const auto analyses = lex.analyses(f);
    for (std::size_t i = 0; i < analyses.size(); ++i) {
      const double share = c * post(static_cast<Eigen::Index>(i));
      e.tag(static_cast<Eigen::Index>(analyses[i].tag)) += share;
      e.lexeme(static_cast<Eigen::Index>(analyses[i].lexeme)) += share;
      e.slot(static_cast<Eigen::Index>(analyses[i].slot)) += share;
    }
    e.total += c;
  }
  return e;
}

double log_likelihood(const Model& model, const IndexedCounts& counts) {
  CompensatedSum<double> sum;
  for (const auto& [f, c] : counts.counts) {
    if (c == 0.0) continue;
    const double lp = model.log_form_marginal(f);
    if (!std::isfinite(lp))
      throw NumericalError("form '" + model.lexicon().forms()[f] + "' has non-finite log-probability");
    sum.add(c * lp);
  }
  return sum.value();
}

double objective(const Model& model, const IndexedCounts& counts, double lambda) {
  if (lambda < 0.0) throw std::invalid_argument("lambda must be nonnegative");
  return log_likelihood(model, counts) - 0.5 * lambda * model.parameters().squaredNorm();
}

double objective(const Model& model, const CountTable& counts, double lambda) {
  return objective(model, index_counts(model.lexicon(), counts), lambda);
}

double complete_data_objective(const Model& model, const ExpectedCounts& counts, double lambda) {
  auto dot = [](const VectorXd& n, const VectorXd& logp) {
    CompensatedSum<double> sum;
    for (Eigen::Index i = 0; i < n.size(); ++i)
      if (n(i) != 0.0) sum.add(n(i) * logp(i));
    return sum.value();
  };
  return dot(counts.tag, model.log_tag_probs()) + dot(counts.lexeme, model.log_lexeme_probs()) +
         dot(counts.slot, model.log_slot_probs()) - 0.5 * lambda * model.parameters().squaredNorm();
}

VectorXd complete_data_gradient(const Model& model, const ExpectedCounts& counts, double lambda) {
  const auto& lex = model.lexicon();
  const auto& layout = model.layout();
  VectorXd grad = -lambda * model.parameters();

  // d/dz of Σ_i n_i log softmax(z)_i is n - (Σ n) softmax(z), per normalization group.
  const double total = counts.tag.sum();
  grad.segment(static_cast<Eigen::Index>(layout.tag_offset), static_cast<Eigen::Index>(layout.num_tag)) +=
      counts.tag - total * VectorXd(model.log_tag_probs().array().exp());

  VectorXd slot_grad(static_cast<Eigen::Index>(lex.num_slots()));
  for (std::size_t t = 0; t < lex.num_tags(); ++t) {
    const double n_t = counts.tag(static_cast<Eigen::Index>(t));
    const auto lfirst = static_cast<Eigen::Index>(lex.lexeme_offset(t));
    const auto ln = static_cast<Eigen::Index>(lex.lexemes(t).size());
    grad.segment(static_cast<Eigen::Index>(layout.lexeme_offset) + lfirst, ln) +=
        counts.lexeme.segment(lfirst, ln) - n_t * VectorXd(model.log_lexeme_probs().segment(lfirst, ln).array().exp());

    const auto sfirst = static_cast<Eigen::Index>(lex.slot_offset(t));
    const auto sn = static_cast<Eigen::Index>(lex.slots(t).size());
    slot_grad.segment(sfirst, sn) =
        counts.slot.segment(sfirst, sn) - n_t * VectorXd(model.log_slot_probs().segment(sfirst, sn).array().exp());
  }

  switch (model.spec().kind) {
    case SlotModelKind::kUnif:
      break;
    case SlotModelKind::kFree:
      grad.segment(static_cast<Eigen::Index>(layout.slot_offset), static_cast<Eigen::Index>(layout.num_slot)) +=
          slot_grad;
      break;
    case SlotModelKind::kLinear:
    case SlotModelKind::kNeural: {
      const auto& net = *model.network();
      const double* params = model.parameters().data() + layout.slot_offset;
      SlotNetwork<double>::Activations trace;
      net.forward(params, model.slot_features(), &trace);
      net.backward(params, trace, slot_grad, grad.data() + layout.slot_offset);
      break;
    }
  }
  return grad;
}

VectorXd gradient(const Model& model, const IndexedCounts& counts, double lambda) {
  if (lambda < 0.0) throw std::invalid_argument("lambda must be nonnegative");
  return complete_data_gradient(model, expected_counts(model, counts), lambda);
}

VectorXd gradient(const Model& model, const CountTable& counts, double lambda) {
  return gradient(model, index_counts(model.lexicon(), counts), lambda);
}

}  // namespace syncount
