#include "syncount/disambiguate.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <random>
#include <set>
#include <stdexcept>
#include <tuple>

#include "syncount/sampler.hpp"

namespace syncount {

namespace {

double ordered_sum(const std::vector<std::pair<AnalysisKey, double>>& shares) {
  double s = 0.0;
  for (const auto& [a, x] : shares) s += x;
  return s;
}

// Bisects over the bit pattern of share i (the sum is monotone in it) for a
// value that makes the left-to-right sum exactly c. Restores it on failure.
bool adjust_share(std::vector<std::pair<AnalysisKey, double>>& shares, std::size_t i, double c) {
  double& x = shares[i].second;
  const double original = x;
  auto sum_with = [&](std::uint64_t bits) {
    x = std::bit_cast<double>(bits);
    return ordered_sum(shares);
  };
  std::uint64_t lo = 0;
  std::uint64_t hi = std::bit_cast<std::uint64_t>(std::max(c, original) * 2.0 + 1.0);
  if (sum_with(lo) <= c && sum_with(hi) >= c) {
    while (lo < hi) {
      const std::uint64_t mid = lo + (hi - lo) / 2;
      if (sum_with(mid) < c) {
        lo = mid + 1;
      } else {
        hi = mid;
      }
    }
    if (sum_with(lo) == c) return true;
  }
  x = original;
  return false;
}

// Moves rounding residue onto one share so that the shares add up to exactly c.
// Intermediate roundings can make some targets unreachable through a given
// share, so candidates are tried from the largest down.
void make_exact(std::vector<std::pair<AnalysisKey, double>>& shares, double c) {
  if (shares.empty() || ordered_sum(shares) == c) return;
  std::vector<std::size_t> order(shares.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return shares[a].second > shares[b].second; });
  for (std::size_t i : order)
    if (adjust_share(shares, i, c)) return;
  throw NumericalError("could not make fractional counts sum to the form count");
}

}  // namespace

double FractionalCounts::total() const {
  double t = 0.0;
  for (const auto& f : forms) t += ordered_sum(f.shares);
  return t;
}

ReferenceCounts FractionalCounts::to_reference() const {
  ReferenceCounts ref;
  for (const auto& f : forms)
    for (const auto& [a, x] : f.shares) ref.add(a, f.form, x);
  return ref;
}

FractionalCounts fractional_counts(const Model& model, const CountTable& counts) {
  const auto& lex = model.lexicon();
  FractionalCounts out;
  for (const auto& [form, c] : counts) {
    auto f = lex.form_id(form);
    if (!f) throw LexiconError("form '" + form + "' is not in the lexicon");
    FormPartition part{form, c, {}};
    const VectorXd post = model.posterior(*f);
    const auto analyses = lex.analyses(*f);
    for (std::size_t i = 0; i < analyses.size(); ++i)
      part.shares.emplace_back(lex.key(analyses[i]), c * post(static_cast<Eigen::Index>(i)));
    make_exact(part.shares, c);
    out.forms.push_back(std::move(part));
  }
  return out;
}

std::string to_string(SampleMode mode) { return mode == SampleMode::kTuples ? "tuples" : "forms"; }

std::optional<SampleMode> parse_sample_mode(std::string_view name) {
  if (name == "tuples") return SampleMode::kTuples;
  if (name == "forms") return SampleMode::kForms;
  return std::nullopt;
}

AncestralSampler::AncestralSampler(const Model& model) : lexicon_(&model.lexicon()) {
  auto distribution = [](const VectorXd& p) {
    return std::discrete_distribution<std::size_t>(p.data(), p.data() + p.size());
  };
  tag_ = distribution(model.tag_distribution());
  for (const auto& tag : lexicon_->tags()) {
    lexeme_.push_back(distribution(model.lexeme_distribution(tag)));
    slot_.push_back(distribution(model.slot_distribution(tag)));
  }
}

std::optional<AncestralDraw> AncestralSampler::draw(Rng& rng) {
  const std::size_t t = tag_(rng);
  const std::size_t l = lexicon_->lexeme_offset(t) + lexeme_[t](rng);
  const std::size_t s = lexicon_->slot_offset(t) + slot_[t](rng);
  const auto cell = lexicon_->realizations(l, s);
  if (cell.empty()) return std::nullopt;
  FormId f = cell[0];
  if (cell.size() > 1) f = cell[std::uniform_int_distribution<std::size_t>(0, cell.size() - 1)(rng)];
  return AncestralDraw{Analysis{t, l, s, 1.0 / static_cast<double>(cell.size())}, f};
}

std::size_t support_size(const Model& model, SampleMode mode) {
  const auto& lex = model.lexicon();
  if (mode == SampleMode::kForms) return lex.num_forms();
  std::size_t n = 0;
  for (FormId f = 0; f < lex.num_forms(); ++f) n += lex.analyses(f).size();
  return n;
}

std::vector<SampledType> sample_types(const Model& model, std::size_t n, std::uint64_t seed,
                                      const SampleOptions& options) {
  if (n < 1) throw std::invalid_argument("sample size must be at least 1");
  const std::size_t support = support_size(model, options.mode);
  if (n > support)
    throw std::invalid_argument("cannot sample " + std::to_string(n) + " distinct " + to_string(options.mode) +
                                " from a support of " + std::to_string(support));

  AncestralSampler sampler(model);
  Rng rng = make_rng(seed);
  std::vector<SampledType> out;
  std::set<std::tuple<std::size_t, std::size_t, FormId>> seen_tuples;
  std::set<FormId> seen_forms;
  for (std::uint64_t draw = 0; draw < options.max_draws; ++draw) {
    const auto d = sampler.draw(rng);
    if (!d) continue;
    const FormId f = d->form;
    if (options.mode == SampleMode::kForms) {
      if (!seen_forms.insert(f).second) continue;
      out.push_back({f, std::nullopt});
    } else {
      if (!seen_tuples.insert({d->analysis.lexeme, d->analysis.slot, f}).second) continue;
      out.push_back({f, d->analysis});
    }
    if (out.size() == n) return out;
  }
  throw NumericalError("found only " + std::to_string(out.size()) + " of " + std::to_string(n) +
                       " distinct items within " + std::to_string(options.max_draws) + " draws");
}

}  // namespace syncount
