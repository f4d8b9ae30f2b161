#include <algorithm>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <tuple>

#include "doctest.h"
#include "oracle.hpp"
#include "syncount/disambiguate.hpp"
#include "syncount/eval.hpp"
#include "syncount/synth.hpp"

using namespace syncount;

namespace {

std::shared_ptr<const Lexicon> share(Lexicon lex) { return std::make_shared<const Lexicon>(std::move(lex)); }

// Spearman correlation without tie handling.
double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  auto ranks = [](const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](auto i, auto j) { return v[i] < v[j]; });
    std::vector<double> r(v.size());
    for (std::size_t k = 0; k < idx.size(); ++k) r[idx[k]] = static_cast<double>(k);
    return r;
  };
  const auto ra = ranks(a), rb = ranks(b);
  const double n = static_cast<double>(a.size());
  double d2 = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d2 += (ra[i] - rb[i]) * (ra[i] - rb[i]);
  return 1.0 - 6.0 * d2 / (n * (n * n - 1.0));
}

}  // namespace

TEST_CASE("fractional counts add up to the form count exactly") {
  std::mt19937_64 rng(51);
  std::uniform_real_distribution<double> c(0.0, 1000.0);
  for (int trial = 0; trial < 50; ++trial) {
    auto lex = share(oracle::random_lexicon(rng, trial % 2 == 0));
    CountTable counts;
    for (const auto& f : lex->forms()) counts.add(f, trial % 3 ? std::floor(c(rng)) : c(rng));
    Model m(lex, SlotModelSpec::neural(1, 3));
    m.set_parameters(oracle::random_theta(m.parameter_count(), rng, 2.0));
    const auto fc = fractional_counts(m, counts);
    REQUIRE(fc.forms.size() == counts.size());
    for (const auto& part : fc.forms) {
      double sum = 0.0;
      for (const auto& [a, x] : part.shares) {
        CHECK(x >= 0.0);
        sum += x;
      }
      CHECK(sum == part.count);
      CHECK(part.count == counts.get(part.form));
    }
  }
}

TEST_CASE("shares follow the posterior") {
  std::mt19937_64 rng(52);
  auto lex = share(oracle::random_lexicon(rng));
  const auto counts = oracle::random_counts(*lex, rng);
  Model m(lex, SlotModelSpec::free());
  m.set_parameters(oracle::random_theta(m.parameter_count(), rng));
  const oracle::Brute brute(*lex, m.spec(), oracle::to_std(m.parameters()));
  for (const auto& part : fractional_counts(m, counts).forms) {
    const auto post = brute.posterior(part.form);
    for (const auto& [a, x] : part.shares) CHECK(x == doctest::Approx(part.count * post.at(a)).epsilon(1e-10));
  }
  // Evaluating a model against its own partition gives zero KL.
  const auto r = kl_eval(m, fractional_counts(m, counts).to_reference());
  CHECK(std::abs(r.weighted_kl_bits) < 1e-10);
  CHECK_THROWS_AS(fractional_counts(m, parse_counts("nope\t1\n")), LexiconError);
}

TEST_CASE("sampling distinct types") {
  auto lex = share(generate_lexicon(SynthSpec::nouns(20, 0.4, 3)).lexicon);
  const auto truth = ground_truth_model(lex, 1.0, 1.0, 4);
  SUBCASE("tuples are distinct") {
    const auto s = sample_types(truth, 60, 1);
    CHECK(s.size() == 60);
    std::set<std::tuple<std::size_t, std::size_t, FormId>> seen;
    for (const auto& t : s) {
      REQUIRE(t.analysis.has_value());
      seen.insert({t.analysis->lexeme, t.analysis->slot, t.form});
    }
    CHECK(seen.size() == 60);
  }
  SUBCASE("forms are distinct") {
    const auto s = sample_types(truth, 40, 1, {SampleMode::kForms});
    std::set<FormId> seen;
    for (const auto& t : s) seen.insert(t.form);
    CHECK(seen.size() == 40);
  }
  SUBCASE("the whole support can be drawn") {
    CHECK(sample_types(truth, support_size(truth, SampleMode::kTuples), 2).size() == 120);
    CHECK(support_size(truth, SampleMode::kForms) == lex->num_forms());
  }
  SUBCASE("asking for more than the support fails") {
    CHECK_THROWS_AS(sample_types(truth, 121, 1), std::invalid_argument);
    CHECK_THROWS_AS(sample_types(truth, 0, 1), std::invalid_argument);
  }
  SUBCASE("same seed, same sample") {
    const auto a = sample_types(truth, 30, 8), b = sample_types(truth, 30, 8);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].form == b[i].form);
  }
}

TEST_CASE("the first draw follows the model") {
  auto lex = share(parse_unimorph("a\tx\tN;SG\na\ty\tN;PL\n"));
  Model m(lex, SlotModelSpec::free());
  VectorXd theta = VectorXd::Zero(static_cast<Eigen::Index>(m.parameter_count()));
  theta(3) = std::log(9.0);  // SG : PL = 9 : 1
  m.set_parameters(theta);
  const FormId x = *lex->form_id("x");
  const int runs = 10000;
  int first_x = 0;
  for (int r = 0; r < runs; ++r) first_x += sample_types(m, 1, static_cast<std::uint64_t>(r))[0].form == x;
  CHECK(std::abs(first_x / double(runs) - 0.9) < 0.01);
}

TEST_CASE("frequent types are found early") {
  auto lex = share(generate_lexicon(SynthSpec::nouns(10, 0.0, 5)).lexicon);
  const auto truth = ground_truth_model(lex, 1.5, 1.0, 6);
  std::map<std::pair<std::size_t, std::size_t>, double> rank_sum;
  const int runs = 300;
  for (int r = 0; r < runs; ++r) {
    const auto s = sample_types(truth, 60, static_cast<std::uint64_t>(r));
    for (std::size_t i = 0; i < s.size(); ++i) rank_sum[{s[i].analysis->lexeme, s[i].analysis->slot}] += double(i);
  }
  std::vector<double> prob, rank;
  const VectorXd pl = truth.lexeme_distribution(Tag{"N"}), ps = truth.slot_distribution(Tag{"N"});
  for (const auto& [cell, sum] : rank_sum) {
    prob.push_back(pl(static_cast<Eigen::Index>(cell.first)) * ps(static_cast<Eigen::Index>(cell.second)));
    rank.push_back(sum / runs);
  }
  CHECK(spearman(prob, rank) < -0.9);
}
