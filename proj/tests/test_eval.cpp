#include <cmath>
#include <random>

#include "doctest.h"
#include "oracle.hpp"
#include "syncount/eval.hpp"

using namespace syncount;

namespace {

std::shared_ptr<const Lexicon> share(Lexicon lex) { return std::make_shared<const Lexicon>(std::move(lex)); }

// Random reference counts over the listed analyses of every form.
ReferenceCounts random_reference(const Lexicon& lex, std::mt19937_64& rng) {
  ReferenceCounts ref;
  std::uniform_int_distribution<int> c(0, 9);
  for (FormId f = 0; f < lex.num_forms(); ++f)
    for (const auto& a : lex.analyses(f)) ref.add(lex.key(a), lex.forms()[f], c(rng) + (a.slot % 2));
  return ref;
}

}  // namespace

TEST_CASE("four equiprobable forms have perplexity 4") {
  auto lex = share(parse_unimorph("a\tw\tN;NOM;SG\na\tx\tN;NOM;PL\na\ty\tN;GEN;SG\na\tz\tN;GEN;PL\n"));
  Model m(lex, SlotModelSpec::free());
  const auto r = perplexity(m, parse_counts("w\t3\nx\t1\ny\t7\nz\t2\nq\t5\n"));
  CHECK(r.perplexity == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(r.token_count == 13.0);
  CHECK(r.oov_tokens_dropped == 5.0);
  CHECK(r.oov_types_dropped == 1);
  CHECK_THROWS_AS(perplexity(m, parse_counts("q\t5\n")), std::invalid_argument);
}

TEST_CASE("perplexity agrees with brute force") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 20; ++trial) {
    auto lex = share(oracle::random_lexicon(rng, trial % 2 == 0));
    auto counts = oracle::random_counts(*lex, rng);
    counts.add("unlisted", 4);
    Model m(lex, trial % 2 ? SlotModelSpec::neural(1, 3) : SlotModelSpec::free());
    m.set_parameters(oracle::random_theta(m.parameter_count(), rng));
    const oracle::Brute brute(*lex, m.spec(), oracle::to_std(m.parameters()));
    CHECK(perplexity(m, counts).perplexity == doctest::Approx(brute.perplexity(counts)).epsilon(1e-12));
  }
}

TEST_CASE("supervised estimates") {
  const auto ref = parse_reference(
      "lemma\tform\tfeatures\tcount\nwalk\twalked\tV;PST\t3\nwalk\twalked\tV;V.PTCP;PST\t1\n");
  const auto table = supervised_mle(ref);
  const auto& d = table.at("walked");
  REQUIRE(d.entries.size() == 2);
  const auto [tag, pst] = parse_bundle("V;PST");
  CHECK(d.probability({tag, {tag, "walk", 0}, pst}) == doctest::Approx(0.75));
}

TEST_CASE("KL: both forms agree and match brute force") {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 100; ++trial) {
    auto lex = share(oracle::random_lexicon(rng, trial % 3 == 0));
    const auto ref = random_reference(*lex, rng);
    if (ref.total() == 0.0) continue;
    Model m(lex, SlotModelSpec::linear());
    m.set_parameters(oracle::random_theta(m.parameter_count(), rng));
    const auto r = kl_eval(m, filter_reference(*lex, ref));
    CHECK(std::abs(r.weighted_kl_bits - r.token_average_bits) < 1e-9);
    const oracle::Brute brute(*lex, m.spec(), oracle::to_std(m.parameters()));
    CHECK(r.weighted_kl_bits == doctest::Approx(brute.kl_bits(ref)).epsilon(1e-10));
    CHECK(r.weighted_kl_bits >= -1e-12);
  }
}

TEST_CASE("KL is zero when the model matches the reference") {
  // One lexeme, two slots sharing a form; the posterior is p(s | t).
  auto lex = share(parse_unimorph("a\tx\tN;SG\na\tx\tN;PL\n"));
  Model m(lex, SlotModelSpec::free());
  VectorXd theta = VectorXd::Zero(static_cast<Eigen::Index>(m.parameter_count()));
  theta(3) = std::log(3.0);  // SG three times as likely as PL
  m.set_parameters(theta);
  const auto ref = parse_reference("lemma\tform\tfeatures\tcount\na\tx\tN;SG\t3\na\tx\tN;PL\t1\n");
  const auto r = kl_eval(m, ref);
  CHECK(std::abs(r.weighted_kl_bits) < 1e-12);
  CHECK(std::abs(r.token_average_bits) < 1e-12);
}

TEST_CASE("unlisted analyses are an error until filtered") {
  auto lex = share(parse_unimorph("a\tx\tN;SG\na\tx\tN;PL\n"));
  Model m(lex, SlotModelSpec::free());
  const auto ref = parse_reference("lemma\tform\tfeatures\tcount\na\tx\tN;SG\t3\nb\tx\tN;SG\t2\nc\ty\tN;SG\t1\n");
  CHECK_THROWS_AS(kl_eval(m, ref), LexiconError);
  const auto filtered = filter_reference(*lex, ref);
  const auto r = kl_eval(m, filtered);
  CHECK(r.token_count == 3.0);
  CHECK(r.dropped_tokens == 3.0);
}
