#include "doctest.h"
#include "syncount/counts.hpp"
#include "syncount/numeric.hpp"
#include "syncount/rng.hpp"

using namespace syncount;

TEST_CASE("count files") {
  const auto counts = parse_counts("# comment\nwalk\t3\n\nwalked\t2.5\nwalk\t1\n");
  CHECK(counts.size() == 2);
  CHECK(counts.get("walk") == 4.0);
  CHECK(counts.get("walked") == 2.5);
  CHECK(counts.get("walks") == 0.0);
  CHECK(counts.total() == 6.5);
  CHECK_FALSE(counts.integral());
  CHECK(write_counts(counts) == "walk\t4\nwalked\t2.5\n");
  CHECK(parse_counts(write_counts(counts)) == counts);

  CHECK_THROWS_AS(parse_counts("walk\n"), ParseError);
  CHECK_THROWS_AS(parse_counts("walk\tmany\n"), ParseError);
  CHECK_THROWS_AS(parse_counts("walk\t-1\n"), ParseError);
  CHECK_THROWS_AS(parse_counts("walk\tinf\n"), ParseError);
  CountTable t;
  CHECK_THROWS_AS(t.add("x", -1.0), std::invalid_argument);
}

TEST_CASE("numbers print compactly and read back exactly") {
  CHECK(format_number(100000) == "100000");
  CHECK(format_number(0.1) == "0.1");
  for (double x : {1.0 / 3.0, 2.0 / 7.0, 1e-20, 123456.789, 0.0})
    CHECK(parse_number(format_number(x)) == x);
}

TEST_CASE("filtering against a lexicon") {
  const auto lex = parse_unimorph("walk\twalk\tV;NFIN\nwalk\twalked\tV;PST\n");
  const auto counts = parse_counts("walk\t3\nwalked\t2\nran\t4\nswam\t1\n");
  const auto f = filter_counts(lex, counts);
  CHECK(f.kept.total() == 5.0);
  CHECK(f.dropped_tokens == 5.0);
  CHECK(f.dropped_types == 2);
  CHECK_THROWS_AS(index_counts(lex, counts), LexiconError);
  const auto idx = index_counts(lex, f.kept);
  CHECK(idx.total == 5.0);
  CHECK(idx.counts.size() == 2);
}

TEST_CASE("reference files") {
  const std::string text =
      "lemma\tform\tfeatures\tcount\n"
      "walk\twalked\tV;PST\t3\n"
      "walk\twalked\tV;V.PTCP;PST\t1\n"
      "walk\twalk\tV;NFIN\t2\n";
  const auto ref = parse_reference(text);
  CHECK(ref.total() == 6.0);
  CHECK(ref.by_form().at("walked").size() == 2);
  CHECK(ref.surface_counts().get("walked") == 4.0);
  CHECK(parse_reference(write_reference(ref)) == ref);

  CHECK_THROWS_AS(parse_reference("walk\twalked\tV;PST\t3\n"), ParseError);
  CHECK_THROWS_AS(parse_reference("lemma\tform\tfeatures\tcount\nwalk\twalked\tV;PST\n"), ParseError);

  const auto lex = parse_unimorph("walk\twalk\tV;NFIN\nwalk\twalked\tV;PST\n");
  const auto kept = filter_reference(lex, ref);
  CHECK(kept.total() == 5.0);
  CHECK(kept.dropped_tokens() == 1.0);
}

TEST_CASE("log-sum-exp and softmax") {
  VectorXd x(3);
  x << 1000.0, 1000.0, -1000.0;
  CHECK(log_sum_exp(x) == doctest::Approx(1000.0 + std::log(2.0)));
  const VectorXd p = softmax(x);
  CHECK(p.sum() == doctest::Approx(1.0));
  CHECK(p(0) == doctest::Approx(0.5));
  CHECK(std::isinf(log_sum_exp(VectorXd(0))));
  VectorXd y(2);
  y << std::log(2.0), 0.0;
  const VectorXd q = softmax(y);
  CHECK(q(0) == doctest::Approx(2.0 / 3.0));
  CHECK(q(1) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("seed derivation is stable and separates streams") {
  CHECK(derive_seed(1, 0) == derive_seed(1, 0));
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 0) != derive_seed(2, 0));
  CHECK(derive_seed(7, "corpus") == derive_seed(7, "corpus"));
  CHECK(derive_seed(7, "corpus") != derive_seed(7, "truth"));
  auto a = make_rng(42), b = make_rng(42);
  for (int i = 0; i < 10; ++i) CHECK(a() == b());
}
