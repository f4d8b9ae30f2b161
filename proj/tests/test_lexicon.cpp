#include <algorithm>
#include <random>
#include <set>

#include "doctest.h"
#include "oracle.hpp"
#include "syncount/lexicon.hpp"
#include "syncount/synth.hpp"

using namespace syncount;

namespace {

Lexicon german() { return parse_unimorph(read_text_file(SYNCOUNT_FIXTURES "/german_nouns.tsv")); }
Lexicon english() { return parse_unimorph(read_text_file(SYNCOUNT_FIXTURES "/english.tsv")); }

Slot slot(std::vector<AttributeValue> f) { return Slot(std::move(f)); }

}  // namespace

TEST_CASE("a single line becomes one entry") {
  const auto lex = parse_unimorph("Wort\tWörter\tN;NOM;PL\n");
  REQUIRE(lex.entries().size() == 1);
  const auto& e = lex.entries()[0];
  CHECK(e.tag == Tag{"N"});
  CHECK(e.lexeme == LexemeId{Tag{"N"}, "Wort", 0});
  CHECK(e.slot == slot({{"case", "NOM"}, {"num", "PL"}}));
  CHECK(e.form == "Wörter");
  CHECK(lex.num_tags() == 1);
  CHECK(lex.num_forms() == 1);
}

TEST_CASE("empty input gives an empty lexicon") {
  const auto lex = parse_unimorph("");
  CHECK(lex.empty());
  CHECK(lex.num_tags() == 0);
  CHECK(lex.num_forms() == 0);
  CHECK(parse_unimorph("\n\n  \n").empty());
}

TEST_CASE("repeated lines collapse") {
  const auto lex = parse_unimorph("Wort\tWort\tN;NOM;SG\nWort\tWort\tN;NOM;SG\n");
  CHECK(lex.entries().size() == 1);
}

TEST_CASE("CRLF line endings") {
  const auto lex = parse_unimorph("Wort\tWort\tN;NOM;SG\r\nWort\tWortes\tN;GEN;SG\r\n");
  CHECK(lex.entries().size() == 2);
  CHECK(lex.form_id("Wortes").has_value());
}

TEST_CASE("malformed lines report their line number") {
  try {
    parse_unimorph("Wort\tWort\tN;NOM;SG\nWort\tWortes\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  CHECK_THROWS_AS(parse_unimorph("a\tb\tN;NOM\textra\n"), ParseError);
  CHECK_THROWS_AS(parse_unimorph("a\tb\t\n"), ParseError);
  CHECK_THROWS_AS(parse_unimorph("a\tb\tNOM;SG\n"), ParseError);     // no POS
  CHECK_THROWS_AS(parse_unimorph("a\tb\tN;V;SG\n"), ParseError);     // two POS
  CHECK_THROWS_AS(parse_unimorph("a\tb\tN;SG;SG\n"), ParseError);    // repeated feature
  CHECK_THROWS_AS(parse_unimorph("a\tb\tN\n"), ParseError);          // POS only
  CHECK_THROWS_AS(parse_unimorph("\tb\tN;SG\n"), ParseError);
  CHECK_THROWS_AS(parse_unimorph("a\t\tN;SG\n"), ParseError);
}

TEST_CASE("overabundance is rejected by default and uniform on request") {
  const std::string text = "dream\tdreamed\tV;PST\ndream\tdreamt\tV;PST\n";
  try {
    parse_unimorph(text);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  const auto lex = parse_unimorph(text, {Overabundance::kUniform});
  const Tag v{"V"};
  const LexemeId dream{v, "dream", 0};
  const Slot pst = slot({{"tense", "PST"}});
  CHECK(lex.delta("dreamed", v, dream, pst) == doctest::Approx(0.5));
  CHECK(lex.delta("dreamt", v, dream, pst) == doctest::Approx(0.5));
  CHECK(lex.realizations(0, 0).size() == 2);
}

TEST_CASE("bundle parsing") {
  SUBCASE("dimensions come from the table") {
    auto [tag, s] = parse_bundle("V;3;SG;PRS");
    CHECK(tag.pos == "V");
    CHECK(s == slot({{"num", "SG"}, {"person", "3"}, {"tense", "PRS"}}));
  }
  SUBCASE("participles stay verbs") {
    auto [tag, s] = parse_bundle("V;V.PTCP;PST");
    CHECK(tag.pos == "V");
    CHECK(s == slot({{"tense", "PST"}, {"verbform", "V.PTCP"}}));
  }
  SUBCASE("explicit attribute=value") {
    auto [tag, s] = parse_bundle("N;class=weak;SG");
    CHECK(s == slot({{"class", "weak"}, {"num", "SG"}}));
  }
  SUBCASE("unknown features get their own dimension") {
    auto [tag, s] = parse_bundle("N;FOO;SG");
    CHECK(s == slot({{"num", "SG"}, {"x", "FOO"}}));
  }
  SUBCASE("composite values share a dimension") {
    auto [tag, s] = parse_bundle("N;NOM/ACC;SG");
    CHECK(s == slot({{"case", "NOM/ACC"}, {"num", "SG"}}));
  }
  SUBCASE("format inverts parse") {
    for (std::string b : {"N;NOM;PL", "V;V.PTCP;PST", "N;class=weak;SG", "N;FOO;SG", "N;NOM/ACC;SG"}) {
      auto [tag, s] = parse_bundle(b);
      auto [tag2, s2] = parse_bundle(format_bundle(tag, s));
      CHECK(tag2 == tag);
      CHECK(s2 == s);
    }
  }
}

TEST_CASE("slots reject empty and duplicate features") {
  CHECK_THROWS_AS(Slot(std::vector<AttributeValue>{}), LexiconError);
  CHECK_THROWS_AS(slot({{"case", "NOM"}, {"case", "NOM"}}), LexiconError);
  CHECK(slot({{"num", "PL"}, {"case", "NOM"}}).str() == "case=NOM;num=PL");
}

TEST_CASE("German paradigms") {
  const auto lex = german();
  CHECK(lex.num_tags() == 1);
  CHECK(lex.lexemes(0).size() == 2);
  CHECK(lex.slots(0).size() == 8);
  CHECK(lex.analyses_of("Wörter").size() == 3);
  CHECK(lex.analyses_of("Wortes").size() == 1);
  CHECK(lex.analyses_of("Herrn").size() == 3);
  CHECK(lex.analyses_of("Herren").size() == 4);
  CHECK(lex.analyses_of("Hund").empty());

  const auto a = lex.ambiguity("Wörter");
  CHECK(a.syncretic);
  CHECK_FALSE(a.inter_paradigmatic);
  CHECK_FALSE(lex.ambiguity("Wortes").syncretic);
}

TEST_CASE("cross-paradigm ambiguity") {
  const auto lex = english();
  const auto talks = lex.ambiguity("talks");
  CHECK(talks.analyses == 2);
  CHECK(talks.inter_paradigmatic);
  CHECK_FALSE(talks.syncretic);
  const auto talked = lex.ambiguity("talked");
  CHECK(talked.syncretic);
  CHECK_FALSE(talked.inter_paradigmatic);
  // run is both the infinitive and the participle of one verb
  CHECK(lex.ambiguity("run").syncretic);
}

TEST_CASE("featurize places ones on exactly the active coordinates") {
  const auto lex = german();
  const auto& space = lex.feature_space();
  REQUIRE(space.size() == 7);
  std::vector<std::string> names;
  for (const auto& f : space.features()) names.push_back(f.str());
  CHECK(names == std::vector<std::string>{"case=ACC", "case=DAT", "case=GEN", "case=NOM", "num=PL", "num=SG", "pos=N"});

  const auto v = space.featurize<double>(Tag{"N"}, slot({{"case", "NOM"}, {"num", "PL"}}));
  CHECK(v.sum() == 3.0);
  CHECK(v(3) == 1.0);
  CHECK(v(4) == 1.0);
  CHECK(v(6) == 1.0);

  const auto w = space.featurize<double>(Tag{"N"}, slot({{"num", "PL"}}));
  CHECK(w.sum() == 2.0);
  CHECK(v == space.featurize<double>(Tag{"N"}, slot({{"case", "NOM"}, {"num", "PL"}})));
  CHECK_THROWS_AS(space.featurize<double>(Tag{"N"}, slot({{"case", "ABL"}})), LexiconError);
  CHECK_THROWS_AS(space.featurize<double>(Tag{"V"}, slot({{"case", "NOM"}})), LexiconError);
}

TEST_CASE("featurize is injective over listed tag-slot pairs") {
  SynthSpec spec;
  spec.tags.push_back({"N", {{"case", {"NOM", "GEN", "ACC"}}, {"num", {"SG", "PL"}}}, 3});
  spec.tags.push_back({"ADJ", {{"case", {"NOM", "GEN"}}, {"num", {"SG", "PL"}}}, 3});
  spec.tags.push_back({"V", {{"tense", {"PRS", "PST"}}}, 3});
  const auto lex = generate_lexicon(spec).lexicon;
  std::vector<std::vector<double>> seen;
  for (std::size_t t = 0; t < lex.num_tags(); ++t)
    for (const auto& s : lex.slots(t)) {
      const auto v = lex.feature_space().featurize<double>(lex.tags()[t], s);
      seen.emplace_back(v.data(), v.data() + v.size());
    }
  auto sorted = seen;
  std::sort(sorted.begin(), sorted.end());
  CHECK(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end());
  CHECK(seen.size() == lex.num_slots());
}

TEST_CASE("δ matches the entries and nothing else") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    const auto lex = oracle::random_lexicon(rng, trial % 2 == 1);
    for (const auto& e : lex.entries()) CHECK(lex.delta(e.form, e.tag, e.lexeme, e.slot) > 0.0);
    // every triple in the full space
    for (const auto& form : lex.forms()) {
      double listed = 0.0;
      for (std::size_t t = 0; t < lex.num_tags(); ++t)
        for (const auto& l : lex.lexemes(t))
          for (const auto& s : lex.slots(t)) {
            const double d = lex.delta(form, lex.tags()[t], l, s);
            const bool is_entry = std::binary_search(lex.entries().begin(), lex.entries().end(),
                                                     LexiconEntry{lex.tags()[t], l, s, form});
            CHECK((d > 0.0) == is_entry);
            listed += d > 0.0;
          }
      CHECK(listed == lex.analyses(*lex.form_id(form)).size());
    }
    // cell weights sum to one
    for (std::size_t l = 0; l < lex.num_lexemes(); ++l) {
      const std::size_t t = lex.tag_of_lexeme(l);
      for (std::size_t s = lex.slot_offset(t); s < lex.slot_offset(t + 1); ++s) {
        const auto cell = lex.realizations(l, s);
        double sum = 0.0;
        for (FormId f : cell) sum += lex.delta(lex.forms()[f], lex.tags()[t], lex.lexeme(l), lex.slot(s));
        if (!cell.empty()) CHECK(sum == doctest::Approx(1.0));
      }
    }
  }
}

TEST_CASE("slots and lexemes of a tag are exactly those that occur") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const auto lex = oracle::random_lexicon(rng);
    for (std::size_t t = 0; t < lex.num_tags(); ++t) {
      std::set<Slot> slots;
      std::set<LexemeId> lexemes;
      for (const auto& e : lex.entries())
        if (e.tag == lex.tags()[t]) {
          slots.insert(e.slot);
          lexemes.insert(e.lexeme);
        }
      CHECK(std::set<Slot>(lex.slots(t).begin(), lex.slots(t).end()) == slots);
      CHECK(std::set<LexemeId>(lex.lexemes(t).begin(), lex.lexemes(t).end()) == lexemes);
    }
  }
}

TEST_CASE("serialization round-trips") {
  std::mt19937_64 rng(3);
  std::vector<Lexicon> cases{german(), english()};
  for (int i = 0; i < 20; ++i) cases.push_back(oracle::random_lexicon(rng));
  for (int i = 0; i < 5; ++i) cases.push_back(generate_lexicon(SynthSpec::nouns(10, 0.3, i)).lexicon);
  for (const auto& lex : cases) {
    const auto again = parse_unimorph(write_unimorph(lex));
    CHECK(again.entries() == lex.entries());
    CHECK(write_unimorph(again) == write_unimorph(lex));
  }
  const auto over = parse_unimorph("a\tb\tV;PST\na\tc\tV;PST\n", {Overabundance::kUniform});
  CHECK(parse_unimorph(write_unimorph(over), {Overabundance::kUniform}).entries() == over.entries());
}

TEST_CASE("missing files raise IoError") {
  CHECK_THROWS_AS(read_text_file("/nonexistent/lexicon.tsv"), IoError);
}
