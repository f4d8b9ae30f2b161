#include "syncount/synth.hpp"

#include <cstdio>
#include <random>
#include <set>
#include <stdexcept>

#include "syncount/rng.hpp"
#include "syncount/sampler.hpp"

namespace syncount {

namespace {

std::vector<std::string> code_points(std::string_view text) {
  std::vector<std::string> out;
  for (unsigned char c : text) {
    if ((c & 0xC0) == 0x80 && !out.empty()) {
      out.back() += static_cast<char>(c);
    } else {
      out.emplace_back(1, static_cast<char>(c));
    }
  }
  return out;
}

std::vector<Slot> slot_grid(const SynthTagSpec& tag) {
  std::vector<std::vector<AttributeValue>> cells{{}};
  for (const auto& [attribute, values] : tag.grid) {
    std::vector<std::vector<AttributeValue>> next;
    for (const auto& cell : cells) {
      for (const auto& v : values) {
        auto extended = cell;
        extended.push_back({attribute, v});
        next.push_back(std::move(extended));
      }
    }
    cells = std::move(next);
  }
  std::vector<Slot> slots;
  for (auto& c : cells)
    if (!c.empty()) slots.emplace_back(std::move(c));
  return slots;
}

}  // namespace

SynthSpec SynthSpec::nouns(std::size_t lexemes, double syncretism_rate, std::uint64_t seed) {
  SynthSpec spec;
  spec.tags.push_back({"N", {{"case", {"NOM", "GEN", "ACC"}}, {"num", {"SG", "PL"}}}, lexemes});
  spec.syncretism_rate = syncretism_rate;
  spec.seed = seed;
  return spec;
}

SynthLexicon generate_lexicon(const SynthSpec& spec) {
  if (spec.tags.empty()) throw std::invalid_argument("synthetic lexicon needs at least one tag");
  if (!(spec.syncretism_rate >= 0.0 && spec.syncretism_rate <= 1.0))
    throw std::invalid_argument("syncretism rate must lie in [0, 1]");
  const auto alphabet = code_points(spec.alphabet);
  if (alphabet.empty()) throw std::invalid_argument("empty alphabet");
  if (spec.min_length < 1 || spec.max_length < spec.min_length) throw std::invalid_argument("bad form length range");

  Rng rng = make_rng(spec.seed);
  std::uniform_int_distribution<std::size_t> letter(0, alphabet.size() - 1);
  std::uniform_int_distribution<std::size_t> length(spec.min_length, spec.max_length);
  std::bernoulli_distribution copy(spec.syncretism_rate);

  std::set<std::string> used;
  auto fresh_form = [&] {
    for (int attempt = 0; attempt < 1'000'000; ++attempt) {
      std::string form;
      const auto len = length(rng);
      for (std::size_t i = 0; i < len; ++i) form += alphabet[letter(rng)];
      if (!spec.collision_free || used.insert(form).second) return form;
    }
    throw std::invalid_argument("alphabet too small for collision-free forms");
  };

  SynthLexicon out;
  std::vector<LexiconEntry> entries;
  for (const auto& tag_spec : spec.tags) {
    const auto slots = slot_grid(tag_spec);
    if (slots.empty()) throw std::invalid_argument("tag " + tag_spec.pos + " has no slots");
    if (tag_spec.lexemes == 0) throw std::invalid_argument("tag " + tag_spec.pos + " has no lexemes");
    const Tag tag{tag_spec.pos};
    for (std::size_t l = 0; l < tag_spec.lexemes; ++l) {
      char name[32];
      std::snprintf(name, sizeof(name), "%05zu", l);
      LexemeId lexeme{tag, tag_spec.pos + "_" + name, 0};
      std::vector<std::string> forms;
      for (std::size_t s = 0; s < slots.size(); ++s) {
        if (s > 0 && copy(rng)) {
          std::uniform_int_distribution<std::size_t> source(0, s - 1);
          const auto from = source(rng);
          forms.push_back(forms[from]);
          out.syncretism.push_back({lexeme, slots[s], slots[from]});
        } else {
          forms.push_back(fresh_form());
        }
        entries.push_back({tag, lexeme, slots[s], forms.back()});
      }
    }
  }
  out.lexicon = Lexicon::from_entries(std::move(entries));
  return out;
}

Model ground_truth_model(std::shared_ptr<const Lexicon> lexicon, double slot_skew, double lexeme_skew,
                         std::uint64_t seed) {
  Model model(std::move(lexicon), SlotModelSpec::free());
  Rng rng = make_rng(seed);
  std::normal_distribution<double> slot(0.0, slot_skew);
  std::normal_distribution<double> lexeme(0.0, lexeme_skew);
  VectorXd theta = VectorXd::Zero(static_cast<Eigen::Index>(model.parameter_count()));
  const auto& layout = model.layout();
  for (std::size_t i = 0; i < layout.num_lexeme; ++i)
    theta(static_cast<Eigen::Index>(layout.lexeme_offset + i)) = lexeme_skew > 0.0 ? lexeme(rng) : 0.0;
  for (std::size_t i = 0; i < layout.num_slot; ++i)
    theta(static_cast<Eigen::Index>(layout.slot_offset + i)) = slot_skew > 0.0 ? slot(rng) : 0.0;
  model.set_parameters(std::move(theta));
  return model;
}

SynthCorpus sample_corpus(const Model& model, std::uint64_t num_tokens, std::uint64_t seed) {
  if (num_tokens < 1) throw std::invalid_argument("corpus needs at least one token");
  const auto& lex = model.lexicon();
  AncestralSampler sampler(model);
  Rng rng = make_rng(seed);

  // Tally by index first; the string-keyed tables are built once at the end.
  std::map<std::pair<std::size_t, std::size_t>, std::map<FormId, std::uint64_t>> tally;
  std::uint64_t drawn = 0;
  std::uint64_t misses = 0;
  while (drawn < num_tokens) {
    const auto d = sampler.draw(rng);
    if (!d) {
      if (++misses > 1000 * num_tokens + 1'000'000) throw NumericalError("model rarely reaches a listed cell");
      continue;
    }
    ++tally[{d->analysis.lexeme, d->analysis.slot}][d->form];
    ++drawn;
  }

  SynthCorpus corpus;
  for (const auto& [cell, per_form] : tally) {
    const std::size_t t = lex.tag_of_lexeme(cell.first);
    const AnalysisKey key{lex.tags()[t], lex.lexeme(cell.first), lex.slot(cell.second)};
    for (const auto& [f, n] : per_form) {
      corpus.counts.add(lex.forms()[f], static_cast<double>(n));
      corpus.reference.add(key, lex.forms()[f], static_cast<double>(n));
    }
  }
  return corpus;
}

}  // namespace syncount
