#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "syncount/counts.hpp"
#include "syncount/lexicon.hpp"
#include "syncount/model.hpp"

namespace syncount {

struct SynthTagSpec {
  std::string pos = "N";
  // Slots are the Cartesian product of these attribute value lists.
  std::vector<std::pair<std::string, std::vector<std::string>>> grid;
  std::size_t lexemes = 50;
};

struct SynthSpec {
  std::vector<SynthTagSpec> tags;
  // Chance that a slot copies the form of an earlier slot of its paradigm.
  double syncretism_rate = 0.0;
  // Characters (UTF-8 code points) used for random forms.
  std::string alphabet = "abcdefghijklmnopqrstuvwxyz";
  std::size_t min_length = 3;
  std::size_t max_length = 8;
  // Redraw any random form that already exists anywhere in the lexicon.
  bool collision_free = false;
  std::uint64_t seed = 0;

  // One noun tag over case {NOM, GEN, ACC} × num {SG, PL}.
  static SynthSpec nouns(std::size_t lexemes, double syncretism_rate, std::uint64_t seed);
};

// A slot whose form was copied from another slot of the same paradigm.
struct SyncretismRecord {
  LexemeId lexeme;
  Slot slot;
  Slot source;
};

struct SynthLexicon {
  Lexicon lexicon;
  std::vector<SyncretismRecord> syncretism;
};

// Throws std::invalid_argument for a spec without slots or lexemes.
SynthLexicon generate_lexicon(const SynthSpec& spec);

// FREE model with ω_{t,s} ~ N(0, slot_skew²), ω_{t,ℓ} ~ N(0, lexeme_skew²), ω_t = 0.
Model ground_truth_model(std::shared_ptr<const Lexicon> lexicon, double slot_skew, double lexeme_skew,
                         std::uint64_t seed);

struct SynthCorpus {
  CountTable counts;
  ReferenceCounts reference;  // the hidden analysis of every token
};

// num_tokens i.i.d. ancestral draws. Throws std::invalid_argument for 0 tokens.
SynthCorpus sample_corpus(const Model& model, std::uint64_t num_tokens, std::uint64_t seed);

}  // namespace syncount
