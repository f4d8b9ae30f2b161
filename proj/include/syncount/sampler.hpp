#pragma once

#include <optional>
#include <random>
#include <vector>

#include "syncount/model.hpp"
#include "syncount/rng.hpp"

namespace syncount {

struct AncestralDraw {
  Analysis analysis;  // weight is δ(f | t, ℓ, s)
  FormId form = 0;
};

// Draws t ~ p(t), ℓ ~ p(ℓ | t), s ~ p(s | t), then f from δ.
class AncestralSampler {
 public:
  explicit AncestralSampler(const Model& model);

  // Empty when ⟨t, ℓ, s⟩ has no listed form (a paradigm gap).
  std::optional<AncestralDraw> draw(Rng& rng);

 private:
  const Lexicon* lexicon_;
  std::discrete_distribution<std::size_t> tag_;
  std::vector<std::discrete_distribution<std::size_t>> lexeme_;
  std::vector<std::discrete_distribution<std::size_t>> slot_;
};

}  // namespace syncount
