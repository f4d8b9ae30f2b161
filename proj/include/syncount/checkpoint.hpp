#pragma once

#include <memory>
#include <string>
#include <string_view>

#include "syncount/model.hpp"

namespace syncount {

// Text container:
//   syncount-checkpoint 1
//   kind <unif|free|linear|neural>
//   layers / hidden / biases
//   tags, lexemes, slots: counts of the lexicon the model was trained on
//   features <D>, then one attribute=value per line in coordinate order
//   parameters <P>, then one hexadecimal float per line in canonical order
// Hex floats make the round trip bit-exact.
std::string write_checkpoint(const Model& model);

// Throws ParseError when the text is malformed or does not fit `lexicon`.
Model read_checkpoint(std::string_view text, std::shared_ptr<const Lexicon> lexicon);

}  // namespace syncount
