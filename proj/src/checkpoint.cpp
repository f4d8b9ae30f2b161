#include "syncount/checkpoint.hpp"

#include <charconv>
#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <vector>

#include "syncount/counts.hpp"

namespace syncount {

namespace {

constexpr std::string_view kMagic = "syncount-checkpoint";
constexpr int kVersion = 1;

std::string hex(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%a", v);
  return buf;
}

class LineReader {
 public:
  explicit LineReader(std::string_view text) : lines_(split_lines(text)) {}

  std::string_view next() {
    if (pos_ >= lines_.size()) throw ParseError("unexpected end of checkpoint", pos_ + 1);
    return lines_[pos_++];
  }
  std::size_t line() const { return pos_; }

  // "<name> <value>"
  std::string_view field(std::string_view name) {
    auto l = next();
    if (l.substr(0, name.size()) != name || l.size() <= name.size() || l[name.size()] != ' ')
      throw ParseError("expected '" + std::string(name) + " ...'", pos_);
    return l.substr(name.size() + 1);
  }
  long long integer(std::string_view name) {
    auto v = field(name);
    long long out = 0;
    auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size())
      throw ParseError("bad integer for '" + std::string(name) + "'", pos_);
    return out;
  }

 private:
  std::vector<std::string_view> lines_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string write_checkpoint(const Model& model) {
  const auto& lex = model.lexicon();
  const auto& spec = model.spec();
  std::string out;
  out += std::string(kMagic) + " " + std::to_string(kVersion) + "\n";
  out += "kind " + to_string(spec.kind) + "\n";
  out += "layers " + std::to_string(spec.layers) + "\n";
  out += "hidden " + std::to_string(spec.hidden) + "\n";
  out += "biases " + std::to_string(spec.biases ? 1 : 0) + "\n";
  out += "tags " + std::to_string(lex.num_tags()) + "\n";
  out += "lexemes " + std::to_string(lex.num_lexemes()) + "\n";
  out += "slots " + std::to_string(lex.num_slots()) + "\n";
  out += "features " + std::to_string(model.feature_space().size()) + "\n";
  for (const auto& f : model.feature_space().features()) out += f.str() + "\n";
  out += "parameters " + std::to_string(model.parameter_count()) + "\n";
  for (Eigen::Index i = 0; i < model.parameters().size(); ++i) out += hex(model.parameters()(i)) + "\n";
  return out;
}

Model read_checkpoint(std::string_view text, std::shared_ptr<const Lexicon> lexicon) {
  LineReader in(text);
  if (in.field(kMagic) != std::to_string(kVersion)) throw ParseError("unsupported checkpoint version", 1);

  SlotModelSpec spec;
  auto kind = parse_slot_model_kind(in.field("kind"));
  if (!kind) throw ParseError("unknown slot model kind", in.line());
  spec.kind = *kind;
  spec.layers = static_cast<int>(in.integer("layers"));
  spec.hidden = static_cast<int>(in.integer("hidden"));
  spec.biases = in.integer("biases") != 0;

  auto expect = [&](std::string_view name, std::size_t actual) {
    const auto stored = in.integer(name);
    if (stored < 0 || static_cast<std::size_t>(stored) != actual)
      throw ParseError("checkpoint has " + std::to_string(stored) + " " + std::string(name) + ", lexicon has " +
                           std::to_string(actual),
                       in.line());
  };
  expect("tags", lexicon->num_tags());
  expect("lexemes", lexicon->num_lexemes());
  expect("slots", lexicon->num_slots());
  const auto& space = lexicon->feature_space();
  expect("features", space.size());
  for (const auto& f : space.features()) {
    if (in.next() != f.str()) throw ParseError("feature space differs from the lexicon's", in.line());
  }

  Model model(std::move(lexicon), spec);
  expect("parameters", model.parameter_count());
  VectorXd theta(static_cast<Eigen::Index>(model.parameter_count()));
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    std::string value(in.next());
    char* end = nullptr;
    theta(i) = std::strtod(value.c_str(), &end);
    if (value.empty() || end != value.c_str() + value.size()) throw ParseError("bad parameter value", in.line());
  }
  try {
    model.set_parameters(std::move(theta));
  } catch (const NumericalError& e) {
    throw ParseError(e.what(), in.line());
  }
  return model;
}

}  // namespace syncount
