#pragma once

#include <compare>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "syncount/types.hpp"

namespace syncount {

struct AttributeValue {
  std::string attribute;
  std::string value;

  std::string str() const { return attribute + "=" + value; }
  auto operator<=>(const AttributeValue&) const = default;
};

// An inflectional slot: a set of attribute-value pairs, POS excluded.
class Slot {
 public:
  Slot() = default;
  // Sorts the features; throws LexiconError when empty or when a pair repeats.
  explicit Slot(std::vector<AttributeValue> features);

  const std::vector<AttributeValue>& features() const { return features_; }
  std::size_t size() const { return features_.size(); }
  // "case=NOM;num=PL"
  std::string str() const;

  auto operator<=>(const Slot&) const = default;

 private:
  std::vector<AttributeValue> features_;
};

struct Tag {
  std::string pos;

  AttributeValue feature() const { return {"pos", pos}; }
  auto operator<=>(const Tag&) const = default;
};

struct LexemeId {
  Tag tag;
  std::string lemma;
  int disambiguator = 0;

  auto operator<=>(const LexemeId&) const = default;
};

struct LexiconEntry {
  Tag tag;
  LexemeId lexeme;
  Slot slot;
  std::string form;

  auto operator<=>(const LexiconEntry&) const = default;
};

// ⟨tag, lexeme, slot⟩ spelled out by value.
struct AnalysisKey {
  Tag tag;
  LexemeId lexeme;
  Slot slot;

  auto operator<=>(const AnalysisKey&) const = default;
};

// One analysis of a form, by index. `lexeme` and `slot` are flat indices over
// all ⟨tag, lexeme⟩ and ⟨tag, slot⟩ pairs; `weight` is δ(f | t, ℓ, s), which is 1
// unless the lexicon was built with uniform overabundance.
struct Analysis {
  std::size_t tag = 0;
  std::size_t lexeme = 0;
  std::size_t slot = 0;
  double weight = 1.0;
};

// Coordinates for the multi-hot encoding of ⟨t, s⟩, ordered by "attribute=value".
class FeatureSpace {
 public:
  FeatureSpace() = default;
  explicit FeatureSpace(std::vector<AttributeValue> features);

  std::size_t size() const { return features_.size(); }
  const std::vector<AttributeValue>& features() const { return features_; }
  std::optional<std::size_t> index_of(const AttributeValue& feature) const;

  // Throws LexiconError if any feature of ⟨t, s⟩ has no coordinate.
  template <typename Scalar = double>
  Vector<Scalar> featurize(const Tag& tag, const Slot& slot) const {
    Vector<Scalar> v = Vector<Scalar>::Zero(static_cast<Eigen::Index>(size()));
    v(static_cast<Eigen::Index>(require(tag.feature()))) = Scalar(1);
    for (const auto& f : slot.features()) v(static_cast<Eigen::Index>(require(f))) = Scalar(1);
    return v;
  }

  bool operator==(const FeatureSpace& other) const { return features_ == other.features_; }

 private:
  std::size_t require(const AttributeValue& feature) const;

  std::vector<AttributeValue> features_;
  std::map<std::string, std::size_t> index_;
};

enum class Overabundance {
  kReject,   // several forms for one ⟨t, ℓ, s⟩ is an error
  kUniform,  // δ is split uniformly over the listed forms
};

struct Ambiguity {
  std::size_t analyses = 0;
  bool syncretic = false;           // one paradigm maps two slots to the form
  bool inter_paradigmatic = false;  // the form occurs in two different paradigms
};

class Lexicon {
 public:
  Lexicon() = default;

  // Entries are deduplicated. Throws LexiconError on inconsistent entries or,
  // under kReject, on overabundance.
  static Lexicon from_entries(std::vector<LexiconEntry> entries,
                              Overabundance policy = Overabundance::kReject);

  // Sorted, unique.
  const std::vector<LexiconEntry>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  Overabundance overabundance() const { return policy_; }

  std::size_t num_tags() const { return tags_.size(); }
  const std::vector<Tag>& tags() const { return tags_; }
  std::optional<std::size_t> tag_index(const Tag& tag) const;
  // Throws LexiconError for an unlisted tag.
  std::size_t require_tag(const Tag& tag) const;

  // Lexemes and slots listed with tag `t`, in sorted order.
  std::span<const LexemeId> lexemes(std::size_t t) const;
  std::span<const Slot> slots(std::size_t t) const;
  // First flat index of the lexemes / slots of tag `t`.
  std::size_t lexeme_offset(std::size_t t) const { return lexeme_offsets_[t]; }
  std::size_t slot_offset(std::size_t t) const { return slot_offsets_[t]; }
  std::size_t num_lexemes() const { return lexemes_.size(); }
  std::size_t num_slots() const { return slots_.size(); }
  const LexemeId& lexeme(std::size_t flat) const { return lexemes_[flat]; }
  const Slot& slot(std::size_t flat) const { return slots_[flat]; }
  std::size_t tag_of_lexeme(std::size_t flat) const { return lexeme_tags_[flat]; }
  std::size_t tag_of_slot(std::size_t flat) const { return slot_tags_[flat]; }
  std::optional<std::size_t> lexeme_index(const LexemeId& lexeme) const;
  std::optional<std::size_t> slot_index(std::size_t t, const Slot& slot) const;

  std::size_t num_forms() const { return forms_.size(); }
  // Sorted.
  const std::vector<std::string>& forms() const { return forms_; }
  std::optional<FormId> form_id(std::string_view form) const;
  std::span<const Analysis> analyses(FormId form) const { return analyses_[form]; }

  // All ⟨t, ℓ, s⟩ whose realization is `form`; empty for unknown forms.
  std::vector<AnalysisKey> analyses_of(std::string_view form) const;
  AnalysisKey key(const Analysis& a) const;

  // δ(f | t, ℓ, s)
  double delta(std::string_view form, const Tag& tag, const LexemeId& lexeme, const Slot& slot) const;
  // Forms realizing the flat ⟨lexeme, slot⟩ cell; empty when the paradigm has a hole there.
  std::span<const FormId> realizations(std::size_t lexeme, std::size_t slot) const;

  Ambiguity ambiguity(std::string_view form) const;

  const FeatureSpace& feature_space() const { return space_; }

 private:
  std::vector<LexiconEntry> entries_;
  Overabundance policy_ = Overabundance::kReject;

  std::vector<Tag> tags_;
  std::vector<LexemeId> lexemes_;
  std::vector<Slot> slots_;
  std::vector<std::size_t> lexeme_offsets_;  // size num_tags + 1
  std::vector<std::size_t> slot_offsets_;    // size num_tags + 1
  std::vector<std::size_t> lexeme_tags_;
  std::vector<std::size_t> slot_tags_;

  std::vector<std::string> forms_;
  std::unordered_map<std::string, FormId> form_ids_;
  std::vector<std::vector<Analysis>> analyses_;
  std::map<std::pair<std::size_t, std::size_t>, std::vector<FormId>> cells_;

  FeatureSpace space_;
};

struct ParseOptions {
  Overabundance overabundance = Overabundance::kReject;
};

// Maps one UniMorph feature bundle ("N;NOM;PL") to its tag and slot.
// Bare features resolve through the shipped dimension table; unknown ones become
// x=<feature>; "attr=value" is accepted verbatim. Exactly one POS feature is required.
std::pair<Tag, Slot> parse_bundle(std::string_view bundle, std::size_t line = 0);
// Inverse of parse_bundle: POS first, then the slot features in order.
std::string format_bundle(const Tag& tag, const Slot& slot);
// Dimension of a bare UniMorph feature, if the table lists it.
std::optional<std::string> unimorph_dimension(std::string_view feature);

// `lemma TAB form TAB features` per nonblank line; LF or CRLF.
Lexicon parse_unimorph(std::string_view text, const ParseOptions& options = {});
// Canonical serialization: one line per entry in sorted entry order.
std::string write_unimorph(const Lexicon& lexicon);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view contents);

// Splits on '\n', dropping a trailing '\r' from each line.
std::vector<std::string_view> split_lines(std::string_view text);
std::vector<std::string_view> split(std::string_view text, char delimiter);

}  // namespace syncount
