#include "syncount/lexicon.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "dimension_table.hpp"

namespace syncount {

namespace {

const std::map<std::string, std::string, std::less<>>& dimension_table() {
  static const auto table = [] {
    std::map<std::string, std::string, std::less<>> t;
    for (auto line : split_lines(detail::kDimensionTable)) {
      if (line.empty() || line.front() == '#') continue;
      auto fields = split(line, '\t');
      if (fields.size() != 2) continue;
      t.emplace(std::string(fields[0]), std::string(fields[1]));
    }
    return t;
  }();
  return table;
}

bool less_by_str(const AttributeValue& a, const AttributeValue& b) { return a.str() < b.str(); }

AttributeValue resolve_feature(std::string_view feature, std::size_t line) {
  if (auto eq = feature.find('='); eq != std::string_view::npos) {
    AttributeValue av{std::string(feature.substr(0, eq)), std::string(feature.substr(eq + 1))};
    if (av.attribute.empty() || av.value.empty() || av.value.find('=') != std::string::npos)
      throw ParseError("malformed feature '" + std::string(feature) + "'", line);
    return av;
  }
  if (auto dim = unimorph_dimension(feature)) return {*dim, std::string(feature)};
  // Composite values such as NOM/ACC belong to a dimension when all parts agree.
  if (feature.find('/') != std::string_view::npos) {
    std::optional<std::string> shared;
    bool agree = true;
    for (auto part : split(feature, '/')) {
      auto dim = unimorph_dimension(part);
      if (!dim || (shared && *shared != *dim) || *dim == "pos") {
        agree = false;
        break;
      }
      shared = dim;
    }
    if (agree && shared) return {*shared, std::string(feature)};
  }
  return {"x", std::string(feature)};
}

}  // namespace

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }
  return lines;
}

std::vector<std::string_view> split(std::string_view text, char delimiter) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (;;) {
    auto end = text.find(delimiter, start);
    if (end == std::string_view::npos) {
      parts.push_back(text.substr(start));
      return parts;
    }
    parts.push_back(text.substr(start, end - start));
    start = end + 1;
  }
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text_file(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path + "'");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw IoError("failed writing '" + path + "'");
}

// ---------------------------------------------------------------------------

Slot::Slot(std::vector<AttributeValue> features) : features_(std::move(features)) {
  if (features_.empty()) throw LexiconError("slot has no features");
  std::sort(features_.begin(), features_.end(), less_by_str);
  auto dup = std::adjacent_find(features_.begin(), features_.end());
  if (dup != features_.end()) throw LexiconError("feature '" + dup->str() + "' repeated in slot");
}

std::string Slot::str() const {
  std::string s;
  for (const auto& f : features_) {
    if (!s.empty()) s += ';';
    s += f.str();
  }
  return s;
}

FeatureSpace::FeatureSpace(std::vector<AttributeValue> features) : features_(std::move(features)) {
  std::sort(features_.begin(), features_.end(), less_by_str);
  features_.erase(std::unique(features_.begin(), features_.end()), features_.end());
  for (std::size_t i = 0; i < features_.size(); ++i) index_.emplace(features_[i].str(), i);
}

std::optional<std::size_t> FeatureSpace::index_of(const AttributeValue& feature) const {
  auto it = index_.find(feature.str());
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t FeatureSpace::require(const AttributeValue& feature) const {
  auto i = index_of(feature);
  if (!i) throw LexiconError("feature '" + feature.str() + "' is not in the feature space");
  return *i;
}

// ---------------------------------------------------------------------------

Lexicon Lexicon::from_entries(std::vector<LexiconEntry> entries, Overabundance policy) {
  std::sort(entries.begin(), entries.end());
  entries.erase(std::unique(entries.begin(), entries.end()), entries.end());

  Lexicon lex;
  lex.policy_ = policy;

  std::set<Tag> tags;
  std::map<Tag, std::set<LexemeId>> lexemes;
  std::map<Tag, std::set<Slot>> slots;
  std::set<std::string> forms;
  std::set<AttributeValue, decltype(&less_by_str)> features(&less_by_str);
  for (const auto& e : entries) {
    if (e.tag.pos.empty()) throw LexiconError("entry with empty tag");
    if (e.lexeme.tag != e.tag)
      throw LexiconError("lexeme '" + e.lexeme.lemma + "' listed under foreign tag " + e.tag.pos);
    if (e.form.empty()) throw LexiconError("entry for '" + e.lexeme.lemma + "' has an empty form");
    if (e.slot.size() == 0) throw LexiconError("entry for '" + e.lexeme.lemma + "' has an empty slot");
    tags.insert(e.tag);
    lexemes[e.tag].insert(e.lexeme);
    slots[e.tag].insert(e.slot);
    forms.insert(e.form);
    features.insert(e.tag.feature());
    features.insert(e.slot.features().begin(), e.slot.features().end());
  }

  lex.tags_.assign(tags.begin(), tags.end());
  lex.lexeme_offsets_.push_back(0);
  lex.slot_offsets_.push_back(0);
  for (std::size_t t = 0; t < lex.tags_.size(); ++t) {
    for (const auto& l : lexemes[lex.tags_[t]]) {
      lex.lexemes_.push_back(l);
      lex.lexeme_tags_.push_back(t);
    }
    for (const auto& s : slots[lex.tags_[t]]) {
      lex.slots_.push_back(s);
      lex.slot_tags_.push_back(t);
    }
    lex.lexeme_offsets_.push_back(lex.lexemes_.size());
    lex.slot_offsets_.push_back(lex.slots_.size());
  }

  lex.forms_.assign(forms.begin(), forms.end());
  for (FormId f = 0; f < lex.forms_.size(); ++f) lex.form_ids_.emplace(lex.forms_[f], f);
  lex.analyses_.resize(lex.forms_.size());

  for (const auto& e : entries) {
    auto t = *lex.tag_index(e.tag);
    auto l = *lex.lexeme_index(e.lexeme);
    auto s = *lex.slot_index(t, e.slot);
    lex.cells_[{l, s}].push_back(lex.form_ids_.at(e.form));
  }
  for (const auto& [cell, cell_forms] : lex.cells_) {
    if (cell_forms.size() > 1 && policy == Overabundance::kReject) {
      const auto& l = lex.lexemes_[cell.first];
      throw LexiconError("overabundant cell: " + l.tag.pos + " '" + l.lemma + "' " +
                         lex.slots_[cell.second].str() + " has " + std::to_string(cell_forms.size()) +
                         " forms");
    }
    const double weight = 1.0 / static_cast<double>(cell_forms.size());
    for (auto f : cell_forms)
      lex.analyses_[f].push_back({lex.lexeme_tags_[cell.first], cell.first, cell.second, weight});
  }
  for (auto& a : lex.analyses_) {
    std::sort(a.begin(), a.end(), [](const Analysis& x, const Analysis& y) {
      return std::tie(x.tag, x.lexeme, x.slot) < std::tie(y.tag, y.lexeme, y.slot);
    });
  }

  lex.space_ = FeatureSpace({features.begin(), features.end()});
  lex.entries_ = std::move(entries);
  return lex;
}

std::optional<std::size_t> Lexicon::tag_index(const Tag& tag) const {
  auto it = std::lower_bound(tags_.begin(), tags_.end(), tag);
  if (it == tags_.end() || *it != tag) return std::nullopt;
  return static_cast<std::size_t>(it - tags_.begin());
}

std::size_t Lexicon::require_tag(const Tag& tag) const {
  auto t = tag_index(tag);
  if (!t) throw LexiconError("tag '" + tag.pos + "' is not in the lexicon");
  return *t;
}

std::span<const LexemeId> Lexicon::lexemes(std::size_t t) const {
  return std::span<const LexemeId>(lexemes_).subspan(lexeme_offsets_[t],
                                                     lexeme_offsets_[t + 1] - lexeme_offsets_[t]);
}

std::span<const Slot> Lexicon::slots(std::size_t t) const {
  return std::span<const Slot>(slots_).subspan(slot_offsets_[t], slot_offsets_[t + 1] - slot_offsets_[t]);
}

std::optional<std::size_t> Lexicon::lexeme_index(const LexemeId& lexeme) const {
  auto t = tag_index(lexeme.tag);
  if (!t) return std::nullopt;
  auto first = lexemes_.begin() + static_cast<std::ptrdiff_t>(lexeme_offsets_[*t]);
  auto last = lexemes_.begin() + static_cast<std::ptrdiff_t>(lexeme_offsets_[*t + 1]);
  auto it = std::lower_bound(first, last, lexeme);
  if (it == last || *it != lexeme) return std::nullopt;
  return static_cast<std::size_t>(it - lexemes_.begin());
}

std::optional<std::size_t> Lexicon::slot_index(std::size_t t, const Slot& slot) const {
  auto first = slots_.begin() + static_cast<std::ptrdiff_t>(slot_offsets_[t]);
  auto last = slots_.begin() + static_cast<std::ptrdiff_t>(slot_offsets_[t + 1]);
  auto it = std::lower_bound(first, last, slot);
  if (it == last || *it != slot) return std::nullopt;
  return static_cast<std::size_t>(it - slots_.begin());
}

std::optional<FormId> Lexicon::form_id(std::string_view form) const {
  auto it = form_ids_.find(std::string(form));
  if (it == form_ids_.end()) return std::nullopt;
  return it->second;
}

AnalysisKey Lexicon::key(const Analysis& a) const { return {tags_[a.tag], lexemes_[a.lexeme], slots_[a.slot]}; }

std::vector<AnalysisKey> Lexicon::analyses_of(std::string_view form) const {
  std::vector<AnalysisKey> out;
  if (auto f = form_id(form)) {
    for (const auto& a : analyses_[*f]) out.push_back(key(a));
  }
  return out;
}

double Lexicon::delta(std::string_view form, const Tag& tag, const LexemeId& lexeme, const Slot& slot) const {
  auto f = form_id(form);
  auto l = lexeme_index(lexeme);
  if (!f || !l || lexeme.tag != tag) return 0.0;
  auto s = slot_index(tag_of_lexeme(*l), slot);
  if (!s) return 0.0;
  for (const auto& a : analyses_[*f])
    if (a.lexeme == *l && a.slot == *s) return a.weight;
  return 0.0;
}

std::span<const FormId> Lexicon::realizations(std::size_t lexeme, std::size_t slot) const {
  auto it = cells_.find({lexeme, slot});
  if (it == cells_.end()) return {};
  return it->second;
}

Ambiguity Lexicon::ambiguity(std::string_view form) const {
  Ambiguity amb;
  auto f = form_id(form);
  if (!f) return amb;
  const auto& as = analyses_[*f];
  amb.analyses = as.size();
  for (std::size_t i = 0; i < as.size(); ++i) {
    for (std::size_t j = i + 1; j < as.size(); ++j) {
      if (as[i].lexeme == as[j].lexeme) {
        amb.syncretic = true;
      } else {
        amb.inter_paradigmatic = true;
      }
    }
  }
  return amb;
}

// ---------------------------------------------------------------------------

std::optional<std::string> unimorph_dimension(std::string_view feature) {
  const auto& table = dimension_table();
  auto it = table.find(feature);
  if (it == table.end()) return std::nullopt;
  return it->second;
}

std::pair<Tag, Slot> parse_bundle(std::string_view bundle, std::size_t line) {
  std::optional<Tag> tag;
  std::vector<AttributeValue> features;
  bool any = false;
  for (auto raw : split(bundle, ';')) {
    if (raw.empty()) continue;
    any = true;
    auto av = resolve_feature(raw, line);
    if (av.attribute == "pos") {
      if (tag) throw ParseError("bundle '" + std::string(bundle) + "' has more than one POS feature", line);
      tag = Tag{av.value};
    } else {
      if (std::find(features.begin(), features.end(), av) != features.end())
        throw ParseError("feature '" + std::string(raw) + "' repeated in bundle", line);
      features.push_back(std::move(av));
    }
  }
  if (!any) throw ParseError("empty feature bundle", line);
  if (!tag) throw ParseError("bundle '" + std::string(bundle) + "' has no POS feature", line);
  if (features.empty())
    throw ParseError("bundle '" + std::string(bundle) + "' has no inflectional features", line);
  return {*tag, Slot(std::move(features))};
}

std::string format_bundle(const Tag& tag, const Slot& slot) {
  auto bare_ok = [](const AttributeValue& av) {
    if (av.value.find('=') != std::string::npos) return false;
    try {
      return resolve_feature(av.value, 0) == av;
    } catch (const ParseError&) {
      return false;
    }
  };
  std::string out = bare_ok(tag.feature()) ? tag.pos : tag.feature().str();
  for (const auto& f : slot.features()) {
    out += ';';
    out += bare_ok(f) ? f.value : f.str();
  }
  return out;
}

Lexicon parse_unimorph(std::string_view text, const ParseOptions& options) {
  std::vector<LexiconEntry> entries;
  std::map<std::tuple<Tag, LexemeId, Slot>, std::pair<std::string, std::size_t>> cells;
  std::size_t line_no = 0;
  for (auto line : split_lines(text)) {
    ++line_no;
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
    auto fields = split(line, '\t');
    if (fields.size() != 3)
      throw ParseError("expected 3 tab-separated fields (lemma, form, features), found " +
                           std::to_string(fields.size()),
                       line_no);
    if (fields[0].empty()) throw ParseError("empty lemma", line_no);
    if (fields[1].empty()) throw ParseError("empty form", line_no);
    auto [tag, slot] = parse_bundle(fields[2], line_no);
    LexemeId lexeme{tag, std::string(fields[0]), 0};
    std::string form(fields[1]);
    auto [it, inserted] = cells.try_emplace({tag, lexeme, slot}, form, line_no);
    if (!inserted && it->second.first != form && options.overabundance == Overabundance::kReject) {
      throw ParseError("overabundance: '" + lexeme.lemma + "' " + format_bundle(tag, slot) +
                           " already realized as '" + it->second.first + "' on line " +
                           std::to_string(it->second.second),
                       line_no);
    }
    entries.push_back({tag, std::move(lexeme), std::move(slot), std::move(form)});
  }
  return Lexicon::from_entries(std::move(entries), options.overabundance);
}

std::string write_unimorph(const Lexicon& lexicon) {
  std::string out;
  for (const auto& e : lexicon.entries()) {
    out += e.lexeme.lemma;
    out += '\t';
    out += e.form;
    out += '\t';
    out += format_bundle(e.tag, e.slot);
    out += '\n';
  }
  return out;
}

}  // namespace syncount
