#include "syncount/counts.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

namespace syncount {

std::string format_number(double value) {
  if (std::floor(value) == value && std::abs(value) < 9007199254740992.0)
    return std::to_string(static_cast<long long>(value));
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

double parse_number(std::string_view text, std::size_t line) {
  double value = 0.0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size())
    throw ParseError("invalid number '" + std::string(text) + "'", line);
  return value;
}

void CountTable::add(std::string_view form, double count) {
  if (!std::isfinite(count) || count < 0.0)
    throw std::invalid_argument("count for '" + std::string(form) + "' must be finite and nonnegative");
  auto it = counts_.find(form);
  if (it == counts_.end()) {
    counts_.emplace(std::string(form), count);
  } else {
    it->second += count;
  }
}

double CountTable::get(std::string_view form) const {
  auto it = counts_.find(form);
  return it == counts_.end() ? 0.0 : it->second;
}

double CountTable::total() const {
  double sum = 0.0;
  for (const auto& [form, c] : counts_) sum += c;
  return sum;
}

bool CountTable::integral() const {
  for (const auto& [form, c] : counts_)
    if (std::floor(c) != c) return false;
  return true;
}

FilteredCounts filter_counts(const Lexicon& lexicon, const CountTable& counts) {
  FilteredCounts out;
  for (const auto& [form, c] : counts) {
    if (lexicon.form_id(form)) {
      out.kept.add(form, c);
    } else {
      out.dropped_tokens += c;
      ++out.dropped_types;
    }
  }
  return out;
}

IndexedCounts index_counts(const Lexicon& lexicon, const CountTable& counts) {
  IndexedCounts out;
  out.counts.reserve(counts.size());
  for (const auto& [form, c] : counts) {
    auto f = lexicon.form_id(form);
    if (!f) throw LexiconError("form '" + form + "' is not in the lexicon");
    out.counts.emplace_back(*f, c);
    out.total += c;
  }
  return out;
}

CountTable parse_counts(std::string_view text) {
  CountTable table;
  std::size_t line_no = 0;
  for (auto line : split_lines(text)) {
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    auto fields = split(line, '\t');
    if (fields.size() != 2)
      throw ParseError("expected 2 tab-separated fields (form, count), found " + std::to_string(fields.size()),
                       line_no);
    if (fields[0].empty()) throw ParseError("empty form", line_no);
    double c = parse_number(fields[1], line_no);
    if (!std::isfinite(c) || c < 0.0) throw ParseError("count must be finite and nonnegative", line_no);
    table.add(fields[0], c);
  }
  return table;
}

std::string write_counts(const CountTable& counts) {
  std::string out;
  for (const auto& [form, c] : counts) {
    out += form;
    out += '\t';
    out += format_number(c);
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------

void ReferenceCounts::add(const AnalysisKey& analysis, std::string_view form, double count) {
  if (!std::isfinite(count) || count < 0.0)
    throw std::invalid_argument("reference count for '" + std::string(form) + "' must be finite and nonnegative");
  auto it = by_form_.find(form);
  if (it == by_form_.end()) it = by_form_.emplace(std::string(form), PerForm{}).first;
  it->second[analysis] += count;
}

double ReferenceCounts::total() const {
  double sum = 0.0;
  for (const auto& [form, per] : by_form_)
    for (const auto& [a, c] : per) sum += c;
  return sum;
}

CountTable ReferenceCounts::surface_counts() const {
  CountTable table;
  for (const auto& [form, per] : by_form_) {
    double sum = 0.0;
    for (const auto& [a, c] : per) sum += c;
    table.add(form, sum);
  }
  return table;
}

ReferenceCounts filter_reference(const Lexicon& lexicon, const ReferenceCounts& reference) {
  ReferenceCounts kept;
  double dropped = reference.dropped_tokens();
  for (const auto& [form, per] : reference.by_form()) {
    for (const auto& [a, c] : per) {
      if (lexicon.delta(form, a.tag, a.lexeme, a.slot) > 0.0) {
        kept.add(a, form, c);
      } else {
        dropped += c;
      }
    }
  }
  kept.set_dropped_tokens(dropped);
  return kept;
}

ReferenceCounts parse_reference(std::string_view text) {
  ReferenceCounts ref;
  std::size_t line_no = 0;
  bool header = false;
  for (auto line : split_lines(text)) {
    ++line_no;
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
    auto fields = split(line, '\t');
    if (fields.size() != 4)
      throw ParseError("expected 4 tab-separated fields (lemma, form, features, count), found " +
                           std::to_string(fields.size()),
                       line_no);
    if (!header) {
      if (fields[0] != "lemma" || fields[1] != "form" || fields[2] != "features")
        throw ParseError("missing header 'lemma\\tform\\tfeatures\\t<count>'", line_no);
      header = true;
      continue;
    }
    if (fields[0].empty()) throw ParseError("empty lemma", line_no);
    if (fields[1].empty()) throw ParseError("empty form", line_no);
    auto [tag, slot] = parse_bundle(fields[2], line_no);
    double c = parse_number(fields[3], line_no);
    if (!std::isfinite(c) || c < 0.0) throw ParseError("count must be finite and nonnegative", line_no);
    LexemeId lexeme{tag, std::string(fields[0]), 0};
    ref.add({tag, std::move(lexeme), std::move(slot)}, fields[1], c);
  }
  return ref;
}

std::string write_reference(const ReferenceCounts& reference, std::string_view count_column) {
  std::string out = "lemma\tform\tfeatures\t";
  out += count_column;
  out += '\n';
  for (const auto& [form, per] : reference.by_form()) {
    for (const auto& [a, c] : per) {
      out += a.lexeme.lemma;
      out += '\t';
      out += form;
      out += '\t';
      out += format_bundle(a.tag, a.slot);
      out += '\t';
      out += format_number(c);
      out += '\n';
    }
  }
  return out;
}

}  // namespace syncount
