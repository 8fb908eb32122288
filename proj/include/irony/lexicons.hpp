// Lexical resources behind the strategy detectors: antonym pairs, sentiment
// strength, intensifiers, negation markers. All plain-text formats, merged
// from a small TOML config.
#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "irony/errors.hpp"
#include "irony/text.hpp"

namespace irony {

// Unordered lemma pair; stored with both orders for O(1) symmetric lookup.
struct AntonymLexicon {
  struct Entry {
    std::set<std::string> sources;
    std::optional<std::string> pos;  // optional POS restriction
  };
  std::map<std::pair<std::string, std::string>, Entry> entries;  // key sorted

  static std::pair<std::string, std::string> key(std::string_view a,
                                                 std::string_view b) {
    std::string x(a), y(b);
    return x <= y ? std::make_pair(x, y) : std::make_pair(y, x);
  }

  bool contains(std::string_view a, std::string_view b) const {
    if (a == b) return false;
    return entries.count(key(a, b)) > 0;
  }

  void add(std::string_view a, std::string_view b, const std::string& source,
           std::optional<std::string> pos = std::nullopt) {
    Entry& e = entries[key(a, b)];
    e.sources.insert(source);
    if (pos) e.pos = pos;
  }

  size_t size() const { return entries.size(); }
};

struct SentimentStrengthLexicon {
  std::unordered_map<std::string, double> strength;  // normalized to [0,1]

  std::optional<double> lookup(std::string_view lemma) const {
    auto it = strength.find(std::string(lemma));
    if (it == strength.end()) return std::nullopt;
    return it->second;
  }
};

struct IntensifierLexicon {
  std::set<std::pair<std::string, std::string>> entries;  // (lemma, ADJ|ADV)

  bool contains(std::string_view lemma, std::string_view upos) const {
    return entries.count({std::string(lemma), std::string(upos)}) > 0;
  }
};

struct NegationMarkerList {
  std::vector<std::string> ordered;
  std::unordered_set<std::string> lookup;

  void add(const std::string& surface) {
    if (lookup.insert(surface).second) ordered.push_back(surface);
  }

  bool contains(std::string_view surface) const {
    std::string s = lower_ascii(surface);
    if (lookup.count(s)) return true;
    std::string stripped = strip_apostrophes(s);
    return stripped != s && lookup.count(stripped) > 0;
  }
};

struct LexiconBundle {
  AntonymLexicon antonyms;
  SentimentStrengthLexicon sentiment;
  IntensifierLexicon intensifiers;
  NegationMarkerList negation;
  std::map<std::string, size_t> antonym_counts_by_source;
};

struct LexiconConfig {
  // (source tag, path) per antonym resource.
  std::vector<std::pair<std::string, std::string>> antonym_sources;
  std::string sentiment_source;
  std::string intensifier_source;
  std::string negation_source;
};

namespace detail {

inline std::ifstream open_resource(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw input_error("cannot open resource file: " + path);
  return in;
}

// Minimal TOML subset: `key = "value"` and `key = ["a", "b"]`, # comments.
// Enough for the four lexicon keys; not a general parser.
inline std::map<std::string, std::vector<std::string>> parse_toml_subset(
    const std::string& path) {
  std::ifstream in = open_resource(path);
  std::map<std::string, std::vector<std::string>> out;
  std::string line;
  size_t line_no = 0;
  auto unquote = [&](std::string s) {
    s = trim(s);
    if (s.size() < 2 || s.front() != '"' || s.back() != '"')
      throw input_error(path + " line " + std::to_string(line_no) +
                        ": expected a quoted string");
    return s.substr(1, s.size() - 2);
  };
  while (std::getline(in, line)) {
    ++line_no;
    std::string s = trim(line);
    if (s.empty() || s[0] == '#') continue;
    size_t eq = s.find('=');
    if (eq == std::string::npos)
      throw input_error(path + " line " + std::to_string(line_no) +
                        ": expected key = value");
    std::string key = trim(s.substr(0, eq));
    std::string value = trim(s.substr(eq + 1));
    std::vector<std::string> items;
    if (!value.empty() && value.front() == '[') {
      if (value.back() != ']')
        throw input_error(path + " line " + std::to_string(line_no) +
                          ": unterminated array");
      std::string inner = value.substr(1, value.size() - 2);
      if (!trim(inner).empty())
        for (const std::string& item : split(inner, ','))
          items.push_back(unquote(item));
    } else {
      items.push_back(unquote(value));
    }
    out[key] = std::move(items);
  }
  return out;
}

inline std::string resolve_relative(const std::string& base_file,
                                    const std::string& path) {
  std::filesystem::path p(path);
  if (p.is_absolute()) return path;
  return (std::filesystem::path(base_file).parent_path() / p).string();
}

}  // namespace detail

// Reads a lexicons.toml-style config. Antonym source entries are "tag=path";
// a bare path gets its filename stem as tag.
inline LexiconConfig parse_lexicon_config(const std::string& path) {
  auto kv = detail::parse_toml_subset(path);
  LexiconConfig config;
  auto require = [&](const char* key) -> const std::vector<std::string>& {
    auto it = kv.find(key);
    if (it == kv.end())
      throw input_error(path + ": missing key '" + std::string(key) + "'");
    return it->second;
  };
  for (const std::string& entry : require("antonym_sources")) {
    size_t eq = entry.find('=');
    std::string tag = eq == std::string::npos
                          ? std::filesystem::path(entry).stem().string()
                          : entry.substr(0, eq);
    std::string p = eq == std::string::npos ? entry : entry.substr(eq + 1);
    config.antonym_sources.emplace_back(tag, detail::resolve_relative(path, p));
  }
  auto single = [&](const char* key) {
    const auto& items = require(key);
    if (items.size() != 1)
      throw input_error(path + ": key '" + std::string(key) +
                        "' must be a single path");
    return detail::resolve_relative(path, items[0]);
  };
  config.sentiment_source = single("sentiment_source");
  config.intensifier_source = single("intensifier_source");
  config.negation_source = single("negation_source");
  return config;
}

namespace detail {

inline void load_antonym_source(AntonymLexicon& lex, const std::string& tag,
                                const std::string& path, std::ostream& warnings) {
  std::ifstream in = open_resource(path);
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty() || trim(line)[0] == '#') continue;
    std::vector<std::string> cols = split(line, '\t');
    if (cols.size() != 2 && cols.size() != 3)
      throw input_error(path + " line " + std::to_string(line_no) +
                        ": expected 2 or 3 tab-separated columns");
    std::string a = lower_ascii(trim(cols[0]));
    std::string b = lower_ascii(trim(cols[1]));
    if (a.empty() || b.empty())
      throw input_error(path + " line " + std::to_string(line_no) + ": empty lemma");
    if (a == b) {
      warnings << "warning: " << path << " line " << line_no
               << ": self-pair '" << a << "' rejected\n";
      continue;
    }
    std::optional<std::string> pos;
    if (cols.size() == 3 && !trim(cols[2]).empty()) pos = trim(cols[2]);
    lex.add(a, b, tag, pos);
  }
}

inline void load_sentiment_source(SentimentStrengthLexicon& lex,
                                  const std::string& path) {
  std::ifstream in = open_resource(path);
  std::unordered_map<std::string, double> raw;
  std::string line;
  size_t line_no = 0;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty() || trim(line)[0] == '#') continue;
    std::vector<std::string> cols = split(line, '\t');
    if (cols.size() != 2)
      throw input_error(path + " line " + std::to_string(line_no) +
                        ": expected 'lemma<TAB>score'");
    double value;
    try {
      value = std::stod(cols[1]);
    } catch (const std::exception&) {
      throw input_error(path + " line " + std::to_string(line_no) +
                        ": bad score '" + cols[1] + "'");
    }
    raw[lower_ascii(trim(cols[0]))] = value;
    lo = std::min(lo, value);
    hi = std::max(hi, value);
  }
  // Affine min-max normalization per resource; a constant resource maps to 0.5.
  for (auto& [lemma, value] : raw)
    lex.strength[lemma] = hi > lo ? (value - lo) / (hi - lo) : 0.5;
}

inline void load_intensifier_source(IntensifierLexicon& lex,
                                    const std::string& path,
                                    std::ostream& warnings) {
  std::ifstream in = open_resource(path);
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty() || trim(line)[0] == '#') continue;
    std::vector<std::string> cols = split(line, '\t');
    if (cols.size() != 2)
      throw input_error(path + " line " + std::to_string(line_no) +
                        ": expected 'lemma<TAB>POS'");
    std::string pos = trim(cols[1]);
    if (pos != "ADJ" && pos != "ADV") {
      warnings << "warning: " << path << " line " << line_no
               << ": POS '" << pos << "' not ADJ/ADV, entry skipped\n";
      continue;
    }
    lex.entries.insert({lower_ascii(trim(cols[0])), pos});
  }
}

inline void load_negation_source(NegationMarkerList& lex, const std::string& path) {
  std::ifstream in = open_resource(path);
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string s = trim(line);
    if (s.empty() || s[0] == '#') continue;
    lex.add(lower_ascii(s));
  }
  if (lex.ordered.empty())
    throw input_error(path + ": negation marker list is empty");
}

}  // namespace detail

inline LexiconBundle load_lexicons(const LexiconConfig& config,
                                   std::ostream& warnings = std::cerr) {
  LexiconBundle bundle;
  for (const auto& [tag, path] : config.antonym_sources) {
    size_t before = bundle.antonyms.size();
    detail::load_antonym_source(bundle.antonyms, tag, path, warnings);
    size_t added = 0;
    for (const auto& [k, e] : bundle.antonyms.entries)
      if (e.sources.count(tag)) ++added;
    (void)before;
    bundle.antonym_counts_by_source[tag] = added;
  }
  detail::load_sentiment_source(bundle.sentiment, config.sentiment_source);
  detail::load_intensifier_source(bundle.intensifiers, config.intensifier_source,
                                  warnings);
  detail::load_negation_source(bundle.negation, config.negation_source);
  return bundle;
}

inline LexiconBundle load_lexicons(const std::string& config_path,
                                   std::ostream& warnings = std::cerr) {
  return load_lexicons(parse_lexicon_config(config_path), warnings);
}

inline bool is_antonym(std::string_view a, std::string_view b,
                       const LexiconBundle& bundle) {
  return bundle.antonyms.contains(a, b);
}

inline std::optional<double> sentiment_strength(std::string_view lemma,
                                                const LexiconBundle& bundle) {
  return bundle.sentiment.lookup(lemma);
}

// POS comes from the observed token; only ADJ/ADV entries exist, so
// conjunction uses of listed words ("so" as CONJ) never match.
inline bool is_intensifier(std::string_view lemma, std::string_view upos,
                           const LexiconBundle& bundle) {
  return bundle.intensifiers.contains(lemma, upos);
}

inline bool is_negation_marker(std::string_view surface,
                               const LexiconBundle& bundle) {
  return bundle.negation.contains(surface);
}

}  // namespace irony
