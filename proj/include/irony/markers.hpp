// Rule-based irony-marker detection over speaker messages: typographic
// devices (emoticons, emoji, hashtags, punctuation runs, caps, quotes) and
// morpho-syntactic ones (interjections, tag questions). The rule inventory is
// data-driven so it can be swapped without code changes.
#pragma once

#include <optional>
#include <regex>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "irony/corpus.hpp"
#include "irony/errors.hpp"
#include "irony/text.hpp"

namespace irony {

enum class TypographicMarker {
  Emoticon, Emoji, Hashtag, MultiPunct, AllCaps, Quotation, Url,
};
enum class MorphoMarker { Interjection, TagQuestion };

inline const char* to_string(TypographicMarker m) {
  switch (m) {
    case TypographicMarker::Emoticon: return "Emoticon";
    case TypographicMarker::Emoji: return "Emoji";
    case TypographicMarker::Hashtag: return "Hashtag";
    case TypographicMarker::MultiPunct: return "MultiPunct";
    case TypographicMarker::AllCaps: return "AllCaps";
    case TypographicMarker::Quotation: return "Quotation";
    case TypographicMarker::Url: return "Url";
  }
  return "?";
}

inline const char* to_string(MorphoMarker m) {
  switch (m) {
    case MorphoMarker::Interjection: return "Interjection";
    case MorphoMarker::TagQuestion: return "TagQuestion";
  }
  return "?";
}

struct MarkerHit {
  std::string marker_class;
  std::string text;
  size_t begin = 0;  // byte offsets into the raw utterance text
  size_t end = 0;
};

struct MarkerSet {
  std::string utterance_id;
  std::set<TypographicMarker> typographic;
  std::set<MorphoMarker> morpho;
  std::vector<MarkerHit> hits;

  // Url is recorded for reporting but does not count as an irony marker.
  bool any_marker() const {
    for (TypographicMarker m : typographic)
      if (m != TypographicMarker::Url) return true;
    return !morpho.empty();
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["utterance_id"] = utterance_id;
    nlohmann::ordered_json typo = nlohmann::ordered_json::array();
    for (TypographicMarker m : typographic) typo.push_back(to_string(m));
    j["typographic"] = typo;
    nlohmann::ordered_json morph = nlohmann::ordered_json::array();
    for (MorphoMarker m : morpho) morph.push_back(to_string(m));
    j["morphosyntactic"] = morph;
    j["any_marker"] = any_marker();
    nlohmann::ordered_json spans = nlohmann::ordered_json::array();
    for (const MarkerHit& hit : hits)
      spans.push_back({{"class", hit.marker_class},
                       {"text", hit.text},
                       {"begin", hit.begin},
                       {"end", hit.end}});
    j["spans"] = spans;
    return j;
  }
};

struct MarkerRules {
  std::vector<std::string> emoticon_patterns;
  std::vector<std::pair<char32_t, char32_t>> emoji_ranges;
  std::string hashtag_pattern;
  std::set<std::string> excluded_hashtags;  // the collection tags
  std::string multipunct_pattern;
  size_t allcaps_min_len = 2;
  std::vector<std::pair<std::string, std::string>> quotation_pairs;
  std::string url_pattern;
  std::set<std::string> interjections;
  std::vector<std::string> tag_question_phrases;

  std::vector<std::regex> emoticon_regexes;
  std::regex hashtag_regex;
  std::regex multipunct_regex;
  std::regex url_regex;

  void compile() {
    emoticon_regexes.clear();
    for (const std::string& p : emoticon_patterns)
      emoticon_regexes.emplace_back(p);
    hashtag_regex = std::regex(hashtag_pattern);
    multipunct_regex = std::regex(multipunct_pattern);
    url_regex = std::regex(url_pattern, std::regex::icase);
  }

  static MarkerRules defaults() {
    MarkerRules r;
    r.emoticon_patterns = {
        R"([:;=8][o^'-]?[)(DPp/\\|*\[\]3])",
        R"([)(DPp/\\|*\[\]][o^'-]?[:;=8])",
        R"(<3)",
        R"(\^_*\^)",
    };
    r.emoji_ranges = {{0x1F300, 0x1F5FF}, {0x1F600, 0x1F64F},
                      {0x1F680, 0x1F6FF}, {0x1F900, 0x1FAFF},
                      {0x2600, 0x27BF},   {0x1F1E6, 0x1F1FF},
                      {0x2B00, 0x2BFF}};
    r.hashtag_pattern = R"(#\w+)";
    r.excluded_hashtags = {"#irony", "#sarcasm", "#sarcastic"};
    r.multipunct_pattern = R"([!?]{2,})";
    r.allcaps_min_len = 2;
    r.quotation_pairs = {{"\"", "\""}, {"“", "”"}};
    r.url_pattern = R"((https?://|www\.)\S+)";
    r.interjections = {"yay", "wow", "ugh", "duh",  "nah",  "oh",
                       "ah",  "huh", "woo", "yep",  "yeap", "hmm"};
    r.tag_question_phrases = {"isn't it", "isnt it", "right", "eh", "huh",
                              "no", "don't you think", "dont you think"};
    r.compile();
    return r;
  }

  static MarkerRules from_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open marker rules: " + path);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw input_error(path + ": bad rules JSON: " + e.what());
    }
    MarkerRules r;
    const auto& typo = j.at("typographic");
    for (const auto& p : typo.at("Emoticon").at("regexes"))
      r.emoticon_patterns.push_back(p.get<std::string>());
    for (const auto& range : typo.at("Emoji").at("codepoint_ranges")) {
      char32_t lo = std::stoul(range.at(0).get<std::string>(), nullptr, 16);
      char32_t hi = std::stoul(range.at(1).get<std::string>(), nullptr, 16);
      r.emoji_ranges.emplace_back(lo, hi);
    }
    r.hashtag_pattern = typo.at("Hashtag").at("regex").get<std::string>();
    for (const auto& tag : typo.at("Hashtag").at("exclude"))
      r.excluded_hashtags.insert(lower_ascii(tag.get<std::string>()));
    r.multipunct_pattern = typo.at("MultiPunct").at("regex").get<std::string>();
    r.allcaps_min_len = typo.at("AllCaps").at("min_len").get<size_t>();
    for (const auto& pair : typo.at("Quotation").at("pairs"))
      r.quotation_pairs.emplace_back(pair.at(0).get<std::string>(),
                                     pair.at(1).get<std::string>());
    r.url_pattern = typo.at("Url").at("regex").get<std::string>();
    const auto& morpho = j.at("morphosyntactic");
    for (const auto& w : morpho.at("Interjection").at("words"))
      r.interjections.insert(lower_ascii(w.get<std::string>()));
    for (const auto& p : morpho.at("TagQuestion").at("phrases"))
      r.tag_question_phrases.push_back(lower_ascii(p.get<std::string>()));
    r.compile();
    return r;
  }
};

inline MarkerSet detect_markers(const Utterance& message,
                                const DependencyTree* tree,
                                const MarkerRules& rules) {
  MarkerSet out;
  out.utterance_id = message.id;
  const std::string& text = message.text;

  auto add_typo = [&](TypographicMarker m, const std::string& hit, size_t begin,
                      size_t end) {
    out.typographic.insert(m);
    out.hits.push_back({to_string(m), hit, begin, end});
  };
  auto add_morpho = [&](MorphoMarker m, const std::string& hit, size_t begin,
                        size_t end) {
    out.morpho.insert(m);
    out.hits.push_back({to_string(m), hit, begin, end});
  };

  // URL spans first: they are full of ':/('-like substrings and '#' fragments
  // that must not masquerade as emoticons or hashtags.
  std::vector<std::pair<size_t, size_t>> url_spans;
  for (auto it = std::sregex_iterator(text.begin(), text.end(), rules.url_regex);
       it != std::sregex_iterator(); ++it) {
    url_spans.emplace_back(static_cast<size_t>(it->position()),
                           static_cast<size_t>(it->position() + it->length()));
    add_typo(TypographicMarker::Url, it->str(), url_spans.back().first,
             url_spans.back().second);
  }
  auto inside_url = [&](size_t begin, size_t end) {
    for (const auto& [lo, hi] : url_spans)
      if (begin < hi && end > lo) return true;
    return false;
  };

  for (const std::regex& re : rules.emoticon_regexes) {
    for (auto it = std::sregex_iterator(text.begin(), text.end(), re);
         it != std::sregex_iterator(); ++it) {
      size_t begin = static_cast<size_t>(it->position());
      size_t end = begin + static_cast<size_t>(it->length());
      if (inside_url(begin, end)) continue;
      add_typo(TypographicMarker::Emoticon, it->str(), begin, end);
    }
  }

  for (const Codepoint& cp : utf8_codepoints(text)) {
    for (const auto& [lo, hi] : rules.emoji_ranges) {
      if (cp.value >= lo && cp.value <= hi) {
        add_typo(TypographicMarker::Emoji, text.substr(cp.begin, cp.size),
                 cp.begin, cp.begin + cp.size);
        break;
      }
    }
  }

  for (auto it = std::sregex_iterator(text.begin(), text.end(), rules.hashtag_regex);
       it != std::sregex_iterator(); ++it) {
    std::string tag = lower_ascii(it->str());
    if (rules.excluded_hashtags.count(tag)) continue;
    size_t begin = static_cast<size_t>(it->position());
    size_t end = begin + static_cast<size_t>(it->length());
    if (inside_url(begin, end)) continue;
    add_typo(TypographicMarker::Hashtag, it->str(), begin, end);
  }

  for (auto it = std::sregex_iterator(text.begin(), text.end(),
                                      rules.multipunct_regex);
       it != std::sregex_iterator(); ++it) {
    size_t begin = static_cast<size_t>(it->position());
    size_t end = begin + static_cast<size_t>(it->length());
    if (inside_url(begin, end)) continue;
    add_typo(TypographicMarker::MultiPunct, it->str(), begin, end);
  }

  // Fully-capitalized alphabetic tokens.
  {
    size_t i = 0;
    while (i < text.size()) {
      while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i])))
        ++i;
      size_t start = i;
      while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i])))
        ++i;
      if (i > start) {
        std::string token = text.substr(start, i - start);
        while (!token.empty() &&
               detail::is_trailing_punct(token.back()))
          token.pop_back();
        bool caps = token.size() >= rules.allcaps_min_len;
        for (char c : token)
          if (!std::isupper(static_cast<unsigned char>(c))) caps = false;
        if (caps)
          add_typo(TypographicMarker::AllCaps, token, start, start + token.size());
      }
    }
  }

  for (const auto& [open, close] : rules.quotation_pairs) {
    size_t first = text.find(open);
    if (first == std::string::npos) continue;
    size_t second = text.find(close, first + open.size());
    if (second == std::string::npos) continue;
    add_typo(TypographicMarker::Quotation,
             text.substr(first, second + close.size() - first), first,
             second + close.size());
  }

  for (const std::string& token : tokenize(text)) {
    if (rules.interjections.count(lower_ascii(token))) {
      size_t pos = text.find(token);
      add_morpho(MorphoMarker::Interjection, token,
                 pos == std::string::npos ? 0 : pos,
                 pos == std::string::npos ? 0 : pos + token.size());
    }
  }
  if (tree) {
    for (const Token& t : tree->tokens)
      if (t.upos == "INTJ" && !rules.interjections.count(t.lemma))
        add_morpho(MorphoMarker::Interjection, t.surface, 0, 0);
  }

  {
    std::string lower = lower_ascii(trim(text));
    if (!lower.empty() && lower.back() == '?') {
      std::string head = trim(lower.substr(0, lower.size() - 1));
      for (const std::string& phrase : rules.tag_question_phrases) {
        if (head.size() < phrase.size()) continue;
        if (head.compare(head.size() - phrase.size(), phrase.size(), phrase) != 0)
          continue;
        // phrase must start at a token boundary
        size_t start = head.size() - phrase.size();
        if (start > 0 && head[start - 1] != ' ' && head[start - 1] != ',')
          continue;
        add_morpho(MorphoMarker::TagQuestion, phrase + "?",
                   text.size() >= phrase.size() + 1
                       ? text.size() - phrase.size() - 1
                       : 0,
                   text.size());
        break;
      }
    }
  }

  return out;
}

inline std::optional<TypographicMarker> parse_typographic_marker(
    std::string_view name) {
  for (TypographicMarker m :
       {TypographicMarker::Emoticon, TypographicMarker::Emoji,
        TypographicMarker::Hashtag, TypographicMarker::MultiPunct,
        TypographicMarker::AllCaps, TypographicMarker::Quotation,
        TypographicMarker::Url})
    if (name == to_string(m)) return m;
  return std::nullopt;
}

inline std::optional<MorphoMarker> parse_morpho_marker(std::string_view name) {
  for (MorphoMarker m : {MorphoMarker::Interjection, MorphoMarker::TagQuestion})
    if (name == to_string(m)) return m;
  return std::nullopt;
}

inline void save_marker_sets_jsonl(const std::vector<MarkerSet>& sets,
                                   const std::string& path) {
  std::ofstream out(path);
  if (!out) throw input_error("cannot write markers file: " + path);
  for (const MarkerSet& set : sets) out << set.to_json().dump() << "\n";
}

inline std::map<std::string, MarkerSet> load_marker_sets_jsonl(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw input_error("cannot open markers file: " + path);
  std::map<std::string, MarkerSet> out;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw input_error(path + " line " + std::to_string(line_no) +
                        ": bad JSON: " + e.what());
    }
    MarkerSet set;
    set.utterance_id = j.at("utterance_id").get<std::string>();
    for (const auto& name : j.at("typographic"))
      if (auto m = parse_typographic_marker(name.get<std::string>()))
        set.typographic.insert(*m);
    for (const auto& name : j.at("morphosyntactic"))
      if (auto m = parse_morpho_marker(name.get<std::string>()))
        set.morpho.insert(*m);
    out.emplace(set.utterance_id, std::move(set));
  }
  return out;
}

struct MarkerPrevalence {
  std::optional<double> explicit_share;  // percent of messages with a marker
  std::optional<double> implicit_share;
  size_t explicit_messages = 0;
  size_t implicit_messages = 0;
  size_t unknown_messages = 0;

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    if (explicit_share)
      j["explicit_share_pct"] = *explicit_share;
    else
      j["explicit_share_pct"] = nullptr;
    if (implicit_share)
      j["implicit_share_pct"] = *implicit_share;
    else
      j["implicit_share_pct"] = nullptr;
    j["explicit_messages"] = explicit_messages;
    j["implicit_messages"] = implicit_messages;
    j["unknown_messages"] = unknown_messages;
    return j;
  }
};

// Share of speaker messages carrying any irony marker, split by the gold
// incongruity label. Message-level: pairs sharing one s_im count once.
inline MarkerPrevalence marker_prevalence(
    const Corpus& corpus,
    const std::map<std::string, MarkerSet>& markers_by_sim_id) {
  std::map<std::string, Incongruity> incongruity_by_message;
  for (const IronyPair& p : corpus) {
    if (p.gold && !p.gold->valid) continue;
    Incongruity inc = p.gold ? p.gold->incongruity : Incongruity::Unknown;
    auto [it, inserted] = incongruity_by_message.emplace(p.s_im.id, inc);
    if (!inserted && it->second == Incongruity::Unknown) it->second = inc;
  }
  size_t exp_total = 0, exp_marked = 0, imp_total = 0, imp_marked = 0;
  MarkerPrevalence out;
  for (const auto& [id, inc] : incongruity_by_message) {
    bool marked = false;
    auto it = markers_by_sim_id.find(id);
    if (it != markers_by_sim_id.end()) marked = it->second.any_marker();
    switch (inc) {
      case Incongruity::Explicit:
        ++exp_total;
        if (marked) ++exp_marked;
        break;
      case Incongruity::Implicit:
        ++imp_total;
        if (marked) ++imp_marked;
        break;
      case Incongruity::Unknown:
        ++out.unknown_messages;
        break;
    }
  }
  out.explicit_messages = exp_total;
  out.implicit_messages = imp_total;
  if (exp_total > 0) out.explicit_share = 100.0 * exp_marked / exp_total;
  if (imp_total > 0) out.implicit_share = 100.0 * imp_marked / imp_total;
  return out;
}

}  // namespace irony
