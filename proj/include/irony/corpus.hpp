// Data model and loaders for the parallel irony-interpretation corpus:
// speaker messages paired with hearer interpretations, gold labels, and
// CoNLL-U dependency parses.
#pragma once

#include <algorithm>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "irony/errors.hpp"
#include "irony/text.hpp"

namespace irony {

enum class StrategyLabel {
  LexAnt,
  SimpleNeg,
  AnWeakSent,
  AnInterrogToDecl,
  AnDesiderative,
  AntPhrasePragInf,
};

inline constexpr StrategyLabel kAllStrategyLabels[] = {
    StrategyLabel::LexAnt,          StrategyLabel::SimpleNeg,
    StrategyLabel::AnWeakSent,      StrategyLabel::AnInterrogToDecl,
    StrategyLabel::AnDesiderative,  StrategyLabel::AntPhrasePragInf,
};

inline const char* to_string(StrategyLabel label) {
  switch (label) {
    case StrategyLabel::LexAnt: return "LexAnt";
    case StrategyLabel::SimpleNeg: return "SimpleNeg";
    case StrategyLabel::AnWeakSent: return "AnWeakSent";
    case StrategyLabel::AnInterrogToDecl: return "AnInterrogToDecl";
    case StrategyLabel::AnDesiderative: return "AnDesiderative";
    case StrategyLabel::AntPhrasePragInf: return "AntPhrasePragInf";
  }
  return "?";
}

inline std::optional<StrategyLabel> parse_strategy_label(std::string_view name) {
  for (StrategyLabel label : kAllStrategyLabels)
    if (name == to_string(label)) return label;
  return std::nullopt;
}

enum class Incongruity { Explicit, Implicit, Unknown };

inline const char* to_string(Incongruity inc) {
  switch (inc) {
    case Incongruity::Explicit: return "Explicit";
    case Incongruity::Implicit: return "Implicit";
    case Incongruity::Unknown: return "Unknown";
  }
  return "?";
}

inline Incongruity parse_incongruity(std::string_view raw, size_t line_no) {
  std::string s = lower_ascii(trim(raw));
  if (s.empty() || s == "unknown") return Incongruity::Unknown;
  if (s == "explicit") return Incongruity::Explicit;
  if (s == "implicit") return Incongruity::Implicit;
  throw input_error("line " + std::to_string(line_no) +
                    ": unknown incongruity value '" + std::string(raw) + "'");
}

enum class Role { SpeakerIronic, HearerInterpretation };

struct Utterance {
  std::string id;
  std::string text;
  Role role = Role::SpeakerIronic;
};

struct GoldAnnotation {
  std::set<StrategyLabel> strategies;
  Incongruity incongruity = Incongruity::Unknown;
  std::optional<bool> markers_present;
  bool valid = true;
};

struct IronyPair {
  std::string pair_id;
  Utterance s_im;   // role SpeakerIronic
  Utterance h_int;  // role HearerInterpretation
  std::string hearer_id;
  std::optional<GoldAnnotation> gold;
};

using Corpus = std::vector<IronyPair>;

struct Token {
  int index = 0;  // 1-based position in the utterance
  std::string surface;
  std::string lemma;  // lowercase
  std::string upos;
  int head = 0;  // 0 for root, else 1-based index of the head token
  std::string deprel;
  int sentence = 0;  // 0-based sentence ordinal within the utterance
};

struct DependencyTree {
  std::string utterance_id;
  std::vector<Token> tokens;
  std::vector<int> root_indices;  // one per sentence

  const Token& token(int index) const { return tokens[index - 1]; }
  int size() const { return static_cast<int>(tokens.size()); }
  // 0 when `index` is a root.
  int parent_of(int index) const { return tokens[index - 1].head; }
  std::vector<int> children_of(int index) const {
    std::vector<int> out;
    for (const Token& t : tokens)
      if (t.head == index) out.push_back(t.index);
    return out;
  }
  bool is_root(int index) const {
    return std::find(root_indices.begin(), root_indices.end(), index) !=
           root_indices.end();
  }
};

using ParseMap = std::map<std::string, DependencyTree>;

enum class PairsFormat { Tsv, Jsonl };

namespace detail {

inline constexpr const char* kPairsHeader =
    "pair_id\thearer_id\ts_im_text\th_int_text\tgold_strategies\tincongruity\tvalid";

inline std::set<StrategyLabel> parse_gold_strategies(std::string_view raw,
                                                     size_t line_no) {
  std::set<StrategyLabel> out;
  std::string trimmed = trim(raw);
  if (trimmed.empty()) return out;
  for (const std::string& name : split(trimmed, '|')) {
    std::string t = trim(name);
    if (t.empty()) continue;
    auto label = parse_strategy_label(t);
    if (!label)
      throw input_error("line " + std::to_string(line_no) +
                        ": unknown strategy label '" + t + "'");
    out.insert(*label);
  }
  return out;
}

inline bool parse_bool_field(std::string_view raw, bool fallback, size_t line_no) {
  std::string s = lower_ascii(trim(raw));
  if (s.empty()) return fallback;
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw input_error("line " + std::to_string(line_no) + ": bad boolean '" +
                    std::string(raw) + "'");
}

struct PairAccumulator {
  Corpus corpus;
  std::unordered_set<std::string> seen_ids;
  // First utterance id assigned to each distinct speaker text; pairs sharing
  // the same ironic message share one s_im id so parses and message-level
  // analyses need no duplication.
  std::unordered_map<std::string, std::string> s_im_id_by_text;

  void add(std::string pair_id, std::string hearer_id, std::string s_text,
           std::string h_text, std::optional<GoldAnnotation> gold,
           size_t line_no) {
    if (pair_id.empty())
      throw input_error("line " + std::to_string(line_no) + ": empty pair_id");
    if (!seen_ids.insert(pair_id).second)
      throw input_error("line " + std::to_string(line_no) +
                        ": duplicate pair_id '" + pair_id + "'");
    if (trim(s_text).empty() || trim(h_text).empty())
      throw input_error("line " + std::to_string(line_no) + ": empty utterance text");

    // Mirror of the copy-elimination applied to the prior dataset release:
    // an interpretation equal to the original message is no interpretation.
    if (lower_ascii(trim(s_text)) == lower_ascii(trim(h_text))) {
      if (!gold) gold = GoldAnnotation{};
      gold->valid = false;
    }

    IronyPair pair;
    pair.pair_id = pair_id;
    pair.hearer_id = std::move(hearer_id);
    auto [it, inserted] = s_im_id_by_text.emplace(s_text, pair_id + ".s");
    pair.s_im = Utterance{it->second, std::move(s_text), Role::SpeakerIronic};
    pair.h_int = Utterance{pair_id + ".h", std::move(h_text),
                           Role::HearerInterpretation};
    pair.gold = std::move(gold);
    pair.pair_id = std::move(pair_id);
    corpus.push_back(std::move(pair));
  }
};

}  // namespace detail

inline Corpus load_pairs_tsv(std::istream& in) {
  detail::PairAccumulator acc;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line_no == 1 && line == detail::kPairsHeader) continue;
    std::vector<std::string> cols = split(line, '\t');
    if (cols.size() != 7 && cols.size() != 4)
      throw input_error("line " + std::to_string(line_no) + ": expected 4 or 7 "
                        "tab-separated columns, got " + std::to_string(cols.size()));
    std::optional<GoldAnnotation> gold;
    if (cols.size() == 7) {
      GoldAnnotation g;
      g.strategies = detail::parse_gold_strategies(cols[4], line_no);
      g.incongruity = parse_incongruity(cols[5], line_no);
      g.valid = detail::parse_bool_field(cols[6], true, line_no);
      gold = std::move(g);
    }
    acc.add(trim(cols[0]), trim(cols[1]), trim(cols[2]), trim(cols[3]),
            std::move(gold), line_no);
  }
  return std::move(acc.corpus);
}

inline Corpus load_pairs_jsonl(std::istream& in) {
  detail::PairAccumulator acc;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw input_error("line " + std::to_string(line_no) + ": bad JSON: " + e.what());
    }
    if (!obj.is_object())
      throw input_error("line " + std::to_string(line_no) + ": expected an object");
    auto str_field = [&](const char* key) -> std::string {
      if (!obj.contains(key) || !obj[key].is_string())
        throw input_error("line " + std::to_string(line_no) +
                          ": missing string field '" + key + "'");
      return obj[key].get<std::string>();
    };
    std::optional<GoldAnnotation> gold;
    if (obj.contains("gold_strategies") || obj.contains("incongruity") ||
        obj.contains("valid")) {
      GoldAnnotation g;
      if (obj.contains("gold_strategies")) {
        if (!obj["gold_strategies"].is_array())
          throw input_error("line " + std::to_string(line_no) +
                            ": gold_strategies must be an array");
        for (const auto& item : obj["gold_strategies"]) {
          auto label = parse_strategy_label(item.get<std::string>());
          if (!label)
            throw input_error("line " + std::to_string(line_no) +
                              ": unknown strategy label '" +
                              item.get<std::string>() + "'");
          g.strategies.insert(*label);
        }
      }
      if (obj.contains("incongruity"))
        g.incongruity = parse_incongruity(obj["incongruity"].get<std::string>(), line_no);
      if (obj.contains("valid")) g.valid = obj["valid"].get<bool>();
      gold = std::move(g);
    }
    acc.add(str_field("pair_id"), str_field("hearer_id"), str_field("s_im_text"),
            str_field("h_int_text"), std::move(gold), line_no);
  }
  return std::move(acc.corpus);
}

inline Corpus load_pairs(const std::string& path, PairsFormat format) {
  std::ifstream in(path);
  if (!in) throw input_error("cannot open pairs file: " + path);
  try {
    return format == PairsFormat::Tsv ? load_pairs_tsv(in) : load_pairs_jsonl(in);
  } catch (const input_error& e) {
    throw input_error(path + ": " + e.what());
  }
}

inline void save_pairs_tsv(const Corpus& corpus, std::ostream& out) {
  out << detail::kPairsHeader << "\n";
  for (const IronyPair& p : corpus) {
    std::vector<std::string> labels;
    Incongruity inc = Incongruity::Unknown;
    bool valid = true;
    if (p.gold) {
      for (StrategyLabel l : p.gold->strategies) labels.emplace_back(to_string(l));
      inc = p.gold->incongruity;
      valid = p.gold->valid;
    }
    out << p.pair_id << '\t' << p.hearer_id << '\t' << p.s_im.text << '\t'
        << p.h_int.text << '\t' << join(labels, "|") << '\t' << to_string(inc)
        << '\t' << (valid ? "true" : "false") << "\n";
  }
}

inline void save_pairs_jsonl(const Corpus& corpus, std::ostream& out) {
  for (const IronyPair& p : corpus) {
    nlohmann::ordered_json obj;
    obj["pair_id"] = p.pair_id;
    obj["hearer_id"] = p.hearer_id;
    obj["s_im_text"] = p.s_im.text;
    obj["h_int_text"] = p.h_int.text;
    nlohmann::ordered_json labels = nlohmann::ordered_json::array();
    if (p.gold)
      for (StrategyLabel l : p.gold->strategies) labels.push_back(to_string(l));
    obj["gold_strategies"] = labels;
    obj["incongruity"] = to_string(p.gold ? p.gold->incongruity : Incongruity::Unknown);
    obj["valid"] = p.gold ? p.gold->valid : true;
    out << obj.dump() << "\n";
  }
}

inline void save_pairs(const Corpus& corpus, const std::string& path,
                       PairsFormat format) {
  std::ofstream out(path);
  if (!out) throw input_error("cannot write pairs file: " + path);
  if (format == PairsFormat::Tsv)
    save_pairs_tsv(corpus, out);
  else
    save_pairs_jsonl(corpus, out);
}

namespace detail {

// Head links must form a forest over 1..n with contiguous indices.
inline void check_tree(const DependencyTree& tree) {
  const int n = tree.size();
  for (const Token& t : tree.tokens) {
    if (t.head < 0 || t.head > n)
      throw input_error("utterance '" + tree.utterance_id + "': token " +
                        std::to_string(t.index) + " has out-of-range head " +
                        std::to_string(t.head));
    if (t.lemma.empty())
      throw input_error("utterance '" + tree.utterance_id + "': token " +
                        std::to_string(t.index) + " has empty lemma");
  }
  // Cycle check: walk up from every token; a forest reaches 0 in <= n steps.
  for (const Token& t : tree.tokens) {
    int cur = t.index;
    for (int steps = 0; cur != 0; ++steps) {
      if (steps > n)
        throw input_error("utterance '" + tree.utterance_id +
                          "': cyclic head links involving token " +
                          std::to_string(t.index));
      cur = tree.tokens[cur - 1].head;
    }
  }
  for (int root : tree.root_indices)
    if (tree.tokens[root - 1].head != 0)
      throw invariant_error("utterance '" + tree.utterance_id +
                            "': root index with nonzero head");
}

struct ConlluBlock {
  std::string utterance_id;
  std::vector<Token> tokens;  // heads still block-local
};

inline void append_block(ParseMap& parses, ConlluBlock& block) {
  if (block.tokens.empty()) return;
  if (block.utterance_id.empty())
    throw input_error("CoNLL-U sentence block without '# utterance_id =' comment");
  DependencyTree& tree = parses[block.utterance_id];
  tree.utterance_id = block.utterance_id;
  const int offset = tree.size();
  const int sentence = static_cast<int>(tree.root_indices.size());
  int expected = 1;
  for (Token& t : block.tokens) {
    if (t.index != expected)
      throw input_error("utterance '" + block.utterance_id +
                        "': token ids not contiguous from 1");
    ++expected;
    t.index += offset;
    if (t.head > 0) t.head += offset;
    t.sentence = sentence;
    if (t.head == 0) tree.root_indices.push_back(t.index);
    tree.tokens.push_back(std::move(t));
  }
  block = ConlluBlock{};
}

}  // namespace detail

// Reads CoNLL-U; each sentence block must carry '# utterance_id = <id>'.
// Multiple blocks with the same id merge into a single multi-root tree
// (one root per sentence), preserving pair granularity.
inline ParseMap load_parses(std::istream& in) {
  ParseMap parses;
  detail::ConlluBlock block;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      detail::append_block(parses, block);
      continue;
    }
    if (line[0] == '#') {
      std::string body = trim(line.substr(1));
      constexpr std::string_view key = "utterance_id";
      if (body.rfind(key, 0) == 0) {
        std::string rest = trim(body.substr(key.size()));
        if (!rest.empty() && rest[0] == '=') block.utterance_id = trim(rest.substr(1));
      }
      continue;
    }
    std::vector<std::string> cols = split(line, '\t');
    if (cols.size() < 8)
      throw input_error("line " + std::to_string(line_no) +
                        ": CoNLL-U row needs >= 8 columns");
    const std::string& id = cols[0];
    // Skip multiword-token ranges (1-2) and empty nodes (1.1).
    if (id.find('-') != std::string::npos || id.find('.') != std::string::npos)
      continue;
    Token t;
    try {
      t.index = std::stoi(id);
      t.head = std::stoi(cols[6]);
    } catch (const std::exception&) {
      throw input_error("line " + std::to_string(line_no) + ": bad token/head id");
    }
    t.surface = cols[1];
    t.lemma = lower_ascii(cols[2] == "_" ? cols[1] : cols[2]);
    t.upos = cols[3];
    t.deprel = cols[7];
    block.tokens.push_back(std::move(t));
  }
  detail::append_block(parses, block);
  for (auto& [id, tree] : parses) detail::check_tree(tree);
  return parses;
}

inline ParseMap load_parses(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw input_error("cannot open parses file: " + path);
  return load_parses(in);
}

struct ValidationReport {
  size_t pairs_total = 0;
  size_t pairs_missing_parse = 0;
  size_t missing_parse_s_im = 0;
  size_t missing_parse_h_int = 0;
  size_t excluded_invalid = 0;
  size_t empty_texts = 0;
  size_t gold_present = 0;
  size_t hearer_repeats_message = 0;  // same hearer interpreting one s_im twice

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["pairs_total"] = pairs_total;
    j["pairs_missing_parse"] = pairs_missing_parse;
    j["missing_parse_s_im"] = missing_parse_s_im;
    j["missing_parse_h_int"] = missing_parse_h_int;
    j["excluded_invalid"] = excluded_invalid;
    j["empty_texts"] = empty_texts;
    j["gold_present"] = gold_present;
    j["hearer_repeats_message"] = hearer_repeats_message;
    return j;
  }
};

inline ValidationReport validate_corpus(const Corpus& corpus, const ParseMap& parses) {
  ValidationReport report;
  report.pairs_total = corpus.size();
  std::map<std::string, std::set<std::string>> hearers_by_message;
  for (const IronyPair& p : corpus) {
    bool missing_s = parses.find(p.s_im.id) == parses.end();
    bool missing_h = parses.find(p.h_int.id) == parses.end();
    if (missing_s) ++report.missing_parse_s_im;
    if (missing_h) ++report.missing_parse_h_int;
    if (missing_s || missing_h) ++report.pairs_missing_parse;
    if (p.gold) {
      ++report.gold_present;
      if (!p.gold->valid) ++report.excluded_invalid;
    }
    if (trim(p.s_im.text).empty()) ++report.empty_texts;
    if (trim(p.h_int.text).empty()) ++report.empty_texts;
    if (!hearers_by_message[p.s_im.id].insert(p.hearer_id).second)
      ++report.hearer_repeats_message;
  }
  return report;
}

}  // namespace irony
