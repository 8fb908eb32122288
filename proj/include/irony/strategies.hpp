// The strategy detectors and the cascade combining them into per-pair label
// sets: lexical antonyms (aligned / dependency / fallback), predicate
// negation, sentiment weakening, interrogative-to-declarative rewrites,
// desiderative constructions, and mined opposite phrases as a last resort.
// Combined strategies consume the base evidence they build on, so a base
// label and its combined form are never double counted.
#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "irony/alignment.hpp"
#include "irony/corpus.hpp"
#include "irony/lexicons.hpp"
#include "irony/rq.hpp"
#include "irony/text.hpp"

namespace irony {

enum class DetectMethod {
  AlignedAntonym,
  DependencyAntonym,
  FallbackAntonym,
  NegationScope,
  WeakenNeutralize,
  WeakenDropIntensifier,
  RqTransform,
  DesiderativePattern,
  OppositePhrase,
};

inline const char* to_string(DetectMethod m) {
  switch (m) {
    case DetectMethod::AlignedAntonym: return "AlignedAntonym";
    case DetectMethod::DependencyAntonym: return "DependencyAntonym";
    case DetectMethod::FallbackAntonym: return "FallbackAntonym";
    case DetectMethod::NegationScope: return "NegationScope";
    case DetectMethod::WeakenNeutralize: return "WeakenNeutralize";
    case DetectMethod::WeakenDropIntensifier: return "WeakenDropIntensifier";
    case DetectMethod::RqTransform: return "RqTransform";
    case DetectMethod::DesiderativePattern: return "DesiderativePattern";
    case DetectMethod::OppositePhrase: return "OppositePhrase";
  }
  return "?";
}

inline std::optional<DetectMethod> parse_detect_method(std::string_view name) {
  for (DetectMethod m :
       {DetectMethod::AlignedAntonym, DetectMethod::DependencyAntonym,
        DetectMethod::FallbackAntonym, DetectMethod::NegationScope,
        DetectMethod::WeakenNeutralize, DetectMethod::WeakenDropIntensifier,
        DetectMethod::RqTransform, DetectMethod::DesiderativePattern,
        DetectMethod::OppositePhrase})
    if (name == to_string(m)) return m;
  return std::nullopt;
}

struct TokenSpan {
  int begin = 0;
  int end = 0;
};

struct StrategyEvidence {
  StrategyLabel label = StrategyLabel::LexAnt;
  DetectMethod method = DetectMethod::FallbackAntonym;
  TokenSpan s_span;
  TokenSpan h_span;
  std::string s_trigger;
  std::string h_trigger;
  int s_sentence = 0;
  int h_sentence = 0;
  // Anchor for consumption matching: the negation-marker token index for
  // negation-family evidence, 0 otherwise.
  int anchor = 0;
  bool consumed = false;
};

struct StrategySet {
  std::string pair_id;
  std::set<StrategyLabel> labels;
  std::vector<StrategyEvidence> evidence;
  std::vector<std::string> skipped;  // detectors disabled by missing resources
};

// Tokenized view of one utterance: tree tokens when a parse exists, the
// whitespace/punctuation fallback otherwise. Tokens lowercase; lemmas equal
// tokens in the fallback case.
struct UtteranceView {
  std::vector<std::string> tokens;
  std::vector<std::string> lemmas;
  const DependencyTree* tree = nullptr;

  int size() const { return static_cast<int>(tokens.size()); }
  int sentence_of(int index) const {
    return tree ? tree->token(index).sentence : 0;
  }
  bool has_lemma(const std::string& lemma) const {
    return std::find(lemmas.begin(), lemmas.end(), lemma) != lemmas.end();
  }
  int first_lemma(const std::string& lemma) const {
    for (int i = 1; i <= size(); ++i)
      if (lemmas[i - 1] == lemma) return i;
    return 0;
  }
};

inline UtteranceView make_view(const Utterance& utterance,
                               const DependencyTree* tree) {
  UtteranceView view;
  view.tree = tree;
  if (tree) {
    for (const Token& t : tree->tokens) {
      view.tokens.push_back(lower_ascii(t.surface));
      view.lemmas.push_back(t.lemma);
    }
  } else {
    for (const std::string& token : tokenize(utterance.text)) {
      view.tokens.push_back(lower_ascii(token));
      view.lemmas.push_back(view.tokens.back());
    }
  }
  return view;
}

struct DetectorConfig {
  double weaken_margin = 0.05;        // minimum strength gap on the [0,1] scale
  int desiderative_max_gap = 2;       // words allowed between "I" and "wish"
  int max_phrase_len = 4;
  SymmetrizeHeuristic heuristic = SymmetrizeHeuristic::GrowDiagFinal;
};

namespace detail {

inline StrategyEvidence antonym_evidence(DetectMethod method,
                                         const UtteranceView& s,
                                         const UtteranceView& h, int i, int j) {
  StrategyEvidence ev;
  ev.label = StrategyLabel::LexAnt;
  ev.method = method;
  ev.s_span = {i, i};
  ev.h_span = {j, j};
  ev.s_trigger = s.lemmas[i - 1];
  ev.h_trigger = h.lemmas[j - 1];
  ev.s_sentence = s.sentence_of(i);
  ev.h_sentence = h.sentence_of(j);
  return ev;
}

// "The nodes modified by the antonyms are the same": the parents share a
// lemma, or the two antonyms each govern children sharing a lemma. Covers
// both attributive and shared-object configurations.
inline bool dependency_antonym_match(const UtteranceView& s,
                                     const UtteranceView& h, int i, int j) {
  if (s.tree->is_root(i) && h.tree->is_root(j)) return true;
  int pi = s.tree->parent_of(i);
  int pj = h.tree->parent_of(j);
  if (pi > 0 && pj > 0 && s.lemmas[pi - 1] == h.lemmas[pj - 1]) return true;
  for (int ci : s.tree->children_of(i))
    for (int cj : h.tree->children_of(j))
      if (s.lemmas[ci - 1] == h.lemmas[cj - 1]) return true;
  return false;
}

}  // namespace detail

// Three sub-methods in order: antonyms linked by the word alignment, antonyms
// in matching dependency configurations, and a plain cross-side lexicon scan
// that runs only when the first two found nothing.
inline std::vector<StrategyEvidence> detect_lexical_antonym(
    const UtteranceView& s, const UtteranceView& h, const Alignment* alignment,
    const LexiconBundle& lexicons) {
  std::vector<StrategyEvidence> out;
  std::set<std::pair<int, int>> covered;

  if (alignment) {
    for (const auto& [i, j] : *alignment) {
      if (i < 1 || i > s.size() || j < 1 || j > h.size()) continue;
      if (is_antonym(s.lemmas[i - 1], h.lemmas[j - 1], lexicons)) {
        out.push_back(detail::antonym_evidence(DetectMethod::AlignedAntonym,
                                               s, h, i, j));
        covered.insert({i, j});
      }
    }
  }
  if (s.tree && h.tree) {
    for (int i = 1; i <= s.size(); ++i) {
      for (int j = 1; j <= h.size(); ++j) {
        if (covered.count({i, j})) continue;
        if (!is_antonym(s.lemmas[i - 1], h.lemmas[j - 1], lexicons)) continue;
        if (detail::dependency_antonym_match(s, h, i, j)) {
          out.push_back(detail::antonym_evidence(DetectMethod::DependencyAntonym,
                                                 s, h, i, j));
          covered.insert({i, j});
        }
      }
    }
  }
  if (out.empty()) {
    std::set<std::pair<std::string, std::string>> seen;
    for (int i = 1; i <= s.size(); ++i)
      for (int j = 1; j <= h.size(); ++j)
        if (is_antonym(s.lemmas[i - 1], h.lemmas[j - 1], lexicons) &&
            seen.insert({s.lemmas[i - 1], h.lemmas[j - 1]}).second)
          out.push_back(detail::antonym_evidence(DetectMethod::FallbackAntonym,
                                                 s, h, i, j));
  }
  return out;
}

// A negation marker with its dependency parent, present on exactly one side.
struct NegationScopeCandidate {
  bool marker_in_h = false;
  int marker_index = 0;
  int parent_index = 0;
};

inline std::vector<NegationScopeCandidate> negation_scopes(
    const UtteranceView& s, const UtteranceView& h,
    const LexiconBundle& lexicons, std::vector<std::string>* skipped = nullptr) {
  auto markers_of = [&](const UtteranceView& view) {
    std::vector<int> out;
    for (int i = 1; i <= view.size(); ++i)
      if (is_negation_marker(view.tokens[i - 1], lexicons)) out.push_back(i);
    return out;
  };
  std::vector<int> in_s = markers_of(s);
  std::vector<int> in_h = markers_of(h);
  std::vector<NegationScopeCandidate> out;
  if (in_s.empty() == in_h.empty()) return out;  // none, or markers on both sides
  bool marker_in_h = !in_h.empty();
  const UtteranceView& side = marker_in_h ? h : s;
  if (!side.tree) {
    if (skipped) skipped->push_back("negation: marker side unparsed");
    return out;
  }
  for (int marker : (marker_in_h ? in_h : in_s)) {
    int parent = side.tree->parent_of(marker);
    if (parent > 0) out.push_back({marker_in_h, marker, parent});
  }
  return out;
}

// Fires when the marker's parent lemma also occurs on the other side.
inline std::vector<StrategyEvidence> detect_simple_negation(
    const UtteranceView& s, const UtteranceView& h,
    const LexiconBundle& lexicons, std::vector<std::string>* skipped = nullptr) {
  std::vector<StrategyEvidence> out;
  for (const NegationScopeCandidate& scope : negation_scopes(s, h, lexicons,
                                                             skipped)) {
    const UtteranceView& marker_side = scope.marker_in_h ? h : s;
    const UtteranceView& other_side = scope.marker_in_h ? s : h;
    const std::string& parent_lemma = marker_side.lemmas[scope.parent_index - 1];
    int match = other_side.first_lemma(parent_lemma);
    if (match == 0) continue;
    StrategyEvidence ev;
    ev.label = StrategyLabel::SimpleNeg;
    ev.method = DetectMethod::NegationScope;
    TokenSpan marker_span{std::min(scope.marker_index, scope.parent_index),
                          std::max(scope.marker_index, scope.parent_index)};
    TokenSpan match_span{match, match};
    ev.s_span = scope.marker_in_h ? match_span : marker_span;
    ev.h_span = scope.marker_in_h ? marker_span : match_span;
    ev.s_trigger = scope.marker_in_h ? parent_lemma
                                     : marker_side.tokens[scope.marker_index - 1];
    ev.h_trigger = scope.marker_in_h ? marker_side.tokens[scope.marker_index - 1]
                                     : parent_lemma;
    ev.s_sentence = s.sentence_of(ev.s_span.begin);
    ev.h_sentence = h.sentence_of(ev.h_span.begin);
    ev.anchor = scope.marker_index;
    out.push_back(std::move(ev));
  }
  return out;
}

namespace detail {

inline bool has_intensifier_child(const UtteranceView& view, int index,
                                  const LexiconBundle& lexicons) {
  if (!view.tree) return false;
  for (int child : view.tree->children_of(index))
    if (is_intensifier(view.lemmas[child - 1], view.tree->token(child).upos,
                       lexicons))
      return true;
  return false;
}

inline void consume_negation_anchor(std::vector<StrategyEvidence>& evidence,
                                    int marker_index) {
  for (StrategyEvidence& ev : evidence)
    if (ev.method == DetectMethod::NegationScope && ev.anchor == marker_index)
      ev.consumed = true;
}

}  // namespace detail

// Two weakening routes. Neutralizing: the negated interpretation term aligns
// to a strictly stronger (by the configured margin) different message word.
// Intensifier drop: an intensifier modifies the message-side antonym or the
// message word aligned to the negated term, and survives on neither
// interpretation-side counterpart. Both consume the evidence they build on.
// The negation scope is re-derived here rather than taken from SimpleNeg
// evidence: neutralization exists precisely for negated terms whose lemma
// does NOT recur on the message side.
inline std::vector<StrategyEvidence> detect_weaken_sentiment(
    const UtteranceView& s, const UtteranceView& h, const Alignment* alignment,
    const LexiconBundle& lexicons, const DetectorConfig& config,
    std::vector<StrategyEvidence>& prior) {
  std::vector<StrategyEvidence> out;
  std::vector<NegationScopeCandidate> scopes = negation_scopes(s, h, lexicons);

  if (alignment) {
    for (const NegationScopeCandidate& scope : scopes) {
      if (!scope.marker_in_h) continue;
      const int p = scope.parent_index;
      const std::string& h_lemma = h.lemmas[p - 1];
      auto h_strength = sentiment_strength(h_lemma, lexicons);
      for (const auto& [i, j] : *alignment) {
        if (j != p || i < 1 || i > s.size()) continue;
        const std::string& s_lemma = s.lemmas[i - 1];
        if (s_lemma == h_lemma) continue;
        auto s_strength = sentiment_strength(s_lemma, lexicons);
        if (!s_strength || !h_strength) continue;
        if (*s_strength <= *h_strength + config.weaken_margin) continue;
        StrategyEvidence ev;
        ev.label = StrategyLabel::AnWeakSent;
        ev.method = DetectMethod::WeakenNeutralize;
        ev.s_span = {i, i};
        ev.h_span = {std::min(scope.marker_index, p),
                     std::max(scope.marker_index, p)};
        ev.s_trigger = s_lemma;
        ev.h_trigger = h_lemma;
        ev.s_sentence = s.sentence_of(i);
        ev.h_sentence = h.sentence_of(p);
        ev.anchor = scope.marker_index;
        out.push_back(std::move(ev));
        detail::consume_negation_anchor(prior, scope.marker_index);
      }
    }
  }

  for (StrategyEvidence& ev : prior) {
    if (ev.label != StrategyLabel::LexAnt || ev.consumed) continue;
    int a_s = ev.s_span.begin;
    int a_h = ev.h_span.begin;
    if (!detail::has_intensifier_child(s, a_s, lexicons)) continue;
    if (detail::has_intensifier_child(h, a_h, lexicons)) continue;
    StrategyEvidence weak;
    weak.label = StrategyLabel::AnWeakSent;
    weak.method = DetectMethod::WeakenDropIntensifier;
    weak.s_span = ev.s_span;
    weak.h_span = ev.h_span;
    weak.s_trigger = ev.s_trigger;
    weak.h_trigger = ev.h_trigger;
    weak.s_sentence = ev.s_sentence;
    weak.h_sentence = ev.h_sentence;
    out.push_back(std::move(weak));
    ev.consumed = true;
  }

  if (alignment) {
    for (const NegationScopeCandidate& scope : scopes) {
      if (!scope.marker_in_h) continue;
      const int p = scope.parent_index;
      for (const auto& [i, j] : *alignment) {
        if (j != p || i < 1 || i > s.size()) continue;
        if (!detail::has_intensifier_child(s, i, lexicons)) continue;
        StrategyEvidence ev;
        ev.label = StrategyLabel::AnWeakSent;
        ev.method = DetectMethod::WeakenDropIntensifier;
        ev.s_span = {i, i};
        ev.h_span = {std::min(scope.marker_index, p),
                     std::max(scope.marker_index, p)};
        ev.s_trigger = s.lemmas[i - 1];
        ev.h_trigger = h.lemmas[p - 1];
        ev.s_sentence = s.sentence_of(i);
        ev.h_sentence = h.sentence_of(p);
        ev.anchor = scope.marker_index;
        out.push_back(std::move(ev));
        detail::consume_negation_anchor(prior, scope.marker_index);
      }
    }
  }
  return out;
}

// Message predicted rhetorical, interpretation declarative (no '?'), and an
// antonym or negation strategy detected: the combined rewrite label replaces
// the base evidence.
inline std::vector<StrategyEvidence> detect_interrog_to_decl(
    const IronyPair& pair, const UtteranceView& s, const UtteranceView& h,
    const RqModel* rq, const LexiconBundle& lexicons,
    const EmbeddingLookup* embeddings, std::vector<StrategyEvidence>& prior) {
  std::vector<StrategyEvidence> out;
  if (!rq) return out;
  if (pair.s_im.text.find('?') == std::string::npos) return out;
  if (pair.h_int.text.find('?') != std::string::npos) return out;
  bool gated = false;
  for (const StrategyEvidence& ev : prior)
    if (ev.label == StrategyLabel::LexAnt || ev.label == StrategyLabel::SimpleNeg)
      gated = true;
  if (!gated) return out;
  auto [label, score] = predict_rq(*rq, pair.s_im, lexicons, embeddings);
  if (label != RqLabel::Rq) return out;
  StrategyEvidence ev;
  ev.label = StrategyLabel::AnInterrogToDecl;
  ev.method = DetectMethod::RqTransform;
  ev.s_span = {1, s.size()};
  ev.h_span = {1, h.size()};
  ev.s_trigger = "?";
  ev.h_trigger = "";
  out.push_back(std::move(ev));
  for (StrategyEvidence& prev : prior)
    if (!prev.consumed && (prev.label == StrategyLabel::LexAnt ||
                           prev.label == StrategyLabel::SimpleNeg))
      prev.consumed = true;
  return out;
}

// Token-anchored "I [w]{0,gap} wish" over the interpretation text. A pure
// function of that text: spans are in fallback-tokenizer coordinates.
inline std::vector<StrategyEvidence> detect_desiderative(
    const std::string& h_text, int max_gap = 2) {
  std::vector<StrategyEvidence> out;
  std::vector<std::string> tokens = tokenize(h_text);
  auto wordlike = [](const std::string& t) {
    for (char c : t)
      if (std::isalnum(static_cast<unsigned char>(c))) return true;
    return false;
  };
  for (size_t k = 0; k < tokens.size() && out.empty(); ++k) {
    if (lower_ascii(tokens[k]) != "i") continue;
    for (size_t d = 1; k + d < tokens.size() &&
                       d <= static_cast<size_t>(max_gap) + 1; ++d) {
      if (d > 1 && !wordlike(tokens[k + d - 1])) break;
      if (lower_ascii(tokens[k + d]) == "wish") {
        StrategyEvidence ev;
        ev.label = StrategyLabel::AnDesiderative;
        ev.method = DetectMethod::DesiderativePattern;
        ev.h_span = {static_cast<int>(k + 1), static_cast<int>(k + d + 1)};
        ev.h_trigger = "wish";
        out.push_back(std::move(ev));
        break;
      }
    }
  }
  return out;
}

// Last resort: only when nothing else fired, match mined opposite phrases as
// contiguous token subsequences of both sides.
inline std::vector<StrategyEvidence> detect_phrasal_pragmatic(
    const UtteranceView& s, const UtteranceView& h,
    const OppositePhraseTable* table, int max_phrase_len,
    const std::vector<StrategyEvidence>& prior) {
  std::vector<StrategyEvidence> out;
  if (!table) return out;
  for (const StrategyEvidence& ev : prior)
    if (!ev.consumed) return out;

  auto spans_of = [&](const UtteranceView& view) {
    std::map<std::string, TokenSpan> spans;
    for (int b = 1; b <= view.size(); ++b) {
      std::string text;
      for (int e = b; e <= std::min(view.size(), b + max_phrase_len - 1); ++e) {
        if (!text.empty()) text += ' ';
        text += view.tokens[e - 1];
        spans.emplace(text, TokenSpan{b, e});  // keep first occurrence
      }
    }
    return spans;
  };
  std::map<std::string, TokenSpan> s_spans = spans_of(s);
  std::map<std::string, TokenSpan> h_spans = spans_of(h);
  for (const auto& [e, fs] : table->rows) {
    auto se = s_spans.find(e);
    if (se == s_spans.end()) continue;
    for (const auto& [f, scores] : fs) {
      auto he = h_spans.find(f);
      if (he == h_spans.end()) continue;
      StrategyEvidence ev;
      ev.label = StrategyLabel::AntPhrasePragInf;
      ev.method = DetectMethod::OppositePhrase;
      ev.s_span = se->second;
      ev.h_span = he->second;
      ev.s_trigger = e;
      ev.h_trigger = f;
      ev.s_sentence = s.sentence_of(se->second.begin);
      ev.h_sentence = h.sentence_of(he->second.begin);
      out.push_back(std::move(ev));
    }
  }
  return out;
}

struct ClassifyResources {
  const LexiconBundle* lexicons = nullptr;  // required
  const ParseMap* parses = nullptr;
  const AlignmentModel* forward = nullptr;
  const AlignmentModel* reverse = nullptr;
  const RqModel* rq = nullptr;
  const EmbeddingLookup* embeddings = nullptr;
  const OppositePhraseTable* opposite = nullptr;
  DetectorConfig config;
};

inline StrategySet classify_pair(const IronyPair& pair,
                                 const ClassifyResources& res) {
  if (!res.lexicons) throw input_error("classify_pair: lexicons are required");
  StrategySet result;
  result.pair_id = pair.pair_id;

  const DependencyTree* s_tree = nullptr;
  const DependencyTree* h_tree = nullptr;
  if (res.parses) {
    auto it = res.parses->find(pair.s_im.id);
    if (it != res.parses->end()) s_tree = &it->second;
    it = res.parses->find(pair.h_int.id);
    if (it != res.parses->end()) h_tree = &it->second;
  }
  if (!s_tree) result.skipped.push_back("parse:s_im");
  if (!h_tree) result.skipped.push_back("parse:h_int");
  UtteranceView s = make_view(pair.s_im, s_tree);
  UtteranceView h = make_view(pair.h_int, h_tree);

  std::optional<Alignment> links;
  if (res.forward && res.reverse) {
    links = align_pair(*res.forward, *res.reverse, s.tokens, h.tokens,
                       res.config.heuristic);
  } else {
    result.skipped.push_back("alignment");
  }
  const Alignment* alignment = links ? &*links : nullptr;

  std::vector<StrategyEvidence>& evidence = result.evidence;
  evidence = detect_lexical_antonym(s, h, alignment, *res.lexicons);
  for (StrategyEvidence& ev :
       detect_simple_negation(s, h, *res.lexicons, &result.skipped))
    evidence.push_back(std::move(ev));
  {
    std::vector<StrategyEvidence> weak =
        detect_weaken_sentiment(s, h, alignment, *res.lexicons, res.config,
                                evidence);
    for (StrategyEvidence& ev : weak) evidence.push_back(std::move(ev));
  }
  if (res.rq) {
    std::vector<StrategyEvidence> rq_evidence = detect_interrog_to_decl(
        pair, s, h, res.rq, *res.lexicons, res.embeddings, evidence);
    for (StrategyEvidence& ev : rq_evidence) evidence.push_back(std::move(ev));
  } else {
    result.skipped.push_back("rq_model");
  }
  {
    std::vector<StrategyEvidence> wish =
        detect_desiderative(pair.h_int.text, res.config.desiderative_max_gap);
    if (!wish.empty()) {
      // Desiderative rewrites combine with antonym/negation the same way the
      // other combined strategies do: the base evidence is consumed.
      for (StrategyEvidence& ev : evidence)
        if (!ev.consumed && (ev.label == StrategyLabel::LexAnt ||
                             ev.label == StrategyLabel::SimpleNeg))
          ev.consumed = true;
      for (StrategyEvidence& ev : wish) evidence.push_back(std::move(ev));
    }
  }
  if (res.opposite) {
    std::vector<StrategyEvidence> phrasal = detect_phrasal_pragmatic(
        s, h, res.opposite, res.config.max_phrase_len, evidence);
    for (StrategyEvidence& ev : phrasal) evidence.push_back(std::move(ev));
  } else {
    result.skipped.push_back("opposite_table");
  }

  for (const StrategyEvidence& ev : evidence)
    if (!ev.consumed) result.labels.insert(ev.label);
  return result;
}

// Classifies every valid pair; output sorted by pair_id.
inline std::vector<StrategySet> classify_corpus(const Corpus& corpus,
                                                const ClassifyResources& res) {
  std::vector<StrategySet> out;
  for (const IronyPair& pair : corpus) {
    if (pair.gold && !pair.gold->valid) continue;
    out.push_back(classify_pair(pair, res));
  }
  std::sort(out.begin(), out.end(), [](const StrategySet& a, const StrategySet& b) {
    return a.pair_id < b.pair_id;
  });
  return out;
}

inline nlohmann::ordered_json strategy_set_to_json(const StrategySet& set) {
  nlohmann::ordered_json j;
  j["pair_id"] = set.pair_id;
  nlohmann::ordered_json labels = nlohmann::ordered_json::array();
  for (StrategyLabel label : set.labels) labels.push_back(to_string(label));
  j["labels"] = labels;
  nlohmann::ordered_json evidence = nlohmann::ordered_json::array();
  for (const StrategyEvidence& ev : set.evidence) {
    evidence.push_back({{"label", to_string(ev.label)},
                        {"method", to_string(ev.method)},
                        {"s_span", {ev.s_span.begin, ev.s_span.end}},
                        {"h_span", {ev.h_span.begin, ev.h_span.end}},
                        {"s_sentence", ev.s_sentence},
                        {"h_sentence", ev.h_sentence},
                        {"trigger", {{"s", ev.s_trigger}, {"h", ev.h_trigger}}},
                        {"consumed", ev.consumed}});
  }
  j["evidence"] = evidence;
  if (!set.skipped.empty()) j["skipped"] = set.skipped;
  return j;
}

inline void save_strategy_sets_jsonl(const std::vector<StrategySet>& sets,
                                     const std::string& path) {
  std::ofstream out(path);
  if (!out) throw input_error("cannot write labels file: " + path);
  for (const StrategySet& set : sets) out << strategy_set_to_json(set).dump() << "\n";
}

inline std::vector<StrategySet> load_strategy_sets_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw input_error("cannot open labels file: " + path);
  std::vector<StrategySet> out;
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
    StrategySet set;
    set.pair_id = j.at("pair_id").get<std::string>();
    for (const auto& name : j.at("labels")) {
      auto label = parse_strategy_label(name.get<std::string>());
      if (!label)
        throw input_error(path + " line " + std::to_string(line_no) +
                          ": unknown label '" + name.get<std::string>() + "'");
      set.labels.insert(*label);
    }
    if (j.contains("evidence")) {
      for (const auto& item : j["evidence"]) {
        StrategyEvidence ev;
        if (auto label = parse_strategy_label(item.at("label").get<std::string>()))
          ev.label = *label;
        if (auto method = parse_detect_method(item.at("method").get<std::string>()))
          ev.method = *method;
        ev.s_span = {item.at("s_span").at(0).get<int>(),
                     item.at("s_span").at(1).get<int>()};
        ev.h_span = {item.at("h_span").at(0).get<int>(),
                     item.at("h_span").at(1).get<int>()};
        ev.s_sentence = item.value("s_sentence", 0);
        ev.h_sentence = item.value("h_sentence", 0);
        if (item.contains("trigger")) {
          ev.s_trigger = item["trigger"].value("s", "");
          ev.h_trigger = item["trigger"].value("h", "");
        }
        ev.consumed = item.value("consumed", false);
        set.evidence.push_back(std::move(ev));
      }
    }
    if (j.contains("skipped"))
      set.skipped = j["skipped"].get<std::vector<std::string>>();
    out.push_back(std::move(set));
  }
  return out;
}

}  // namespace irony
