// Glue between the corpus and the alignment stack: tokenization consistent
// with the detectors, bitext construction for both training directions, and
// the interpretation/interpretation paraphrase bitext.
#pragma once

#include <map>
#include <string>
#include <vector>

#include "irony/alignment.hpp"
#include "irony/corpus.hpp"
#include "irony/strategies.hpp"

namespace irony {

// Tree tokens when parsed, fallback tokenization otherwise; lowercase either
// way so bitext, phrase tables, and detector views share one token space.
inline std::vector<std::string> utterance_tokens(const Utterance& utterance,
                                                 const ParseMap* parses) {
  const DependencyTree* tree = nullptr;
  if (parses) {
    auto it = parses->find(utterance.id);
    if (it != parses->end()) tree = &it->second;
  }
  return make_view(utterance, tree).tokens;
}

// Message -> interpretation bitext over valid pairs.
inline Bitext build_st_bitext(const Corpus& corpus, const ParseMap* parses) {
  Bitext bitext;
  for (const IronyPair& pair : corpus) {
    if (pair.gold && !pair.gold->valid) continue;
    bitext.add(utterance_tokens(pair.s_im, parses),
               utterance_tokens(pair.h_int, parses));
  }
  return bitext;
}

// All unordered pairs of interpretations of one message, in both directions.
inline Bitext build_hh_bitext(const Corpus& corpus, const ParseMap* parses) {
  std::map<std::string, std::vector<const IronyPair*>> by_message;
  for (const IronyPair& pair : corpus) {
    if (pair.gold && !pair.gold->valid) continue;
    by_message[pair.s_im.id].push_back(&pair);
  }
  Bitext bitext;
  for (const auto& [message, pairs] : by_message) {
    for (size_t a = 0; a < pairs.size(); ++a) {
      for (size_t b = a + 1; b < pairs.size(); ++b) {
        std::vector<std::string> left =
            utterance_tokens(pairs[a]->h_int, parses);
        std::vector<std::string> right =
            utterance_tokens(pairs[b]->h_int, parses);
        bitext.add(left, right);
        bitext.add(right, left);
      }
    }
  }
  return bitext;
}

struct BidirectionalAligner {
  AlignmentModel forward;
  AlignmentModel reverse;
  std::vector<double> forward_model1_ll;
  std::vector<double> forward_hmm_ll;
};

inline BidirectionalAligner train_bidirectional(const Bitext& bitext,
                                                int m1_iterations,
                                                int hmm_iterations,
                                                int threads = 1) {
  BidirectionalAligner out;
  TrainedAligner fwd =
      train_alignment(bitext, m1_iterations, hmm_iterations, 5, threads);
  out.forward = std::move(fwd.model);
  out.forward_model1_ll = std::move(fwd.model1_log_likelihood);
  out.forward_hmm_ll = std::move(fwd.hmm_log_likelihood);
  Bitext reversed;
  for (const auto& [src, tgt] : bitext.pairs) reversed.add(tgt, src);
  out.reverse =
      train_alignment(reversed, m1_iterations, hmm_iterations, 5, threads).model;
  return out;
}

}  // namespace irony
