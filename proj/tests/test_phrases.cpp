#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "irony/alignment.hpp"

using namespace irony;

namespace {

// Brute-force reference: enumerate every (source span, target span) pair and
// keep those with at least one internal link, no link crossing either
// boundary, and both target endpoints linked (no unaligned-boundary
// expansion on the target side).
std::set<PhraseSpan> brute_force_phrases(int src_len, int tgt_len,
                                         const Alignment& links,
                                         int max_phrase_len) {
  std::set<PhraseSpan> out;
  for (int i1 = 1; i1 <= src_len; ++i1)
    for (int i2 = i1; i2 <= std::min(src_len, i1 + max_phrase_len - 1); ++i2)
      for (int j1 = 1; j1 <= tgt_len; ++j1)
        for (int j2 = j1; j2 <= std::min(tgt_len, j1 + max_phrase_len - 1); ++j2) {
          bool internal = false, crossing = false;
          bool j1_linked = false, j2_linked = false;
          for (const auto& [i, j] : links) {
            bool in_s = i >= i1 && i <= i2;
            bool in_t = j >= j1 && j <= j2;
            if (in_s && in_t) internal = true;
            if (in_s != in_t) crossing = true;
            if (in_s && j == j1) j1_linked = true;
            if (in_s && j == j2) j2_linked = true;
          }
          if (internal && !crossing && j1_linked && j2_linked)
            out.insert({i1, i2, j1, j2});
        }
  return out;
}

}  // namespace

TEST_CASE("two-word diagonal pair yields exactly the three phrase pairs") {
  Alignment links{{1, 1}, {2, 2}};
  std::set<PhraseSpan> phrases = extract_phrases(2, 2, links, 4);
  std::set<PhraseSpan> expected{{1, 1, 1, 1}, {2, 2, 2, 2}, {1, 2, 1, 2}};
  CHECK(phrases == expected);
}

TEST_CASE("empty alignment yields no phrase pairs") {
  CHECK(extract_phrases(4, 4, {}, 4).empty());
}

TEST_CASE("property: extraction equals brute-force enumeration") {
  std::mt19937 rng(314159);
  std::uniform_int_distribution<int> len(1, 5);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  for (int round = 0; round < 1000; ++round) {
    int l = len(rng), m = len(rng);
    Alignment links;
    for (int i = 1; i <= l; ++i)
      for (int j = 1; j <= m; ++j)
        if (coin(rng) < 0.3) links.insert({i, j});
    CHECK(extract_phrases(l, m, links, 4) == brute_force_phrases(l, m, links, 4));
  }
}

TEST_CASE("max_phrase_len caps both sides") {
  Alignment diag;
  for (int i = 1; i <= 6; ++i) diag.insert({i, i});
  for (const PhraseSpan& span : extract_phrases(6, 6, diag, 3)) {
    CHECK(span.s_end - span.s_begin + 1 <= 3);
    CHECK(span.t_end - span.t_begin + 1 <= 3);
  }
}

TEST_CASE("phrase table: relative-frequency scores normalize per source") {
  PhraseTable table;
  table.add("good day", "bad day", 3);
  table.add("good day", "awful day", 1);
  table.add("so fun", "not fun", 2);
  CHECK(table.phi_f_given_e("good day", "bad day") == Catch::Approx(0.75));
  CHECK(table.phi_f_given_e("good day", "awful day") == Catch::Approx(0.25));
  CHECK(table.phi_e_given_f("good day", "bad day") == Catch::Approx(1.0));
  double sum = table.phi_f_given_e("good day", "bad day") +
               table.phi_f_given_e("good day", "awful day");
  CHECK(sum == Catch::Approx(1.0).margin(1e-6));
  CHECK(table.f_set_size("good day") == 2);
}

TEST_CASE("phi filter: strictly-below threshold rejected, boundary retained") {
  PhraseTable st;
  // e1: four targets, counts 2/1/1/1 -> phi 0.4, 0.2, 0.2, 0.2; threshold 0.25
  st.add("e1", "f1", 2);
  st.add("e1", "f2", 1);
  st.add("e1", "f3", 1);
  st.add("e1", "f4", 1);
  // e2: four equal targets -> phi exactly 0.25 at the threshold, all retained
  st.add("e2", "g1", 1);
  st.add("e2", "g2", 1);
  st.add("e2", "g3", 1);
  st.add("e2", "g4", 1);
  // e3: single target -> phi 1.0 >= 1.0 retained
  st.add("e3", "h1", 5);
  PhraseTable hh;  // empty

  OppositePhraseTable out = score_and_filter(st, hh);
  CHECK(out.contains("e1", "f1"));
  CHECK_FALSE(out.contains("e1", "f2"));
  CHECK_FALSE(out.contains("e1", "f3"));
  CHECK_FALSE(out.contains("e1", "f4"));
  CHECK(out.contains("e2", "g1"));
  CHECK(out.contains("e2", "g2"));
  CHECK(out.contains("e2", "g3"));
  CHECK(out.contains("e2", "g4"));
  CHECK(out.contains("e3", "h1"));
  CHECK(out.rows.at("e3").at("h1").phi_f_given_e == Catch::Approx(1.0));
}

TEST_CASE("pairs present in the interpretation-interpretation table are removed") {
  PhraseTable st;
  st.add("buy a yacht", "i am so poor", 9);
  st.add("so happy", "so happy", 9);
  PhraseTable hh;
  hh.add("so happy", "so happy", 2);
  OppositePhraseTable out = score_and_filter(st, hh);
  CHECK(out.contains("buy a yacht", "i am so poor"));
  CHECK_FALSE(out.contains("so happy", "so happy"));
}

TEST_CASE("property: filtered output never violates the phi threshold") {
  std::mt19937 rng(2718);
  std::uniform_int_distribution<int> n_src(1, 8), n_tgt(1, 6), count(1, 9);
  for (int round = 0; round < 100; ++round) {
    PhraseTable st, hh;
    int sources = n_src(rng);
    for (int e = 0; e < sources; ++e) {
      int targets = n_tgt(rng);
      for (int f = 0; f < targets; ++f) {
        st.add("e" + std::to_string(e), "f" + std::to_string(f), count(rng));
        if (count(rng) > 6)
          hh.add("e" + std::to_string(e), "f" + std::to_string(f), 1);
      }
    }
    OppositePhraseTable out = score_and_filter(st, hh);
    for (const auto& [e, fs] : out.rows) {
      double threshold = 1.0 / static_cast<double>(st.f_set_size(e));
      for (const auto& [f, scores] : fs) {
        CHECK(scores.phi_f_given_e >= threshold);
        CHECK_FALSE(hh.contains(e, f));
        CHECK(scores.phi_f_given_e == Catch::Approx(st.phi_f_given_e(e, f)));
      }
    }
  }
}

TEST_CASE("mined phrase tables flow end to end on an identity corpus") {
  Bitext bitext;
  bitext.add({"red", "car"}, {"red", "car"});
  bitext.add({"red", "bus"}, {"red", "bus"});
  bitext.add({"blue", "car"}, {"blue", "car"});
  TrainedAligner fwd = train_alignment(bitext, 10, 5);
  Bitext reversed;
  for (const auto& [s, t] : bitext.pairs) reversed.add(t, s);
  TrainedAligner rev = train_alignment(reversed, 10, 5);
  PhraseTable table = mine_phrase_table(bitext, fwd.model, rev.model, 4,
                                        SymmetrizeHeuristic::GrowDiagFinal);
  CHECK(table.contains("red car", "red car"));
  CHECK(table.contains("red", "red"));
  CHECK(table.phi_f_given_e("red", "red") == Catch::Approx(1.0));
}
