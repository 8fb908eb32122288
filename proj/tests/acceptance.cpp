// Acceptance suite: one line per criterion, nonzero exit if any fails.
// Criterion 7 needs the released dataset and is skipped with a visible notice
// when it is not present (expected at $IRONY_RELEASE_DIR or data/release/,
// files pairs.tsv and parses.conllu).

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <random>
#include <sstream>
#include <vector>

#include "irony/analysis.hpp"
#include "irony/markers.hpp"
#include "irony/pipeline.hpp"
#include "irony/rq.hpp"

using namespace irony;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  bool skipped = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

std::string data_dir() { return IRONY_DATA_DIR; }

// --- criterion 1: fixture-corpus exactness -------------------------------

Outcome criterion1() {
  auto start = std::chrono::steady_clock::now();
  Corpus corpus = load_pairs(data_dir() + "/fixtures/pairs.tsv", PairsFormat::Tsv);
  ParseMap parses = load_parses(data_dir() + "/fixtures/parses.conllu");
  std::ostringstream sink;
  LexiconBundle lexicons = load_lexicons(data_dir() + "/lexicons/lexicons.toml", sink);
  Bitext bitext = build_st_bitext(corpus, &parses);
  Bitext extra = load_bitext_tsv(data_dir() + "/fixtures/align_train.tsv");
  for (auto& [src, tgt] : extra.pairs)
    bitext.pairs.emplace_back(std::move(src), std::move(tgt));
  BidirectionalAligner aligner = train_bidirectional(bitext, 15, 3);
  RqModel rq = train_rq_classifier(
      load_rq_training(data_dir() + "/rq/rq_train.tsv"), lexicons, nullptr);
  OppositePhraseTable opposite = OppositePhraseTable::load_tsv(
      data_dir() + "/fixtures/opposite_phrases.tsv");

  ClassifyResources res;
  res.lexicons = &lexicons;
  res.parses = &parses;
  res.forward = &aligner.forward;
  res.reverse = &aligner.reverse;
  res.rq = &rq;
  res.opposite = &opposite;

  size_t matched = 0;
  std::string mismatches;
  for (const IronyPair& pair : corpus) {
    StrategySet result = classify_pair(pair, res);
    if (result.labels == pair.gold->strategies) {
      ++matched;
    } else {
      mismatches += " " + pair.pair_id;
    }
  }
  double elapsed = seconds_since(start);
  Outcome out;
  out.pass = matched == corpus.size() && elapsed < 5.0;
  std::ostringstream detail;
  detail << matched << "/" << corpus.size() << " fixture pairs labeled as stated"
         << (mismatches.empty() ? "" : " (mismatched:" + mismatches + ")")
         << ", " << std::fixed << std::setprecision(2) << elapsed << "s";
  out.detail = detail.str();
  return out;
}

// --- criterion 2: EM correctness ------------------------------------------

Outcome criterion2() {
  auto start = std::chrono::steady_clock::now();
  std::mt19937 rng(20240201);
  std::uniform_int_distribution<int> len(2, 6);
  std::uniform_int_distribution<int> word(0, 19);
  Bitext toy;
  for (int p = 0; p < 50; ++p) {
    int n = len(rng);
    std::vector<std::string> src, tgt;
    for (int i = 0; i < n; ++i) {
      int w = word(rng);
      src.push_back("s" + std::to_string(w));
      tgt.push_back("t" + std::to_string(w));
    }
    if (p % 3 == 0) std::swap(tgt[0], tgt[n - 1]);
    toy.add(src, tgt);
  }
  Model1Result toy_result = train_model1(toy, 20);
  bool monotone = true;
  for (size_t i = 1; i < toy_result.log_likelihood.size(); ++i)
    if (toy_result.log_likelihood[i] < toy_result.log_likelihood[i - 1] - 1e-9)
      monotone = false;

  Bitext oracle;
  oracle.add({"la", "maison"}, {"the", "house"});
  oracle.add({"la", "fleur"}, {"the", "flower"});
  Model1Result oracle_result = train_model1(oracle, 20);
  double t_house = oracle_result.table.prob("maison", "house");

  double elapsed = seconds_since(start);
  Outcome out;
  out.pass = monotone && t_house >= 0.9 && elapsed < 1.0;
  std::ostringstream detail;
  detail << "log-likelihood " << (monotone ? "non-decreasing" : "DECREASED")
         << " over 20 iterations, t(house|maison)=" << std::fixed
         << std::setprecision(4) << t_house << ", " << std::setprecision(2)
         << elapsed << "s";
  out.detail = detail.str();
  return out;
}

// --- criterion 3: phrase extraction vs brute force -------------------------

std::set<PhraseSpan> brute_force_phrases(int src_len, int tgt_len,
                                         const Alignment& links, int max_len) {
  std::set<PhraseSpan> out;
  for (int i1 = 1; i1 <= src_len; ++i1)
    for (int i2 = i1; i2 <= std::min(src_len, i1 + max_len - 1); ++i2)
      for (int j1 = 1; j1 <= tgt_len; ++j1)
        for (int j2 = j1; j2 <= std::min(tgt_len, j1 + max_len - 1); ++j2) {
          bool internal = false, crossing = false, lo = false, hi = false;
          for (const auto& [i, j] : links) {
            bool in_s = i >= i1 && i <= i2;
            bool in_t = j >= j1 && j <= j2;
            if (in_s && in_t) internal = true;
            if (in_s != in_t) crossing = true;
            if (in_s && j == j1) lo = true;
            if (in_s && j == j2) hi = true;
          }
          if (internal && !crossing && lo && hi) out.insert({i1, i2, j1, j2});
        }
  return out;
}

Outcome criterion3() {
  auto start = std::chrono::steady_clock::now();
  std::mt19937 rng(314159);
  std::uniform_int_distribution<int> len(1, 5);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  int agreements = 0;
  const int rounds = 1000;
  for (int round = 0; round < rounds; ++round) {
    int l = len(rng), m = len(rng);
    Alignment links;
    for (int i = 1; i <= l; ++i)
      for (int j = 1; j <= m; ++j)
        if (coin(rng) < 0.3) links.insert({i, j});
    if (extract_phrases(l, m, links, 4) == brute_force_phrases(l, m, links, 4))
      ++agreements;
  }
  double elapsed = seconds_since(start);
  Outcome out;
  out.pass = agreements == rounds && elapsed < 10.0;
  std::ostringstream detail;
  detail << agreements << "/" << rounds << " random pairs set-equal to the "
         << "brute-force enumeration, " << std::fixed << std::setprecision(2)
         << elapsed << "s";
  out.detail = detail.str();
  return out;
}

// --- criterion 4: phi filter boundary --------------------------------------

Outcome criterion4() {
  PhraseTable st;
  st.add("e1", "f1", 2);  // phi 0.4, threshold 1/4: retained
  st.add("e1", "f2", 1);  // phi 0.2 < 0.25: rejected
  st.add("e1", "f3", 1);
  st.add("e1", "f4", 1);
  st.add("e2", "g1", 1);  // four equal shares of 0.25: all exactly at the
  st.add("e2", "g2", 1);  // threshold, all retained
  st.add("e2", "g3", 1);
  st.add("e2", "g4", 1);
  st.add("e3", "h1", 7);  // single target, phi 1.0 >= 1.0: retained
  PhraseTable hh;
  OppositePhraseTable filtered = score_and_filter(st, hh);
  bool pass = filtered.contains("e1", "f1") && !filtered.contains("e1", "f2") &&
              !filtered.contains("e1", "f3") && !filtered.contains("e1", "f4") &&
              filtered.contains("e2", "g1") && filtered.contains("e2", "g2") &&
              filtered.contains("e2", "g3") && filtered.contains("e2", "g4") &&
              filtered.contains("e3", "h1");
  Outcome out;
  out.pass = pass;
  out.detail = pass ? "strictly-below rejected, boundary and above retained"
                    : "filter rule violated";
  return out;
}

// --- criterion 5: kappa oracle ---------------------------------------------

Outcome criterion5() {
  KappaResult hand = cohen_kappa({"E", "E", "I", "I"}, {"E", "I", "I", "I"});
  std::vector<std::string> same = {"E", "I", "E", "I", "E"};
  KappaResult identical = cohen_kappa(same, same);
  bool pass = std::abs(hand.kappa - 0.5) <= 1e-9 && identical.kappa == 1.0;
  Outcome out;
  out.pass = pass;
  std::ostringstream detail;
  detail << "hand example kappa=" << hand.kappa
         << ", identical sequences kappa=" << identical.kappa;
  out.detail = detail.str();
  return out;
}

// --- criterion 6: RQ model checks ------------------------------------------

Outcome criterion6() {
  std::mt19937 rng(1234);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_int_distribution<int> label(0, 1);
  const double h = 1e-5;
  double worst_rel = 0.0;
  int checked = 0;
  for (int draw = 0; draw < 100; ++draw) {
    const size_t n = 8, dim = 5;
    std::vector<std::vector<double>> x(n, std::vector<double>(dim));
    std::vector<int> y(n);
    for (size_t i = 0; i < n; ++i) {
      for (size_t k = 0; k < dim; ++k) x[i][k] = gauss(rng);
      y[i] = label(rng) ? 1 : -1;
    }
    std::vector<double> w(dim);
    for (double& v : w) v = gauss(rng);
    double b = gauss(rng);
    std::vector<double> grad_w;
    double grad_b;
    rq_loss_and_gradient(x, y, w, b, 0.01, grad_w, grad_b);
    std::vector<double> dummy_w;
    double dummy_b;
    for (size_t k = 0; k < dim; ++k) {
      std::vector<double> wp = w, wm = w;
      wp[k] += h;
      wm[k] -= h;
      double fd = (rq_loss_and_gradient(x, y, wp, b, 0.01, dummy_w, dummy_b) -
                   rq_loss_and_gradient(x, y, wm, b, 0.01, dummy_w, dummy_b)) /
                  (2 * h);
      double rel = std::abs(fd - grad_w[k]) /
                   std::max(1e-8, std::max(std::abs(fd), std::abs(grad_w[k])));
      worst_rel = std::max(worst_rel, rel);
      ++checked;
    }
  }

  std::ostringstream sink;
  LexiconBundle lexicons = load_lexicons(data_dir() + "/lexicons/lexicons.toml", sink);
  std::vector<std::pair<Utterance, RqLabel>> labeled;
  for (int i = 0; i < 20; ++i) {
    labeled.emplace_back(
        Utterance{"r", "is item" + std::to_string(i) + " not great ?",
                  Role::SpeakerIronic},
        RqLabel::Rq);
    labeled.emplace_back(
        Utterance{"q", "is item" + std::to_string(i) + " quite great ?",
                  Role::SpeakerIronic},
        RqLabel::InfoSeeking);
  }
  RqModel model = train_rq_classifier(labeled, lexicons, nullptr);
  int correct = 0;
  for (const auto& [msg, gold] : labeled)
    if (predict_rq(model, msg, lexicons, nullptr).first == gold) ++correct;

  Outcome out;
  out.pass = worst_rel < 1e-4 && correct == static_cast<int>(labeled.size());
  std::ostringstream detail;
  detail << "gradient max relative error " << std::scientific
         << std::setprecision(2) << worst_rel << " over " << checked
         << " coordinates; separable training accuracy " << correct << "/"
         << labeled.size();
  out.detail = detail.str();
  return out;
}

// --- criterion 7: dataset-scale reproduction (conditional) ------------------

std::string release_dir() {
  if (const char* env = std::getenv("IRONY_RELEASE_DIR")) return env;
  return data_dir() + "/release";
}

Outcome criterion7() {
  std::string dir = release_dir();
  std::string pairs_path = dir + "/pairs.tsv";
  std::string parses_path = dir + "/parses.conllu";
  Outcome out;
  if (!fs::exists(pairs_path)) {
    out.skipped = true;
    out.detail = "released dataset not present (expected " + pairs_path +
                 " and parses.conllu); set IRONY_RELEASE_DIR to enable";
    return out;
  }
  auto start = std::chrono::steady_clock::now();
  Corpus corpus = load_pairs(pairs_path, PairsFormat::Tsv);
  ParseMap parses;
  if (fs::exists(parses_path)) parses = load_parses(parses_path);
  const ParseMap* parse_ptr = parses.empty() ? nullptr : &parses;
  std::ostringstream sink;
  LexiconBundle lexicons = load_lexicons(data_dir() + "/lexicons/lexicons.toml", sink);

  Bitext st_bitext = build_st_bitext(corpus, parse_ptr);
  int threads = static_cast<int>(std::thread::hardware_concurrency());
  BidirectionalAligner aligner =
      train_bidirectional(st_bitext, 15, 5, std::max(1, threads));
  PhraseTable st = mine_phrase_table(st_bitext, aligner.forward, aligner.reverse,
                                     4, SymmetrizeHeuristic::GrowDiagFinal);
  Bitext hh_bitext = build_hh_bitext(corpus, parse_ptr);
  PhraseTable hh;
  if (!hh_bitext.pairs.empty()) {
    BidirectionalAligner hh_aligner =
        train_bidirectional(hh_bitext, 15, 5, std::max(1, threads));
    hh = mine_phrase_table(hh_bitext, hh_aligner.forward, hh_aligner.reverse, 4,
                           SymmetrizeHeuristic::GrowDiagFinal);
  }
  OppositePhraseTable opposite = score_and_filter(st, hh);
  RqModel rq = train_rq_classifier(
      load_rq_training(data_dir() + "/rq/rq_train.tsv"), lexicons, nullptr);

  ClassifyResources res;
  res.lexicons = &lexicons;
  res.parses = parse_ptr;
  res.forward = &aligner.forward;
  res.reverse = &aligner.reverse;
  res.rq = &rq;
  res.opposite = &opposite;
  std::vector<StrategySet> sets = classify_corpus(corpus, res);

  DistributionTable distribution = strategy_distribution(sets, "release");
  auto pct = [&](StrategyLabel label) {
    for (const DistributionRow& row : distribution.rows)
      if (row.label == label) return row.pct.value_or(0.0);
    return 0.0;
  };
  bool ordering =
      pct(StrategyLabel::LexAnt) > pct(StrategyLabel::SimpleNeg) &&
      pct(StrategyLabel::SimpleNeg) > pct(StrategyLabel::AnWeakSent) &&
      pct(StrategyLabel::AnWeakSent) > pct(StrategyLabel::AntPhrasePragInf) &&
      pct(StrategyLabel::AntPhrasePragInf) >= pct(StrategyLabel::AnInterrogToDecl) &&
      pct(StrategyLabel::AnInterrogToDecl) > pct(StrategyLabel::AnDesiderative);
  bool lexant_share = std::abs(pct(StrategyLabel::LexAnt) - 40.0) <= 5.0;

  CrossTab incongruity = incongruity_crosstab(sets, corpus);
  auto column_pct = [&](const std::string& condition, StrategyLabel label) {
    for (const CrossTabColumn& col : incongruity.columns)
      if (col.condition == condition)
        for (const DistributionRow& row : col.rows)
          if (row.label == label) return row.pct.value_or(0.0);
    return 0.0;
  };
  bool trends =
      column_pct("Explicit", StrategyLabel::LexAnt) >
          column_pct("Implicit", StrategyLabel::LexAnt) &&
      column_pct("Explicit", StrategyLabel::SimpleNeg) <
          column_pct("Implicit", StrategyLabel::SimpleNeg);

  AgreementHistogram agreement = agreement_histogram(sets, corpus);
  double unanimous = agreement.share("5").value_or(0.0);
  bool unanimity = std::abs(unanimous - 17.0) <= 5.0;

  MarkerRules rules = MarkerRules::defaults();
  std::map<std::string, MarkerSet> markers;
  for (const IronyPair& pair : corpus) {
    if (markers.count(pair.s_im.id)) continue;
    const DependencyTree* tree = nullptr;
    if (parse_ptr) {
      auto it = parse_ptr->find(pair.s_im.id);
      if (it != parse_ptr->end()) tree = &it->second;
    }
    markers.emplace(pair.s_im.id, detect_markers(pair.s_im, tree, rules));
  }
  MarkerPrevalence prevalence = marker_prevalence(corpus, markers);
  bool marker_trend =
      prevalence.implicit_share.value_or(0.0) >=
      1.5 * prevalence.explicit_share.value_or(0.0);

  double elapsed = seconds_since(start);
  out.pass = ordering && lexant_share && trends && unanimity && marker_trend &&
             elapsed < 60.0;
  std::ostringstream detail;
  detail << "ordering " << (ordering ? "ok" : "VIOLATED") << "; LexAnt "
         << std::fixed << std::setprecision(1) << pct(StrategyLabel::LexAnt)
         << "% (target 40 +/- 5); incongruity trends "
         << (trends ? "ok" : "VIOLATED") << "; unanimity " << unanimous
         << "% (target 17 +/- 5); marker trend "
         << (marker_trend ? "ok" : "VIOLATED") << "; " << std::setprecision(1)
         << elapsed << "s";
  out.detail = detail.str();
  return out;
}

// --- criterion 8: evaluation harness oracle --------------------------------

Outcome criterion8() {
  std::ostringstream tsv;
  for (int i = 0; i < 9; ++i)
    tsv << "tp" << i << "\th1\tm" << i << "\tr" << i << "\tLexAnt\t\ttrue\n";
  tsv << "fp0\th1\tmx\trx\t\t\ttrue\n";
  tsv << "fn0\th1\tmy\try\tLexAnt\t\ttrue\n";
  std::istringstream in(tsv.str());
  Corpus corpus = load_pairs_tsv(in);
  std::vector<StrategySet> predicted;
  for (int i = 0; i < 10; ++i) {
    StrategySet set;
    set.pair_id = i < 9 ? "tp" + std::to_string(i) : "fp0";
    set.labels.insert(StrategyLabel::LexAnt);
    predicted.push_back(set);
  }
  {
    StrategySet set;
    set.pair_id = "fn0";
    predicted.push_back(set);
  }
  EvalReport report = evaluate(predicted, corpus);
  const LabelEval& eval = report.per_label.at(StrategyLabel::LexAnt);
  bool pass = std::abs(eval.precision - 90.0) < 1e-9 &&
              std::abs(eval.recall - 90.0) < 1e-9 &&
              std::abs(eval.f1 - 90.0) < 1e-9;
  Outcome out;
  out.pass = pass;
  std::ostringstream detail;
  detail << "evaluation harness validated by arithmetic oracle (P=" << eval.precision
         << " R=" << eval.recall << " F1=" << eval.f1
         << "); published per-strategy F1 is a scale reference, not a target";
  out.detail = detail.str();
  return out;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    Outcome (*run)();
  };
  const Criterion criteria[] = {
      {"criterion 1: fixture-corpus label exactness", criterion1},
      {"criterion 2: Model-1 EM monotonicity and oracle table", criterion2},
      {"criterion 3: phrase extraction equals brute force", criterion3},
      {"criterion 4: phi filter boundary behavior", criterion4},
      {"criterion 5: Cohen's kappa oracle values", criterion5},
      {"criterion 6: RQ gradient check and separable accuracy", criterion6},
      {"criterion 7: dataset-scale reproduction", criterion7},
      {"criterion 8: evaluation harness arithmetic oracle", criterion8},
  };
  int failures = 0;
  for (const Criterion& criterion : criteria) {
    Outcome outcome;
    try {
      outcome = criterion.run();
    } catch (const std::exception& e) {
      outcome.pass = false;
      outcome.detail = std::string("exception: ") + e.what();
    }
    const char* status = outcome.skipped ? "SKIP" : outcome.pass ? "PASS" : "FAIL";
    if (!outcome.skipped && !outcome.pass) ++failures;
    std::cout << "[" << status << "] " << criterion.name << ": "
              << outcome.detail << "\n";
  }
  return failures == 0 ? 0 : 1;
}
