// Statistical word alignment trained from scratch on the message/interpretation
// bitext: IBM Model 1 EM initialization refined by an HMM jump model, Viterbi
// link extraction, symmetrization, and consistency-based phrase mining.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "irony/errors.hpp"
#include "irony/text.hpp"

namespace irony {

struct Bitext {
  using Sentence = std::vector<std::string>;
  std::vector<std::pair<Sentence, Sentence>> pairs;

  void add(Sentence src, Sentence tgt) {
    if (src.empty() || tgt.empty())
      throw input_error("bitext sentence pair with an empty side");
    for (auto* side : {&src, &tgt})
      for (std::string& tok : *side) tok = lower_ascii(tok);
    pairs.emplace_back(std::move(src), std::move(tgt));
  }

  size_t size() const { return pairs.size(); }
};

namespace detail {

struct Vocab {
  std::unordered_map<std::string, int> ids;
  std::vector<std::string> words;

  int intern(const std::string& w) {
    auto [it, inserted] = ids.emplace(w, static_cast<int>(words.size()));
    if (inserted) words.push_back(w);
    return it->second;
  }
  int find(const std::string& w) const {
    auto it = ids.find(w);
    return it == ids.end() ? -1 : it->second;
  }
  size_t size() const { return words.size(); }
};

using IntSentence = std::vector<int>;

struct IntBitext {
  Vocab src;  // id 0 reserved for the NULL word
  Vocab tgt;
  std::vector<std::pair<IntSentence, IntSentence>> pairs;
};

inline constexpr const char* kNullWord = "<NULL>";

inline IntBitext intern_bitext(const Bitext& bitext) {
  IntBitext out;
  out.src.intern(kNullWord);
  for (const auto& [src, tgt] : bitext.pairs) {
    IntSentence s, t;
    s.reserve(src.size());
    t.reserve(tgt.size());
    for (const std::string& w : src) s.push_back(out.src.intern(w));
    for (const std::string& w : tgt) t.push_back(out.tgt.intern(w));
    out.pairs.emplace_back(std::move(s), std::move(t));
  }
  return out;
}

}  // namespace detail

// Conditional probabilities t(f|e) of a target word given a source word,
// including the distinguished NULL source token.
struct TranslationTable {
  detail::Vocab src;
  detail::Vocab tgt;
  std::vector<std::unordered_map<int, double>> rows;  // by source id

  static constexpr const char* kNull = detail::kNullWord;

  double prob_ids(int e, int f) const {
    if (e < 0 || f < 0 || e >= static_cast<int>(rows.size())) return 0.0;
    auto it = rows[e].find(f);
    return it == rows[e].end() ? 0.0 : it->second;
  }

  double prob(const std::string& e, const std::string& f) const {
    return prob_ids(src.find(e), tgt.find(f));
  }

  // Max |1 - sum_f t(f|e)| over source words with a nonempty row.
  double max_normalization_error() const {
    double worst = 0.0;
    for (const auto& row : rows) {
      if (row.empty()) continue;
      double sum = 0.0;
      for (const auto& [f, p] : row) sum += p;
      worst = std::max(worst, std::abs(1.0 - sum));
    }
    return worst;
  }

  void save_tsv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw input_error("cannot write translation table: " + path);
    out << std::fixed << std::setprecision(9);
    std::vector<int> src_order(rows.size());
    for (size_t i = 0; i < rows.size(); ++i) src_order[i] = static_cast<int>(i);
    std::sort(src_order.begin(), src_order.end(), [&](int a, int b) {
      return src.words[a] < src.words[b];
    });
    for (int e : src_order) {
      std::vector<std::pair<std::string, double>> entries;
      entries.reserve(rows[e].size());
      for (const auto& [f, p] : rows[e]) entries.emplace_back(tgt.words[f], p);
      std::sort(entries.begin(), entries.end());
      for (const auto& [f, p] : entries)
        out << src.words[e] << '\t' << f << '\t' << p << "\n";
    }
  }

  static TranslationTable load_tsv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open translation table: " + path);
    TranslationTable table;
    table.src.intern(kNull);
    table.rows.emplace_back();
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (trim(line).empty()) continue;
      std::vector<std::string> cols = split(line, '\t');
      if (cols.size() != 3)
        throw input_error(path + " line " + std::to_string(line_no) +
                          ": expected 'e<TAB>f<TAB>prob'");
      int e = table.src.intern(cols[0]);
      if (e >= static_cast<int>(table.rows.size())) table.rows.emplace_back();
      int f = table.tgt.intern(cols[1]);
      try {
        table.rows[e][f] = std::stod(cols[2]);
      } catch (const std::exception&) {
        throw input_error(path + " line " + std::to_string(line_no) +
                          ": bad probability");
      }
    }
    return table;
  }
};

// Bounded jump-distance distribution plus the NULL-transition probability.
// Transition mass that would land outside the sentence is dropped rather than
// renormalized per position; that keeps the M-step closed-form, so EM
// log-likelihood is non-decreasing by construction.
struct HmmJumpModel {
  int max_jump = 5;
  std::vector<double> probs;  // index j + max_jump, j in [-max_jump, max_jump]
  double null_prob = 0.2;

  static HmmJumpModel uniform(int max_jump_ = 5, double null_prob_ = 0.2) {
    HmmJumpModel m;
    m.max_jump = max_jump_;
    m.null_prob = null_prob_;
    m.probs.assign(2 * max_jump_ + 1, 1.0 / (2 * max_jump_ + 1));
    return m;
  }

  double jump_prob(int jump) const {
    if (jump < -max_jump || jump > max_jump) return 0.0;
    return probs[jump + max_jump];
  }

  double sum() const {
    double s = 0.0;
    for (double p : probs) s += p;
    return s;
  }

  void save_tsv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw input_error("cannot write jump model: " + path);
    out << std::fixed << std::setprecision(9);
    for (int j = -max_jump; j <= max_jump; ++j)
      out << j << '\t' << jump_prob(j) << "\n";
    out << "NULL\t" << null_prob << "\n";
  }

  static HmmJumpModel load_tsv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open jump model: " + path);
    std::map<int, double> jumps;
    double null_prob = 0.2;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (trim(line).empty()) continue;
      std::vector<std::string> cols = split(line, '\t');
      if (cols.size() != 2)
        throw input_error(path + " line " + std::to_string(line_no) +
                          ": expected 'jump<TAB>prob'");
      if (cols[0] == "NULL") {
        null_prob = std::stod(cols[1]);
      } else {
        jumps[std::stoi(cols[0])] = std::stod(cols[1]);
      }
    }
    if (jumps.empty()) throw input_error(path + ": empty jump model");
    HmmJumpModel m;
    m.max_jump = std::max(std::abs(jumps.begin()->first),
                          std::abs(jumps.rbegin()->first));
    m.null_prob = null_prob;
    m.probs.assign(2 * m.max_jump + 1, 0.0);
    for (const auto& [j, p] : jumps) m.probs[j + m.max_jump] = p;
    return m;
  }
};

// 1-based (source index, target index) links.
using Alignment = std::set<std::pair<int, int>>;

struct Model1Result {
  TranslationTable table;
  std::vector<double> log_likelihood;  // one entry per EM iteration
};

namespace detail {

struct CountAccumulator {
  std::vector<std::unordered_map<int, double>> counts;  // by source id
  std::vector<double> totals;
  double log_likelihood = 0.0;

  explicit CountAccumulator(size_t src_vocab)
      : counts(src_vocab), totals(src_vocab, 0.0) {}

  void merge(const CountAccumulator& other) {
    for (size_t e = 0; e < other.counts.size(); ++e) {
      for (const auto& [f, c] : other.counts[e]) counts[e][f] += c;
      totals[e] += other.totals[e];
    }
    log_likelihood += other.log_likelihood;
  }
};

template <typename Fn>
void run_chunked(size_t n, int threads, const Fn& fn) {
  // fn(chunk_index, begin, end); chunks merged by the caller in index order.
  if (threads <= 1 || n < 2) {
    fn(0, size_t{0}, n);
    return;
  }
  size_t chunks = std::min<size_t>(threads, n);
  std::vector<std::thread> workers;
  size_t per = (n + chunks - 1) / chunks;
  for (size_t c = 0; c < chunks; ++c) {
    size_t begin = c * per, end = std::min(n, begin + per);
    if (begin >= end) break;
    workers.emplace_back([&fn, c, begin, end] { fn(c, begin, end); });
  }
  for (auto& w : workers) w.join();
}

inline void normalize_rows(TranslationTable& table, const CountAccumulator& acc) {
  for (size_t e = 0; e < acc.counts.size(); ++e) {
    if (acc.totals[e] <= 0.0) continue;  // unobserved row keeps old values
    auto& row = table.rows[e];
    row.clear();
    for (const auto& [f, c] : acc.counts[e]) row[f] = c / acc.totals[e];
  }
}

}  // namespace detail

// Uniform initialization over each source word's observed cooccurrence set.
inline TranslationTable model1_uniform_init(const detail::IntBitext& bitext) {
  TranslationTable table;
  table.src = bitext.src;
  table.tgt = bitext.tgt;
  std::vector<std::set<int>> cooc(bitext.src.size());
  for (const auto& [src, tgt] : bitext.pairs) {
    for (int f : tgt) {
      cooc[0].insert(f);  // NULL cooccurs with every target word
      for (int e : src) cooc[e].insert(f);
    }
  }
  table.rows.resize(bitext.src.size());
  for (size_t e = 0; e < cooc.size(); ++e) {
    if (cooc[e].empty()) continue;
    double p = 1.0 / static_cast<double>(cooc[e].size());
    for (int f : cooc[e]) table.rows[e][f] = p;
  }
  return table;
}

inline Model1Result train_model1(const Bitext& bitext, int iterations,
                                 int threads = 1) {
  if (bitext.pairs.empty()) throw input_error("train_model1: empty bitext");
  if (iterations < 1) throw input_error("train_model1: iterations must be >= 1");
  detail::IntBitext data = detail::intern_bitext(bitext);
  Model1Result result;
  result.table = model1_uniform_init(data);

  for (int iter = 0; iter < iterations; ++iter) {
    std::vector<detail::CountAccumulator> accs;
    size_t chunk_count = std::max(1, std::min<int>(threads,
        static_cast<int>(data.pairs.size())));
    accs.assign(chunk_count, detail::CountAccumulator(data.src.size()));
    detail::run_chunked(data.pairs.size(), static_cast<int>(chunk_count),
        [&](size_t chunk, size_t begin, size_t end) {
          detail::CountAccumulator& acc = accs[chunk];
          std::vector<double> post;
          for (size_t p = begin; p < end; ++p) {
            const auto& [src, tgt] = data.pairs[p];
            const double inv_positions = 1.0 / (src.size() + 1.0);
            for (int f : tgt) {
              post.assign(src.size() + 1, 0.0);
              double denom = 0.0;
              post[0] = result.table.prob_ids(0, f);
              denom += post[0];
              for (size_t i = 0; i < src.size(); ++i) {
                post[i + 1] = result.table.prob_ids(src[i], f);
                denom += post[i + 1];
              }
              acc.log_likelihood += std::log(denom * inv_positions);
              if (denom <= 0.0) continue;
              double scale = 1.0 / denom;
              acc.counts[0][f] += post[0] * scale;
              acc.totals[0] += post[0] * scale;
              for (size_t i = 0; i < src.size(); ++i) {
                acc.counts[src[i]][f] += post[i + 1] * scale;
                acc.totals[src[i]] += post[i + 1] * scale;
              }
            }
          }
        });
    for (size_t c = 1; c < accs.size(); ++c) accs[0].merge(accs[c]);
    result.log_likelihood.push_back(accs[0].log_likelihood);
    detail::normalize_rows(result.table, accs[0]);
  }
  return result;
}

namespace detail {

// HMM lattice bookkeeping. States: real source positions 1..l, then one NULL
// state per memory value 0..l (a NULL state remembers the last real position).
struct HmmLattice {
  int l = 0;
  int states() const { return 2 * l + 1; }
  bool is_real(int s) const { return s < l; }
  int position(int s) const { return s + 1; }       // real state -> 1-based pos
  int memory(int s) const { return s < l ? s + 1 : s - l; }
  int null_state(int memory) const { return l + memory; }
};

struct HmmCounts {
  CountAccumulator emit;
  std::vector<double> jump;  // index j + max_jump
  double null_trans = 0.0;
  double real_trans = 0.0;
  double log_likelihood = 0.0;

  HmmCounts(size_t src_vocab, int max_jump)
      : emit(src_vocab), jump(2 * max_jump + 1, 0.0) {}

  void merge(const HmmCounts& other) {
    emit.merge(other.emit);
    for (size_t i = 0; i < jump.size(); ++i) jump[i] += other.jump[i];
    null_trans += other.null_trans;
    real_trans += other.real_trans;
    log_likelihood += other.log_likelihood;
  }
};

}  // namespace detail

struct HmmResult {
  TranslationTable table;
  HmmJumpModel jump;
  std::vector<double> log_likelihood;
};

inline HmmResult train_hmm(const Bitext& bitext, const TranslationTable& init,
                           int iterations, int max_jump = 5,
                           double null_init = 0.2, int threads = 1) {
  if (bitext.pairs.empty()) throw input_error("train_hmm: empty bitext");
  if (iterations < 1) throw input_error("train_hmm: iterations must be >= 1");
  detail::IntBitext data = detail::intern_bitext(bitext);

  HmmResult result;
  result.jump = HmmJumpModel::uniform(max_jump, null_init);
  // Re-key the initial table onto this bitext's vocabulary.
  result.table.src = data.src;
  result.table.tgt = data.tgt;
  result.table.rows.assign(data.src.size(), {});
  for (size_t e = 0; e < data.src.size(); ++e) {
    int init_e = init.src.find(data.src.words[e]);
    if (init_e < 0) continue;
    for (const auto& [f_name, f_id] : data.tgt.ids) {
      double p = init.prob_ids(init_e, init.tgt.find(f_name));
      if (p > 0.0) result.table.rows[e][f_id] = p;
    }
  }

  for (int iter = 0; iter < iterations; ++iter) {
    size_t chunk_count = std::max(1, std::min<int>(threads,
        static_cast<int>(data.pairs.size())));
    std::vector<detail::HmmCounts> accs(
        chunk_count, detail::HmmCounts(data.src.size(), max_jump));
    const HmmJumpModel jump = result.jump;
    const double p0 = jump.null_prob;

    detail::run_chunked(data.pairs.size(), static_cast<int>(chunk_count),
        [&](size_t chunk, size_t begin, size_t end) {
          detail::HmmCounts& acc = accs[chunk];
          for (size_t p = begin; p < end; ++p) {
            const auto& [src, tgt] = data.pairs[p];
            detail::HmmLattice lat{static_cast<int>(src.size())};
            const int m = static_cast<int>(tgt.size());
            const int S = lat.states();

            auto emit = [&](int s, int j) {
              int e = lat.is_real(s) ? src[s] : 0;
              return result.table.prob_ids(e, tgt[j]);
            };
            // alpha[j][s], scaled per target position.
            std::vector<std::vector<double>> alpha(m, std::vector<double>(S, 0.0));
            std::vector<double> scale(m, 0.0);
            for (int s = 0; s < S; ++s) {
              double pi = lat.is_real(s)
                              ? (1.0 - p0) * jump.jump_prob(lat.position(s))
                              : (lat.memory(s) == 0 ? p0 : 0.0);
              alpha[0][s] = pi * emit(s, 0);
              scale[0] += alpha[0][s];
            }
            if (scale[0] <= 0.0) continue;  // unalignable pair, skip
            for (int s = 0; s < S; ++s) alpha[0][s] /= scale[0];

            std::vector<double> mass(lat.l + 1, 0.0);
            bool dead = false;
            for (int j = 1; j < m && !dead; ++j) {
              std::fill(mass.begin(), mass.end(), 0.0);
              for (int s = 0; s < S; ++s) mass[lat.memory(s)] += alpha[j - 1][s];
              for (int pos = 1; pos <= lat.l; ++pos) {
                double inflow = 0.0;
                for (int mem = std::max(0, pos - max_jump);
                     mem <= std::min(lat.l, pos + max_jump); ++mem)
                  inflow += mass[mem] * jump.jump_prob(pos - mem);
                alpha[j][pos - 1] = (1.0 - p0) * inflow * emit(pos - 1, j);
              }
              for (int mem = 0; mem <= lat.l; ++mem)
                alpha[j][lat.null_state(mem)] =
                    mass[mem] * p0 * emit(lat.null_state(mem), j);
              for (int s = 0; s < S; ++s) scale[j] += alpha[j][s];
              if (scale[j] <= 0.0) { dead = true; break; }
              for (int s = 0; s < S; ++s) alpha[j][s] /= scale[j];
            }
            if (dead) continue;

            for (int j = 0; j < m; ++j) acc.log_likelihood += std::log(scale[j]);

            // beta scaled so that alpha[j][s] * beta[j][s] is the posterior.
            std::vector<std::vector<double>> beta(m, std::vector<double>(S, 1.0));
            for (int j = m - 2; j >= 0; --j) {
              // outflow through a memory value: to reals within the window
              // plus to that memory's NULL state.
              std::vector<double> real_term(lat.l + 1, 0.0);
              for (int mem = 0; mem <= lat.l; ++mem) {
                double sum = 0.0;
                for (int pos = std::max(1, mem - max_jump);
                     pos <= std::min(lat.l, mem + max_jump); ++pos)
                  sum += jump.jump_prob(pos - mem) * emit(pos - 1, j + 1) *
                         beta[j + 1][pos - 1];
                real_term[mem] = (1.0 - p0) * sum;
              }
              for (int s = 0; s < S; ++s) {
                int mem = lat.memory(s);
                int ns = lat.null_state(mem);
                beta[j][s] = (real_term[mem] +
                              p0 * emit(ns, j + 1) * beta[j + 1][ns]) /
                             scale[j + 1];
              }
            }

            // Emission counts from state posteriors.
            for (int j = 0; j < m; ++j) {
              for (int s = 0; s < S; ++s) {
                double gamma = alpha[j][s] * beta[j][s];
                if (gamma <= 0.0) continue;
                int e = lat.is_real(s) ? src[s] : 0;
                acc.emit.counts[e][tgt[j]] += gamma;
                acc.emit.totals[e] += gamma;
              }
            }
            // Initial step counts as a jump from virtual position 0.
            for (int s = 0; s < S; ++s) {
              double gamma = alpha[0][s] * beta[0][s];
              if (gamma <= 0.0) continue;
              if (lat.is_real(s)) {
                acc.jump[lat.position(s) + max_jump] += gamma;
                acc.real_trans += gamma;
              } else {
                acc.null_trans += gamma;
              }
            }
            // Transition posteriors for j-1 -> j.
            for (int j = 1; j < m; ++j) {
              std::fill(mass.begin(), mass.end(), 0.0);
              for (int s = 0; s < S; ++s) mass[lat.memory(s)] += alpha[j - 1][s];
              for (int pos = 1; pos <= lat.l; ++pos) {
                double tail = emit(pos - 1, j) * beta[j][pos - 1] / scale[j];
                if (tail <= 0.0) continue;
                for (int mem = std::max(0, pos - max_jump);
                     mem <= std::min(lat.l, pos + max_jump); ++mem) {
                  double xi = mass[mem] * (1.0 - p0) * jump.jump_prob(pos - mem) * tail;
                  if (xi <= 0.0) continue;
                  acc.jump[pos - mem + max_jump] += xi;
                  acc.real_trans += xi;
                }
              }
              for (int mem = 0; mem <= lat.l; ++mem) {
                int ns = lat.null_state(mem);
                double xi = mass[mem] * p0 * emit(ns, j) * beta[j][ns] / scale[j];
                acc.null_trans += xi;
              }
            }
          }
        });

    for (size_t c = 1; c < accs.size(); ++c) accs[0].merge(accs[c]);
    result.log_likelihood.push_back(accs[0].log_likelihood);

    detail::normalize_rows(result.table, accs[0].emit);
    double jump_total = 0.0;
    for (double v : accs[0].jump) jump_total += v;
    if (jump_total > 0.0) {
      for (size_t i = 0; i < accs[0].jump.size(); ++i)
        result.jump.probs[i] = accs[0].jump[i] / jump_total;
    }
    double trans_total = accs[0].null_trans + accs[0].real_trans;
    if (trans_total > 0.0)
      result.jump.null_prob = accs[0].null_trans / trans_total;
  }
  return result;
}

// Most probable source link per target word under the HMM; NULL links omitted.
// Target words unseen in training fall through to NULL (no link).
inline Alignment viterbi_align(const TranslationTable& table,
                               const HmmJumpModel& jump,
                               const std::vector<std::string>& src_tokens,
                               const std::vector<std::string>& tgt_tokens) {
  Alignment links;
  if (src_tokens.empty() || tgt_tokens.empty()) return links;
  const int l = static_cast<int>(src_tokens.size());
  const int m = static_cast<int>(tgt_tokens.size());
  detail::HmmLattice lat{l};
  const int S = lat.states();
  const double p0 = jump.null_prob;
  constexpr double kNegInf = -1e300;
  constexpr double kOovFloor = -27.6;  // log(1e-12): NULL floor for unseen words

  std::vector<int> src_ids(l), tgt_ids(m);
  for (int i = 0; i < l; ++i) src_ids[i] = table.src.find(lower_ascii(src_tokens[i]));
  for (int j = 0; j < m; ++j) tgt_ids[j] = table.tgt.find(lower_ascii(tgt_tokens[j]));

  auto log_emit = [&](int s, int j) {
    int e = lat.is_real(s) ? src_ids[s] : 0;
    double p = table.prob_ids(e, tgt_ids[j]);
    if (p > 0.0) return std::log(p);
    return lat.is_real(s) ? kNegInf : kOovFloor;
  };

  std::vector<std::vector<double>> delta(m, std::vector<double>(S, kNegInf));
  std::vector<std::vector<int>> back(m, std::vector<int>(S, -1));
  for (int s = 0; s < S; ++s) {
    double pi = lat.is_real(s) ? (1.0 - p0) * jump.jump_prob(lat.position(s))
                               : (lat.memory(s) == 0 ? p0 : 0.0);
    if (pi > 0.0) delta[0][s] = std::log(pi) + log_emit(s, 0);
  }
  for (int j = 1; j < m; ++j) {
    for (int s = 0; s < S; ++s) {
      const int mem_target = lat.memory(s);
      double best = kNegInf;
      int best_prev = -1;
      for (int prev = 0; prev < S; ++prev) {
        double d = delta[j - 1][prev];
        if (d <= kNegInf) continue;
        double trans;
        if (lat.is_real(s)) {
          double jp = jump.jump_prob(lat.position(s) - lat.memory(prev));
          if (jp <= 0.0) continue;
          trans = std::log((1.0 - p0) * jp);
        } else {
          if (lat.memory(prev) != mem_target) continue;
          trans = std::log(p0);
        }
        if (d + trans > best) {
          best = d + trans;
          best_prev = prev;
        }
      }
      if (best_prev >= 0) {
        delta[j][s] = best + log_emit(s, j);
        back[j][s] = best_prev;
      }
    }
  }
  int state = 0;
  double best = kNegInf;
  for (int s = 0; s < S; ++s)
    if (delta[m - 1][s] > best) {
      best = delta[m - 1][s];
      state = s;
    }
  if (best <= kNegInf) return links;
  for (int j = m - 1; j >= 0; --j) {
    if (lat.is_real(state) && src_ids[state] >= 0 && tgt_ids[j] >= 0)
      links.insert({lat.position(state), j + 1});
    if (j > 0) state = back[j][state];
  }
  return links;
}

enum class SymmetrizeHeuristic { Intersection, GrowDiagFinal };

// Both inputs must already be expressed in the same (source, target)
// coordinates; callers swap the reverse direction's links beforehand.
inline Alignment symmetrize(const Alignment& forward, const Alignment& reverse,
                            SymmetrizeHeuristic heuristic, int src_len,
                            int tgt_len) {
  Alignment inter;
  std::set_intersection(forward.begin(), forward.end(), reverse.begin(),
                        reverse.end(), std::inserter(inter, inter.begin()));
  if (heuristic == SymmetrizeHeuristic::Intersection) return inter;

  Alignment result = inter;
  Alignment uni;
  std::set_union(forward.begin(), forward.end(), reverse.begin(), reverse.end(),
                 std::inserter(uni, uni.begin()));
  std::vector<bool> src_aligned(src_len + 1, false), tgt_aligned(tgt_len + 1, false);
  for (const auto& [i, j] : result) {
    src_aligned[i] = true;
    tgt_aligned[j] = true;
  }
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& [i, j] : Alignment(result)) {
      for (int di = -1; di <= 1; ++di) {
        for (int dj = -1; dj <= 1; ++dj) {
          if (di == 0 && dj == 0) continue;
          int ni = i + di, nj = j + dj;
          if (ni < 1 || ni > src_len || nj < 1 || nj > tgt_len) continue;
          if (!uni.count({ni, nj}) || result.count({ni, nj})) continue;
          if (src_aligned[ni] && tgt_aligned[nj]) continue;
          result.insert({ni, nj});
          src_aligned[ni] = true;
          tgt_aligned[nj] = true;
          changed = true;
        }
      }
    }
  }
  for (const auto& [i, j] : uni) {
    if (result.count({i, j})) continue;
    if (src_aligned[i] && tgt_aligned[j]) continue;
    result.insert({i, j});
    src_aligned[i] = true;
    tgt_aligned[j] = true;
  }
  return result;
}

// One consistent phrase-pair occurrence, spans 1-based inclusive.
struct PhraseSpan {
  int s_begin, s_end, t_begin, t_end;
  auto operator<=>(const PhraseSpan&) const = default;
};

// Alignment-consistent phrase pairs up to max_phrase_len: no link crosses the
// span boundary and the target span is the tight projection of the source
// span (no unaligned-boundary expansion). Spans need at least one link.
inline std::set<PhraseSpan> extract_phrases(int src_len, int tgt_len,
                                            const Alignment& alignment,
                                            int max_phrase_len) {
  std::set<PhraseSpan> out;
  if (alignment.empty()) return out;
  for (int i1 = 1; i1 <= src_len; ++i1) {
    for (int i2 = i1; i2 <= std::min(src_len, i1 + max_phrase_len - 1); ++i2) {
      int t_lo = tgt_len + 1, t_hi = 0;
      for (const auto& [i, j] : alignment) {
        if (i >= i1 && i <= i2) {
          t_lo = std::min(t_lo, j);
          t_hi = std::max(t_hi, j);
        }
      }
      if (t_hi == 0) continue;  // no internal link
      if (t_hi - t_lo + 1 > max_phrase_len) continue;
      bool consistent = true;
      for (const auto& [i, j] : alignment) {
        if (j >= t_lo && j <= t_hi && (i < i1 || i > i2)) {
          consistent = false;
          break;
        }
      }
      if (consistent) out.insert({i1, i2, t_lo, t_hi});
    }
  }
  return out;
}

struct PhraseScores {
  int64_t count = 0;
  double phi_f_given_e = 0.0;
  double phi_e_given_f = 0.0;
};

// Relative-frequency phrase table over extracted occurrences.
struct PhraseTable {
  std::map<std::string, std::map<std::string, int64_t>> counts;  // e -> f -> n
  std::map<std::string, int64_t> e_totals;
  std::map<std::string, int64_t> f_totals;

  void add(const std::string& e, const std::string& f, int64_t n = 1) {
    counts[e][f] += n;
    e_totals[e] += n;
    f_totals[f] += n;
  }

  bool contains(const std::string& e, const std::string& f) const {
    auto it = counts.find(e);
    return it != counts.end() && it->second.count(f) > 0;
  }

  size_t f_set_size(const std::string& e) const {
    auto it = counts.find(e);
    return it == counts.end() ? 0 : it->second.size();
  }

  double phi_f_given_e(const std::string& e, const std::string& f) const {
    auto it = counts.find(e);
    if (it == counts.end()) return 0.0;
    auto jt = it->second.find(f);
    if (jt == it->second.end()) return 0.0;
    return static_cast<double>(jt->second) / static_cast<double>(e_totals.at(e));
  }

  double phi_e_given_f(const std::string& e, const std::string& f) const {
    auto it = counts.find(e);
    if (it == counts.end()) return 0.0;
    auto jt = it->second.find(f);
    if (jt == it->second.end()) return 0.0;
    return static_cast<double>(jt->second) / static_cast<double>(f_totals.at(f));
  }

  size_t size() const {
    size_t n = 0;
    for (const auto& [e, fs] : counts) n += fs.size();
    return n;
  }

  void save_tsv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw input_error("cannot write phrase table: " + path);
    out << std::fixed << std::setprecision(9);
    for (const auto& [e, fs] : counts)
      for (const auto& [f, n] : fs)
        out << e << '\t' << f << '\t' << n << '\t' << phi_f_given_e(e, f)
            << '\t' << phi_e_given_f(e, f) << "\n";
  }
};

// Filtered opposite-phrase table with scores frozen from the source table.
struct OppositePhraseTable {
  std::map<std::string, std::map<std::string, PhraseScores>> rows;  // e -> f

  bool contains(const std::string& e, const std::string& f) const {
    auto it = rows.find(e);
    return it != rows.end() && it->second.count(f) > 0;
  }

  size_t size() const {
    size_t n = 0;
    for (const auto& [e, fs] : rows) n += fs.size();
    return n;
  }

  void add(const std::string& e, const std::string& f, PhraseScores scores) {
    rows[e][f] = scores;
  }

  void save_tsv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw input_error("cannot write phrase table: " + path);
    out << std::fixed << std::setprecision(9);
    for (const auto& [e, fs] : rows)
      for (const auto& [f, s] : fs)
        out << e << '\t' << f << '\t' << s.count << '\t' << s.phi_f_given_e
            << '\t' << s.phi_e_given_f << "\n";
  }

  static OppositePhraseTable load_tsv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open phrase table: " + path);
    OppositePhraseTable table;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (trim(line).empty()) continue;
      std::vector<std::string> cols = split(line, '\t');
      if (cols.size() != 5)
        throw input_error(path + " line " + std::to_string(line_no) +
                          ": expected 5 tab-separated columns");
      PhraseScores s;
      try {
        s.count = std::stoll(cols[2]);
        s.phi_f_given_e = std::stod(cols[3]);
        s.phi_e_given_f = std::stod(cols[4]);
      } catch (const std::exception&) {
        throw input_error(path + " line " + std::to_string(line_no) +
                          ": bad numeric field");
      }
      table.rows[cols[0]][cols[1]] = s;
    }
    return table;
  }
};

// Drops message/interpretation phrase pairs that also occur in the
// interpretation/interpretation table (likely paraphrases), then pairs whose
// phi(f|e) falls strictly below 1/|f_set(e)|. f_set sizes come from the
// source table as built, so the two filters commute.
inline OppositePhraseTable score_and_filter(const PhraseTable& st,
                                            const PhraseTable& hh) {
  OppositePhraseTable out;
  for (const auto& [e, fs] : st.counts) {
    const double threshold = 1.0 / static_cast<double>(fs.size());
    for (const auto& [f, n] : fs) {
      if (hh.contains(e, f)) continue;
      double phi = st.phi_f_given_e(e, f);
      if (phi < threshold) continue;
      out.add(e, f, {n, phi, st.phi_e_given_f(e, f)});
    }
  }
  return out;
}

// Two-column TSV, each side a space-separated token sequence.
inline Bitext load_bitext_tsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw input_error("cannot open bitext file: " + path);
  Bitext bitext;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<std::string> cols = split(line, '\t');
    if (cols.size() != 2)
      throw input_error(path + " line " + std::to_string(line_no) +
                        ": expected 'src<TAB>tgt'");
    auto side = [&](const std::string& text) {
      std::vector<std::string> tokens;
      for (const std::string& tok : split(text, ' '))
        if (!tok.empty()) tokens.push_back(tok);
      return tokens;
    };
    try {
      bitext.add(side(cols[0]), side(cols[1]));
    } catch (const input_error&) {
      throw input_error(path + " line " + std::to_string(line_no) +
                        ": empty bitext side");
    }
  }
  return bitext;
}

inline void save_bitext_tsv(const Bitext& bitext, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw input_error("cannot write bitext file: " + path);
  for (const auto& [src, tgt] : bitext.pairs)
    out << join(src, " ") << '\t' << join(tgt, " ") << "\n";
}

struct AlignmentModel {
  TranslationTable table;
  HmmJumpModel jump;
};

// End-to-end training: Model 1 initialization plus HMM refinement.
struct TrainedAligner {
  AlignmentModel model;
  std::vector<double> model1_log_likelihood;
  std::vector<double> hmm_log_likelihood;
};

inline TrainedAligner train_alignment(const Bitext& bitext, int m1_iterations,
                                      int hmm_iterations, int max_jump = 5,
                                      int threads = 1) {
  TrainedAligner out;
  Model1Result m1 = train_model1(bitext, m1_iterations, threads);
  out.model1_log_likelihood = std::move(m1.log_likelihood);
  if (hmm_iterations > 0) {
    HmmResult hmm =
        train_hmm(bitext, m1.table, hmm_iterations, max_jump, 0.2, threads);
    out.model.table = std::move(hmm.table);
    out.model.jump = std::move(hmm.jump);
    out.hmm_log_likelihood = std::move(hmm.log_likelihood);
  } else {
    out.model.table = std::move(m1.table);
    out.model.jump = HmmJumpModel::uniform(max_jump, 0.2);
  }
  return out;
}

// Viterbi in both directions symmetrized into one link set.
inline Alignment align_pair(const AlignmentModel& forward,
                            const AlignmentModel& reverse,
                            const std::vector<std::string>& src_tokens,
                            const std::vector<std::string>& tgt_tokens,
                            SymmetrizeHeuristic heuristic) {
  Alignment fwd = viterbi_align(forward.table, forward.jump, src_tokens, tgt_tokens);
  Alignment rev_raw =
      viterbi_align(reverse.table, reverse.jump, tgt_tokens, src_tokens);
  Alignment rev;
  for (const auto& [j, i] : rev_raw) rev.insert({i, j});
  return symmetrize(fwd, rev, heuristic, static_cast<int>(src_tokens.size()),
                    static_cast<int>(tgt_tokens.size()));
}

inline PhraseTable mine_phrase_table(const Bitext& bitext,
                                     const AlignmentModel& forward,
                                     const AlignmentModel& reverse,
                                     int max_phrase_len,
                                     SymmetrizeHeuristic heuristic) {
  PhraseTable table;
  for (const auto& [src, tgt] : bitext.pairs) {
    Alignment links = align_pair(forward, reverse, src, tgt, heuristic);
    for (const PhraseSpan& span : extract_phrases(
             static_cast<int>(src.size()), static_cast<int>(tgt.size()), links,
             max_phrase_len)) {
      std::string e, f;
      for (int i = span.s_begin; i <= span.s_end; ++i) {
        if (!e.empty()) e += ' ';
        e += src[i - 1];
      }
      for (int j = span.t_begin; j <= span.t_end; ++j) {
        if (!f.empty()) f += ' ';
        f += tgt[j - 1];
      }
      table.add(e, f);
    }
  }
  return table;
}

inline void save_alignment_model(const AlignmentModel& model,
                                 const std::string& dir,
                                 const std::string& suffix) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  model.table.save_tsv((fs::path(dir) / ("translation_" + suffix + ".tsv")).string());
  model.jump.save_tsv((fs::path(dir) / ("jump_" + suffix + ".tsv")).string());
}

inline AlignmentModel load_alignment_model(const std::string& dir,
                                           const std::string& suffix) {
  namespace fs = std::filesystem;
  AlignmentModel model;
  model.table = TranslationTable::load_tsv(
      (fs::path(dir) / ("translation_" + suffix + ".tsv")).string());
  model.jump = HmmJumpModel::load_tsv(
      (fs::path(dir) / ("jump_" + suffix + ".tsv")).string());
  return model;
}

}  // namespace irony
