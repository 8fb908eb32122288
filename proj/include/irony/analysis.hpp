// Aggregations over detector output: strategy distributions, incongruity and
// marker cross-tabulations, per-hearer comparisons, the per-message agreement
// histogram, two-rater Cohen's kappa, and evaluation against gold labels.
// Counting is instance-based: a pair carrying two labels contributes two
// strategy instances.
#pragma once

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "irony/corpus.hpp"
#include "irony/markers.hpp"
#include "irony/strategies.hpp"

namespace irony {

// Half-up rounding to one decimal, the table style used everywhere.
inline double round1(double value) { return std::floor(value * 10.0 + 0.5) / 10.0; }

struct DistributionRow {
  StrategyLabel label;
  size_t count = 0;
  std::optional<double> pct;
};

struct DistributionTable {
  std::string dataset_tag;
  size_t total_pairs = 0;
  size_t total_instances = 0;
  std::vector<DistributionRow> rows;  // always the six labels, fixed order

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["dataset"] = dataset_tag;
    j["total_pairs"] = total_pairs;
    j["total_instances"] = total_instances;
    nlohmann::ordered_json out_rows = nlohmann::ordered_json::array();
    for (const DistributionRow& row : rows) {
      nlohmann::ordered_json r;
      r["label"] = to_string(row.label);
      r["count"] = row.count;
      if (row.pct)
        r["pct"] = *row.pct;
      else
        r["pct"] = nullptr;
      out_rows.push_back(r);
    }
    j["rows"] = out_rows;
    return j;
  }

  void print_text(std::ostream& out) const {
    out << "strategy distribution [" << dataset_tag << "] ("
        << total_instances << " instances over " << total_pairs << " pairs)\n";
    for (const DistributionRow& row : rows) {
      out << "  " << std::left << std::setw(18) << to_string(row.label)
          << std::right << std::setw(7) << row.count;
      if (row.pct)
        out << std::setw(8) << std::fixed << std::setprecision(1)
            << round1(*row.pct) << "%";
      out << "\n";
    }
  }
};

inline DistributionTable strategy_distribution(
    const std::vector<StrategySet>& sets, const std::string& dataset_tag) {
  DistributionTable table;
  table.dataset_tag = dataset_tag;
  table.total_pairs = sets.size();
  std::map<StrategyLabel, size_t> counts;
  for (const StrategySet& set : sets)
    for (StrategyLabel label : set.labels) {
      ++counts[label];
      ++table.total_instances;
    }
  for (StrategyLabel label : kAllStrategyLabels) {
    DistributionRow row;
    row.label = label;
    row.count = counts[label];
    if (table.total_instances > 0)
      row.pct = 100.0 * static_cast<double>(row.count) /
                static_cast<double>(table.total_instances);
    table.rows.push_back(row);
  }
  return table;
}

struct CrossTabColumn {
  std::string condition;
  size_t total_instances = 0;
  std::vector<DistributionRow> rows;
};

struct CrossTab {
  std::string axis;  // "incongruity" or "marker"
  std::vector<CrossTabColumn> columns;

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["axis"] = axis;
    nlohmann::ordered_json cols = nlohmann::ordered_json::array();
    for (const CrossTabColumn& col : columns) {
      nlohmann::ordered_json c;
      c["condition"] = col.condition;
      c["total_instances"] = col.total_instances;
      nlohmann::ordered_json rows = nlohmann::ordered_json::array();
      for (const DistributionRow& row : col.rows) {
        nlohmann::ordered_json r;
        r["label"] = to_string(row.label);
        r["count"] = row.count;
        if (row.pct)
          r["pct"] = *row.pct;
        else
          r["pct"] = nullptr;
        rows.push_back(r);
      }
      c["rows"] = rows;
      cols.push_back(c);
    }
    j["columns"] = cols;
    return j;
  }

  void print_text(std::ostream& out) const {
    out << "strategy shares by " << axis << "\n";
    out << "  " << std::left << std::setw(18) << "label";
    for (const CrossTabColumn& col : columns)
      out << std::right << std::setw(12) << col.condition;
    out << "\n";
    for (size_t r = 0; r < kAllStrategyLabelsCount; ++r) {
      out << "  " << std::left << std::setw(18)
          << to_string(kAllStrategyLabels[r]);
      for (const CrossTabColumn& col : columns) {
        std::ostringstream cell;
        if (col.rows[r].pct)
          cell << std::fixed << std::setprecision(1) << round1(*col.rows[r].pct);
        else
          cell << "-";
        out << std::right << std::setw(12) << cell.str();
      }
      out << "\n";
    }
  }

  static constexpr size_t kAllStrategyLabelsCount = 6;
};

namespace detail {

inline CrossTabColumn make_column(const std::string& condition,
                                  const std::map<StrategyLabel, size_t>& counts) {
  CrossTabColumn col;
  col.condition = condition;
  for (const auto& [label, count] : counts) col.total_instances += count;
  for (StrategyLabel label : kAllStrategyLabels) {
    DistributionRow row;
    row.label = label;
    auto it = counts.find(label);
    row.count = it == counts.end() ? 0 : it->second;
    if (col.total_instances > 0)
      row.pct = 100.0 * static_cast<double>(row.count) /
                static_cast<double>(col.total_instances);
    col.rows.push_back(row);
  }
  return col;
}

inline std::map<std::string, const IronyPair*> pairs_by_id(const Corpus& corpus) {
  std::map<std::string, const IronyPair*> out;
  for (const IronyPair& pair : corpus) out.emplace(pair.pair_id, &pair);
  return out;
}

}  // namespace detail

// Strategy-instance shares under explicit vs. implicit incongruity. Pairs
// with unknown incongruity are skipped; a condition with no instances is
// omitted rather than reported as an all-zero column.
inline CrossTab incongruity_crosstab(const std::vector<StrategySet>& sets,
                                     const Corpus& corpus) {
  auto by_id = detail::pairs_by_id(corpus);
  std::map<StrategyLabel, size_t> explicit_counts, implicit_counts;
  for (const StrategySet& set : sets) {
    auto it = by_id.find(set.pair_id);
    if (it == by_id.end() || !it->second->gold) continue;
    std::map<StrategyLabel, size_t>* bucket = nullptr;
    switch (it->second->gold->incongruity) {
      case Incongruity::Explicit: bucket = &explicit_counts; break;
      case Incongruity::Implicit: bucket = &implicit_counts; break;
      case Incongruity::Unknown: break;
    }
    if (!bucket) continue;
    for (StrategyLabel label : set.labels) ++(*bucket)[label];
  }
  CrossTab tab;
  tab.axis = "incongruity";
  if (!explicit_counts.empty())
    tab.columns.push_back(detail::make_column("Explicit", explicit_counts));
  if (!implicit_counts.empty())
    tab.columns.push_back(detail::make_column("Implicit", implicit_counts));
  return tab;
}

// Strategy-instance shares with vs. without an irony marker on the message.
inline CrossTab marker_crosstab(
    const std::vector<StrategySet>& sets, const Corpus& corpus,
    const std::map<std::string, MarkerSet>& markers_by_sim_id) {
  auto by_id = detail::pairs_by_id(corpus);
  std::map<StrategyLabel, size_t> with_marker, without_marker;
  for (const StrategySet& set : sets) {
    auto it = by_id.find(set.pair_id);
    if (it == by_id.end()) continue;
    bool marked = false;
    auto mt = markers_by_sim_id.find(it->second->s_im.id);
    if (mt != markers_by_sim_id.end()) marked = mt->second.any_marker();
    auto& bucket = marked ? with_marker : without_marker;
    for (StrategyLabel label : set.labels) ++bucket[label];
  }
  CrossTab tab;
  tab.axis = "marker";
  if (!with_marker.empty())
    tab.columns.push_back(detail::make_column("Marker+", with_marker));
  if (!without_marker.empty())
    tab.columns.push_back(detail::make_column("Marker-", without_marker));
  return tab;
}

struct PerHearerResult {
  int min_shared = 0;
  std::vector<std::string> hearers;
  size_t shared_messages = 0;
  std::map<std::string, DistributionTable> tables;
  std::string note;

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["min_shared"] = min_shared;
    j["qualifying_hearers"] = hearers;
    j["shared_messages"] = shared_messages;
    nlohmann::ordered_json tabs;
    for (const auto& [hearer, table] : tables) tabs[hearer] = table.to_json();
    j["tables"] = tabs;
    if (!note.empty()) j["note"] = note;
    return j;
  }
};

// Hearers whose rephrased message sets pairwise intersect in at least
// min_shared messages (greedy clique, largest message sets first); each
// qualifying hearer's distribution is computed on the common intersection so
// the comparison covers identical messages.
inline PerHearerResult per_hearer_distribution(
    const std::vector<StrategySet>& sets, const Corpus& corpus, int min_shared) {
  PerHearerResult result;
  result.min_shared = min_shared;
  auto by_id = detail::pairs_by_id(corpus);

  std::map<std::string, std::set<std::string>> messages_by_hearer;
  for (const StrategySet& set : sets) {
    auto it = by_id.find(set.pair_id);
    if (it == by_id.end()) continue;
    messages_by_hearer[it->second->hearer_id].insert(it->second->s_im.id);
  }
  std::vector<std::string> order;
  for (const auto& [hearer, messages] : messages_by_hearer)
    order.push_back(hearer);
  std::sort(order.begin(), order.end(), [&](const auto& a, const auto& b) {
    size_t na = messages_by_hearer[a].size(), nb = messages_by_hearer[b].size();
    return na != nb ? na > nb : a < b;
  });
  auto shared_count = [&](const std::string& a, const std::string& b) {
    const auto& sa = messages_by_hearer[a];
    const auto& sb = messages_by_hearer[b];
    size_t n = 0;
    for (const std::string& m : sa) n += sb.count(m);
    return n;
  };
  std::vector<std::string> clique;
  for (const std::string& hearer : order) {
    bool compatible = true;
    for (const std::string& member : clique)
      if (shared_count(hearer, member) < static_cast<size_t>(min_shared))
        compatible = false;
    if (compatible) clique.push_back(hearer);
  }
  if (clique.size() < 2) {
    result.note = "fewer than 2 hearers share >= " +
                  std::to_string(min_shared) + " messages";
    return result;
  }
  std::set<std::string> shared = messages_by_hearer[clique[0]];
  for (size_t k = 1; k < clique.size(); ++k) {
    std::set<std::string> next;
    for (const std::string& m : shared)
      if (messages_by_hearer[clique[k]].count(m)) next.insert(m);
    shared = std::move(next);
  }
  std::sort(clique.begin(), clique.end());
  result.hearers = clique;
  result.shared_messages = shared.size();
  for (const std::string& hearer : clique) {
    std::vector<StrategySet> subset;
    for (const StrategySet& set : sets) {
      auto it = by_id.find(set.pair_id);
      if (it == by_id.end()) continue;
      if (it->second->hearer_id != hearer) continue;
      if (!shared.count(it->second->s_im.id)) continue;
      subset.push_back(set);
    }
    result.tables.emplace(hearer, strategy_distribution(subset, hearer));
  }
  return result;
}

struct AgreementHistogram {
  size_t qualifying_messages = 0;  // messages with exactly 5 interpretations
  size_t excluded_messages = 0;
  std::map<std::string, size_t> pattern_counts;

  static const std::vector<std::string>& patterns() {
    static const std::vector<std::string> kPatterns = {
        "5", "4,1", "3,2", "3,1,1", "2,2,1", "2,1,1,1", "1,1,1,1,1"};
    return kPatterns;
  }

  std::optional<double> share(const std::string& pattern) const {
    if (qualifying_messages == 0) return std::nullopt;
    auto it = pattern_counts.find(pattern);
    size_t count = it == pattern_counts.end() ? 0 : it->second;
    return 100.0 * static_cast<double>(count) /
           static_cast<double>(qualifying_messages);
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["qualifying_messages"] = qualifying_messages;
    j["excluded_messages"] = excluded_messages;
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const std::string& pattern : patterns()) {
      nlohmann::ordered_json r;
      r["pattern"] = pattern;
      auto it = pattern_counts.find(pattern);
      r["count"] = it == pattern_counts.end() ? 0 : it->second;
      auto s = share(pattern);
      if (s)
        r["share_pct"] = *s;
      else
        r["share_pct"] = nullptr;
      rows.push_back(r);
    }
    j["patterns"] = rows;
    return j;
  }
};

// Deterministic primary label for multi-label pairs: the most frequent
// strategy class wins (the label enum is declared in that order). Pairs with
// no label form their own "none" group.
inline std::string primary_label_name(const StrategySet& set) {
  if (set.labels.empty()) return "none";
  return to_string(*set.labels.begin());
}

inline AgreementHistogram agreement_histogram(const std::vector<StrategySet>& sets,
                                              const Corpus& corpus) {
  auto by_id = detail::pairs_by_id(corpus);
  std::map<std::string, std::vector<std::string>> primaries_by_message;
  for (const StrategySet& set : sets) {
    auto it = by_id.find(set.pair_id);
    if (it == by_id.end()) continue;
    primaries_by_message[it->second->s_im.id].push_back(primary_label_name(set));
  }
  AgreementHistogram hist;
  for (const auto& [message, primaries] : primaries_by_message) {
    if (primaries.size() != 5) {
      ++hist.excluded_messages;
      continue;
    }
    std::map<std::string, int> groups;
    for (const std::string& label : primaries) ++groups[label];
    std::vector<int> sizes;
    for (const auto& [label, n] : groups) sizes.push_back(n);
    std::sort(sizes.rbegin(), sizes.rend());
    std::string pattern;
    for (size_t i = 0; i < sizes.size(); ++i) {
      if (i) pattern += ',';
      pattern += std::to_string(sizes[i]);
    }
    ++hist.pattern_counts[pattern];
    ++hist.qualifying_messages;
  }
  return hist;
}

struct KappaResult {
  double observed_agreement = 0.0;
  double expected_agreement = 0.0;
  double kappa = 0.0;

  nlohmann::ordered_json to_json() const {
    return {{"observed_agreement", observed_agreement},
            {"expected_agreement", expected_agreement},
            {"kappa", kappa}};
  }
};

// Standard two-rater Cohen's kappa with per-category marginals.
inline KappaResult cohen_kappa(const std::vector<std::string>& a,
                               const std::vector<std::string>& b) {
  if (a.size() != b.size())
    throw input_error("cohen_kappa: sequences differ in length (" +
                      std::to_string(a.size()) + " vs " +
                      std::to_string(b.size()) + ")");
  if (a.empty()) throw input_error("cohen_kappa: empty sequences");
  const double n = static_cast<double>(a.size());
  std::map<std::string, size_t> marg_a, marg_b;
  size_t agree = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    ++marg_a[a[i]];
    ++marg_b[b[i]];
    if (a[i] == b[i]) ++agree;
  }
  KappaResult result;
  result.observed_agreement = static_cast<double>(agree) / n;
  for (const auto& [category, count_a] : marg_a) {
    auto it = marg_b.find(category);
    if (it == marg_b.end()) continue;
    result.expected_agreement +=
        (static_cast<double>(count_a) / n) * (static_cast<double>(it->second) / n);
  }
  if (result.observed_agreement == 1.0) {
    result.kappa = 1.0;  // perfect agreement, also covers p_e == 1
  } else {
    result.kappa = (result.observed_agreement - result.expected_agreement) /
                   (1.0 - result.expected_agreement);
  }
  return result;
}

struct LabelEval {
  size_t tp = 0, fp = 0, fn = 0;
  double precision = 0.0, recall = 0.0, f1 = 0.0;  // percent

  void finalize() {
    precision = tp + fp == 0 ? 0.0 : 100.0 * tp / static_cast<double>(tp + fp);
    recall = tp + fn == 0 ? 0.0 : 100.0 * tp / static_cast<double>(tp + fn);
    f1 = precision + recall == 0.0
             ? 0.0
             : 2.0 * precision * recall / (precision + recall);
  }
};

struct EvalReport {
  std::map<StrategyLabel, LabelEval> per_label;
  LabelEval micro;
  double macro_precision = 0.0, macro_recall = 0.0, macro_f1 = 0.0;
  size_t pairs_evaluated = 0;

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["pairs_evaluated"] = pairs_evaluated;
    nlohmann::ordered_json labels;
    for (const auto& [label, eval] : per_label) {
      labels[to_string(label)] = {{"tp", eval.tp},       {"fp", eval.fp},
                                  {"fn", eval.fn},       {"precision", eval.precision},
                                  {"recall", eval.recall}, {"f1", eval.f1}};
    }
    j["per_label"] = labels;
    j["micro"] = {{"tp", micro.tp},
                  {"fp", micro.fp},
                  {"fn", micro.fn},
                  {"precision", micro.precision},
                  {"recall", micro.recall},
                  {"f1", micro.f1}};
    j["macro"] = {{"precision", macro_precision},
                  {"recall", macro_recall},
                  {"f1", macro_f1}};
    return j;
  }

  void print_text(std::ostream& out) const {
    out << "evaluation over " << pairs_evaluated << " gold pairs\n";
    out << "  " << std::left << std::setw(18) << "label" << std::right
        << std::setw(8) << "P" << std::setw(8) << "R" << std::setw(8) << "F1"
        << "\n";
    auto line = [&](const std::string& name, const LabelEval& e) {
      out << "  " << std::left << std::setw(18) << name << std::right
          << std::fixed << std::setprecision(1) << std::setw(8)
          << round1(e.precision) << std::setw(8) << round1(e.recall)
          << std::setw(8) << round1(e.f1) << "\n";
    };
    for (const auto& [label, eval] : per_label) line(to_string(label), eval);
    line("micro", micro);
    out << "  " << std::left << std::setw(18) << "macro" << std::right
        << std::fixed << std::setprecision(1) << std::setw(8)
        << round1(macro_precision) << std::setw(8) << round1(macro_recall)
        << std::setw(8) << round1(macro_f1) << "\n";
  }
};

// Per-label binary precision/recall/F1 over pairs carrying gold annotations;
// micro pools decisions, macro averages the per-label scores.
inline EvalReport evaluate(const std::vector<StrategySet>& predicted,
                           const Corpus& corpus) {
  std::map<std::string, const StrategySet*> predicted_by_id;
  for (const StrategySet& set : predicted)
    predicted_by_id.emplace(set.pair_id, &set);

  EvalReport report;
  std::set<StrategyLabel> seen;
  for (const IronyPair& pair : corpus) {
    if (!pair.gold || !pair.gold->valid) continue;
    ++report.pairs_evaluated;
    static const std::set<StrategyLabel> kEmpty;
    auto it = predicted_by_id.find(pair.pair_id);
    const std::set<StrategyLabel>& labels =
        it == predicted_by_id.end() ? kEmpty : it->second->labels;
    for (StrategyLabel label : kAllStrategyLabels) {
      bool in_gold = pair.gold->strategies.count(label) > 0;
      bool in_predicted = labels.count(label) > 0;
      if (in_gold || in_predicted) seen.insert(label);
      LabelEval& eval = report.per_label[label];
      if (in_gold && in_predicted) {
        ++eval.tp;
        ++report.micro.tp;
      } else if (in_predicted) {
        ++eval.fp;
        ++report.micro.fp;
      } else if (in_gold) {
        ++eval.fn;
        ++report.micro.fn;
      }
    }
  }
  if (report.pairs_evaluated == 0)
    throw input_error("evaluate: no gold-annotated pairs in the corpus");
  for (auto it = report.per_label.begin(); it != report.per_label.end();) {
    if (!seen.count(it->first)) {
      it = report.per_label.erase(it);  // label absent from gold and predictions
    } else {
      it->second.finalize();
      ++it;
    }
  }
  report.micro.finalize();
  if (!report.per_label.empty()) {
    for (const auto& [label, eval] : report.per_label) {
      report.macro_precision += eval.precision;
      report.macro_recall += eval.recall;
      report.macro_f1 += eval.f1;
    }
    report.macro_precision /= static_cast<double>(report.per_label.size());
    report.macro_recall /= static_cast<double>(report.per_label.size());
    report.macro_f1 /= static_cast<double>(report.per_label.size());
  }
  return report;
}

}  // namespace irony
