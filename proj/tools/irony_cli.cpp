// Command-line frontend: corpus validation, alignment training, opposite
// phrase mining, strategy classification, RQ training, marker detection, and
// the report/evaluate/kappa analyses.
//
// Exit codes: 0 success, 1 input error, 2 internal invariant violation.

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "irony/analysis.hpp"
#include "irony/markers.hpp"
#include "irony/pipeline.hpp"
#include "irony/rq.hpp"

namespace {

using namespace irony;
namespace fs = std::filesystem;

PairsFormat format_from(const std::string& path, const std::string& override_) {
  if (override_ == "tsv") return PairsFormat::Tsv;
  if (override_ == "jsonl") return PairsFormat::Jsonl;
  return path.ends_with(".jsonl") ? PairsFormat::Jsonl : PairsFormat::Tsv;
}

// A --bitext/--hh-bitext argument may be a pairs file or a plain 2-column
// bitext; tell them apart by the first data row's column count.
bool looks_like_pairs_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw input_error("cannot open file: " + path);
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    return split(line, '\t').size() >= 4 || path.ends_with(".jsonl") ||
           (!line.empty() && line[0] == '{');
  }
  return false;
}

SymmetrizeHeuristic heuristic_from(const std::string& name) {
  if (name == "intersection") return SymmetrizeHeuristic::Intersection;
  if (name == "grow-diag-final" || name == "gdf")
    return SymmetrizeHeuristic::GrowDiagFinal;
  throw input_error("unknown symmetrization heuristic: " + name);
}

void write_json(const nlohmann::ordered_json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw input_error("cannot write " + path);
  out << j.dump(2) << "\n";
}

struct ValidateArgs {
  std::string pairs, format, parses, out;
};

int run_validate(const ValidateArgs& args) {
  Corpus corpus = load_pairs(args.pairs, format_from(args.pairs, args.format));
  ParseMap parses;
  if (!args.parses.empty()) parses = load_parses(args.parses);
  ValidationReport report = validate_corpus(corpus, parses);
  if (args.out.empty())
    std::cout << report.to_json().dump(2) << "\n";
  else
    write_json(report.to_json(), args.out);
  return 0;
}

struct AlignTrainArgs {
  std::string bitext, format, parses, extra_bitext, out;
  int iters_m1 = 15;
  int iters_hmm = 5;
  int threads = 1;
};

Bitext load_any_bitext(const std::string& path, const std::string& format,
                       const std::string& parses_path, bool hearer_pairs) {
  if (!looks_like_pairs_file(path)) return load_bitext_tsv(path);
  Corpus corpus = load_pairs(path, format_from(path, format));
  ParseMap parses;
  if (!parses_path.empty()) parses = load_parses(parses_path);
  const ParseMap* p = parses.empty() ? nullptr : &parses;
  return hearer_pairs ? build_hh_bitext(corpus, p) : build_st_bitext(corpus, p);
}

int run_align_train(const AlignTrainArgs& args) {
  Bitext bitext = load_any_bitext(args.bitext, args.format, args.parses, false);
  if (!args.extra_bitext.empty()) {
    Bitext extra = load_bitext_tsv(args.extra_bitext);
    for (auto& [src, tgt] : extra.pairs)
      bitext.pairs.emplace_back(std::move(src), std::move(tgt));
  }
  BidirectionalAligner aligner = train_bidirectional(
      bitext, args.iters_m1, args.iters_hmm, args.threads);
  fs::create_directories(args.out);
  save_alignment_model(aligner.forward, args.out, "fwd");
  save_alignment_model(aligner.reverse, args.out, "rev");
  save_bitext_tsv(bitext, (fs::path(args.out) / "bitext.tsv").string());
  nlohmann::ordered_json meta;
  meta["pairs"] = bitext.size();
  meta["iters_m1"] = args.iters_m1;
  meta["iters_hmm"] = args.iters_hmm;
  meta["model1_final_ll"] = aligner.forward_model1_ll.empty()
                                ? 0.0
                                : aligner.forward_model1_ll.back();
  meta["hmm_final_ll"] =
      aligner.forward_hmm_ll.empty() ? 0.0 : aligner.forward_hmm_ll.back();
  write_json(meta, (fs::path(args.out) / "meta.json").string());
  std::cout << "trained on " << bitext.size() << " sentence pairs ("
            << args.iters_m1 << " Model-1 + " << args.iters_hmm
            << " HMM iterations) -> " << args.out << "\n";
  return 0;
}

struct MinePhrasesArgs {
  std::string model, hh_bitext, format, parses, out;
  int max_len = 4;
  std::string heuristic = "gdf";
  int threads = 1;
};

int run_mine_phrases(const MinePhrasesArgs& args) {
  AlignmentModel fwd = load_alignment_model(args.model, "fwd");
  AlignmentModel rev = load_alignment_model(args.model, "rev");
  Bitext st_bitext =
      load_bitext_tsv((fs::path(args.model) / "bitext.tsv").string());
  int m1 = 15, hmm = 5;
  {
    std::ifstream meta_in((fs::path(args.model) / "meta.json").string());
    if (meta_in) {
      nlohmann::json meta;
      meta_in >> meta;
      m1 = meta.value("iters_m1", 15);
      hmm = meta.value("iters_hmm", 5);
    }
  }
  SymmetrizeHeuristic heuristic = heuristic_from(args.heuristic);
  PhraseTable st =
      mine_phrase_table(st_bitext, fwd, rev, args.max_len, heuristic);

  Bitext hh_bitext =
      load_any_bitext(args.hh_bitext, args.format, args.parses, true);
  PhraseTable hh;
  if (!hh_bitext.pairs.empty()) {
    BidirectionalAligner hh_aligner =
        train_bidirectional(hh_bitext, m1, hmm, args.threads);
    hh = mine_phrase_table(hh_bitext, hh_aligner.forward, hh_aligner.reverse,
                           args.max_len, heuristic);
  }
  OppositePhraseTable opposite = score_and_filter(st, hh);
  opposite.save_tsv(args.out);
  std::cout << "phrases: " << st.size() << " mined, " << hh.size()
            << " paraphrastic, " << opposite.size() << " kept -> " << args.out
            << "\n";
  return 0;
}

struct ClassifyArgs {
  std::string pairs, format, parses, model, phrases, rq_model, lexicons,
      embeddings, out;
  std::string heuristic = "gdf";
};

int run_classify(const ClassifyArgs& args) {
  Corpus corpus = load_pairs(args.pairs, format_from(args.pairs, args.format));
  ParseMap parses;
  if (!args.parses.empty()) parses = load_parses(args.parses);
  LexiconBundle lexicons = load_lexicons(args.lexicons);

  ClassifyResources res;
  res.lexicons = &lexicons;
  if (!parses.empty()) res.parses = &parses;
  AlignmentModel fwd, rev;
  if (!args.model.empty()) {
    fwd = load_alignment_model(args.model, "fwd");
    rev = load_alignment_model(args.model, "rev");
    res.forward = &fwd;
    res.reverse = &rev;
  }
  OppositePhraseTable opposite;
  if (!args.phrases.empty()) {
    opposite = OppositePhraseTable::load_tsv(args.phrases);
    res.opposite = &opposite;
  }
  RqModel rq;
  if (!args.rq_model.empty()) {
    rq = RqModel::load_json(args.rq_model);
    res.rq = &rq;
  }
  EmbeddingLookup embeddings;
  if (!args.embeddings.empty()) {
    embeddings = load_embeddings(args.embeddings);
    res.embeddings = &embeddings;
  }
  res.config.heuristic = heuristic_from(args.heuristic);

  std::vector<StrategySet> sets = classify_corpus(corpus, res);
  save_strategy_sets_jsonl(sets, args.out);
  std::map<std::string, size_t> totals;
  for (const StrategySet& set : sets)
    for (StrategyLabel label : set.labels) ++totals[to_string(label)];
  std::cout << "classified " << sets.size() << " pairs -> " << args.out << "\n";
  for (const auto& [label, count] : totals)
    std::cout << "  " << label << ": " << count << "\n";
  return 0;
}

struct TrainRqArgs {
  std::string data, out, embeddings, lexicons;
};

int run_train_rq(const TrainRqArgs& args) {
  LexiconBundle lexicons = load_lexicons(args.lexicons);
  auto labeled = load_rq_training(args.data);
  EmbeddingLookup embeddings;
  const EmbeddingLookup* emb = nullptr;
  if (!args.embeddings.empty()) {
    embeddings = load_embeddings(args.embeddings);
    emb = &embeddings;
  }
  RqModel model = train_rq_classifier(labeled, lexicons, emb);
  model.save_json(args.out);
  std::cout << "trained RQ model on " << labeled.size() << " examples in "
            << model.epochs_run << " epochs (final loss " << model.final_loss
            << ") -> " << args.out << "\n";
  return 0;
}

struct MarkersArgs {
  std::string pairs, format, parses, rules, out;
};

int run_markers(const MarkersArgs& args) {
  Corpus corpus = load_pairs(args.pairs, format_from(args.pairs, args.format));
  ParseMap parses;
  if (!args.parses.empty()) parses = load_parses(args.parses);
  MarkerRules rules = args.rules.empty() ? MarkerRules::defaults()
                                         : MarkerRules::from_json(args.rules);
  std::map<std::string, MarkerSet> by_id;
  for (const IronyPair& pair : corpus) {
    if (by_id.count(pair.s_im.id)) continue;
    const DependencyTree* tree = nullptr;
    auto it = parses.find(pair.s_im.id);
    if (it != parses.end()) tree = &it->second;
    by_id.emplace(pair.s_im.id, detect_markers(pair.s_im, tree, rules));
  }
  std::vector<MarkerSet> sets;
  for (auto& [id, set] : by_id) sets.push_back(std::move(set));
  save_marker_sets_jsonl(sets, args.out);
  size_t marked = 0;
  for (const MarkerSet& set : sets)
    if (set.any_marker()) ++marked;
  std::cout << "markers on " << marked << "/" << sets.size()
            << " messages -> " << args.out << "\n";
  return 0;
}

struct ReportArgs {
  std::string labels, pairs, format, markers, out;
  int min_shared = 500;
};

int run_report(const ReportArgs& args) {
  std::vector<StrategySet> sets = load_strategy_sets_jsonl(args.labels);
  Corpus corpus = load_pairs(args.pairs, format_from(args.pairs, args.format));
  fs::create_directories(args.out);

  DistributionTable distribution = strategy_distribution(sets, args.pairs);
  write_json(distribution.to_json(),
             (fs::path(args.out) / "distribution.json").string());
  distribution.print_text(std::cout);

  CrossTab incongruity = incongruity_crosstab(sets, corpus);
  write_json(incongruity.to_json(),
             (fs::path(args.out) / "crosstab_incongruity.json").string());
  incongruity.print_text(std::cout);

  if (!args.markers.empty()) {
    std::map<std::string, MarkerSet> markers =
        load_marker_sets_jsonl(args.markers);
    CrossTab marker_tab = marker_crosstab(sets, corpus, markers);
    nlohmann::ordered_json j = marker_tab.to_json();
    j["prevalence"] = marker_prevalence(corpus, markers).to_json();
    write_json(j, (fs::path(args.out) / "crosstab_markers.json").string());
    marker_tab.print_text(std::cout);
  }

  PerHearerResult per_hearer =
      per_hearer_distribution(sets, corpus, args.min_shared);
  write_json(per_hearer.to_json(),
             (fs::path(args.out) / "per_hearer.json").string());
  if (!per_hearer.note.empty())
    std::cout << "per-hearer: " << per_hearer.note << "\n";

  AgreementHistogram agreement = agreement_histogram(sets, corpus);
  write_json(agreement.to_json(),
             (fs::path(args.out) / "agreement.json").string());

  std::cout << "reports -> " << args.out << "\n";
  return 0;
}

struct EvaluateArgs {
  std::string predicted, gold, format, out;
};

int run_evaluate(const EvaluateArgs& args) {
  std::vector<StrategySet> predicted = load_strategy_sets_jsonl(args.predicted);
  Corpus corpus = load_pairs(args.gold, format_from(args.gold, args.format));
  EvalReport report = evaluate(predicted, corpus);
  report.print_text(std::cout);
  if (!args.out.empty()) write_json(report.to_json(), args.out);
  return 0;
}

struct KappaArgs {
  std::string a, b;
};

std::vector<std::string> load_label_column(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw input_error("cannot open label column: " + path);
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    std::string label = trim(line);
    if (!label.empty()) out.push_back(label);
  }
  return out;
}

int run_kappa(const KappaArgs& args) {
  KappaResult result =
      cohen_kappa(load_label_column(args.a), load_label_column(args.b));
  std::cout << result.to_json().dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"corpus analytics for irony interpretation strategies"};
  app.require_subcommand(1);

  ValidateArgs validate_args;
  CLI::App* validate = app.add_subcommand("validate", "check a corpus and its parses");
  validate->add_option("--pairs", validate_args.pairs)->required();
  validate->add_option("--format", validate_args.format);
  validate->add_option("--parses", validate_args.parses);
  validate->add_option("--out", validate_args.out);

  CLI::App* align = app.add_subcommand("align", "word alignment models");
  align->require_subcommand(1);
  AlignTrainArgs align_train_args;
  CLI::App* align_train = align->add_subcommand("train", "train Model 1 + HMM");
  align_train->add_option("--bitext", align_train_args.bitext)->required();
  align_train->add_option("--format", align_train_args.format);
  align_train->add_option("--parses", align_train_args.parses);
  align_train->add_option("--extra-bitext", align_train_args.extra_bitext);
  align_train->add_option("--iters-m1", align_train_args.iters_m1);
  align_train->add_option("--iters-hmm", align_train_args.iters_hmm);
  align_train->add_option("--threads", align_train_args.threads);
  align_train->add_option("--out", align_train_args.out)->required();

  MinePhrasesArgs mine_args;
  CLI::App* mine = align->add_subcommand("mine-phrases",
                                         "extract and filter opposite phrases");
  mine->add_option("--model", mine_args.model)->required();
  mine->add_option("--hh-bitext", mine_args.hh_bitext)->required();
  mine->add_option("--format", mine_args.format);
  mine->add_option("--parses", mine_args.parses);
  mine->add_option("--max-len", mine_args.max_len);
  mine->add_option("--heuristic", mine_args.heuristic);
  mine->add_option("--threads", mine_args.threads);
  mine->add_option("--out", mine_args.out)->required();

  ClassifyArgs classify_args;
  CLI::App* classify = app.add_subcommand("classify",
                                          "detect strategies per pair");
  classify->add_option("--pairs", classify_args.pairs)->required();
  classify->add_option("--format", classify_args.format);
  classify->add_option("--parses", classify_args.parses);
  classify->add_option("--model", classify_args.model);
  classify->add_option("--phrases", classify_args.phrases);
  classify->add_option("--rq-model", classify_args.rq_model);
  classify->add_option("--lexicons", classify_args.lexicons)->required();
  classify->add_option("--embeddings", classify_args.embeddings);
  classify->add_option("--heuristic", classify_args.heuristic);
  classify->add_option("--out", classify_args.out)->required();

  TrainRqArgs train_rq_args;
  CLI::App* train_rq = app.add_subcommand("train-rq",
                                          "train the rhetorical-question model");
  train_rq->add_option("--data", train_rq_args.data)->required();
  train_rq->add_option("--out", train_rq_args.out)->required();
  train_rq->add_option("--embeddings", train_rq_args.embeddings);
  train_rq->add_option("--lexicons", train_rq_args.lexicons)->required();

  MarkersArgs markers_args;
  CLI::App* markers = app.add_subcommand("markers", "detect irony markers");
  markers->add_option("--pairs", markers_args.pairs)->required();
  markers->add_option("--format", markers_args.format);
  markers->add_option("--parses", markers_args.parses);
  markers->add_option("--rules", markers_args.rules);
  markers->add_option("--out", markers_args.out)->required();

  ReportArgs report_args;
  CLI::App* report = app.add_subcommand("report", "distribution and crosstabs");
  report->add_option("--labels", report_args.labels)->required();
  report->add_option("--pairs", report_args.pairs)->required();
  report->add_option("--format", report_args.format);
  report->add_option("--markers", report_args.markers);
  report->add_option("--min-shared", report_args.min_shared);
  report->add_option("--out", report_args.out)->required();

  EvaluateArgs evaluate_args;
  CLI::App* evaluate_cmd = app.add_subcommand("evaluate",
                                              "score predictions against gold");
  evaluate_cmd->add_option("--predicted", evaluate_args.predicted)->required();
  evaluate_cmd->add_option("--gold", evaluate_args.gold)->required();
  evaluate_cmd->add_option("--format", evaluate_args.format);
  evaluate_cmd->add_option("--out", evaluate_args.out);

  KappaArgs kappa_args;
  CLI::App* kappa = app.add_subcommand("kappa", "two-rater Cohen's kappa");
  kappa->add_option("--a", kappa_args.a)->required();
  kappa->add_option("--b", kappa_args.b)->required();

  try {
    app.parse(argc, argv);
    if (validate->parsed()) return run_validate(validate_args);
    if (align_train->parsed()) return run_align_train(align_train_args);
    if (mine->parsed()) return run_mine_phrases(mine_args);
    if (classify->parsed()) return run_classify(classify_args);
    if (train_rq->parsed()) return run_train_rq(train_rq_args);
    if (markers->parsed()) return run_markers(markers_args);
    if (report->parsed()) return run_report(report_args);
    if (evaluate_cmd->parsed()) return run_evaluate(evaluate_args);
    if (kappa->parsed()) return run_kappa(kappa_args);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const irony::invariant_error& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  } catch (const irony::input_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
