#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "irony/strategies.hpp"
#include "test_util.hpp"

namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
  std::string command = std::string(IRONY_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  int status = std::system(command.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

struct CliWorkspace {
  fs::path dir;
  std::string data = testutil::data_dir();

  CliWorkspace() {
    dir = fs::temp_directory_path() / ("irony_cli_" + std::to_string(::getpid()));
    fs::create_directories(dir);
  }
  std::string path(const std::string& name) const { return (dir / name).string(); }
};

}  // namespace

TEST_CASE("cli: full pipeline over the fixture corpus") {
  CliWorkspace ws;
  std::string pairs = ws.data + "/fixtures/pairs.tsv";
  std::string parses = ws.data + "/fixtures/parses.conllu";
  std::string lexicons = ws.data + "/lexicons/lexicons.toml";

  REQUIRE(run("validate --pairs " + pairs + " --parses " + parses +
              " --out " + ws.path("validation.json")) == 0);

  REQUIRE(run("align train --bitext " + pairs + " --parses " + parses +
              " --extra-bitext " + ws.data + "/fixtures/align_train.tsv" +
              " --iters-m1 15 --iters-hmm 3 --out " + ws.path("model")) == 0);
  CHECK(fs::exists(ws.path("model") + "/translation_fwd.tsv"));
  CHECK(fs::exists(ws.path("model") + "/jump_rev.tsv"));

  REQUIRE(run("align mine-phrases --model " + ws.path("model") +
              " --hh-bitext " + pairs + " --parses " + parses +
              " --max-len 4 --out " + ws.path("opposite.tsv")) == 0);
  CHECK(fs::exists(ws.path("opposite.tsv")));

  REQUIRE(run("train-rq --data " + ws.data + "/rq/rq_train.tsv --lexicons " +
              lexicons + " --out " + ws.path("rq.json")) == 0);

  REQUIRE(run("markers --pairs " + pairs + " --parses " + parses +
              " --rules " + ws.data + "/markers/markers.json --out " +
              ws.path("markers.jsonl")) == 0);

  REQUIRE(run("classify --pairs " + pairs + " --parses " + parses +
              " --model " + ws.path("model") + " --phrases " + ws.data +
              "/fixtures/opposite_phrases.tsv --rq-model " + ws.path("rq.json") +
              " --lexicons " + lexicons + " --out " + ws.path("labels.jsonl")) == 0);

  // the written labels match the fixture gold annotations
  std::vector<irony::StrategySet> sets =
      irony::load_strategy_sets_jsonl(ws.path("labels.jsonl"));
  irony::Corpus corpus = irony::load_pairs(pairs, irony::PairsFormat::Tsv);
  REQUIRE(sets.size() == corpus.size());
  std::map<std::string, std::set<irony::StrategyLabel>> expected;
  for (const irony::IronyPair& p : corpus)
    expected[p.pair_id] = p.gold->strategies;
  for (const irony::StrategySet& set : sets) {
    INFO("pair " << set.pair_id);
    CHECK(set.labels == expected.at(set.pair_id));
  }

  REQUIRE(run("report --labels " + ws.path("labels.jsonl") + " --pairs " + pairs +
              " --markers " + ws.path("markers.jsonl") +
              " --min-shared 1 --out " + ws.path("reports")) == 0);
  for (const char* name : {"distribution.json", "crosstab_incongruity.json",
                           "crosstab_markers.json", "per_hearer.json",
                           "agreement.json"})
    CHECK(fs::exists(ws.path("reports") + "/" + name));

  {
    std::ifstream in(ws.path("reports") + "/distribution.json");
    nlohmann::json distribution;
    in >> distribution;
    CHECK(distribution["total_pairs"] == 18);
    CHECK(distribution["total_instances"] == 19);  // one pair is double-labeled
  }

  REQUIRE(run("evaluate --predicted " + ws.path("labels.jsonl") + " --gold " +
              pairs + " --out " + ws.path("eval.json")) == 0);
  {
    std::ifstream in(ws.path("eval.json"));
    nlohmann::json eval;
    in >> eval;
    CHECK(eval["micro"]["f1"].get<double>() == Catch::Approx(100.0));
  }
}

TEST_CASE("cli: kappa on label columns") {
  CliWorkspace ws;
  {
    std::ofstream a(ws.path("a.txt"));
    a << "E\nE\nI\nI\n";
    std::ofstream b(ws.path("b.txt"));
    b << "E\nI\nI\nI\n";
  }
  std::string out = ws.path("kappa_out.json");
  std::string command = std::string(IRONY_CLI_PATH) + " kappa --a " +
                        ws.path("a.txt") + " --b " + ws.path("b.txt") + " > " +
                        out + " 2>/dev/null";
  REQUIRE(std::system(command.c_str()) == 0);
  std::ifstream in(out);
  nlohmann::json j;
  in >> j;
  CHECK(j["kappa"].get<double>() == Catch::Approx(0.5).margin(1e-9));
}

TEST_CASE("cli: exit codes distinguish input errors") {
  CliWorkspace ws;
  CHECK(run("validate --pairs /nonexistent.tsv") == 1);
  CHECK(run("kappa --a /nonexistent.a --b /nonexistent.b") == 1);
  CHECK(run("unknown-subcommand") == 1);
  // malformed pairs file
  std::string bad = testutil::write_temp("bad_pairs.tsv", "only\ttwo\n");
  CHECK(run("validate --pairs " + bad) == 1);
}
