#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <sstream>

#include "irony/corpus.hpp"
#include "test_util.hpp"

using namespace irony;

namespace {

Corpus load_tsv_string(const std::string& content) {
  std::istringstream in(content);
  return load_pairs_tsv(in);
}

}  // namespace

TEST_CASE("load_pairs reads rows in file order") {
  Corpus corpus = load_tsv_string(
      "p1\th1\tgreat game\tterrible game\tLexAnt\tExplicit\ttrue\n"
      "p2\th2\tso fun\tnot fun\t\t\t\n");
  REQUIRE(corpus.size() == 2);
  CHECK(corpus[0].pair_id == "p1");
  CHECK(corpus[0].s_im.id == "p1.s");
  CHECK(corpus[0].h_int.id == "p1.h");
  CHECK(corpus[0].s_im.role == Role::SpeakerIronic);
  CHECK(corpus[0].h_int.role == Role::HearerInterpretation);
  REQUIRE(corpus[0].gold.has_value());
  CHECK(corpus[0].gold->strategies == std::set<StrategyLabel>{StrategyLabel::LexAnt});
  CHECK(corpus[0].gold->incongruity == Incongruity::Explicit);
  CHECK(corpus[1].gold->incongruity == Incongruity::Unknown);
  CHECK(corpus[1].gold->strategies.empty());
  CHECK(corpus[1].gold->valid);
}

TEST_CASE("load_pairs: empty file gives empty corpus") {
  CHECK(load_tsv_string("").empty());
}

TEST_CASE("load_pairs rejects duplicate pair ids, naming the id") {
  const std::string content =
      "p1\th1\ta b\tc d\t\t\t\n"
      "p1\th2\te f\tg h\t\t\t\n";
  try {
    load_tsv_string(content);
    FAIL("expected duplicate-id error");
  } catch (const input_error& e) {
    CHECK(std::string(e.what()).find("p1") != std::string::npos);
    CHECK(std::string(e.what()).find("2") != std::string::npos);
  }
}

TEST_CASE("load_pairs rejects malformed rows with line numbers") {
  try {
    load_tsv_string("p1\th1\tonly three columns\n");
    FAIL("expected malformed-row error");
  } catch (const input_error& e) {
    CHECK(std::string(e.what()).find("line 1") != std::string::npos);
  }
}

TEST_CASE("load_pairs handles a release-sized file") {
  std::ostringstream content;
  for (int i = 0; i < 4762; ++i)
    content << "p" << i << "\th" << (i % 5) << "\tmessage " << i / 5
            << " is great\tmessage " << i / 5 << " is awful\t\t\t\n";
  std::string path = testutil::write_temp("big_pairs.tsv", content.str());
  Corpus corpus = load_pairs(path, PairsFormat::Tsv);
  CHECK(corpus.size() == 4762);
}

TEST_CASE("pairs sharing a speaker message share one s_im id") {
  Corpus corpus = load_tsv_string(
      "p1\th1\tsame message\tfirst reading\t\t\t\n"
      "p2\th2\tsame message\tsecond reading\t\t\t\n"
      "p3\th3\tother message\tthird reading\t\t\t\n");
  CHECK(corpus[0].s_im.id == "p1.s");
  CHECK(corpus[1].s_im.id == "p1.s");
  CHECK(corpus[2].s_im.id == "p3.s");
}

TEST_CASE("copies of the original message are flagged invalid") {
  Corpus corpus = load_tsv_string(
      "p1\th1\tJust Perfect\tjust perfect\t\t\t\n"
      "p2\th1\tgreat stuff\tawful stuff\t\t\t\n");
  REQUIRE(corpus[0].gold.has_value());
  CHECK_FALSE(corpus[0].gold->valid);
  CHECK(corpus[1].gold->valid);
}

TEST_CASE("round-trip: TSV and JSONL serialization preserve content") {
  std::mt19937 rng(20240817);
  std::uniform_int_distribution<int> word_count(1, 8);
  std::uniform_int_distribution<int> word_pick(0, 25);
  std::uniform_int_distribution<int> label_pick(0, 5);
  std::uniform_int_distribution<int> coin(0, 1);
  const char* words[] = {"alpha", "bravo", "charlie", "delta", "echo", "foxtrot",
                         "golf",  "hotel", "india",   "juliet", "kilo", "lima",
                         "mike",  "november", "oscar", "papa",  "quebec", "romeo",
                         "sierra", "tango", "uniform", "victor", "whiskey", "xray",
                         "yankee", "zulu"};
  auto sentence = [&] {
    std::string s;
    int n = word_count(rng);
    for (int i = 0; i < n; ++i) {
      if (i) s += ' ';
      s += words[word_pick(rng)];
    }
    return s;
  };

  Corpus corpus;
  for (int i = 0; i < 40; ++i) {
    IronyPair p;
    p.pair_id = "pair" + std::to_string(i);
    p.hearer_id = "h" + std::to_string(i % 7);
    std::string s_text = sentence();
    std::string h_text = sentence();
    while (lower_ascii(h_text) == lower_ascii(s_text)) h_text = sentence();
    p.s_im = {p.pair_id + ".s", s_text, Role::SpeakerIronic};
    p.h_int = {p.pair_id + ".h", h_text, Role::HearerInterpretation};
    GoldAnnotation gold;
    if (coin(rng)) gold.strategies.insert(kAllStrategyLabels[label_pick(rng)]);
    if (coin(rng)) gold.strategies.insert(kAllStrategyLabels[label_pick(rng)]);
    gold.incongruity = coin(rng) ? Incongruity::Explicit : Incongruity::Implicit;
    gold.valid = coin(rng);
    p.gold = gold;
    corpus.push_back(p);
  }

  for (PairsFormat format : {PairsFormat::Tsv, PairsFormat::Jsonl}) {
    std::string path = testutil::temp_path(
        format == PairsFormat::Tsv ? "roundtrip.tsv" : "roundtrip.jsonl");
    save_pairs(corpus, path, format);
    Corpus reloaded = load_pairs(path, format);
    REQUIRE(reloaded.size() == corpus.size());
    for (size_t i = 0; i < corpus.size(); ++i) {
      CHECK(reloaded[i].pair_id == corpus[i].pair_id);
      CHECK(reloaded[i].hearer_id == corpus[i].hearer_id);
      CHECK(reloaded[i].s_im.text == corpus[i].s_im.text);
      CHECK(reloaded[i].h_int.text == corpus[i].h_int.text);
      CHECK(reloaded[i].gold->strategies == corpus[i].gold->strategies);
      CHECK(reloaded[i].gold->incongruity == corpus[i].gold->incongruity);
      CHECK(reloaded[i].gold->valid == corpus[i].gold->valid);
    }
  }
}

TEST_CASE("distinct hearers equal pairs per shared message") {
  Corpus corpus = load_tsv_string(
      "p1\th1\tshared msg\treading one\t\t\t\n"
      "p2\th2\tshared msg\treading two\t\t\t\n"
      "p3\th3\tshared msg\treading three\t\t\t\n"
      "p4\th1\tanother msg\treading four\t\t\t\n");
  std::map<std::string, std::set<std::string>> hearers;
  std::map<std::string, int> pair_counts;
  for (const IronyPair& p : corpus) {
    hearers[p.s_im.id].insert(p.hearer_id);
    pair_counts[p.s_im.id]++;
  }
  for (const auto& [id, count] : pair_counts)
    CHECK(hearers[id].size() == static_cast<size_t>(count));
}

static ParseMap parse_string(const std::string& content) {
  std::istringstream in(content);
  return load_parses(in);
}

TEST_CASE("load_parses: one-token sentence") {
  ParseMap parses = parse_string(
      "# utterance_id = u1\n"
      "1\tYay\tyay\tINTJ\t_\t_\t0\troot\t_\t_\n");
  REQUIRE(parses.count("u1"));
  const DependencyTree& tree = parses.at("u1");
  CHECK(tree.size() == 1);
  CHECK(tree.root_indices == std::vector<int>{1});
}

TEST_CASE("load_parses: self-referential head is a cycle error") {
  const std::string content =
      "# utterance_id = u1\n"
      "1\ta\ta\tDET\t_\t_\t2\tdet\t_\t_\n"
      "2\tword\tword\tNOUN\t_\t_\t2\tdep\t_\t_\n";
  try {
    parse_string(content);
    FAIL("expected cycle error");
  } catch (const input_error& e) {
    CHECK(std::string(e.what()).find("u1") != std::string::npos);
    CHECK(std::string(e.what()).find("cycl") != std::string::npos);
  }
}

TEST_CASE("load_parses: out-of-range head is an error") {
  CHECK_THROWS_AS(parse_string("# utterance_id = u1\n"
                               "1\tword\tword\tNOUN\t_\t_\t9\tdep\t_\t_\n"),
                  input_error);
}

TEST_CASE("load_parses skips multiword ranges and empty nodes") {
  ParseMap parses = parse_string(
      "# utterance_id = u1\n"
      "1-2\tdon't\t_\t_\t_\t_\t_\t_\t_\t_\n"
      "1\tdo\tdo\tAUX\t_\t_\t3\taux\t_\t_\n"
      "2\tn't\tnot\tPART\t_\t_\t3\tadvmod\t_\t_\n"
      "2.1\tghost\tghost\tX\t_\t_\t_\t_\t_\t_\n"
      "3\tcare\tcare\tVERB\t_\t_\t0\troot\t_\t_\n");
  CHECK(parses.at("u1").size() == 3);
}

TEST_CASE("load_parses merges multi-sentence utterances with one root each") {
  ParseMap parses = load_parses(testutil::data_dir() + "/fixtures/parses.conllu");
  const DependencyTree& tree = parses.at("t05a.s");
  CHECK(tree.size() == 6);
  CHECK(tree.root_indices == std::vector<int>{1, 6});
  CHECK(tree.token(6).lemma == "yay");
  CHECK(tree.token(6).sentence == 1);
  CHECK(tree.token(4).sentence == 0);
}

TEST_CASE("frozen fixture: 'not' attaches to 'look'") {
  ParseMap parses = load_parses(testutil::data_dir() + "/fixtures/parses.conllu");
  const DependencyTree& tree = parses.at("t06a.h");
  int not_index = 0;
  for (const Token& t : tree.tokens)
    if (t.surface == "not") not_index = t.index;
  REQUIRE(not_index > 0);
  CHECK(tree.token(tree.parent_of(not_index)).lemma == "look");
}

TEST_CASE("property: load_parses output always satisfies the forest invariant") {
  std::mt19937 rng(77);
  for (int round = 0; round < 300; ++round) {
    int n = std::uniform_int_distribution<int>(1, 7)(rng);
    std::ostringstream content;
    content << "# utterance_id = u\n";
    for (int i = 1; i <= n; ++i) {
      int head = std::uniform_int_distribution<int>(0, n + 1)(rng);  // may overflow
      content << i << "\tw" << i << "\tw" << i
              << "\tNOUN\t_\t_\t" << head << "\tdep\t_\t_\n";
    }
    try {
      ParseMap parses = parse_string(content.str());
      const DependencyTree& tree = parses.at("u");
      // Reached only for valid forests: every walk to the root terminates.
      for (const Token& t : tree.tokens) {
        int cur = t.index;
        int steps = 0;
        while (cur != 0) {
          cur = tree.token(cur).head;
          REQUIRE(++steps <= n);
        }
      }
    } catch (const input_error&) {
      // rejected inputs are fine; the invariant is about accepted ones
    }
  }
}

TEST_CASE("validate_corpus counts missing parses and invalid pairs") {
  Corpus corpus = load_tsv_string(
      "p1\th1\tfirst message\tfirst reading\t\t\ttrue\n"
      "p2\th2\tsecond message\tsecond reading\t\t\tfalse\n"
      "p3\th3\tthird message\tthird reading\t\t\ttrue\n");
  ParseMap parses = parse_string(
      "# utterance_id = p1.s\n"
      "1\tfirst\tfirst\tADJ\t_\t_\t2\tamod\t_\t_\n"
      "2\tmessage\tmessage\tNOUN\t_\t_\t0\troot\t_\t_\n"
      "\n"
      "# utterance_id = p1.h\n"
      "1\tfirst\tfirst\tADJ\t_\t_\t2\tamod\t_\t_\n"
      "2\treading\treading\tNOUN\t_\t_\t0\troot\t_\t_\n");
  ValidationReport report = validate_corpus(corpus, parses);
  CHECK(report.pairs_total == 3);
  CHECK(report.pairs_missing_parse == 2);
  CHECK(report.missing_parse_s_im == 2);
  CHECK(report.missing_parse_h_int == 2);
  CHECK(report.excluded_invalid == 1);
  CHECK(report.empty_texts == 0);

  // fully parsed corpus: no missing counts
  Corpus small(corpus.begin(), corpus.begin() + 1);
  CHECK(validate_corpus(small, parses).pairs_missing_parse == 0);
}

TEST_CASE("fixture corpus and parse fixture line up") {
  Corpus corpus =
      load_pairs(testutil::data_dir() + "/fixtures/pairs.tsv", PairsFormat::Tsv);
  ParseMap parses = load_parses(testutil::data_dir() + "/fixtures/parses.conllu");
  CHECK(corpus.size() == 18);
  ValidationReport report = validate_corpus(corpus, parses);
  CHECK(report.pairs_missing_parse == 0);
  CHECK(report.excluded_invalid == 0);
}
