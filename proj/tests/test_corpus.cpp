#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "geccl/corpus.hpp"
#include "geccl/errors.hpp"
#include "geccl/rng.hpp"

using namespace geccl;

TEST_CASE("parse_parallel basics") {
  const auto examples = parse_parallel("She go home\tShe goes home\n");
  REQUIRE(examples.size() == 1);
  CHECK(examples[0].id == 0);
  CHECK(examples[0].source == Tokens{"She", "go", "home"});
  CHECK(examples[0].target == Tokens{"She", "goes", "home"});
  CHECK_FALSE(examples[0].identical);

  const auto identical = parse_parallel("Hello .\tHello .\n");
  CHECK(identical[0].identical);
}

TEST_CASE("parse_parallel keeps duplicates and assigns file-order ids") {
  const std::string text =
      "a b\tc d\n"
      "e f\tg h\n"
      "a b\tc d\n"
      "i j\tk l\n"
      "m n\to p\n";
  const auto examples = parse_parallel(text);
  REQUIRE(examples.size() == 5);  // the parser does not dedup
  for (int i = 0; i < 5; ++i) CHECK(examples[i].id == i);
}

TEST_CASE("parse_parallel error cases carry line numbers") {
  CHECK_THROWS_WITH_AS(parse_parallel("no tab here\n"), doctest::Contains("line 1"), ParseError);
  CHECK_THROWS_WITH_AS(parse_parallel("a\tb\nx\ty\tz\n"), doctest::Contains("line 2"), ParseError);
  CHECK_THROWS_AS(parse_parallel("\tb c\n"), ParseError);
  CHECK_THROWS_AS(parse_parallel("a b\t\n"), ParseError);
}

TEST_CASE("deduplicate keeps first occurrence, reassigns ids") {
  auto examples = parse_parallel("a x\tb x\na x\tb x\na x\tc x\n");
  const auto deduped = deduplicate(examples);
  REQUIRE(deduped.size() == 2);  // same source, different target: both kept
  CHECK(deduped[0].target == Tokens{"b", "x"});
  CHECK(deduped[1].target == Tokens{"c", "x"});
  CHECK(deduped[0].id == 0);
  CHECK(deduped[1].id == 1);
}

TEST_CASE("deduplicate is idempotent on random corpora") {
  Rng rng(2024);
  const std::vector<std::string> words{"a", "b", "c"};
  for (int round = 0; round < 50; ++round) {
    std::vector<ParallelExample> examples;
    const int n = 1 + static_cast<int>(rng.below(20));
    for (int i = 0; i < n; ++i) {
      ParallelExample ex;
      ex.id = i;
      ex.source = {rng.pick(words), rng.pick(words)};
      ex.target = {rng.pick(words), rng.pick(words)};
      ex.identical = ex.source == ex.target;
      examples.push_back(ex);
    }
    const auto once = deduplicate(examples);
    const auto twice = deduplicate(once);
    CHECK(once == twice);
  }
}

TEST_CASE("partition_identical splits and preserves pairs") {
  const auto examples = parse_parallel(
      "a b\ta c\n"
      "x y\tx y\n"
      "p q\tp r\n"
      "m n\tm n\n"
      "u v\tu w\n");
  const auto [changed, identical] = partition_identical(examples);
  CHECK(changed.size() == 3);
  CHECK(identical.size() == 2);
  CHECK(changed.size() + identical.size() == examples.size());
  for (const auto& ex : changed) CHECK_FALSE(ex.identical);
  for (const auto& ex : identical) CHECK(ex.identical);

  SUBCASE("degenerate: everything identical") {
    const auto all_same = parse_parallel("a\ta\nb\tb\n");
    const auto [c2, i2] = partition_identical(all_same);
    CHECK(c2.empty());
    CHECK(i2.size() == 2);
  }
}

TEST_CASE("parse_m2 minimal block") {
  const auto corpus = parse_m2("S She go home\nA 1 2|||VERB|||goes|||REQUIRED|||-NONE-|||0\n");
  REQUIRE(corpus.sentences.size() == 1);
  const auto& s = corpus.sentences[0];
  CHECK(s.source == Tokens{"She", "go", "home"});
  REQUIRE(s.edits.size() == 1);
  CHECK(s.edits[0].start == 1);
  CHECK(s.edits[0].end == 2);
  CHECK(s.edits[0].etype == "VERB");
  CHECK(s.edits[0].correction == Tokens{"goes"});
  CHECK(s.edits[0].annotator == 0);
}

TEST_CASE("parse_m2 noop convention") {
  const auto corpus = parse_m2("S Hello .\nA -1 -1|||noop|||-NONE-|||REQUIRED|||-NONE-|||0\n");
  REQUIRE(corpus.sentences[0].edits.size() == 1);
  CHECK(corpus.sentences[0].edits[0].is_noop());
  const auto groups = corpus.sentences[0].edits_by_annotator();
  REQUIRE(groups.count(0) == 1);
  CHECK(groups.at(0).empty());  // noop contributes no edits
}

TEST_CASE("parse_m2 groups edits by annotator") {
  const std::string text =
      "S a b c\n"
      "A 0 1|||X|||z|||REQUIRED|||-NONE-|||0\n"
      "A 1 2|||Y|||w|||REQUIRED|||-NONE-|||1\n"
      "A 2 3|||X|||v|||REQUIRED|||-NONE-|||0\n";
  const auto corpus = parse_m2(text);
  const auto groups = corpus.sentences[0].edits_by_annotator();
  REQUIRE(groups.size() == 2);
  CHECK(groups.at(0).size() == 2);
  CHECK(groups.at(1).size() == 1);
}

TEST_CASE("parse_m2 malformed input") {
  CHECK_THROWS_AS(parse_m2("A 0 1|||X|||z|||REQUIRED|||-NONE-|||0\n"), ParseError);  // A before S
  CHECK_THROWS_WITH_AS(parse_m2("S a b\nA x 1|||T|||z|||REQUIRED|||-NONE-|||0\n"),
                       doctest::Contains("block 1"), ParseError);
  CHECK_THROWS_AS(parse_m2("S a b\nA 2 1|||T|||z|||REQUIRED|||-NONE-|||0\n"), ParseError);
  CHECK_THROWS_AS(parse_m2("S a b\nA 0 3|||T|||z|||REQUIRED|||-NONE-|||0\n"), ParseError);
  CHECK_THROWS_AS(parse_m2("S a b\nA -1 1|||T|||z|||REQUIRED|||-NONE-|||0\n"), ParseError);
}

TEST_CASE("write_m2 round-trips canonical text byte-identically") {
  const std::vector<std::string> cases = {
      "S She go home\nA 1 2|||VERB|||goes|||REQUIRED|||-NONE-|||0\n",
      "S Hello .\nA -1 -1|||noop|||-NONE-|||REQUIRED|||-NONE-|||0\n",
      "S a b c\nA 0 1|||X|||z|||REQUIRED|||-NONE-|||0\nA 1 2|||Y|||w|||REQUIRED|||-NONE-|||1\n",
  };
  for (const auto& text : cases) {
    CHECK(write_m2(parse_m2(text)) == text);
  }
  CHECK(write_m2(AnnotatedCorpus{}) == "");
}

namespace {

AnnotatedCorpus random_corpus(Rng& rng, int blocks) {
  const std::vector<std::string> words{"alpha", "beta", "gamma", "delta"};
  AnnotatedCorpus corpus;
  int annotators = 1 + static_cast<int>(rng.below(2));
  for (int b = 0; b < blocks; ++b) {
    AnnotatedSentence s;
    const int len = 1 + static_cast<int>(rng.below(6));
    for (int i = 0; i < len; ++i) s.source.push_back(rng.pick(words));
    const int edits = static_cast<int>(rng.below(4));
    for (int e = 0; e < edits; ++e) {
      GoldEdit edit;
      edit.annotator = static_cast<int>(rng.below(annotators));
      if (rng.chance(0.15)) {
        edit = GoldEdit{-1, -1, "noop", {}, edit.annotator};
      } else {
        edit.start = static_cast<int>(rng.below(len + 1));
        edit.end = edit.start + static_cast<int>(rng.below(len + 1 - edit.start));
        edit.etype = rng.chance(0.5) ? "R" : "M";
        const int corr_len = static_cast<int>(rng.below(3));
        for (int c = 0; c < corr_len; ++c) edit.correction.push_back(rng.pick(words));
      }
      s.edits.push_back(std::move(edit));
    }
    corpus.sentences.push_back(std::move(s));
  }
  // Keep the annotator-contiguity invariant: remap ids onto 0..k-1.
  std::map<int, int> remap;
  for (auto& s : corpus.sentences) {
    for (auto& e : s.edits) {
      e.annotator = remap.try_emplace(e.annotator, static_cast<int>(remap.size())).first->second;
    }
  }
  return corpus;
}

}  // namespace

TEST_CASE("write/parse round-trip property on random corpora") {
  Rng rng(99);
  for (int round = 0; round < 100; ++round) {
    const AnnotatedCorpus corpus = random_corpus(rng, 1 + static_cast<int>(rng.below(5)));
    const std::string text = write_m2(corpus);
    const AnnotatedCorpus reparsed = parse_m2(text);
    CHECK(reparsed == corpus);
    CHECK(write_m2(reparsed) == text);
  }
}

TEST_CASE("parsed gold offsets always sit inside the source") {
  Rng rng(7);
  for (int round = 0; round < 100; ++round) {
    const AnnotatedCorpus corpus = random_corpus(rng, 3);
    const AnnotatedCorpus reparsed = parse_m2(write_m2(corpus));
    for (const auto& s : reparsed.sentences) {
      for (const auto& e : s.edits) {
        if (e.is_noop()) continue;
        CHECK(e.start >= 0);
        CHECK(e.start <= e.end);
        CHECK(e.end <= static_cast<int>(s.source.size()));
      }
    }
  }
}

TEST_CASE("identical flag agrees with partition membership") {
  Rng rng(41);
  const std::vector<std::string> words{"a", "b"};
  std::string text;
  for (int i = 0; i < 40; ++i) {
    const std::string s = rng.pick(words) + " " + rng.pick(words);
    const std::string t = rng.chance(0.5) ? s : rng.pick(words) + " c";
    text += s + "\t" + t + "\n";
  }
  const auto examples = parse_parallel(text);
  const auto [changed, identical] = partition_identical(examples);
  CHECK(changed.size() + identical.size() == examples.size());
  for (const auto& ex : identical) CHECK(ex.source == ex.target);
  for (const auto& ex : changed) CHECK(ex.source != ex.target);
}
