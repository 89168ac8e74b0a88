#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <mutex>
#include <set>
#include <thread>

#include "geccl/corpus.hpp"
#include "geccl/difficulty.hpp"
#include "geccl/errors.hpp"
#include "geccl/rng.hpp"
#include "geccl/synthetic.hpp"
#include "httplib.h"
#include "json.hpp"

using namespace geccl;

namespace {

ParallelExample example(int id, const std::string& source, const std::string& target) {
  ParallelExample ex;
  ex.id = id;
  ex.source = split_tokens(source);
  ex.target = split_tokens(target);
  ex.identical = ex.source == ex.target;
  return ex;
}

// Transport failures for the first `failures` calls, then a canned response.
class FlakyBackend : public ScoringBackend {
public:
  FlakyBackend(int failures, std::string response)
      : failures_(failures), response_(std::move(response)) {}
  std::string name() const override { return "flaky"; }

private:
  std::string do_respond(const std::string&, const ParallelExample& ex) override {
    if (calls() <= failures_) throw BackendError("synthetic transport failure", ex.id);
    return response_;
  }
  int failures_;
  std::string response_;
};

}  // namespace

TEST_CASE("render_prompt substitutes exactly the source") {
  const auto ex = example(0, "She go home", "She goes home");
  CHECK(render_prompt("Rate 1-10: {sentence}", ex) == "Rate 1-10: She go home");
  CHECK_THROWS_AS(render_prompt("no placeholder", ex), ConfigError);
  CHECK_THROWS_AS(render_prompt("{sentence} and {sentence}", ex), ConfigError);
}

TEST_CASE("default template never leaks the target side") {
  const auto ex = example(0, "She go home", "She goes home");
  const std::string prompt = render_prompt(kDefaultPromptTemplate, ex);
  CHECK(prompt.find("She go home") != std::string::npos);
  CHECK(prompt.find("goes") == std::string::npos);
}

TEST_CASE("extract_score post-editing") {
  CHECK(extract_score("I would rate this sentence a 7 out of 10 because ...") == 7);
  CHECK(extract_score("Score: 10. The sentence has many errors.") == 10);
  CHECK_THROWS_AS(extract_score("This sentence is fine."), UnscorableResponse);
  CHECK(extract_score("100 is not a score but 4 is") == 4);  // maximal runs, not prefixes
  CHECK(try_extract_score("rating 0 out of anything") == std::nullopt);
  CHECK(try_extract_score("an 8.5 maybe") == 8);
}

TEST_CASE("bucket thresholds") {
  CHECK(bucket(1) == Tier::Easy);
  CHECK(bucket(3) == Tier::Easy);
  CHECK(bucket(4) == Tier::Medium);
  CHECK(bucket(7) == Tier::Medium);
  CHECK(bucket(8) == Tier::Hard);
  CHECK(bucket(10) == Tier::Hard);
  CHECK_THROWS_AS(bucket(0), ValidationError);
  CHECK_THROWS_AS(bucket(11), ValidationError);
}

TEST_CASE("bucket partitions every scored example into exactly one tier") {
  for (int score = 1; score <= 10; ++score) {
    const Tier t = bucket(score);
    CHECK((t == Tier::Easy || t == Tier::Medium || t == Tier::Hard));
  }
}

TEST_CASE("score_batch with a replay backend") {
  std::vector<ParallelExample> examples;
  for (int i = 0; i < 4; ++i) examples.push_back(example(i, "a b c", "a x c"));
  examples[1] = example(1, "d e f", "d y f");
  examples[2] = example(2, "g h i", "g z i");
  examples[3] = example(3, "j k l", "j w l");

  ReplayBackend backend({"a 3"});
  const auto scores = score_batch(backend, examples, nullptr);
  REQUIRE(scores.size() == 4);
  for (int i = 0; i < 4; ++i) {
    CHECK(scores[i].example_id == i);
    CHECK(scores[i].score == 3);
    CHECK(scores[i].backend == "replay");
    CHECK_FALSE(scores[i].fallback);
  }
}

TEST_CASE("score_batch rejects identical pairs") {
  ReplayBackend backend({"5"});
  std::vector<ParallelExample> examples{example(0, "a b", "a b")};
  CHECK_THROWS_AS(score_batch(backend, examples, nullptr), ValidationError);
}

TEST_CASE("warm cache bypasses the backend entirely") {
  std::vector<ParallelExample> examples;
  for (int i = 0; i < 6; ++i) {
    examples.push_back(example(i, "tok" + std::to_string(i) + " x", "tok" + std::to_string(i) + " y"));
  }
  ReplayBackend backend({"a 6"});
  ScoreCache cache;
  const auto first = score_batch(backend, examples, &cache);
  CHECK(backend.calls() == 6);
  const auto second = score_batch(backend, examples, &cache);
  CHECK(backend.calls() == 6);  // zero new calls
  REQUIRE(first.size() == second.size());
  for (std::size_t i = 0; i < first.size(); ++i) {
    CHECK(first[i].score == second[i].score);
    CHECK(first[i].example_id == second[i].example_id);
  }
}

TEST_CASE("score cache persists as append-only JSONL") {
  const std::string path = (std::filesystem::temp_directory_path() / "geccl_cache_test.jsonl").string();
  std::filesystem::remove(path);
  std::vector<ParallelExample> examples{example(0, "p q", "p r"), example(1, "s t", "s u")};
  {
    ScoreCache cache = ScoreCache::open(path);
    ReplayBackend backend({"2"});
    score_batch(backend, examples, &cache);
    CHECK(cache.size() == 2);
  }
  {
    ScoreCache cache = ScoreCache::open(path);
    CHECK(cache.size() == 2);
    ReplayBackend backend({"2"});
    score_batch(backend, examples, &cache);
    CHECK(backend.calls() == 0);  // fully warm from disk
  }
  std::filesystem::remove(path);
}

TEST_CASE("unscorable responses follow the fallback policy") {
  std::vector<ParallelExample> examples{example(0, "a b", "a c"), example(1, "d e", "d f")};
  SUBCASE("default: medium score 5, flagged") {
    ReplayBackend backend({"no numbers here"});
    ScoreBatchOptions options;
    options.backoff_initial_ms = 0;
    const auto scores = score_batch(backend, examples, nullptr, options);
    REQUIRE(scores.size() == 2);
    CHECK(scores[0].score == 5);
    CHECK(scores[0].fallback);
  }
  SUBCASE("drop policy omits the example") {
    ReplayBackend backend({"no numbers here", "a 9"});
    ScoreBatchOptions options;
    options.backoff_initial_ms = 0;
    options.fallback = UnscorableFallback::Drop;
    const auto scores = score_batch(backend, examples, nullptr, options);
    REQUIRE(scores.size() == 1);
    CHECK(scores[0].example_id == 1);
    CHECK(scores[0].score == 9);
  }
  SUBCASE("fallback results are not cached") {
    ReplayBackend backend({"no numbers here"});
    ScoreCache cache;
    ScoreBatchOptions options;
    options.backoff_initial_ms = 0;
    score_batch(backend, examples, &cache, options);
    CHECK(cache.size() == 0);
  }
}

TEST_CASE("transport failures retry, then surface with the example id") {
  std::vector<ParallelExample> examples{example(7, "a b", "a c")};
  SUBCASE("recovers within the retry budget") {
    FlakyBackend backend(2, "a 4");
    ScoreBatchOptions options;
    options.backoff_initial_ms = 0;
    const auto scores = score_batch(backend, examples, nullptr, options);
    CHECK(scores[0].score == 4);
    CHECK(backend.calls() == 3);
  }
  SUBCASE("exhausts retries") {
    FlakyBackend backend(100, "a 4");
    ScoreBatchOptions options;
    options.backoff_initial_ms = 0;
    try {
      score_batch(backend, examples, nullptr, options);
      FAIL("expected BackendError");
    } catch (const BackendError& e) {
      CHECK(e.example_id() == 7);
    }
    CHECK(backend.calls() == 4);  // 1 + max_retries
  }
}

TEST_CASE("oracle backend reproduces planted labels on a synthetic corpus") {
  SyntheticSpec spec = SyntheticSpec::with_defaults();
  spec.n_pairs = 300;
  spec.seed = 11;
  const SyntheticCorpus corpus = gen_synthetic(spec);
  const auto examples = parse_parallel(corpus.parallel_tsv);
  const auto [changed, identical] = partition_identical(examples);

  OracleBackend backend;
  const auto scores = score_batch(backend, changed, nullptr);
  std::map<int, std::string> planted;
  for (const auto& p : corpus.planted) planted[p.id] = p.label;
  for (const auto& s : scores) {
    CHECK(std::string(to_string(bucket(s.score))) == planted.at(s.example_id));
  }
}

TEST_CASE("score_batch output is invariant to the concurrency limit") {
  SyntheticSpec spec = SyntheticSpec::with_defaults();
  spec.n_pairs = 200;
  spec.seed = 5;
  const auto examples = parse_parallel(gen_synthetic(spec).parallel_tsv);
  const auto [changed, identical] = partition_identical(examples);

  OracleBackend a, b;
  ScoreBatchOptions opt1, opt8;
  opt1.concurrency = 1;
  opt8.concurrency = 8;
  const auto seq = score_batch(a, changed, nullptr, opt1);
  const auto par = score_batch(b, changed, nullptr, opt8);
  REQUIRE(seq.size() == par.size());
  for (std::size_t i = 0; i < seq.size(); ++i) {
    CHECK(seq[i].example_id == par[i].example_id);
    CHECK(seq[i].score == par[i].score);
    CHECK(seq[i].raw_response == par[i].raw_response);
  }
}

TEST_CASE("score_by_length terciles") {
  std::vector<ParallelExample> examples{
      example(0, "a b c", "a b d"),                  // len 3
      example(1, "a b c d e", "a b c d f"),          // len 5
      example(2, "a b c d e f g h i", "a b c d e f g h j"),  // len 9
  };
  const auto scores = score_by_length(examples);
  CHECK(bucket(scores[0].score) == Tier::Easy);
  CHECK(bucket(scores[1].score) == Tier::Medium);
  CHECK(bucket(scores[2].score) == Tier::Hard);
  CHECK(scores[0].backend == "length");
}

TEST_CASE("score_by_length breaks length ties by id") {
  std::vector<ParallelExample> examples;
  for (int i = 0; i < 6; ++i) examples.push_back(example(i, "x y z", "x y w"));
  const auto scores = score_by_length(examples);
  CHECK(bucket(scores[0].score) == Tier::Easy);
  CHECK(bucket(scores[1].score) == Tier::Easy);
  CHECK(bucket(scores[2].score) == Tier::Medium);
  CHECK(bucket(scores[3].score) == Tier::Medium);
  CHECK(bucket(scores[4].score) == Tier::Hard);
  CHECK(bucket(scores[5].score) == Tier::Hard);
}

TEST_CASE("score_by_length tier assignment is permutation invariant") {
  Rng rng(33);
  std::vector<ParallelExample> examples;
  for (int i = 0; i < 25; ++i) {
    std::string s = "w";
    const int len = static_cast<int>(rng.below(9));
    for (int k = 0; k < len; ++k) s += " w";
    examples.push_back(example(i, s, s + " q"));
  }
  const auto base = score_by_length(examples);
  std::map<int, int> base_by_id;
  for (const auto& s : base) base_by_id[s.example_id] = s.score;

  auto shuffled = examples;
  rng.shuffle(shuffled);
  const auto again = score_by_length(shuffled);
  for (const auto& s : again) CHECK(s.score == base_by_id.at(s.example_id));
}

TEST_CASE("length tiers disagree measurably with gold-derived tiers") {
  SyntheticSpec spec = SyntheticSpec::with_defaults();
  spec.n_pairs = 500;
  spec.seed = 17;
  const auto examples = parse_parallel(gen_synthetic(spec).parallel_tsv);
  auto [changed, identical] = partition_identical(examples);
  changed.resize(200);  // the paper's probe uses 200 sampled sentences

  OracleBackend backend;
  const auto oracle_scores = score_batch(backend, changed, nullptr);
  const auto length_scores = score_by_length(changed);
  const AgreementReport report = agreement(length_scores, oracle_scores);
  CHECK(report.tier_agreement_rate < 1.0);
  CHECK(report.tier_agreement_rate >= 0.0);
  CHECK(report.rank_correlation <= 1.0);
  CHECK(report.rank_correlation >= -1.0);
}

TEST_CASE("remote backend speaks the documented HTTP shape") {
  httplib::Server server;
  std::mutex seen_mu;
  std::string seen_auth, seen_body;
  std::atomic<int> hits{0};
  server.Post("/v1/score", [&](const httplib::Request& req, httplib::Response& res) {
    if (hits.fetch_add(1) == 0) {
      res.status = 503;  // first request fails; the retry policy must absorb it
      return;
    }
    {
      std::lock_guard<std::mutex> lock(seen_mu);
      seen_auth = req.get_header_value("Authorization");
      seen_body = req.body;
    }
    res.set_content(nlohmann::json{{"text", "I rate it 6."}}.dump(), "application/json");
  });
  const int port = server.bind_to_any_port("127.0.0.1");
  REQUIRE(port > 0);
  std::thread serve([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  setenv("GECCL_LLM_ENDPOINT", ("http://127.0.0.1:" + std::to_string(port) + "/v1/score").c_str(),
         1);
  setenv("GECCL_LLM_API_KEY", "sekrit", 1);
  RemoteLlmBackend backend(RemoteLlmBackend::options_from_env());

  std::vector<ParallelExample> examples{example(3, "it go fast", "it goes fast")};
  ScoreBatchOptions options;
  options.backoff_initial_ms = 0;
  const auto scores = score_batch(backend, examples, nullptr, options);

  server.stop();
  serve.join();

  REQUIRE(scores.size() == 1);
  CHECK(scores[0].score == 6);
  CHECK(scores[0].raw_response == "I rate it 6.");
  CHECK(scores[0].backend == "remote");
  {
    std::lock_guard<std::mutex> lock(seen_mu);
    CHECK(seen_auth == "Bearer sekrit");
    const auto body = nlohmann::json::parse(seen_body);
    REQUIRE(body.contains("prompt"));
    const std::string prompt = body["prompt"].get<std::string>();
    CHECK(prompt.find("it go fast") != std::string::npos);
    CHECK(prompt.find("goes") == std::string::npos);  // target never leaves the process
  }
  CHECK(hits.load() == 2);

  SUBCASE("a dead endpoint surfaces as BackendError after retries") {
    setenv("GECCL_LLM_ENDPOINT", "http://127.0.0.1:1/nowhere", 1);
    RemoteLlmBackend dead(RemoteLlmBackend::options_from_env());
    ScoreBatchOptions fast;
    fast.backoff_initial_ms = 0;
    fast.max_retries = 1;
    CHECK_THROWS_AS(score_batch(dead, examples, nullptr, fast), BackendError);
  }
}

namespace {

std::vector<DifficultyScore> as_scores(const std::vector<int>& values) {
  std::vector<DifficultyScore> scores;
  for (std::size_t i = 0; i < values.size(); ++i) {
    DifficultyScore s;
    s.example_id = static_cast<int>(i);
    s.score = values[i];
    s.backend = "test";
    scores.push_back(s);
  }
  return scores;
}

}  // namespace

TEST_CASE("agreement of a list with itself is perfect") {
  const auto x = as_scores({2, 5, 9, 3, 7, 1});  // tie-free
  const auto report = agreement(x, x);
  CHECK(report.tier_agreement_rate == doctest::Approx(1.0));
  CHECK(report.rank_correlation == doctest::Approx(1.0));
}

TEST_CASE("reversed tie-free ranking gives rank correlation -1") {
  const auto a = as_scores({1, 3, 5, 7, 9});
  const auto b = as_scores({9, 7, 5, 3, 1});
  const auto report = agreement(a, b);
  CHECK(report.rank_correlation == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("agreement on the worked example") {
  const auto a = as_scores({2, 5, 9, 3});
  const auto b = as_scores({3, 6, 8, 7});
  const auto report = agreement(a, b);
  // Tiers: E/M/H/E vs E/M/H/M -> 3 of 4 match.
  CHECK(report.tier_agreement_rate == doctest::Approx(0.75));
  // Spearman frozen from an independent statistics package.
  CHECK(report.rank_correlation == doctest::Approx(0.8).epsilon(1e-9));
}

TEST_CASE("agreement requires matching id sets") {
  auto a = as_scores({2, 5});
  auto b = as_scores({2, 5});
  b[1].example_id = 99;
  CHECK_THROWS_AS(agreement(a, b), ValidationError);
}
