#pragma once

#include <atomic>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "geccl/corpus.hpp"

namespace geccl {

// Default prompt shipped with the toolkit (also at configs/prompt_default.txt).
// The template text is hashed into the cache fingerprint, so editing it
// invalidates stale scores.
inline constexpr std::string_view kDefaultPromptTemplate =
    "You are an English grammar expert. Rate on a scale of 1 to 10 how "
    "difficult the following sentence is to correct, where 1 means a trivial "
    "surface fix and 10 means extensive rewriting. Give the score first, then "
    "a short justification.\n\nSentence: {sentence}\n";

struct DifficultyScore {
  int example_id = 0;
  std::string raw_response;
  int score = 0;  // 1..10
  std::string backend;
  bool fallback = false;  // set when the unscorable fallback supplied the score
};

enum class Tier { Easy, Medium, Hard };

const char* to_string(Tier tier);

// 1-3 -> Easy, 4-7 -> Medium, 8-10 -> Hard. Throws ValidationError outside [1, 10].
Tier bucket(int score);

// Substitutes the single {sentence} placeholder with the source sentence.
// The target side is never shown to the scorer.
std::string render_prompt(std::string_view template_text, const ParallelExample& example);

// First standalone integer in [1, 10], scanning left to right; a maximal digit
// run is read as one number, so "10" wins over its leading "1". Throws
// UnscorableResponse when nothing qualifies.
int extract_score(const std::string& response);
std::optional<int> try_extract_score(std::string_view response);

// Append-only score cache keyed by a fingerprint of (source text, backend,
// prompt template). JSON Lines on disk, loaded fully at startup.
class ScoreCache {
public:
  ScoreCache() = default;

  // Loads an existing JSONL file (missing file = empty cache) and appends new
  // entries to it as they are inserted.
  static ScoreCache open(const std::string& path);

  static std::string fingerprint(const Tokens& source, std::string_view backend,
                                 std::string_view template_text);

  std::optional<DifficultyScore> lookup(const std::string& fingerprint) const;
  void insert(const std::string& fingerprint, const DifficultyScore& score);
  std::size_t size() const;

private:
  std::unordered_map<std::string, DifficultyScore> entries_;
  std::string path_;  // empty: memory-only
  // Held by pointer so the cache stays movable; writes are serialized.
  mutable std::unique_ptr<std::mutex> mu_ = std::make_unique<std::mutex>();
};

// A scoring backend turns one rendered prompt into raw response text.
// respond() also receives the example so gold-derived backends can see the
// pair; the remote backend only ever transmits the prompt.
class ScoringBackend {
public:
  ScoringBackend() = default;
  ScoringBackend(const ScoringBackend& other) : calls_(other.calls_.load()) {}
  ScoringBackend(ScoringBackend&& other) noexcept : calls_(other.calls_.load()) {}
  virtual ~ScoringBackend() = default;
  virtual std::string name() const = 0;

  std::string respond(const std::string& prompt, const ParallelExample& example) {
    calls_.fetch_add(1, std::memory_order_relaxed);
    return do_respond(prompt, example);
  }

  // Number of respond() calls; lets tests assert cache hits bypass the backend.
  int calls() const { return calls_.load(std::memory_order_relaxed); }

private:
  virtual std::string do_respond(const std::string& prompt, const ParallelExample& example) = 0;
  std::atomic<int> calls_{0};
};

// Canned responses: example id i answers with line i mod n. Deterministic and
// input-order invariant.
class ReplayBackend : public ScoringBackend {
public:
  explicit ReplayBackend(std::vector<std::string> responses);
  static ReplayBackend from_file(const std::string& path);
  std::string name() const override { return "replay"; }

private:
  std::string do_respond(const std::string& prompt, const ParallelExample& example) override;
  std::vector<std::string> responses_;
};

// Gold-derived scorer for synthetic runs: aligns the pair and scores by edit
// shape (one 1:1 substitution -> 2, one pure insertion/deletion -> 5,
// anything wider -> 9).
class OracleBackend : public ScoringBackend {
public:
  std::string name() const override { return "oracle"; }

private:
  std::string do_respond(const std::string& prompt, const ParallelExample& example) override;
};

// HTTP backend: POST {<request_field>: prompt} with a bearer token, read
// <response_field> from the JSON body.
class RemoteLlmBackend : public ScoringBackend {
public:
  struct Options {
    std::string endpoint;  // http://host[:port]/path
    std::string api_key;
    std::string request_field = "prompt";
    std::string response_field = "text";
    int timeout_seconds = 60;
  };

  explicit RemoteLlmBackend(Options options);
  // Reads GECCL_LLM_ENDPOINT and GECCL_LLM_API_KEY.
  static Options options_from_env();
  std::string name() const override { return "remote"; }

private:
  std::string do_respond(const std::string& prompt, const ParallelExample& example) override;
  Options options_;
};

enum class UnscorableFallback { AssignMedium, Drop };

struct ScoreBatchOptions {
  int concurrency = 1;
  int max_retries = 3;           // R: attempts after the first failure
  int backoff_initial_ms = 250;  // doubles per retry; 0 in tests
  UnscorableFallback fallback = UnscorableFallback::AssignMedium;
  std::string template_text = std::string(kDefaultPromptTemplate);
};

// Scores every example (all must be non-identical pairs), consulting the cache
// first and updating it afterwards. Output order matches input order no matter
// how many requests are in flight. Transport failures are retried up to
// max_retries, then surface as BackendError carrying the example id;
// still-unscorable responses follow the fallback policy (AssignMedium records
// score 5 with the fallback flag, Drop omits the example).
std::vector<DifficultyScore> score_batch(ScoringBackend& backend,
                                         const std::vector<ParallelExample>& examples,
                                         ScoreCache* cache,
                                         const ScoreBatchOptions& options = {});

// Length baseline: sort by source token count (ties by id), shortest third
// scores 2, middle 5, longest 9; remainders go to the earlier tiers.
std::vector<DifficultyScore> score_by_length(const std::vector<ParallelExample>& examples);

struct AgreementReport {
  double tier_agreement_rate = 0.0;
  double rank_correlation = 0.0;  // Spearman, average ranks on ties
};

// Requires identical example-id sets; pairs scores by id.
AgreementReport agreement(const std::vector<DifficultyScore>& a,
                          const std::vector<DifficultyScore>& b);

}  // namespace geccl
