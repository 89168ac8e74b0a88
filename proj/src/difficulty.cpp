#include "geccl/difficulty.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <sstream>
#include <thread>

#include "geccl/errors.hpp"
#include "geccl/rng.hpp"
#include "geccl/student.hpp"
#include "httplib.h"
#include "json.hpp"

namespace geccl {

const char* to_string(Tier tier) {
  switch (tier) {
    case Tier::Easy: return "easy";
    case Tier::Medium: return "medium";
    case Tier::Hard: return "hard";
  }
  return "?";
}

Tier bucket(int score) {
  if (score < 1 || score > 10) {
    throw ValidationError("bucket: score " + std::to_string(score) + " outside [1, 10]");
  }
  if (score <= 3) return Tier::Easy;
  if (score <= 7) return Tier::Medium;
  return Tier::Hard;
}

std::string render_prompt(std::string_view template_text, const ParallelExample& example) {
  static constexpr std::string_view kPlaceholder = "{sentence}";
  const std::size_t first = template_text.find(kPlaceholder);
  if (first == std::string_view::npos) {
    throw ConfigError("prompt template is missing the {sentence} placeholder");
  }
  if (template_text.find(kPlaceholder, first + 1) != std::string_view::npos) {
    throw ConfigError("prompt template contains more than one {sentence} placeholder");
  }
  std::string out(template_text.substr(0, first));
  out += join_tokens(example.source);
  out += template_text.substr(first + kPlaceholder.size());
  return out;
}

std::optional<int> try_extract_score(std::string_view response) {
  std::size_t i = 0;
  const std::size_t n = response.size();
  while (i < n) {
    if (!std::isdigit(static_cast<unsigned char>(response[i]))) {
      ++i;
      continue;
    }
    std::size_t j = i;
    long value = 0;
    while (j < n && std::isdigit(static_cast<unsigned char>(response[j]))) {
      if (value < 1000) value = value * 10 + (response[j] - '0');
      ++j;
    }
    if (value >= 1 && value <= 10) return static_cast<int>(value);
    i = j;
  }
  return std::nullopt;
}

int extract_score(const std::string& response) {
  if (auto score = try_extract_score(response)) return *score;
  throw UnscorableResponse("no integer in [1, 10] found in response: '" +
                           response.substr(0, 60) + "'");
}

ScoreCache ScoreCache::open(const std::string& path) {
  ScoreCache cache;
  cache.path_ = path;
  std::ifstream in(path, std::ios::binary);
  if (!in) return cache;  // fresh cache; file appears on first insert
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded()) {
      throw ParseError("score cache " + path + ": bad JSON at line " + std::to_string(line_no));
    }
    DifficultyScore score;
    score.example_id = j.at("example_id").get<int>();
    score.backend = j.at("backend").get<std::string>();
    score.score = j.at("score").get<int>();
    score.raw_response = j.at("raw_response").get<std::string>();
    cache.entries_[j.at("fingerprint").get<std::string>()] = std::move(score);
  }
  return cache;
}

std::string ScoreCache::fingerprint(const Tokens& source, std::string_view backend,
                                    std::string_view template_text) {
  std::uint64_t h = fnv1a64(join_tokens(source));
  h = fnv1a64("\x1f", h);
  h = fnv1a64(backend, h);
  h = fnv1a64("\x1f", h);
  h = fnv1a64(to_hex(fnv1a64(template_text)), h);
  return to_hex(h);
}

std::optional<DifficultyScore> ScoreCache::lookup(const std::string& fingerprint) const {
  std::lock_guard<std::mutex> lock(*mu_);
  auto it = entries_.find(fingerprint);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void ScoreCache::insert(const std::string& fingerprint, const DifficultyScore& score) {
  std::lock_guard<std::mutex> lock(*mu_);
  if (!entries_.emplace(fingerprint, score).second) return;  // first write wins
  if (path_.empty()) return;
  nlohmann::json j{{"fingerprint", fingerprint},
                   {"example_id", score.example_id},
                   {"backend", score.backend},
                   {"score", score.score},
                   {"raw_response", score.raw_response}};
  std::ofstream out(path_, std::ios::binary | std::ios::app);
  if (!out) throw ValidationError("cannot append to score cache: " + path_);
  out << j.dump() << '\n';
}

std::size_t ScoreCache::size() const {
  std::lock_guard<std::mutex> lock(*mu_);
  return entries_.size();
}

ReplayBackend::ReplayBackend(std::vector<std::string> responses)
    : responses_(std::move(responses)) {
  if (responses_.empty()) throw ConfigError("replay backend needs at least one response");
}

ReplayBackend ReplayBackend::from_file(const std::string& path) {
  std::vector<std::string> responses;
  std::istringstream in(read_file(path));
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) responses.push_back(line);
  }
  return ReplayBackend(std::move(responses));
}

std::string ReplayBackend::do_respond(const std::string&, const ParallelExample& example) {
  const std::size_t idx = static_cast<std::size_t>(example.id) % responses_.size();
  return responses_[idx];
}

std::string OracleBackend::do_respond(const std::string&, const ParallelExample& example) {
  // Merge the alignment into non-match runs; the run shapes distinguish the
  // planted difficulty classes of the synthetic generator.
  const auto ops = align(example.source, example.target);
  struct Shape {
    int src_len = 0, tgt_len = 0;
  };
  std::vector<Shape> runs;
  bool in_run = false;
  for (const EditOp& op : ops) {
    if (op.type == EditOpType::Match) {
      in_run = false;
      continue;
    }
    if (!in_run) {
      runs.push_back({});
      in_run = true;
    }
    Shape& run = runs.back();
    if (op.type == EditOpType::Substitute || op.type == EditOpType::Delete) ++run.src_len;
    if (op.type == EditOpType::Substitute || op.type == EditOpType::Insert) ++run.tgt_len;
  }
  int score = 9;
  if (runs.empty()) {
    score = 1;  // identical pair; scoring preconditions normally exclude these
  } else if (runs.size() == 1) {
    const Shape& run = runs.front();
    if (run.src_len == 1 && run.tgt_len == 1) {
      score = 2;
    } else if (run.src_len == 0 || run.tgt_len == 0) {
      score = 5;
    }
  }
  return std::to_string(score);
}

RemoteLlmBackend::RemoteLlmBackend(Options options) : options_(std::move(options)) {
  if (options_.endpoint.empty()) {
    throw ConfigError("remote backend needs an endpoint (GECCL_LLM_ENDPOINT)");
  }
}

RemoteLlmBackend::Options RemoteLlmBackend::options_from_env() {
  Options options;
  if (const char* endpoint = std::getenv("GECCL_LLM_ENDPOINT")) options.endpoint = endpoint;
  if (const char* key = std::getenv("GECCL_LLM_API_KEY")) options.api_key = key;
  return options;
}

std::string RemoteLlmBackend::do_respond(const std::string& prompt, const ParallelExample&) {
  // Split endpoint into host part and path.
  const std::string& url = options_.endpoint;
  std::size_t scheme = url.find("://");
  std::size_t host_begin = scheme == std::string::npos ? 0 : scheme + 3;
  std::size_t path_begin = url.find('/', host_begin);
  const std::string host = url.substr(0, path_begin);
  const std::string path = path_begin == std::string::npos ? "/" : url.substr(path_begin);

  httplib::Client client(host);
  client.set_connection_timeout(options_.timeout_seconds);
  client.set_read_timeout(options_.timeout_seconds);
  httplib::Headers headers;
  if (!options_.api_key.empty()) {
    headers.emplace("Authorization", "Bearer " + options_.api_key);
  }
  nlohmann::json body{{options_.request_field, prompt}};
  auto res = client.Post(path, headers, body.dump(), "application/json");
  if (!res) {
    throw BackendError("remote backend: transport failure talking to " + options_.endpoint);
  }
  if (res->status != 200) {
    throw BackendError("remote backend: HTTP " + std::to_string(res->status));
  }
  nlohmann::json j = nlohmann::json::parse(res->body, nullptr, false);
  if (j.is_discarded() || !j.contains(options_.response_field)) {
    throw BackendError("remote backend: response body has no '" + options_.response_field +
                       "' field");
  }
  return j[options_.response_field].get<std::string>();
}

namespace {

struct SlotResult {
  DifficultyScore score;
  bool dropped = false;
  bool from_cache = false;
};

SlotResult score_one(ScoringBackend& backend, const ParallelExample& example, ScoreCache* cache,
                     const ScoreBatchOptions& options) {
  const std::string fp = ScoreCache::fingerprint(example.source, backend.name(),
                                                 options.template_text);
  if (cache) {
    if (auto hit = cache->lookup(fp)) {
      SlotResult r;
      r.score = *hit;
      r.from_cache = true;
      return r;
    }
  }
  const std::string prompt = render_prompt(options.template_text, example);

  std::string response;
  bool scored = false;
  int value = 0;
  for (int attempt = 0; attempt <= options.max_retries; ++attempt) {
    if (attempt > 0 && options.backoff_initial_ms > 0) {
      std::this_thread::sleep_for(
          std::chrono::milliseconds(options.backoff_initial_ms << (attempt - 1)));
    }
    try {
      response = backend.respond(prompt, example);
    } catch (const BackendError& e) {
      if (attempt == options.max_retries) {
        throw BackendError(std::string(e.what()) + " (example " + std::to_string(example.id) +
                               ", " + std::to_string(attempt + 1) + " attempts)",
                           example.id);
      }
      continue;
    }
    if (auto extracted = try_extract_score(response)) {
      value = *extracted;
      scored = true;
      break;
    }
  }

  SlotResult r;
  r.score.example_id = example.id;
  r.score.raw_response = response;
  r.score.backend = backend.name();
  if (scored) {
    r.score.score = value;
    if (cache) cache->insert(fp, r.score);
    return r;
  }
  // Unscorable after retries: fallback policy. Fallback results are not
  // cached so a later run can retry them.
  switch (options.fallback) {
    case UnscorableFallback::AssignMedium:
      r.score.score = 5;
      r.score.fallback = true;
      break;
    case UnscorableFallback::Drop:
      r.dropped = true;
      break;
  }
  return r;
}

}  // namespace

std::vector<DifficultyScore> score_batch(ScoringBackend& backend,
                                         const std::vector<ParallelExample>& examples,
                                         ScoreCache* cache, const ScoreBatchOptions& options) {
  for (const ParallelExample& ex : examples) {
    if (ex.identical) {
      throw ValidationError("score_batch: example " + std::to_string(ex.id) +
                            " is an identical pair; partition_identical first");
    }
  }
  if (options.concurrency < 1) throw ConfigError("score_batch: concurrency must be >= 1");

  std::vector<SlotResult> slots(examples.size());
  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(options.concurrency), examples.size());

  if (workers <= 1) {
    for (std::size_t i = 0; i < examples.size(); ++i) {
      slots[i] = score_one(backend, examples[i], cache, options);
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::mutex error_mu;
    std::exception_ptr first_error;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (;;) {
          const std::size_t i = next.fetch_add(1);
          if (i >= examples.size()) return;
          try {
            slots[i] = score_one(backend, examples[i], cache, options);
          } catch (...) {
            std::lock_guard<std::mutex> lock(error_mu);
            if (!first_error) first_error = std::current_exception();
            next.store(examples.size());
            return;
          }
        }
      });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
  }

  std::vector<DifficultyScore> out;
  out.reserve(examples.size());
  for (SlotResult& slot : slots) {
    if (!slot.dropped) out.push_back(std::move(slot.score));
  }
  return out;
}

std::vector<DifficultyScore> score_by_length(const std::vector<ParallelExample>& examples) {
  if (examples.empty()) throw ValidationError("score_by_length: empty input");
  std::vector<std::size_t> order(examples.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto la = examples[a].source.size(), lb = examples[b].source.size();
    if (la != lb) return la < lb;
    return examples[a].id < examples[b].id;
  });

  const std::size_t n = examples.size();
  const std::size_t base = n / 3, rem = n % 3;
  const std::size_t easy_count = base + (rem > 0 ? 1 : 0);
  const std::size_t medium_count = base + (rem > 1 ? 1 : 0);

  std::vector<DifficultyScore> scores(n);
  for (std::size_t rank = 0; rank < n; ++rank) {
    const ParallelExample& ex = examples[order[rank]];
    int value = 9;
    if (rank < easy_count) {
      value = 2;
    } else if (rank < easy_count + medium_count) {
      value = 5;
    }
    DifficultyScore s;
    s.example_id = ex.id;
    s.score = value;
    s.backend = "length";
    s.raw_response = "tokens=" + std::to_string(ex.source.size());
    scores[order[rank]] = std::move(s);  // keep input order
  }
  return scores;
}

namespace {

// Average ranks (1-based), ties share the mean rank.
std::vector<double> average_ranks(const std::vector<int>& values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n, 0.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double shared = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = shared;
    i = j + 1;
  }
  return ranks;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 && syy == 0.0) return x == y ? 1.0 : 0.0;
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace

AgreementReport agreement(const std::vector<DifficultyScore>& a,
                          const std::vector<DifficultyScore>& b) {
  if (a.size() != b.size() || a.empty()) {
    throw ValidationError("agreement: score lists must be nonempty and the same size");
  }
  std::map<int, int> by_id;
  for (const DifficultyScore& s : b) by_id[s.example_id] = s.score;

  std::vector<int> scores_a, scores_b;
  scores_a.reserve(a.size());
  scores_b.reserve(a.size());
  std::size_t matches = 0;
  for (const DifficultyScore& s : a) {
    auto it = by_id.find(s.example_id);
    if (it == by_id.end()) {
      throw ValidationError("agreement: example id " + std::to_string(s.example_id) +
                            " missing from second list");
    }
    scores_a.push_back(s.score);
    scores_b.push_back(it->second);
    if (bucket(s.score) == bucket(it->second)) ++matches;
  }
  if (by_id.size() != a.size()) {
    throw ValidationError("agreement: example id sets differ");
  }

  AgreementReport report;
  report.tier_agreement_rate = static_cast<double>(matches) / static_cast<double>(a.size());
  report.rank_correlation = pearson(average_ranks(scores_a), average_ranks(scores_b));
  return report;
}

}  // namespace geccl
