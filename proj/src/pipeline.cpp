#include "geccl/pipeline.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <memory>

#include "geccl/errors.hpp"
#include "geccl/rng.hpp"
#include "json.hpp"

namespace fs = std::filesystem;

namespace geccl {

namespace {

const char* to_string(UnscorableFallback f) {
  return f == UnscorableFallback::AssignMedium ? "medium" : "drop";
}

UnscorableFallback fallback_from_string(const std::string& s) {
  if (s == "medium") return UnscorableFallback::AssignMedium;
  if (s == "drop") return UnscorableFallback::Drop;
  throw ConfigError("unknown fallback '" + s + "' (expected medium|drop)");
}

}  // namespace

RunConfig run_config_from_json(const std::string& json_text) {
  nlohmann::json j = nlohmann::json::parse(json_text, nullptr, false);
  if (j.is_discarded()) throw ConfigError("run config: invalid JSON");
  RunConfig c;
  c.corpus_path = j.value("corpus", "");
  c.gold_dev_path = j.value("gold_dev", "");
  c.gold_test_path = j.value("gold_test", "");
  c.cache_path = j.value("cache", "");
  c.out_dir = j.value("out", c.out_dir);
  c.run_id = j.value("run_id", "");
  c.backend = j.value("backend", c.backend);
  c.template_path = j.value("template", "");
  c.replay_path = j.value("replay_file", "");
  if (j.contains("strategy")) c.strategy = strategy_from_string(j["strategy"].get<std::string>());
  if (j.contains("identical_policy")) {
    c.identical_policy = identical_policy_from_string(j["identical_policy"].get<std::string>());
  }
  c.seed = j.value("seed", c.seed);
  c.concurrency = j.value("concurrency", c.concurrency);
  c.beta = j.value("beta", c.beta);
  c.max_unchanged = j.value("max_unchanged", c.max_unchanged);
  if (j.contains("fallback")) c.fallback = fallback_from_string(j["fallback"].get<std::string>());
  if (j.contains("train")) {
    const auto& t = j["train"];
    c.train.lr0 = t.value("lr0", c.train.lr0);
    c.train.rho = t.value("rho", c.train.rho);
    c.train.tau = t.value("tau", c.train.tau);
    c.train.capacity = t.value("capacity", c.train.capacity);
    c.train.max_passes = t.value("max_passes", c.train.max_passes);
    c.train.epsilon = t.value("epsilon", c.train.epsilon);
  }
  return c;
}

std::string run_config_to_json(const RunConfig& c) {
  nlohmann::json j{{"corpus", c.corpus_path},
                   {"gold_dev", c.gold_dev_path},
                   {"gold_test", c.gold_test_path},
                   {"cache", c.cache_path},
                   {"out", c.out_dir},
                   {"backend", c.backend},
                   {"template", c.template_path},
                   {"replay_file", c.replay_path},
                   {"strategy", to_string(c.strategy)},
                   {"identical_policy", to_string(c.identical_policy)},
                   {"seed", c.seed},
                   {"concurrency", c.concurrency},
                   {"beta", c.beta},
                   {"max_unchanged", c.max_unchanged},
                   {"fallback", to_string(c.fallback)},
                   {"train",
                    {{"lr0", c.train.lr0},
                     {"rho", c.train.rho},
                     {"tau", c.train.tau},
                     {"capacity", c.train.capacity},
                     {"max_passes", c.train.max_passes},
                     {"epsilon", c.train.epsilon}}}};
  return j.dump(2) + "\n";
}

namespace {

void require_file(const std::string& path, const std::string& what) {
  if (path.empty()) throw ConfigError("run config: missing " + what);
  if (!fs::exists(path)) throw ConfigError("run config: " + what + " not found: " + path);
}

void validate_config(const RunConfig& c) {
  require_file(c.corpus_path, "corpus");
  require_file(c.gold_dev_path, "gold_dev");
  require_file(c.gold_test_path, "gold_test");
  if (!c.template_path.empty()) require_file(c.template_path, "template");
  if (c.backend == "replay") require_file(c.replay_path, "replay_file");
  if (c.backend != "oracle" && c.backend != "replay" && c.backend != "remote") {
    throw ConfigError("run config: unknown backend '" + c.backend + "'");
  }
  if (c.concurrency < 1) throw ConfigError("run config: concurrency must be >= 1");
  if (c.beta <= 0) throw ConfigError("run config: beta must be positive");
}

}  // namespace

RunConfig load_run_config(const std::string& path) {
  RunConfig config = run_config_from_json(read_file(path));
  validate_config(config);
  return config;
}

namespace {

std::string timestamp_run_id() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "run-%Y%m%d-%H%M%S", &tm);
  return buf;
}

fs::path fresh_run_dir(const RunConfig& config) {
  fs::create_directories(config.out_dir);
  std::string base = config.run_id.empty() ? timestamp_run_id() : config.run_id;
  fs::path dir = fs::path(config.out_dir) / base;
  for (int suffix = 1; fs::exists(dir); ++suffix) {
    dir = fs::path(config.out_dir) / (base + "-" + std::to_string(suffix));
  }
  fs::create_directories(dir);
  return dir;
}

std::unique_ptr<ScoringBackend> make_backend(const RunConfig& config) {
  if (config.backend == "oracle") return std::make_unique<OracleBackend>();
  if (config.backend == "replay") {
    return std::make_unique<ReplayBackend>(ReplayBackend::from_file(config.replay_path));
  }
  auto options = RemoteLlmBackend::options_from_env();
  return std::make_unique<RemoteLlmBackend>(std::move(options));
}

template <typename Fn>
auto step(const char* name, Fn&& fn) {
  try {
    return fn();
  } catch (const std::exception& e) {
    throw Error("pipeline step '" + std::string(name) + "' failed: " + e.what());
  }
}

struct EvalSet {
  std::vector<Tokens> sources;
  AnnotatedCorpus gold;
};

EvalSet load_eval_set(const std::string& path) {
  EvalSet set;
  set.gold = parse_m2(read_file(path));
  for (const AnnotatedSentence& s : set.gold.sentences) set.sources.push_back(s.source);
  return set;
}

std::vector<Tokens> correct_all(const StudentModel& model, const std::vector<Tokens>& sources) {
  std::vector<Tokens> hyps;
  hyps.reserve(sources.size());
  for (const Tokens& s : sources) hyps.push_back(correct(model, s).first);
  return hyps;
}

}  // namespace

RunArtifacts run_pipeline(const RunConfig& config) {
  validate_config(config);

  const fs::path run_dir = fresh_run_dir(config);
  const std::string corpus_text = read_file(config.corpus_path);
  const std::string gold_dev_text = read_file(config.gold_dev_path);
  const std::string gold_test_text = read_file(config.gold_test_path);
  const std::string template_text = config.template_path.empty()
                                        ? std::string(kDefaultPromptTemplate)
                                        : read_file(config.template_path);

  // Snapshot first: the directory must be able to explain itself even when a
  // later step fails.
  {
    nlohmann::json snapshot = nlohmann::json::parse(run_config_to_json(config));
    snapshot["template_text"] = template_text;
    write_file((run_dir / "config.json").string(), snapshot.dump(2) + "\n");
    nlohmann::json meta{{"corpus_fnv", to_hex(fnv1a64(corpus_text))},
                        {"gold_dev_fnv", to_hex(fnv1a64(gold_dev_text))},
                        {"gold_test_fnv", to_hex(fnv1a64(gold_test_text))}};
    write_file((run_dir / "meta.json").string(), meta.dump(2) + "\n");
  }

  // parse -> dedup -> partition
  const auto parsed = step("parse", [&] { return parse_parallel(corpus_text); });
  const auto deduped = step("dedup", [&] { return deduplicate(parsed); });
  const auto [changed, identical] = step("partition", [&] { return partition_identical(deduped); });
  {
    nlohmann::json stats{{"parsed", parsed.size()},
                         {"after_dedup", deduped.size()},
                         {"changed", changed.size()},
                         {"identical", identical.size()}};
    write_file((run_dir / "corpus_stats.json").string(), stats.dump(2) + "\n");
  }

  // score
  const auto scores = step("score", [&] {
    auto backend = make_backend(config);
    ScoreBatchOptions options;
    options.concurrency = config.concurrency;
    options.fallback = config.fallback;
    options.template_text = template_text;
    if (!config.cache_path.empty()) {
      ScoreCache cache = ScoreCache::open(config.cache_path);
      return score_batch(*backend, changed, &cache, options);
    }
    return score_batch(*backend, changed, nullptr, options);
  });
  {
    std::string jsonl;
    for (const DifficultyScore& s : scores) {
      nlohmann::json j{{"example_id", s.example_id},
                       {"score", s.score},
                       {"backend", s.backend},
                       {"fallback", s.fallback},
                       {"raw_response", s.raw_response}};
      jsonl += j.dump() + "\n";
    }
    write_file((run_dir / "scores.jsonl").string(), jsonl);
  }

  // bucket
  TieredCorpus tiers = step("bucket", [&] {
    TieredCorpus t;
    t.identical = identical;
    std::map<int, const ParallelExample*> by_id;
    for (const ParallelExample& ex : changed) by_id[ex.id] = &ex;
    for (const DifficultyScore& s : scores) {
      const ParallelExample& ex = *by_id.at(s.example_id);
      switch (bucket(s.score)) {
        case Tier::Easy: t.easy.push_back(ex); break;
        case Tier::Medium: t.medium.push_back(ex); break;
        case Tier::Hard: t.hard.push_back(ex); break;
      }
    }
    return t;
  });
  {
    nlohmann::json j{{"easy", tiers.easy.size()},
                     {"medium", tiers.medium.size()},
                     {"hard", tiers.hard.size()},
                     {"identical", tiers.identical.size()}};
    write_file((run_dir / "tiers.json").string(), j.dump(2) + "\n");
  }

  // plan
  const CurriculumPlan curriculum = step("plan", [&] {
    return plan(config.strategy, tiers, config.identical_policy, config.seed);
  });
  write_file((run_dir / "plan.json").string(), plan_to_json(curriculum));

  // train
  const EvalSet dev = step("load_dev", [&] { return load_eval_set(config.gold_dev_path); });
  const EvalSet test = step("load_test", [&] { return load_eval_set(config.gold_test_path); });

  std::vector<StudentModel> checkpoints;
  step("train", [&] {
    fs::create_directories(run_dir / "checkpoints");
    StudentModel model;
    nlohmann::json metrics = nlohmann::json::array();
    for (std::size_t k = 0; k < curriculum.stages.size(); ++k) {
      const auto dataset = stage_dataset(curriculum, k, deduped);
      const ValidationFn validate = [&](const StudentModel& m) {
        return m2_score(dev.sources, correct_all(m, dev.sources), dev.gold, config.beta).f_half;
      };
      auto [next, stage_metrics] = train_stage(std::move(model), dataset, config.train, validate);
      model = std::move(next);
      save_checkpoint(model, (run_dir / "checkpoints" /
                              ("stage_" + std::to_string(k) + "_" + curriculum.stages[k].name +
                               ".json")).string());
      metrics.push_back({{"stage", curriculum.stages[k].name},
                         {"examples", dataset.size()},
                         {"passes", stage_metrics.passes},
                         {"dev_f_half", stage_metrics.dev_f_half},
                         {"rules", stage_metrics.rule_count},
                         {"evictions", stage_metrics.evictions}});
      checkpoints.push_back(model);
    }
    write_file((run_dir / "train_metrics.json").string(), metrics.dump(2) + "\n");
    return 0;
  });

  // eval per stage
  std::vector<StageEntry> entries;
  std::vector<double> final_sentence_f;
  step("eval", [&] {
    fs::create_directories(run_dir / "eval");
    for (std::size_t k = 0; k < checkpoints.size(); ++k) {
      const auto hyps = correct_all(checkpoints[k], test.sources);
      const M2Detail detail =
          m2_score_detailed(test.sources, hyps, test.gold, config.beta, config.max_unchanged);
      const auto by_type = breakdown(test.sources, hyps, test.gold, config.beta);

      StageEntry entry{curriculum.stages[k].name, detail.overall, by_type};
      entries.push_back(entry);

      nlohmann::json j = nlohmann::json::parse(report_to_json(StageReport{{entry}, std::nullopt}));
      nlohmann::json stage_json = j["stages"][0];
      stage_json["sentence_f"] = detail.sentence_f;
      write_file((run_dir / "eval" / ("stage_" + std::to_string(k) + ".json")).string(),
                 stage_json.dump(2) + "\n");
      if (k + 1 == checkpoints.size()) final_sentence_f = detail.sentence_f;
    }
    return 0;
  });

  // report
  const StageReport report = step("report", [&] { return make_stage_report(entries); });
  write_file((run_dir / "report.json").string(), report_to_json(report));
  write_file((run_dir / "report.txt").string(), render_report_table(report));

  return RunArtifacts{run_dir.string(), report, std::move(final_sentence_f)};
}

RunComparison compare_runs(const std::string& run_dir_a, const std::string& run_dir_b) {
  auto load_meta = [](const std::string& dir) {
    return nlohmann::json::parse(read_file((fs::path(dir) / "meta.json").string()));
  };
  const nlohmann::json meta_a = load_meta(run_dir_a);
  const nlohmann::json meta_b = load_meta(run_dir_b);
  if (meta_a.at("gold_test_fnv") != meta_b.at("gold_test_fnv")) {
    throw ValidationError("compare_runs: the two runs were evaluated on different gold sets");
  }

  auto load_report = [](const std::string& dir) {
    return report_from_json(read_file((fs::path(dir) / "report.json").string()));
  };
  const StageReport report_a = load_report(run_dir_a);
  const StageReport report_b = load_report(run_dir_b);

  auto load_sentence_f = [](const std::string& dir, std::size_t stage_count) {
    const fs::path path =
        fs::path(dir) / "eval" / ("stage_" + std::to_string(stage_count - 1) + ".json");
    nlohmann::json j = nlohmann::json::parse(read_file(path.string()));
    return j.at("sentence_f").get<std::vector<double>>();
  };
  const auto f_a = load_sentence_f(run_dir_a, report_a.stages.size());
  const auto f_b = load_sentence_f(run_dir_b, report_b.stages.size());

  RunComparison cmp;
  cmp.run_a = run_dir_a;
  cmp.run_b = run_dir_b;
  cmp.final_a = report_a.stages.back();
  cmp.final_b = report_b.stages.back();
  cmp.p_value = paired_t_test(f_a, f_b);

  char line[256];
  std::string table;
  std::snprintf(line, sizeof(line), "%-28s %-8s %8s %8s %8s\n", "run", "stage", "prec", "rec",
                "f0.5");
  table += line;
  auto row = [&](const std::string& dir, const StageEntry& e) {
    std::snprintf(line, sizeof(line), "%-28s %-8s %8.4f %8.4f %8.4f\n",
                  fs::path(dir).filename().string().c_str(), e.name.c_str(), e.overall.precision,
                  e.overall.recall, e.overall.f_half);
    table += line;
  };
  row(run_dir_a, cmp.final_a);
  row(run_dir_b, cmp.final_b);
  std::snprintf(line, sizeof(line), "paired t-test on sentence F: p = %.6f\n", cmp.p_value);
  table += line;
  cmp.table = table;
  return cmp;
}

}  // namespace geccl
