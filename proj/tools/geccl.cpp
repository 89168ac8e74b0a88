// geccl: curriculum construction and evaluation toolkit for parallel GEC data.
//
// Subcommands mirror the pipeline arrows so every step is independently
// invokable: parse, score, bucket, plan, train, eval, report, gen, pipeline,
// compare.

#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "geccl/corpus.hpp"
#include "geccl/curriculum.hpp"
#include "geccl/difficulty.hpp"
#include "geccl/errors.hpp"
#include "geccl/eval.hpp"
#include "geccl/pipeline.hpp"
#include "geccl/student.hpp"
#include "geccl/synthetic.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace geccl;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

struct CommonFlags {
  std::string config_path;
  std::string backend;
  std::string strategy;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<int> concurrency;
};

// Config file first, command-line flags win.
RunConfig resolve_config(const CommonFlags& flags) {
  RunConfig config;
  if (!flags.config_path.empty()) {
    config = run_config_from_json(read_file(flags.config_path));
  }
  if (!flags.backend.empty()) config.backend = flags.backend;
  if (!flags.strategy.empty()) config.strategy = strategy_from_string(flags.strategy);
  if (!flags.out.empty()) config.out_dir = flags.out;
  if (flags.seed) config.seed = *flags.seed;
  if (flags.concurrency) config.concurrency = *flags.concurrency;
  return config;
}

std::unique_ptr<ScoringBackend> backend_for(const RunConfig& config) {
  if (config.backend == "oracle") return std::make_unique<OracleBackend>();
  if (config.backend == "replay") {
    if (config.replay_path.empty()) throw ConfigError("replay backend needs replay_file");
    return std::make_unique<ReplayBackend>(ReplayBackend::from_file(config.replay_path));
  }
  if (config.backend == "remote") {
    return std::make_unique<RemoteLlmBackend>(RemoteLlmBackend::options_from_env());
  }
  throw ConfigError("unknown backend '" + config.backend + "'");
}

std::vector<DifficultyScore> scores_from_jsonl(const std::string& path) {
  std::vector<DifficultyScore> scores;
  std::istringstream in(read_file(path));
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line);
    DifficultyScore s;
    s.example_id = j.at("example_id").get<int>();
    s.score = j.at("score").get<int>();
    s.backend = j.value("backend", "");
    s.fallback = j.value("fallback", false);
    s.raw_response = j.value("raw_response", "");
    scores.push_back(std::move(s));
  }
  return scores;
}

int cmd_parse(const std::string& corpus_path, const std::string& m2_path) {
  if (!corpus_path.empty()) {
    const auto parsed = parse_parallel(read_file(corpus_path));
    const auto deduped = deduplicate(parsed);
    const auto [changed, identical] = partition_identical(deduped);
    std::cout << "pairs:      " << parsed.size() << "\n"
              << "deduped:    " << deduped.size() << "\n"
              << "changed:    " << changed.size() << "\n"
              << "identical:  " << identical.size() << "\n";
  }
  if (!m2_path.empty()) {
    const AnnotatedCorpus gold = parse_m2(read_file(m2_path));
    std::size_t edits = 0;
    for (const auto& s : gold.sentences) edits += s.edits.size();
    std::cout << "m2 blocks:  " << gold.sentences.size() << "\n"
              << "m2 edits:   " << edits << "\n";
  }
  return kExitOk;
}

int cmd_score(const CommonFlags& flags, const std::string& corpus_path,
              const std::string& out_path) {
  RunConfig config = resolve_config(flags);
  if (!corpus_path.empty()) config.corpus_path = corpus_path;
  if (config.corpus_path.empty()) throw ConfigError("score: --corpus required");

  const auto parsed = parse_parallel(read_file(config.corpus_path));
  const auto deduped = deduplicate(parsed);
  const auto [changed, identical] = partition_identical(deduped);

  auto backend = backend_for(config);
  ScoreBatchOptions options;
  options.concurrency = config.concurrency;
  options.fallback = config.fallback;
  if (!config.template_path.empty()) options.template_text = read_file(config.template_path);

  std::vector<DifficultyScore> scores;
  if (!config.cache_path.empty()) {
    ScoreCache cache = ScoreCache::open(config.cache_path);
    scores = score_batch(*backend, changed, &cache, options);
  } else {
    scores = score_batch(*backend, changed, nullptr, options);
  }

  std::string jsonl;
  for (const DifficultyScore& s : scores) {
    nlohmann::json j{{"example_id", s.example_id},
                     {"score", s.score},
                     {"backend", s.backend},
                     {"fallback", s.fallback},
                     {"raw_response", s.raw_response}};
    jsonl += j.dump() + "\n";
  }
  if (out_path.empty()) {
    std::cout << jsonl;
  } else {
    write_file(out_path, jsonl);
    std::cout << "scored " << scores.size() << " examples -> " << out_path << "\n";
  }
  return kExitOk;
}

int cmd_bucket(const std::string& scores_path, const std::string& out_path) {
  const auto scores = scores_from_jsonl(scores_path);
  std::map<std::string, std::vector<int>> tiers{{"easy", {}}, {"medium", {}}, {"hard", {}}};
  for (const DifficultyScore& s : scores) {
    tiers[to_string(bucket(s.score))].push_back(s.example_id);
  }
  nlohmann::json j{{"easy", tiers["easy"]}, {"medium", tiers["medium"]}, {"hard", tiers["hard"]}};
  const std::string text = j.dump(2) + "\n";
  if (out_path.empty()) {
    std::cout << text;
  } else {
    write_file(out_path, text);
    std::cout << "easy " << tiers["easy"].size() << ", medium " << tiers["medium"].size()
              << ", hard " << tiers["hard"].size() << " -> " << out_path << "\n";
  }
  return kExitOk;
}

TieredCorpus tiers_from_files(const std::string& corpus_path, const std::string& tiers_path) {
  const auto deduped = deduplicate(parse_parallel(read_file(corpus_path)));
  std::map<int, const ParallelExample*> by_id;
  for (const auto& ex : deduped) by_id[ex.id] = &ex;
  nlohmann::json j = nlohmann::json::parse(read_file(tiers_path));
  TieredCorpus tiers;
  auto fill = [&](const char* key, std::vector<ParallelExample>& into) {
    for (int id : j.at(key).get<std::vector<int>>()) into.push_back(*by_id.at(id));
  };
  fill("easy", tiers.easy);
  fill("medium", tiers.medium);
  fill("hard", tiers.hard);
  for (const auto& ex : deduped) {
    if (ex.identical) tiers.identical.push_back(ex);
  }
  return tiers;
}

int cmd_plan(const CommonFlags& flags, const std::string& corpus_path,
             const std::string& tiers_path, const std::string& out_path) {
  RunConfig config = resolve_config(flags);
  const TieredCorpus tiers = tiers_from_files(corpus_path, tiers_path);
  const CurriculumPlan p = plan(config.strategy, tiers, config.identical_policy, config.seed);
  const auto violations = validate_plan(p);
  for (const auto& v : violations) std::cerr << "violation: " << v << "\n";
  if (out_path.empty()) {
    std::cout << plan_to_json(p);
  } else {
    write_file(out_path, plan_to_json(p));
    std::cout << p.stages.size() << " stages -> " << out_path << "\n";
  }
  return violations.empty() ? kExitOk : kExitRuntime;
}

int cmd_train(const CommonFlags& flags, const std::string& corpus_path,
              const std::string& plan_path, const std::string& gold_dev,
              const std::string& out_dir) {
  RunConfig config = resolve_config(flags);
  const auto deduped = deduplicate(parse_parallel(read_file(corpus_path)));
  const CurriculumPlan p = plan_from_json(read_file(plan_path));
  const AnnotatedCorpus dev = parse_m2(read_file(gold_dev));
  std::vector<Tokens> dev_sources;
  for (const auto& s : dev.sentences) dev_sources.push_back(s.source);

  fs::create_directories(out_dir);
  StudentModel model;
  for (std::size_t k = 0; k < p.stages.size(); ++k) {
    const auto dataset = stage_dataset(p, k, deduped);
    const ValidationFn validate = [&](const StudentModel& m) {
      std::vector<Tokens> hyps;
      for (const auto& s : dev_sources) hyps.push_back(correct(m, s).first);
      return m2_score(dev_sources, hyps, dev, config.beta).f_half;
    };
    auto [next, metrics] = train_stage(std::move(model), dataset, config.train, validate);
    model = std::move(next);
    const std::string path =
        (fs::path(out_dir) / ("stage_" + std::to_string(k) + "_" + p.stages[k].name + ".json"))
            .string();
    save_checkpoint(model, path);
    std::cout << "stage " << p.stages[k].name << ": passes=" << metrics.passes
              << " dev_f0.5=" << metrics.dev_f_half << " rules=" << metrics.rule_count << " -> "
              << path << "\n";
  }
  return kExitOk;
}

int cmd_eval(const std::string& gold_path, const std::string& hyp_path,
             const std::string& model_path, double beta, const std::string& out_path) {
  const AnnotatedCorpus gold = parse_m2(read_file(gold_path));
  std::vector<Tokens> sources;
  for (const auto& s : gold.sentences) sources.push_back(s.source);

  std::vector<Tokens> hyps;
  if (!hyp_path.empty()) {
    std::istringstream in(read_file(hyp_path));
    std::string line;
    while (std::getline(in, line)) hyps.push_back(split_tokens(line));
    if (hyps.size() != sources.size()) {
      throw ValidationError("eval: hypothesis file has " + std::to_string(hyps.size()) +
                            " lines, gold has " + std::to_string(sources.size()) + " blocks");
    }
  } else if (!model_path.empty()) {
    const StudentModel model = load_checkpoint(model_path);
    for (const auto& s : sources) hyps.push_back(correct(model, s).first);
  } else {
    throw ConfigError("eval: need --hyp or --model");
  }

  const EvalResult overall = m2_score(sources, hyps, gold, beta);
  const auto by_type = breakdown(sources, hyps, gold, beta);
  StageReport report{{StageEntry{"eval", overall, by_type}}, std::nullopt};
  std::cout << render_report_table(report);
  if (!out_path.empty()) write_file(out_path, report_to_json(report));
  return kExitOk;
}

int cmd_report(const std::string& run_dir) {
  const StageReport report =
      report_from_json(read_file((fs::path(run_dir) / "report.json").string()));
  std::cout << render_report_table(report);
  return kExitOk;
}

int cmd_gen(const std::string& spec_path, const std::string& out_dir, std::uint64_t seed,
            int n_pairs) {
  SyntheticSpec spec = SyntheticSpec::with_defaults();
  if (!spec_path.empty()) spec = synthetic_spec_from_json(read_file(spec_path));
  if (seed != 0) spec.seed = seed;
  if (n_pairs != 0) spec.n_pairs = n_pairs;

  const SyntheticCorpus corpus = gen_synthetic(spec);
  fs::create_directories(out_dir);
  const fs::path dir(out_dir);
  write_file((dir / "corpus.tsv").string(), corpus.parallel_tsv);
  write_file((dir / "dev.m2").string(), corpus.gold_dev_m2);
  write_file((dir / "test.m2").string(), corpus.gold_test_m2);
  write_file((dir / "sidecar.json").string(), corpus.sidecar_json);
  write_file((dir / "spec.json").string(), synthetic_spec_to_json(spec));
  std::cout << "wrote " << spec.n_pairs << " pairs";
  for (const auto& [label, count] : corpus.class_counts) std::cout << ", " << label << "=" << count;
  std::cout << " -> " << out_dir << "\n";
  return kExitOk;
}

int cmd_pipeline(const CommonFlags& flags) {
  if (flags.config_path.empty()) throw ConfigError("pipeline: --config required");
  RunConfig config = run_config_from_json(read_file(flags.config_path));
  if (!flags.backend.empty()) config.backend = flags.backend;
  if (!flags.strategy.empty()) config.strategy = strategy_from_string(flags.strategy);
  if (!flags.out.empty()) config.out_dir = flags.out;
  if (flags.seed) config.seed = *flags.seed;
  if (flags.concurrency) config.concurrency = *flags.concurrency;

  const RunArtifacts artifacts = run_pipeline(config);
  std::cout << "run dir: " << artifacts.run_dir << "\n"
            << render_report_table(artifacts.report);
  return kExitOk;
}

int cmd_compare(const std::string& run_a, const std::string& run_b) {
  const RunComparison cmp = compare_runs(run_a, run_b);
  std::cout << cmp.table;
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GEC curriculum-learning toolkit"};
  app.require_subcommand(1);

  CommonFlags flags;
  app.add_option("--config", flags.config_path, "Run config JSON")->envname("GECCL_CONFIG");
  app.add_option("--backend", flags.backend, "Scoring backend: remote|replay|oracle");
  app.add_option("--strategy", flags.strategy, "Curriculum strategy: easy|hard|mixed|plain");
  app.add_option("--out", flags.out, "Output directory");
  std::uint64_t seed_value = 0;
  auto* seed_opt = app.add_option("--seed", seed_value, "Run seed");
  int concurrency_value = 0;
  auto* conc_opt = app.add_option("--concurrency", concurrency_value, "Scoring concurrency");

  std::string corpus_path, m2_path, scores_path, tiers_path, plan_path, gold_dev, gold_test;
  std::string hyp_path, model_path, out_path, run_a, run_b, spec_path;
  double beta = 0.5;
  std::uint64_t gen_seed = 0;
  int gen_pairs = 0;

  auto* parse_cmd = app.add_subcommand("parse", "Parse and summarize corpus files");
  parse_cmd->add_option("--corpus", corpus_path, "Parallel TSV");
  parse_cmd->add_option("--m2", m2_path, "M2 gold file");

  auto* score_cmd = app.add_subcommand("score", "Score difficulty of changed pairs");
  score_cmd->add_option("--corpus", corpus_path, "Parallel TSV");
  score_cmd->add_option("--scores-out", out_path, "Output scores JSONL");

  auto* bucket_cmd = app.add_subcommand("bucket", "Bucket scores into tiers");
  bucket_cmd->add_option("--scores", scores_path, "Scores JSONL")->required();
  bucket_cmd->add_option("--tiers-out", out_path, "Output tiers JSON");

  auto* plan_cmd = app.add_subcommand("plan", "Build a curriculum plan");
  plan_cmd->add_option("--corpus", corpus_path, "Parallel TSV")->required();
  plan_cmd->add_option("--tiers", tiers_path, "Tiers JSON")->required();
  plan_cmd->add_option("--plan-out", out_path, "Output plan JSON");

  auto* train_cmd = app.add_subcommand("train", "Train the student through a plan");
  train_cmd->add_option("--corpus", corpus_path, "Parallel TSV")->required();
  train_cmd->add_option("--plan", plan_path, "Plan JSON")->required();
  train_cmd->add_option("--gold-dev", gold_dev, "Dev gold M2")->required();
  train_cmd->add_option("--checkpoints-out", out_path, "Checkpoint directory")->required();

  auto* eval_cmd = app.add_subcommand("eval", "M2-style evaluation");
  eval_cmd->add_option("--gold", gold_test, "Gold M2 file")->required();
  eval_cmd->add_option("--hyp", hyp_path, "Hypothesis file, one sentence per line");
  eval_cmd->add_option("--model", model_path, "Student checkpoint to run");
  eval_cmd->add_option("--beta", beta, "F-beta weighting")->capture_default_str();
  eval_cmd->add_option("--report-out", out_path, "Write report JSON here");

  auto* report_cmd = app.add_subcommand("report", "Render a run's stage report");
  report_cmd->add_option("run_dir", run_a, "Run directory")->required();

  auto* gen_cmd = app.add_subcommand("gen", "Generate a synthetic corpus");
  gen_cmd->add_option("--spec", spec_path, "Synthetic spec JSON");
  gen_cmd->add_option("--gen-out", out_path, "Output directory")->required();
  gen_cmd->add_option("--gen-seed", gen_seed, "Override spec seed");
  gen_cmd->add_option("--pairs", gen_pairs, "Override n_pairs");

  auto* pipeline_cmd = app.add_subcommand("pipeline", "Run the full pipeline");
  (void)pipeline_cmd;

  auto* compare_cmd = app.add_subcommand("compare", "Compare two finished runs");
  compare_cmd->add_option("run_a", run_a, "First run directory")->required();
  compare_cmd->add_option("run_b", run_b, "Second run directory")->required();

  // Global flags (--config, --backend, ...) may appear after the subcommand.
  for (CLI::App* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }
  if (seed_opt->count()) flags.seed = seed_value;
  if (conc_opt->count()) flags.concurrency = concurrency_value;

  try {
    if (parse_cmd->parsed()) return cmd_parse(corpus_path, m2_path);
    if (score_cmd->parsed()) return cmd_score(flags, corpus_path, out_path);
    if (bucket_cmd->parsed()) return cmd_bucket(scores_path, out_path);
    if (plan_cmd->parsed()) return cmd_plan(flags, corpus_path, tiers_path, out_path);
    if (train_cmd->parsed()) return cmd_train(flags, corpus_path, plan_path, gold_dev, out_path);
    if (eval_cmd->parsed()) return cmd_eval(gold_test, hyp_path, model_path, beta, out_path);
    if (report_cmd->parsed()) return cmd_report(run_a);
    if (gen_cmd->parsed()) return cmd_gen(spec_path, out_path, gen_seed, gen_pairs);
    if (pipeline_cmd->parsed()) return cmd_pipeline(flags);
    if (compare_cmd->parsed()) return cmd_compare(run_a, run_b);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitValidation;
}
