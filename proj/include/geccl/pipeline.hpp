#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "geccl/curriculum.hpp"
#include "geccl/difficulty.hpp"
#include "geccl/eval.hpp"
#include "geccl/student.hpp"

namespace geccl {

// Fully resolved run configuration. Serialized into every run directory so a
// run can be reproduced from its artifacts alone.
struct RunConfig {
  std::string corpus_path;
  std::string gold_dev_path;
  std::string gold_test_path;
  std::string cache_path;   // empty: no persistent score cache
  std::string out_dir = "runs";
  std::string run_id;       // empty: timestamp-derived

  std::string backend = "oracle";  // oracle | replay | remote
  std::string template_path;       // empty: bundled default prompt
  std::string replay_path;         // replay backend responses

  Strategy strategy = Strategy::EasyCumulative;
  IdenticalPolicy identical_policy = IdenticalPolicy::AllStages;
  std::uint64_t seed = 42;
  int concurrency = 1;
  double beta = 0.5;
  int max_unchanged = 2;
  UnscorableFallback fallback = UnscorableFallback::AssignMedium;
  TrainConfig train;
};

RunConfig run_config_from_json(const std::string& json_text);
std::string run_config_to_json(const RunConfig& config);
// Reads the config file and validates that every referenced input exists.
RunConfig load_run_config(const std::string& path);

struct RunArtifacts {
  std::string run_dir;
  StageReport report;
  std::vector<double> final_sentence_f;  // final-stage per-sentence F values
};

// parse -> dedup -> partition -> score -> bucket -> plan -> train (checkpoint
// per stage) -> eval per stage -> report. Artifacts land in a fresh directory
// under out_dir together with the config snapshot; partial artifacts are kept
// when a step fails and the error names the step.
RunArtifacts run_pipeline(const RunConfig& config);

struct RunComparison {
  std::string run_a;
  std::string run_b;
  StageEntry final_a;
  StageEntry final_b;
  double p_value = 1.0;
  std::string table;  // rendered side-by-side summary
};

// Final-stage comparison of two run directories evaluated on the same gold
// test set (verified via the recorded content hash).
RunComparison compare_runs(const std::string& run_dir_a, const std::string& run_dir_b);

}  // namespace geccl
