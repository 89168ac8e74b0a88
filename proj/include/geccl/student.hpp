#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "geccl/corpus.hpp"

namespace geccl {

// Token-level Levenshtein alignment, costs match=0, sub=1, ins=1, del=1.
enum class EditOpType { Match, Substitute, Delete, Insert };

struct EditOp {
  EditOpType type;
  int src_pos;  // source index consumed (for Insert: position the token lands before)
  int tgt_pos;  // target index consumed (for Delete: position in target after the op)

  bool operator==(const EditOp&) const = default;
};

// Minimal-cost edit script. Ties during backtrace prefer
// match > substitution > deletion > insertion.
std::vector<EditOp> align(const Tokens& source, const Tokens& target);

// One phrase-edit observation mined from an aligned pair.
struct Observation {
  Tokens source_phrase;  // 1..3 tokens
  Tokens target_phrase;  // 0..3 tokens

  bool operator==(const Observation&) const = default;
};

// Maximal runs of non-match ops become phrase edits; pure insertions are
// anchored to a neighboring source token; a contextualized variant (one token
// of left/right context) is added when it fits the 3-token cap.
std::vector<Observation> extract_rules(const ParallelExample& example);

struct EditRule {
  Tokens source_phrase;
  Tokens target_phrase;
  double weight = 0.0;    // support minus accumulated penalties; eviction key
  double penalty = 0.0;   // mass from unchanged occurrences of the source phrase
  int first_seen_stage = 0;
  std::uint64_t order = 0;  // insertion sequence number, final tie-breaker

  // Scale-free confidence: weight / (weight + penalty), clamped to [0, 1].
  double normalized() const;
};

struct TrainConfig {
  double lr0 = 1.0;        // stage learning rate is lr0 / (1 + stage_index)
  double rho = 0.5;        // penalty multiplier for unchanged evidence
  double tau = 0.5;        // normalized-weight threshold for applying a rule
  std::size_t capacity = 10000;
  int max_passes = 5;
  double epsilon = 1e-3;   // stop when validation F0.5 improves by less

  bool operator==(const TrainConfig&) const = default;
};

// Weighted phrase-edit rulebook. Deliberately small and order-sensitive:
// per-stage snapshots play the role of the per-stage fine-tuned checkpoints.
struct StudentModel {
  TrainConfig config;
  int stage_index = 0;
  std::map<std::string, EditRule> rules;  // keyed by space-joined source phrase
  std::uint64_t next_order = 0;

  double stage_lr() const { return config.lr0 / (1.0 + stage_index); }
};

struct StageMetrics {
  int passes = 0;
  double dev_f_half = -1.0;  // last validation score, -1 without a validation fn
  std::size_t rule_count = 0;
  std::size_t evictions = 0;
};

// Optional per-pass validation signal (typically dev-set F0.5).
using ValidationFn = std::function<double(const StudentModel&)>;

// One or more in-order passes over the dataset. Each observed rule gains
// stage_lr of weight, each unchanged occurrence of a known source phrase loses
// stage_lr * rho; overflow past capacity evicts the lowest-weight rule.
// Passes repeat until the validation score improves by less than epsilon or
// max_passes is reached; without a validation fn exactly one pass runs.
// The returned model carries stage_index + 1. Throws on an empty dataset.
std::pair<StudentModel, StageMetrics> train_stage(StudentModel model,
                                                  const std::vector<ParallelExample>& dataset,
                                                  const TrainConfig& config,
                                                  const ValidationFn& validate = {});

struct AppliedEdit {
  int start = 0;
  int end = 0;
  Tokens replacement;

  bool operator==(const AppliedEdit&) const = default;
};

// Applies non-overlapping rules whose normalized weight clears tau. Candidate
// priority: higher weight, then longer source phrase, then leftmost position.
std::pair<Tokens, std::vector<AppliedEdit>> correct(const StudentModel& model,
                                                    const Tokens& sentence);

// Checkpoint round-trip ({config, stage_index, rules: [...]}, one file per
// completed stage).
std::string checkpoint_to_json(const StudentModel& model);
StudentModel checkpoint_from_json(const std::string& json_text);
void save_checkpoint(const StudentModel& model, const std::string& path);
StudentModel load_checkpoint(const std::string& path);

}  // namespace geccl
