#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "geccl/corpus.hpp"

namespace geccl {

// Difficulty-partitioned corpus; the four lists are pairwise disjoint by id.
struct TieredCorpus {
  std::vector<ParallelExample> easy;
  std::vector<ParallelExample> medium;
  std::vector<ParallelExample> hard;
  std::vector<ParallelExample> identical;
};

enum class Strategy { EasyCumulative, HardCumulative, MixedReplay, Plain };
enum class IdenticalPolicy { Exclude, AllStages };

const char* to_string(Strategy s);
const char* to_string(IdenticalPolicy p);
Strategy strategy_from_string(const std::string& s);
IdenticalPolicy identical_policy_from_string(const std::string& s);

struct StageSpec {
  std::string name;
  std::vector<int> members;  // example ids in trained order; MixedReplay repeats ids
  std::uint64_t shuffle_seed = 0;
};

struct CurriculumPlan {
  Strategy strategy = Strategy::EasyCumulative;
  IdenticalPolicy identical_policy = IdenticalPolicy::AllStages;
  std::uint64_t seed = 0;
  std::vector<StageSpec> stages;
};

// Builds the stage list for a strategy:
//   EasyCumulative  E -> EM -> EMH
//   HardCumulative  H -> HM -> HME
//   Plain           one stage with everything
//   MixedReplay     one stage with easy x3, medium x2, hard x1
// Identical pairs join every stage under AllStages. Each stage is shuffled
// deterministically from (seed, stage index). Throws when a stage would be
// empty.
CurriculumPlan plan(Strategy strategy, const TieredCorpus& tiers, IdenticalPolicy identical_policy,
                    std::uint64_t seed);

// The 3E+2M+1H multiset (identical pairs excluded), shuffled by seed.
StageSpec mixed_replay(const TieredCorpus& tiers, std::array<int, 3> multipliers,
                       std::uint64_t seed);

// Resolves stage k's ids against the corpus, preserving order and repetition.
std::vector<ParallelExample> stage_dataset(const CurriculumPlan& plan, std::size_t k,
                                           const std::vector<ParallelExample>& corpus);

// Structural checks; violations come back as messages, an empty list is ok.
std::vector<std::string> validate_plan(const CurriculumPlan& plan);

// JSON round-trip: {strategy, identical_policy, seed, stages: [{name, ids}]}.
std::string plan_to_json(const CurriculumPlan& plan);
CurriculumPlan plan_from_json(const std::string& json_text);

}  // namespace geccl
