#include "geccl/curriculum.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>

#include "geccl/errors.hpp"
#include "geccl/rng.hpp"
#include "json.hpp"

namespace geccl {

const char* to_string(Strategy s) {
  switch (s) {
    case Strategy::EasyCumulative: return "easy";
    case Strategy::HardCumulative: return "hard";
    case Strategy::MixedReplay: return "mixed";
    case Strategy::Plain: return "plain";
  }
  return "?";
}

const char* to_string(IdenticalPolicy p) {
  return p == IdenticalPolicy::Exclude ? "exclude" : "all_stages";
}

Strategy strategy_from_string(const std::string& s) {
  if (s == "easy") return Strategy::EasyCumulative;
  if (s == "hard") return Strategy::HardCumulative;
  if (s == "mixed") return Strategy::MixedReplay;
  if (s == "plain") return Strategy::Plain;
  throw ConfigError("unknown strategy '" + s + "' (expected easy|hard|mixed|plain)");
}

IdenticalPolicy identical_policy_from_string(const std::string& s) {
  if (s == "exclude") return IdenticalPolicy::Exclude;
  if (s == "all_stages") return IdenticalPolicy::AllStages;
  throw ConfigError("unknown identical policy '" + s + "' (expected exclude|all_stages)");
}

namespace {

std::vector<int> ids_of(const std::vector<ParallelExample>& examples) {
  std::vector<int> ids;
  ids.reserve(examples.size());
  for (const ParallelExample& ex : examples) ids.push_back(ex.id);
  return ids;
}

void append(std::vector<int>& out, const std::vector<int>& ids, int times = 1) {
  for (int t = 0; t < times; ++t) out.insert(out.end(), ids.begin(), ids.end());
}

StageSpec make_stage(std::string name, std::vector<int> members, std::uint64_t seed,
                     std::size_t stage_index) {
  StageSpec stage;
  stage.name = std::move(name);
  stage.shuffle_seed = mix64(seed, stage_index);
  stage.members = std::move(members);
  Rng rng(stage.shuffle_seed);
  rng.shuffle(stage.members);
  return stage;
}

}  // namespace

StageSpec mixed_replay(const TieredCorpus& tiers, std::array<int, 3> multipliers,
                       std::uint64_t seed) {
  for (int m : multipliers) {
    if (m < 1) throw ConfigError("mixed_replay: multipliers must be positive");
  }
  std::vector<int> members;
  append(members, ids_of(tiers.easy), multipliers[0]);
  append(members, ids_of(tiers.medium), multipliers[1]);
  append(members, ids_of(tiers.hard), multipliers[2]);
  return make_stage("3E+2M+1H", std::move(members), seed, 0);
}

CurriculumPlan plan(Strategy strategy, const TieredCorpus& tiers,
                    IdenticalPolicy identical_policy, std::uint64_t seed) {
  CurriculumPlan result;
  result.strategy = strategy;
  result.identical_policy = identical_policy;
  result.seed = seed;

  const std::vector<int> easy = ids_of(tiers.easy);
  const std::vector<int> medium = ids_of(tiers.medium);
  const std::vector<int> hard = ids_of(tiers.hard);
  const std::vector<int> identical =
      identical_policy == IdenticalPolicy::AllStages ? ids_of(tiers.identical) : std::vector<int>{};

  auto cumulative = [&](const std::vector<std::pair<std::string, const std::vector<int>*>>& order) {
    std::vector<int> members;
    append(members, identical);
    std::string name;
    for (std::size_t k = 0; k < order.size(); ++k) {
      append(members, *order[k].second);
      name += order[k].first;
      result.stages.push_back(make_stage(name, members, seed, k));
    }
  };

  switch (strategy) {
    case Strategy::EasyCumulative:
      cumulative({{"E", &easy}, {"M", &medium}, {"H", &hard}});
      break;
    case Strategy::HardCumulative:
      cumulative({{"H", &hard}, {"M", &medium}, {"E", &easy}});
      break;
    case Strategy::Plain: {
      std::vector<int> members;
      append(members, identical);
      append(members, easy);
      append(members, medium);
      append(members, hard);
      result.stages.push_back(make_stage("ALL", std::move(members), seed, 0));
      break;
    }
    case Strategy::MixedReplay: {
      StageSpec stage = mixed_replay(tiers, {3, 2, 1}, seed);
      if (!identical.empty()) {
        append(stage.members, identical);
        Rng rng(stage.shuffle_seed);
        rng.shuffle(stage.members);
      }
      result.stages.push_back(std::move(stage));
      break;
    }
  }

  for (const StageSpec& stage : result.stages) {
    if (stage.members.empty()) {
      throw ValidationError("plan: stage '" + stage.name + "' would be empty under strategy " +
                            to_string(strategy));
    }
  }
  return result;
}

std::vector<ParallelExample> stage_dataset(const CurriculumPlan& plan, std::size_t k,
                                           const std::vector<ParallelExample>& corpus) {
  if (k >= plan.stages.size()) {
    throw ValidationError("stage_dataset: stage index " + std::to_string(k) + " out of range");
  }
  std::unordered_map<int, const ParallelExample*> by_id;
  by_id.reserve(corpus.size());
  for (const ParallelExample& ex : corpus) by_id[ex.id] = &ex;

  std::vector<ParallelExample> dataset;
  dataset.reserve(plan.stages[k].members.size());
  for (int id : plan.stages[k].members) {
    auto it = by_id.find(id);
    if (it == by_id.end()) {
      throw ValidationError("stage_dataset: id " + std::to_string(id) +
                            " not present in the corpus");
    }
    dataset.push_back(*it->second);
  }
  return dataset;
}

std::vector<std::string> validate_plan(const CurriculumPlan& plan) {
  std::vector<std::string> violations;
  const bool cumulative =
      plan.strategy == Strategy::EasyCumulative || plan.strategy == Strategy::HardCumulative;

  const std::size_t expected_stages = cumulative ? 3 : 1;
  if (plan.stages.size() != expected_stages) {
    violations.push_back("strategy " + std::string(to_string(plan.strategy)) + " expects " +
                         std::to_string(expected_stages) + " stages, found " +
                         std::to_string(plan.stages.size()));
  }

  if (cumulative) {
    // Stage numbers in messages are 1-based.
    std::set<int> previous;
    for (std::size_t k = 0; k < plan.stages.size(); ++k) {
      std::set<int> current;
      for (int id : plan.stages[k].members) {
        if (!current.insert(id).second) {
          violations.push_back("tier overlap: id " + std::to_string(id) +
                               " appears twice in stage " + std::to_string(k + 1));
        }
      }
      if (k > 0 && !std::includes(current.begin(), current.end(), previous.begin(),
                                  previous.end())) {
        violations.push_back("superset chain broken at stage " + std::to_string(k + 1));
      }
      previous = std::move(current);
    }
  }
  return violations;
}

std::string plan_to_json(const CurriculumPlan& plan) {
  nlohmann::json stages = nlohmann::json::array();
  for (const StageSpec& stage : plan.stages) {
    stages.push_back({{"name", stage.name}, {"ids", stage.members}});
  }
  nlohmann::json j{{"strategy", to_string(plan.strategy)},
                   {"identical_policy", to_string(plan.identical_policy)},
                   {"seed", plan.seed},
                   {"stages", std::move(stages)}};
  return j.dump(2) + "\n";
}

CurriculumPlan plan_from_json(const std::string& json_text) {
  nlohmann::json j = nlohmann::json::parse(json_text);
  CurriculumPlan plan;
  plan.strategy = strategy_from_string(j.at("strategy").get<std::string>());
  plan.identical_policy = identical_policy_from_string(j.at("identical_policy").get<std::string>());
  plan.seed = j.at("seed").get<std::uint64_t>();
  std::size_t k = 0;
  for (const auto& s : j.at("stages")) {
    StageSpec stage;
    stage.name = s.at("name").get<std::string>();
    stage.members = s.at("ids").get<std::vector<int>>();
    stage.shuffle_seed = mix64(plan.seed, k++);
    plan.stages.push_back(std::move(stage));
  }
  return plan;
}

}  // namespace geccl
