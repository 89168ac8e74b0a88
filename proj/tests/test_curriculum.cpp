#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <map>
#include <set>

#include "geccl/curriculum.hpp"
#include "geccl/errors.hpp"
#include "geccl/rng.hpp"

using namespace geccl;

namespace {

ParallelExample ex(int id) {
  ParallelExample e;
  e.id = id;
  e.source = {"w" + std::to_string(id)};
  e.target = {"v" + std::to_string(id)};
  return e;
}

TieredCorpus tiny_tiers() {
  TieredCorpus t;
  t.easy = {ex(1), ex(2)};
  t.medium = {ex(3)};
  t.hard = {ex(4)};
  return t;
}

std::multiset<int> members_of(const StageSpec& stage) {
  return {stage.members.begin(), stage.members.end()};
}

}  // namespace

TEST_CASE("easy-cumulative stages are E, EM, EMH") {
  const auto p = plan(Strategy::EasyCumulative, tiny_tiers(), IdenticalPolicy::Exclude, 1);
  REQUIRE(p.stages.size() == 3);
  CHECK(p.stages[0].name == "E");
  CHECK(p.stages[1].name == "EM");
  CHECK(p.stages[2].name == "EMH");
  CHECK(members_of(p.stages[0]) == std::multiset<int>{1, 2});
  CHECK(members_of(p.stages[1]) == std::multiset<int>{1, 2, 3});
  CHECK(members_of(p.stages[2]) == std::multiset<int>{1, 2, 3, 4});
}

TEST_CASE("hard-cumulative starts from the hard tier") {
  const auto p = plan(Strategy::HardCumulative, tiny_tiers(), IdenticalPolicy::Exclude, 1);
  REQUIRE(p.stages.size() == 3);
  CHECK(members_of(p.stages[0]) == std::multiset<int>{4});
  CHECK(members_of(p.stages[1]) == std::multiset<int>{4, 3});
  CHECK(members_of(p.stages[2]) == std::multiset<int>{4, 3, 1, 2});
}

TEST_CASE("identical pairs join every stage under all_stages") {
  TieredCorpus t = tiny_tiers();
  t.identical = {ex(9)};
  const auto p = plan(Strategy::EasyCumulative, t, IdenticalPolicy::AllStages, 1);
  for (const auto& stage : p.stages) {
    CHECK(std::count(stage.members.begin(), stage.members.end(), 9) == 1);
  }
  const auto excluded = plan(Strategy::EasyCumulative, t, IdenticalPolicy::Exclude, 1);
  for (const auto& stage : excluded.stages) {
    CHECK(std::count(stage.members.begin(), stage.members.end(), 9) == 0);
  }
}

TEST_CASE("empty easy tier cannot seed an easy-cumulative plan") {
  TieredCorpus t = tiny_tiers();
  t.easy.clear();
  CHECK_THROWS_AS(plan(Strategy::EasyCumulative, t, IdenticalPolicy::Exclude, 1), ValidationError);
  // An empty middle tier is fine: the stage repeats its predecessor.
  TieredCorpus t2 = tiny_tiers();
  t2.medium.clear();
  CHECK_NOTHROW(plan(Strategy::EasyCumulative, t2, IdenticalPolicy::Exclude, 1));
}

TEST_CASE("mixed replay multiset") {
  TieredCorpus t;
  t.easy = {ex(1)};
  t.medium = {ex(2)};
  t.hard = {ex(3)};
  const StageSpec stage = mixed_replay(t, {3, 2, 1}, 5);
  CHECK(stage.name == "3E+2M+1H");
  CHECK(members_of(stage) == std::multiset<int>{1, 1, 1, 2, 2, 3});

  const StageSpec degenerate = mixed_replay(t, {1, 1, 1}, 5);
  CHECK(members_of(degenerate) == std::multiset<int>{1, 2, 3});
}

TEST_CASE("mixed replay size arithmetic at tier scale") {
  TieredCorpus t;
  for (int i = 0; i < 500; ++i) t.easy.push_back(ex(i));
  for (int i = 500; i < 960; ++i) t.medium.push_back(ex(i));
  for (int i = 960; i < 1310; ++i) t.hard.push_back(ex(i));
  const StageSpec stage = mixed_replay(t, {3, 2, 1}, 1);
  CHECK(stage.members.size() == 3 * 500 + 2 * 460 + 350);
  CHECK(stage.members.size() == 2770);
}

TEST_CASE("stage_dataset resolves ids in seeded order") {
  const TieredCorpus t = tiny_tiers();
  std::vector<ParallelExample> corpus{ex(1), ex(2), ex(3), ex(4)};
  const auto p = plan(Strategy::EasyCumulative, t, IdenticalPolicy::Exclude, 77);

  const auto dataset = stage_dataset(p, 1, corpus);
  REQUIRE(dataset.size() == 3);
  std::multiset<int> ids;
  for (const auto& e : dataset) ids.insert(e.id);
  CHECK(ids == std::multiset<int>{1, 2, 3});

  SUBCASE("same seed, same order") {
    const auto p2 = plan(Strategy::EasyCumulative, t, IdenticalPolicy::Exclude, 77);
    CHECK(p2.stages[1].members == p.stages[1].members);
  }
  SUBCASE("different seeds usually differ in order, never in content") {
    bool any_different = false;
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
      const auto p2 = plan(Strategy::EasyCumulative, t, IdenticalPolicy::Exclude, seed);
      CHECK(members_of(p2.stages[2]) == members_of(p.stages[2]));
      if (p2.stages[2].members != p.stages[2].members) any_different = true;
    }
    CHECK(any_different);
  }
  SUBCASE("dangling ids are rejected") {
    const std::vector<ParallelExample> partial{ex(1), ex(2)};
    CHECK_THROWS_AS(stage_dataset(p, 1, partial), ValidationError);
  }
}

TEST_CASE("validate_plan accepts plan() output") {
  const auto p = plan(Strategy::EasyCumulative, tiny_tiers(), IdenticalPolicy::AllStages, 3);
  CHECK(validate_plan(p).empty());
}

TEST_CASE("validate_plan flags a broken superset chain") {
  auto p = plan(Strategy::EasyCumulative, tiny_tiers(), IdenticalPolicy::Exclude, 3);
  auto& members = p.stages[1].members;
  members.erase(std::find(members.begin(), members.end(), 1));  // drop an easy id from stage 2
  const auto violations = validate_plan(p);
  REQUIRE_FALSE(violations.empty());
  bool found = false;
  for (const auto& v : violations) {
    if (v.find("superset chain broken at stage 2") != std::string::npos) found = true;
  }
  CHECK(found);
}

TEST_CASE("validate_plan flags overlapping tiers") {
  TieredCorpus t = tiny_tiers();
  t.medium.push_back(ex(1));  // id 1 lives in easy and medium
  const auto p = plan(Strategy::EasyCumulative, t, IdenticalPolicy::Exclude, 3);
  const auto violations = validate_plan(p);
  bool found = false;
  for (const auto& v : violations) {
    if (v.find("tier overlap") != std::string::npos) found = true;
  }
  CHECK(found);
}

namespace {

TieredCorpus random_tiers(Rng& rng) {
  TieredCorpus t;
  int id = 0;
  const auto fill = [&](std::vector<ParallelExample>& tier, int count) {
    for (int i = 0; i < count; ++i) tier.push_back(ex(id++));
  };
  fill(t.easy, 1 + static_cast<int>(rng.below(20)));
  fill(t.medium, static_cast<int>(rng.below(20)));
  fill(t.hard, 1 + static_cast<int>(rng.below(20)));
  fill(t.identical, static_cast<int>(rng.below(10)));
  return t;
}

}  // namespace

TEST_CASE("cumulative invariants over random tiered corpora") {
  Rng rng(123);
  for (int round = 0; round < 100; ++round) {
    const TieredCorpus t = random_tiers(rng);
    const auto policy = rng.chance(0.5) ? IdenticalPolicy::AllStages : IdenticalPolicy::Exclude;
    const std::uint64_t seed = rng.next();

    const auto easy_plan = plan(Strategy::EasyCumulative, t, policy, seed);
    const auto hard_plan = plan(Strategy::HardCumulative, t, policy, seed);

    for (const auto& p : {easy_plan, hard_plan}) {
      CHECK(validate_plan(p).empty());
      std::set<int> previous;
      for (const auto& stage : p.stages) {
        std::set<int> current(stage.members.begin(), stage.members.end());
        CHECK(current.size() == stage.members.size());  // no repeats in cumulative stages
        CHECK(std::includes(current.begin(), current.end(), previous.begin(), previous.end()));
        previous = std::move(current);
      }
    }

    // Both orderings end on the same data.
    const auto final_easy = std::set<int>(easy_plan.stages.back().members.begin(),
                                          easy_plan.stages.back().members.end());
    const auto final_hard = std::set<int>(hard_plan.stages.back().members.begin(),
                                          hard_plan.stages.back().members.end());
    CHECK(final_easy == final_hard);

    const StageSpec mixed = mixed_replay(t, {3, 2, 1}, seed);
    CHECK(mixed.members.size() == 3 * t.easy.size() + 2 * t.medium.size() + t.hard.size());

    // plan() is a pure function of its inputs.
    const auto replay = plan(Strategy::EasyCumulative, t, policy, seed);
    for (std::size_t k = 0; k < replay.stages.size(); ++k) {
      CHECK(replay.stages[k].members == easy_plan.stages[k].members);
    }
  }
}

TEST_CASE("plan JSON round-trip") {
  const auto p = plan(Strategy::MixedReplay, tiny_tiers(), IdenticalPolicy::AllStages, 9);
  const std::string text = plan_to_json(p);
  const auto back = plan_from_json(text);
  CHECK(back.strategy == p.strategy);
  CHECK(back.identical_policy == p.identical_policy);
  CHECK(back.seed == p.seed);
  REQUIRE(back.stages.size() == p.stages.size());
  CHECK(back.stages[0].members == p.stages[0].members);
  CHECK(back.stages[0].name == p.stages[0].name);
}
