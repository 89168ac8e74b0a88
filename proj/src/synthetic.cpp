#include "geccl/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "geccl/errors.hpp"
#include "geccl/rng.hpp"
#include "json.hpp"

namespace geccl {

namespace {

const std::vector<std::string> kDets = {"the", "a"};
const std::vector<std::string> kAdjs = {"red", "big", "small", "old", "young", "quiet"};
const std::vector<std::string> kNouns = {"cat",     "dog",  "bird",  "farmer", "teacher",
                                         "boy",     "girl", "river", "garden", "house"};
const std::vector<std::string> kVerbs = {"likes",  "sees",  "follows", "watches",
                                         "finds",  "helps", "visits",  "draws"};
const std::vector<std::string> kPreps = {"under", "near", "behind", "beside"};

Tokens base_sentence(Rng& rng) {
  Tokens s;
  s.push_back(rng.pick(kDets));
  if (rng.chance(0.5)) s.push_back(rng.pick(kAdjs));
  s.push_back(rng.pick(kNouns));
  s.push_back(rng.pick(kVerbs));
  s.push_back(rng.pick(kDets));
  if (rng.chance(0.5)) s.push_back(rng.pick(kAdjs));
  s.push_back(rng.pick(kNouns));
  if (rng.chance(0.4)) {
    s.push_back(rng.pick(kPreps));
    s.push_back(rng.pick(kDets));
    s.push_back(rng.pick(kNouns));
  }
  s.push_back(".");
  return s;
}

struct Corruption {
  Tokens source;  // corrupted sentence
  GoldEdit edit;  // on the source, reproducing the base sentence
};

Corruption corrupt_easy(const Tokens& base, const SyntheticSpec& spec, Rng& rng) {
  std::vector<std::size_t> candidates;
  for (std::size_t p = 0; p < base.size(); ++p) {
    for (const auto& [correct, wrong] : spec.easy_substitutions) {
      if (base[p] == correct) {
        candidates.push_back(p);
        break;
      }
    }
  }
  const std::size_t p = candidates[rng.below(candidates.size())];
  std::string wrong;
  for (const auto& [correct, w] : spec.easy_substitutions) {
    if (base[p] == correct) {
      wrong = w;
      break;
    }
  }
  Corruption c;
  c.source = base;
  c.source[p] = wrong;
  c.edit = GoldEdit{static_cast<int>(p), static_cast<int>(p) + 1, "R", {base[p]}, 0};
  return c;
}

Corruption corrupt_medium(const Tokens& base, const SyntheticSpec& spec, Rng& rng) {
  Corruption c;
  const bool spurious = rng.chance(0.5);
  if (spurious) {
    // Extra function word in the source; gold deletes it.
    const std::string& word = spec.medium_insertables[rng.below(spec.medium_insertables.size())];
    const std::size_t q = rng.below(base.size());  // anywhere before the final token
    c.source = base;
    c.source.insert(c.source.begin() + q, word);
    c.edit = GoldEdit{static_cast<int>(q), static_cast<int>(q) + 1, "U", {}, 0};
    return c;
  }
  // Missing function word; gold inserts it back.
  std::vector<std::size_t> candidates;
  for (std::size_t p = 0; p < base.size(); ++p) {
    if (std::find(spec.medium_deletables.begin(), spec.medium_deletables.end(), base[p]) !=
        spec.medium_deletables.end()) {
      candidates.push_back(p);
    }
  }
  const std::size_t q = candidates[rng.below(candidates.size())];
  c.source = base;
  c.source.erase(c.source.begin() + q);
  c.edit = GoldEdit{static_cast<int>(q), static_cast<int>(q), "M", {base[q]}, 0};
  return c;
}

Corruption corrupt_hard(const Tokens& base, const SyntheticSpec& spec, Rng& rng) {
  for (int attempt = 0; attempt < 64; ++attempt) {
    const int w = spec.hard_windows[rng.below(spec.hard_windows.size())];
    const int last = static_cast<int>(base.size()) - 1 - w;  // keep the final '.' in place
    if (last < 0) continue;
    const int pos = static_cast<int>(rng.below(static_cast<std::uint64_t>(last) + 1));
    Tokens window(base.begin() + pos, base.begin() + pos + w);
    Tokens reversed(window.rbegin(), window.rend());
    if (reversed == window) continue;
    Corruption c;
    c.source = base;
    std::copy(reversed.begin(), reversed.end(), c.source.begin() + pos);
    c.edit = GoldEdit{pos, pos + w, "WO", window, 0};
    return c;
  }
  throw ValidationError("gen_synthetic: could not plant a reordering");
}

Corruption corrupt(const std::string& label, const Tokens& base, const SyntheticSpec& spec,
                   Rng& rng) {
  if (label == "easy") return corrupt_easy(base, spec, rng);
  if (label == "medium") return corrupt_medium(base, spec, rng);
  return corrupt_hard(base, spec, rng);
}

}  // namespace

SyntheticSpec SyntheticSpec::with_defaults() {
  SyntheticSpec spec;
  spec.easy_substitutions = {{"likes", "like"},     {"sees", "see"},   {"follows", "follow"},
                             {"watches", "watch"},  {"finds", "find"}, {"helps", "help"},
                             {"visits", "visit"},   {"draws", "draw"}, {"the", "teh"},
                             {"big", "bigg"}};
  spec.medium_insertables = {"of", "to", "so", "up"};
  spec.medium_deletables = {"the", "a"};
  spec.hard_windows = {2, 3};
  return spec;
}

SyntheticCorpus gen_synthetic(const SyntheticSpec& spec) {
  if (spec.n_pairs < 1) throw ConfigError("gen_synthetic: n_pairs must be positive");
  if (spec.identity_rate < 0.0 || spec.identity_rate > 1.0) {
    throw ConfigError("gen_synthetic: identity_rate outside [0, 1]");
  }
  if (spec.easy_substitutions.empty() || spec.medium_insertables.empty() ||
      spec.medium_deletables.empty() || spec.hard_windows.empty()) {
    throw ConfigError("gen_synthetic: rule inventory must be nonempty for every class");
  }

  Rng rng(spec.seed);

  // Exact class counts, identical first, remainder split by weights.
  const int identical_n = static_cast<int>(std::llround(spec.identity_rate * spec.n_pairs));
  const int changed = spec.n_pairs - identical_n;
  const double wsum = spec.easy_weight + spec.medium_weight + spec.hard_weight;
  const int easy_n = static_cast<int>(std::llround(changed * spec.easy_weight / wsum));
  const int medium_n = static_cast<int>(std::llround(changed * spec.medium_weight / wsum));
  const int hard_n = changed - easy_n - medium_n;
  if (hard_n < 0) throw ConfigError("gen_synthetic: class weights leave no hard examples");

  std::vector<std::string> labels;
  labels.insert(labels.end(), identical_n, "identical");
  labels.insert(labels.end(), easy_n, "easy");
  labels.insert(labels.end(), medium_n, "medium");
  labels.insert(labels.end(), hard_n, "hard");
  rng.shuffle(labels);

  SyntheticCorpus out;
  out.class_counts = {{"identical", identical_n},
                      {"easy", easy_n},
                      {"medium", medium_n},
                      {"hard", hard_n}};

  std::set<std::pair<std::string, std::string>> seen;
  for (int id = 0; id < spec.n_pairs; ++id) {
    const std::string& label = labels[id];
    for (int attempt = 0;; ++attempt) {
      if (attempt >= 200) throw ValidationError("gen_synthetic: cannot find a fresh pair");
      const Tokens base = base_sentence(rng);
      Tokens source = base;
      GoldEdit edit{-1, -1, "noop", {}, 0};
      if (label != "identical") {
        Corruption c = corrupt(label, base, spec, rng);
        source = std::move(c.source);
        edit = std::move(c.edit);
      }
      auto key = std::make_pair(join_tokens(source), join_tokens(base));
      if (!seen.insert(key).second) continue;
      out.parallel_tsv += key.first + "\t" + key.second + "\n";
      out.planted.push_back(PlantedExample{id, label, std::move(edit)});
      break;
    }
  }

  // Dev and test gold sets: single annotator, occasional error-free sentences.
  auto gen_gold = [&](int count, std::vector<Tokens>& targets) {
    AnnotatedCorpus corpus;
    for (int i = 0; i < count; ++i) {
      const Tokens base = base_sentence(rng);
      AnnotatedSentence sentence;
      if (rng.chance(spec.noop_rate)) {
        sentence.source = base;
        sentence.edits.push_back(GoldEdit{-1, -1, "noop", {}, 0});
      } else {
        const double roll = rng.unit() * wsum;
        const std::string label = roll < spec.easy_weight              ? "easy"
                                  : roll < spec.easy_weight + spec.medium_weight ? "medium"
                                                                                 : "hard";
        Corruption c = corrupt(label, base, spec, rng);
        sentence.source = std::move(c.source);
        sentence.edits.push_back(std::move(c.edit));
      }
      targets.push_back(base);
      corpus.sentences.push_back(std::move(sentence));
    }
    return write_m2(corpus);
  };
  out.gold_dev_m2 = gen_gold(spec.n_dev, out.dev_targets);
  out.gold_test_m2 = gen_gold(spec.n_test, out.test_targets);

  nlohmann::json sidecar;
  sidecar["counts"] = out.class_counts;
  nlohmann::json examples = nlohmann::json::array();
  for (const PlantedExample& p : out.planted) {
    nlohmann::json e{{"id", p.id}, {"label", p.label}};
    if (p.label != "identical") {
      e["edit"] = {{"start", p.edit.start},
                   {"end", p.edit.end},
                   {"correction", join_tokens(p.edit.correction)}};
    }
    examples.push_back(std::move(e));
  }
  sidecar["examples"] = std::move(examples);
  out.sidecar_json = sidecar.dump(2) + "\n";
  return out;
}

std::string synthetic_spec_to_json(const SyntheticSpec& spec) {
  nlohmann::json subs = nlohmann::json::array();
  for (const auto& [correct, wrong] : spec.easy_substitutions) {
    subs.push_back({{"correct", correct}, {"wrong", wrong}});
  }
  nlohmann::json j{{"n_pairs", spec.n_pairs},
                   {"identity_rate", spec.identity_rate},
                   {"n_dev", spec.n_dev},
                   {"n_test", spec.n_test},
                   {"noop_rate", spec.noop_rate},
                   {"easy_weight", spec.easy_weight},
                   {"medium_weight", spec.medium_weight},
                   {"hard_weight", spec.hard_weight},
                   {"seed", spec.seed},
                   {"easy_substitutions", std::move(subs)},
                   {"medium_insertables", spec.medium_insertables},
                   {"medium_deletables", spec.medium_deletables},
                   {"hard_windows", spec.hard_windows}};
  return j.dump(2) + "\n";
}

SyntheticSpec synthetic_spec_from_json(const std::string& json_text) {
  nlohmann::json j = nlohmann::json::parse(json_text);
  SyntheticSpec spec = SyntheticSpec::with_defaults();
  spec.n_pairs = j.value("n_pairs", spec.n_pairs);
  spec.identity_rate = j.value("identity_rate", spec.identity_rate);
  spec.n_dev = j.value("n_dev", spec.n_dev);
  spec.n_test = j.value("n_test", spec.n_test);
  spec.noop_rate = j.value("noop_rate", spec.noop_rate);
  spec.easy_weight = j.value("easy_weight", spec.easy_weight);
  spec.medium_weight = j.value("medium_weight", spec.medium_weight);
  spec.hard_weight = j.value("hard_weight", spec.hard_weight);
  spec.seed = j.value("seed", spec.seed);
  if (j.contains("easy_substitutions")) {
    spec.easy_substitutions.clear();
    for (const auto& s : j["easy_substitutions"]) {
      spec.easy_substitutions.emplace_back(s.at("correct").get<std::string>(),
                                           s.at("wrong").get<std::string>());
    }
  }
  if (j.contains("medium_insertables")) {
    spec.medium_insertables = j["medium_insertables"].get<std::vector<std::string>>();
  }
  if (j.contains("medium_deletables")) {
    spec.medium_deletables = j["medium_deletables"].get<std::vector<std::string>>();
  }
  if (j.contains("hard_windows")) {
    spec.hard_windows = j["hard_windows"].get<std::vector<int>>();
  }
  return spec;
}

}  // namespace geccl
