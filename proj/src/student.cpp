#include "geccl/student.hpp"

#include <algorithm>
#include <fstream>

#include "geccl/errors.hpp"
#include "json.hpp"

namespace geccl {

namespace {

constexpr std::size_t kMaxSourcePhrase = 3;
constexpr std::size_t kMaxTargetPhrase = 3;

}  // namespace

std::vector<EditOp> align(const Tokens& source, const Tokens& target) {
  if (source.empty()) throw ValidationError("align: empty source");
  const int n = static_cast<int>(source.size());
  const int m = static_cast<int>(target.size());

  std::vector<std::vector<int>> dist(n + 1, std::vector<int>(m + 1, 0));
  for (int i = 0; i <= n; ++i) dist[i][0] = i;
  for (int j = 0; j <= m; ++j) dist[0][j] = j;
  for (int i = 1; i <= n; ++i) {
    for (int j = 1; j <= m; ++j) {
      const int diag = dist[i - 1][j - 1] + (source[i - 1] == target[j - 1] ? 0 : 1);
      dist[i][j] = std::min({diag, dist[i - 1][j] + 1, dist[i][j - 1] + 1});
    }
  }

  // Backtrace, preferring match > substitution > deletion > insertion.
  std::vector<EditOp> ops;
  int i = n, j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0 && source[i - 1] == target[j - 1] && dist[i][j] == dist[i - 1][j - 1]) {
      ops.push_back({EditOpType::Match, i - 1, j - 1});
      --i, --j;
    } else if (i > 0 && j > 0 && dist[i][j] == dist[i - 1][j - 1] + 1 &&
               source[i - 1] != target[j - 1]) {
      ops.push_back({EditOpType::Substitute, i - 1, j - 1});
      --i, --j;
    } else if (i > 0 && dist[i][j] == dist[i - 1][j] + 1) {
      ops.push_back({EditOpType::Delete, i - 1, j});
      --i;
    } else {
      ops.push_back({EditOpType::Insert, i, j - 1});
      --j;
    }
  }
  std::reverse(ops.begin(), ops.end());
  return ops;
}

std::vector<Observation> extract_rules(const ParallelExample& example) {
  std::vector<Observation> observations;
  if (example.source == example.target) return observations;
  const auto ops = align(example.source, example.target);

  struct Run {
    int src_begin, src_end;  // token span in source
    int tgt_begin, tgt_end;  // token span in target
  };
  std::vector<Run> runs;
  for (std::size_t k = 0; k < ops.size();) {
    if (ops[k].type == EditOpType::Match) {
      ++k;
      continue;
    }
    Run run{ops[k].src_pos, ops[k].src_pos, ops[k].tgt_pos, ops[k].tgt_pos};
    while (k < ops.size() && ops[k].type != EditOpType::Match) {
      switch (ops[k].type) {
        case EditOpType::Substitute:
          run.src_end = ops[k].src_pos + 1;
          run.tgt_end = ops[k].tgt_pos + 1;
          break;
        case EditOpType::Delete:
          run.src_end = ops[k].src_pos + 1;
          break;
        case EditOpType::Insert:
          run.src_end = std::max(run.src_end, ops[k].src_pos);
          run.tgt_end = ops[k].tgt_pos + 1;
          break;
        default:
          break;
      }
      ++k;
    }
    runs.push_back(run);
  }

  const Tokens& src = example.source;
  const Tokens& tgt = example.target;
  auto slice = [](const Tokens& t, int b, int e) { return Tokens(t.begin() + b, t.begin() + e); };

  for (Run run : runs) {
    Tokens core_src = slice(src, run.src_begin, run.src_end);
    Tokens core_tgt = slice(tgt, run.tgt_begin, run.tgt_end);
    int anchored_begin = run.src_begin;
    int anchored_end = run.src_end;

    if (core_src.empty()) {
      // Pure insertion: anchor to the left neighbor, or the right one at the
      // sentence start, so the source phrase is never empty.
      if (run.src_begin > 0) {
        anchored_begin = run.src_begin - 1;
        core_src.insert(core_src.begin(), src[anchored_begin]);
        core_tgt.insert(core_tgt.begin(), src[anchored_begin]);
      } else {
        anchored_end = run.src_end + 1;
        core_src.push_back(src[run.src_end]);
        core_tgt.push_back(src[run.src_end]);
      }
    }

    auto emit = [&](Tokens s, Tokens t) {
      if (s.empty() || s.size() > kMaxSourcePhrase || t.size() > kMaxTargetPhrase) return;
      if (s == t) return;
      Observation obs{std::move(s), std::move(t)};
      if (std::find(observations.begin(), observations.end(), obs) == observations.end()) {
        observations.push_back(std::move(obs));
      }
    };

    emit(core_src, core_tgt);

    // Contextualized variant: one token of left/right source context.
    Tokens ctx_src = core_src;
    Tokens ctx_tgt = core_tgt;
    bool widened = false;
    if (anchored_begin > 0) {
      ctx_src.insert(ctx_src.begin(), src[anchored_begin - 1]);
      ctx_tgt.insert(ctx_tgt.begin(), src[anchored_begin - 1]);
      widened = true;
    }
    if (anchored_end < static_cast<int>(src.size())) {
      ctx_src.push_back(src[anchored_end]);
      ctx_tgt.push_back(src[anchored_end]);
      widened = true;
    }
    if (widened) emit(std::move(ctx_src), std::move(ctx_tgt));
  }
  return observations;
}

double EditRule::normalized() const {
  if (weight <= 0.0) return 0.0;
  const double denom = weight + penalty;
  if (denom <= 0.0) return 0.0;
  return std::min(1.0, weight / denom);
}

namespace {

void evict_if_over_capacity(StudentModel& model, std::size_t capacity, std::size_t& evictions) {
  while (model.rules.size() > capacity) {
    auto victim = model.rules.begin();
    for (auto it = std::next(model.rules.begin()); it != model.rules.end(); ++it) {
      const EditRule& r = it->second;
      const EditRule& v = victim->second;
      // Lowest weight goes; ties keep the older stage, then the older entry.
      if (r.weight < v.weight ||
          (r.weight == v.weight &&
           (r.first_seen_stage > v.first_seen_stage ||
            (r.first_seen_stage == v.first_seen_stage && r.order > v.order)))) {
        victim = it;
      }
    }
    model.rules.erase(victim);
    ++evictions;
  }
}

void observe(StudentModel& model, const Observation& obs, double lr, std::size_t& evictions) {
  const std::string key = join_tokens(obs.source_phrase);
  auto it = model.rules.find(key);
  if (it == model.rules.end()) {
    EditRule rule;
    rule.source_phrase = obs.source_phrase;
    rule.target_phrase = obs.target_phrase;
    rule.weight = lr;
    rule.first_seen_stage = model.stage_index;
    rule.order = model.next_order++;
    model.rules.emplace(key, std::move(rule));
    evict_if_over_capacity(model, model.config.capacity, evictions);
    return;
  }
  EditRule& rule = it->second;
  if (rule.target_phrase == obs.target_phrase) {
    rule.weight += lr;
    return;
  }
  // Competing target for the same source phrase: duel by weight, the
  // challenger takes over once the incumbent is exhausted. Penalty mass stays:
  // it is evidence about the source phrase, not about either target.
  rule.weight -= lr;
  if (rule.weight <= 0.0) {
    rule.target_phrase = obs.target_phrase;
    rule.weight = lr;
    rule.first_seen_stage = model.stage_index;
    rule.order = model.next_order++;
  }
}

void penalize_unchanged(StudentModel& model, const ParallelExample& ex, double lr) {
  const auto ops = align(ex.source, ex.target);
  // Mark source positions consumed by Match ops.
  std::vector<bool> matched(ex.source.size(), false);
  for (const EditOp& op : ops) {
    if (op.type == EditOpType::Match) matched[op.src_pos] = true;
  }
  const double hit = lr * model.config.rho;
  const std::size_t n = ex.source.size();
  std::string key;
  for (std::size_t i = 0; i < n; ++i) {
    if (!matched[i]) continue;
    key = ex.source[i];
    for (std::size_t len = 1; len <= kMaxSourcePhrase && i + len <= n; ++len) {
      if (len > 1) {
        if (!matched[i + len - 1]) break;
        key += ' ';
        key += ex.source[i + len - 1];
      }
      auto it = model.rules.find(key);
      if (it != model.rules.end()) {
        it->second.weight -= hit;
        it->second.penalty += hit;
      }
    }
  }
}

}  // namespace

std::pair<StudentModel, StageMetrics> train_stage(StudentModel model,
                                                  const std::vector<ParallelExample>& dataset,
                                                  const TrainConfig& config,
                                                  const ValidationFn& validate) {
  if (dataset.empty()) throw ValidationError("train_stage: empty dataset");
  model.config = config;
  const double lr = model.stage_lr();

  StageMetrics metrics;
  double previous = -1.0;
  const int max_passes = validate ? std::max(1, config.max_passes) : 1;
  for (int pass = 0; pass < max_passes; ++pass) {
    for (const ParallelExample& ex : dataset) {
      for (const Observation& obs : extract_rules(ex)) {
        observe(model, obs, lr, metrics.evictions);
      }
      penalize_unchanged(model, ex, lr);
    }
    ++metrics.passes;
    if (validate) {
      const double score = validate(model);
      metrics.dev_f_half = score;
      if (pass > 0 && score - previous < config.epsilon) break;
      previous = score;
    }
  }

  model.stage_index += 1;
  metrics.rule_count = model.rules.size();
  return {std::move(model), metrics};
}

std::pair<Tokens, std::vector<AppliedEdit>> correct(const StudentModel& model,
                                                    const Tokens& sentence) {
  struct Candidate {
    const EditRule* rule;
    int pos;
    int len;
  };
  std::vector<Candidate> candidates;
  const int n = static_cast<int>(sentence.size());
  std::string key;
  for (int pos = 0; pos < n; ++pos) {
    key.clear();
    for (int len = 1; len <= static_cast<int>(kMaxSourcePhrase) && pos + len <= n; ++len) {
      if (len > 1) key += ' ';
      key += sentence[pos + len - 1];
      auto it = model.rules.find(key);
      if (it != model.rules.end() && it->second.normalized() >= model.config.tau) {
        candidates.push_back({&it->second, pos, len});
      }
    }
  }
  std::stable_sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    if (a.rule->weight != b.rule->weight) return a.rule->weight > b.rule->weight;
    if (a.len != b.len) return a.len > b.len;
    return a.pos < b.pos;
  });

  std::vector<bool> taken(sentence.size(), false);
  std::vector<AppliedEdit> applied;
  for (const Candidate& c : candidates) {
    bool free = true;
    for (int k = c.pos; k < c.pos + c.len; ++k) {
      if (taken[k]) {
        free = false;
        break;
      }
    }
    if (!free) continue;
    for (int k = c.pos; k < c.pos + c.len; ++k) taken[k] = true;
    applied.push_back({c.pos, c.pos + c.len, c.rule->target_phrase});
  }
  std::sort(applied.begin(), applied.end(),
            [](const AppliedEdit& a, const AppliedEdit& b) { return a.start < b.start; });

  Tokens out;
  int cursor = 0;
  for (const AppliedEdit& e : applied) {
    for (; cursor < e.start; ++cursor) out.push_back(sentence[cursor]);
    out.insert(out.end(), e.replacement.begin(), e.replacement.end());
    cursor = e.end;
  }
  for (; cursor < n; ++cursor) out.push_back(sentence[cursor]);
  return {std::move(out), std::move(applied)};
}

std::string checkpoint_to_json(const StudentModel& model) {
  nlohmann::json j;
  j["config"] = {{"lr0", model.config.lr0},
                 {"rho", model.config.rho},
                 {"tau", model.config.tau},
                 {"capacity", model.config.capacity},
                 {"max_passes", model.config.max_passes},
                 {"epsilon", model.config.epsilon}};
  j["stage_index"] = model.stage_index;
  nlohmann::json rules = nlohmann::json::array();
  for (const auto& [key, rule] : model.rules) {
    rules.push_back({{"source", key},
                     {"target", join_tokens(rule.target_phrase)},
                     {"weight", rule.weight},
                     {"penalty", rule.penalty},
                     {"first_seen_stage", rule.first_seen_stage}});
  }
  j["rules"] = std::move(rules);
  return j.dump(2) + "\n";
}

StudentModel checkpoint_from_json(const std::string& json_text) {
  nlohmann::json j = nlohmann::json::parse(json_text);
  StudentModel model;
  const auto& c = j.at("config");
  model.config.lr0 = c.at("lr0").get<double>();
  model.config.rho = c.at("rho").get<double>();
  model.config.tau = c.at("tau").get<double>();
  model.config.capacity = c.at("capacity").get<std::size_t>();
  model.config.max_passes = c.at("max_passes").get<int>();
  model.config.epsilon = c.at("epsilon").get<double>();
  model.stage_index = j.at("stage_index").get<int>();
  for (const auto& r : j.at("rules")) {
    EditRule rule;
    rule.source_phrase = split_tokens(r.at("source").get<std::string>());
    const std::string target = r.at("target").get<std::string>();
    rule.target_phrase = target.empty() ? Tokens{} : split_tokens(target);
    rule.weight = r.at("weight").get<double>();
    rule.penalty = r.value("penalty", 0.0);
    rule.first_seen_stage = r.at("first_seen_stage").get<int>();
    rule.order = model.next_order++;
    model.rules.emplace(r.at("source").get<std::string>(), std::move(rule));
  }
  return model;
}

void save_checkpoint(const StudentModel& model, const std::string& path) {
  write_file(path, checkpoint_to_json(model));
}

StudentModel load_checkpoint(const std::string& path) {
  return checkpoint_from_json(read_file(path));
}

}  // namespace geccl
