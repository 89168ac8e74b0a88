#include "geccl/eval.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <queue>
#include <set>
#include <unordered_map>

#include "geccl/errors.hpp"
#include "json.hpp"

namespace geccl {

double f_beta(long long tp, long long fp, long long fn, double beta) {
  if (tp < 0 || fp < 0 || fn < 0) throw ValidationError("f_beta: negative counts");
  if (beta <= 0.0) throw ValidationError("f_beta: beta must be positive");
  const double p = (tp + fp) > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 1.0;
  const double r = (tp + fn) > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 1.0;
  const double b2 = beta * beta;
  const double denom = b2 * p + r;
  if (denom == 0.0) return 0.0;
  return (1.0 + b2) * p * r / denom;
}

EvalResult EvalResult::from_counts(long long tp, long long fp, long long fn, double beta) {
  EvalResult r;
  r.tp = tp;
  r.fp = fp;
  r.fn = fn;
  r.precision = (tp + fp) > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 1.0;
  r.recall = (tp + fn) > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 1.0;
  r.f_half = f_beta(tp, fp, fn, beta);
  return r;
}

// ---------------------------------------------------------------------------
// Lattice construction
// ---------------------------------------------------------------------------

EditLattice hypothesis_edits(const Tokens& source, const Tokens& hypothesis, int max_unchanged) {
  if (source.empty()) throw ValidationError("hypothesis_edits: empty source");
  const int n = static_cast<int>(source.size());
  const int m = static_cast<int>(hypothesis.size());

  std::vector<std::vector<int>> dist(n + 1, std::vector<int>(m + 1, 0));
  for (int i = 0; i <= n; ++i) dist[i][0] = i;
  for (int j = 0; j <= m; ++j) dist[0][j] = j;
  for (int i = 1; i <= n; ++i) {
    for (int j = 1; j <= m; ++j) {
      const int diag = dist[i - 1][j - 1] + (source[i - 1] == hypothesis[j - 1] ? 0 : 1);
      dist[i][j] = std::min({diag, dist[i - 1][j] + 1, dist[i][j - 1] + 1});
    }
  }

  // Keep only cells lying on optimal paths: walk locally-optimal predecessor
  // moves backward from (n, m).
  std::vector<std::vector<bool>> reachable(n + 1, std::vector<bool>(m + 1, false));
  std::queue<std::pair<int, int>> frontier;
  reachable[n][m] = true;
  frontier.push({n, m});
  while (!frontier.empty()) {
    const auto [i, j] = frontier.front();
    frontier.pop();
    auto visit = [&](int pi, int pj) {
      if (!reachable[pi][pj]) {
        reachable[pi][pj] = true;
        frontier.push({pi, pj});
      }
    };
    if (i > 0 && j > 0) {
      const int c = source[i - 1] == hypothesis[j - 1] ? 0 : 1;
      if (dist[i][j] == dist[i - 1][j - 1] + c) visit(i - 1, j - 1);
    }
    if (i > 0 && dist[i][j] == dist[i - 1][j] + 1) visit(i - 1, j);
    if (j > 0 && dist[i][j] == dist[i][j - 1] + 1) visit(i, j - 1);
  }

  EditLattice lattice;
  std::map<std::pair<int, int>, int> index;  // lexicographic (i, j) is a topo order
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; j <= m; ++j) {
      if (reachable[i][j]) {
        index[{i, j}] = static_cast<int>(lattice.vertices.size());
        lattice.vertices.push_back({i, j});
      }
    }
  }
  lattice.start = index.at({0, 0});
  lattice.end = index.at({n, m});

  auto add_edge = [&](int from, int to, bool noop, HypEdit edit) {
    lattice.edges.push_back({from, to, noop, std::move(edit)});
  };

  // Atomic edges: single edit ops between adjacent optimal cells.
  for (const auto& [i, j] : lattice.vertices) {
    const int v = index.at({i, j});
    if (i > 0 && j > 0 && reachable[i - 1][j - 1]) {
      const bool match = source[i - 1] == hypothesis[j - 1];
      const int c = match ? 0 : 1;
      if (dist[i][j] == dist[i - 1][j - 1] + c) {
        add_edge(index.at({i - 1, j - 1}), v, match,
                 HypEdit{i - 1, i, match ? Tokens{} : Tokens{hypothesis[j - 1]}});
      }
    }
    if (i > 0 && reachable[i - 1][j] && dist[i][j] == dist[i - 1][j] + 1) {
      add_edge(index.at({i - 1, j}), v, false, HypEdit{i - 1, i, {}});
    }
    if (j > 0 && reachable[i][j - 1] && dist[i][j] == dist[i][j - 1] + 1) {
      add_edge(index.at({i, j - 1}), v, false, HypEdit{i, i, Tokens{hypothesis[j - 1]}});
    }
  }

  const std::size_t atomic_count = lattice.edges.size();
  std::vector<std::vector<std::size_t>> atomic_out(lattice.vertices.size());
  for (std::size_t e = 0; e < atomic_count; ++e) {
    atomic_out[lattice.edges[e].from].push_back(e);
  }

  // Composite edges: merge adjacent edits whose internal unchanged-token count
  // stays within max_unchanged. For each start vertex u, a small DAG pass
  // finds every v with a >= 2-op subpath that begins and ends with an edit.
  const int inf = std::numeric_limits<int>::max();
  const std::size_t vcount = lattice.vertices.size();
  std::vector<int> ending_edit(vcount), ending_noop(vcount), multi(vcount);
  for (std::size_t u = 0; u < vcount; ++u) {
    std::fill(ending_edit.begin(), ending_edit.end(), inf);
    std::fill(ending_noop.begin(), ending_noop.end(), inf);
    std::fill(multi.begin(), multi.end(), inf);
    for (std::size_t e : atomic_out[u]) {
      const auto& edge = lattice.edges[e];
      if (!edge.noop) ending_edit[edge.to] = std::min(ending_edit[edge.to], 0);
    }
    for (std::size_t v = u + 1; v < vcount; ++v) {
      const int best = std::min(ending_edit[v], ending_noop[v]);
      if (best == inf) continue;
      for (std::size_t e : atomic_out[v]) {
        const auto& edge = lattice.edges[e];
        if (edge.noop) {
          ending_noop[edge.to] = std::min(ending_noop[edge.to], best + 1);
        } else {
          ending_edit[edge.to] = std::min(ending_edit[edge.to], best);
          multi[edge.to] = std::min(multi[edge.to], best);
        }
      }
    }
    const auto [ui, uj] = lattice.vertices[u];
    for (std::size_t v = u + 1; v < vcount; ++v) {
      if (multi[v] == inf || multi[v] > max_unchanged) continue;
      const auto [vi, vj] = lattice.vertices[v];
      HypEdit edit{ui, vi, Tokens(hypothesis.begin() + uj, hypothesis.begin() + vj)};
      add_edge(static_cast<int>(u), static_cast<int>(v), false, std::move(edit));
    }
  }

  lattice.out_edges.assign(vcount, {});
  for (std::size_t e = 0; e < lattice.edges.size(); ++e) {
    lattice.out_edges[lattice.edges[e].from].push_back(static_cast<int>(e));
  }
  return lattice;
}

std::vector<EditDecomposition> EditLattice::decompositions(std::size_t limit) const {
  std::vector<EditDecomposition> out;
  EditDecomposition current;
  // Iterative DFS with an explicit edge stack.
  struct Frame {
    int vertex;
    std::size_t next;
    bool pushed;  // whether this frame's incoming edge added an edit
  };
  std::vector<Frame> stack{{start, 0, false}};
  while (!stack.empty()) {
    Frame& frame = stack.back();
    if (frame.vertex == end && frame.next == 0) {
      out.push_back(current);
      if (out.size() >= limit) return out;
    }
    if (frame.next >= out_edges[frame.vertex].size()) {
      if (frame.pushed) current.pop_back();
      stack.pop_back();
      continue;
    }
    const Edge& edge = edges[out_edges[frame.vertex][frame.next++]];
    bool pushed = false;
    if (!edge.noop) {
      current.push_back(edge.edit);
      pushed = true;
    }
    stack.push_back({edge.to, 0, pushed});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Maximal matching per annotator
// ---------------------------------------------------------------------------

namespace {

std::string edit_key(int start, int end, const Tokens& correction) {
  return std::to_string(start) + ":" + std::to_string(end) + ":" + join_tokens(correction);
}

struct AnnotatorOutcome {
  long long tp = 0;
  long long proposed = 0;
  std::uint32_t matched_mask = 0;
  std::vector<HypEdit> unmatched_hyp;
};

AnnotatorOutcome best_for_annotator(const EditLattice& lattice,
                                    const std::vector<GoldEdit>& gold_edits) {
  const std::size_t gold_count = gold_edits.size();
  if (gold_count > 20) {
    throw ValidationError("m2_score: more than 20 gold edits for one annotator; "
                          "exact matching is exponential in the gold count");
  }
  std::vector<std::string> gold_keys;
  gold_keys.reserve(gold_count);
  for (const GoldEdit& g : gold_edits) {
    gold_keys.push_back(edit_key(g.start, g.end, g.correction));
  }

  struct State {
    int proposed;
    int parent_vertex;
    std::uint32_t parent_mask;
    int via_edge;     // -1 at the origin
    bool via_match;   // the traversed edge was credited to a gold edit
  };
  // Per-vertex sparse mask table. std::map keeps the iteration deterministic.
  std::vector<std::map<std::uint32_t, State>> states(lattice.vertices.size());
  states[lattice.start][0] = State{0, -1, 0, -1, false};

  for (std::size_t v = 0; v < lattice.vertices.size(); ++v) {
    for (const auto& [mask, state] : states[v]) {
      for (int e : lattice.out_edges[v]) {
        const EditLattice::Edge& edge = lattice.edges[e];
        auto relax = [&](std::uint32_t new_mask, int proposed, bool via_match) {
          auto [it, inserted] = states[edge.to].try_emplace(
              new_mask, State{proposed, static_cast<int>(v), mask, e, via_match});
          if (!inserted && proposed < it->second.proposed) {
            it->second = State{proposed, static_cast<int>(v), mask, e, via_match};
          }
        };
        if (edge.noop) {
          relax(mask, state.proposed, false);
          continue;
        }
        relax(mask, state.proposed + 1, false);
        const std::string key = edit_key(edge.edit.start, edge.edit.end, edge.edit.correction);
        for (std::size_t g = 0; g < gold_count; ++g) {
          if ((mask >> g) & 1u) continue;
          if (gold_keys[g] == key) {
            relax(mask | (1u << g), state.proposed + 1, true);
            break;  // identical keys are interchangeable, lowest index suffices
          }
        }
      }
    }
  }

  // Pick max matched count, then min proposed, then smallest mask.
  const auto& final_states = states[lattice.end];
  if (final_states.empty()) throw ValidationError("m2_score: lattice has no complete path");
  std::uint32_t best_mask = 0;
  const State* best = nullptr;
  int best_popcount = -1;
  for (const auto& [mask, state] : final_states) {
    const int pc = std::popcount(mask);
    if (pc > best_popcount || (pc == best_popcount && best && state.proposed < best->proposed)) {
      best_popcount = pc;
      best_mask = mask;
      best = &state;
    }
  }

  AnnotatorOutcome outcome;
  outcome.tp = best_popcount;
  outcome.proposed = best->proposed;
  outcome.matched_mask = best_mask;

  // Walk parents to collect the unmatched hypothesis edits.
  int vertex = lattice.end;
  std::uint32_t mask = best_mask;
  const State* state = best;
  while (state->via_edge != -1) {
    const EditLattice::Edge& edge = lattice.edges[state->via_edge];
    if (!edge.noop && !state->via_match) outcome.unmatched_hyp.push_back(edge.edit);
    vertex = state->parent_vertex;
    mask = state->parent_mask;
    state = &states[vertex].at(mask);
  }
  std::reverse(outcome.unmatched_hyp.begin(), outcome.unmatched_hyp.end());
  return outcome;
}

}  // namespace

SentenceOutcome score_sentence(const Tokens& source, const Tokens& hypothesis,
                               const AnnotatedSentence& gold, double beta, int max_unchanged) {
  const EditLattice lattice = hypothesis_edits(source, hypothesis, max_unchanged);
  const auto groups = gold.edits_by_annotator();

  SentenceOutcome best;
  bool have_best = false;
  for (const auto& [annotator, edits] : groups) {
    const AnnotatorOutcome outcome = best_for_annotator(lattice, edits);
    const long long tp = outcome.tp;
    const long long fp = outcome.proposed - outcome.tp;
    const long long fn = static_cast<long long>(edits.size()) - outcome.tp;
    const double f = f_beta(tp, fp, fn, beta);
    if (!have_best || f > best.f) {
      have_best = true;
      best = SentenceOutcome{annotator, tp, fp, fn, f, {}, {}, outcome.unmatched_hyp};
      for (std::size_t g = 0; g < edits.size(); ++g) {
        if ((outcome.matched_mask >> g) & 1u) {
          best.matched_gold.push_back(edits[g]);
        } else {
          best.unmatched_gold.push_back(edits[g]);
        }
      }
    }
  }
  return best;
}

M2Detail m2_score_detailed(const std::vector<Tokens>& sources,
                           const std::vector<Tokens>& hypotheses, const AnnotatedCorpus& gold,
                           double beta, int max_unchanged) {
  if (sources.size() != hypotheses.size() || sources.size() != gold.sentences.size()) {
    throw ValidationError("m2_score: sources, hypotheses and gold have different lengths (" +
                          std::to_string(sources.size()) + ", " + std::to_string(hypotheses.size()) +
                          ", " + std::to_string(gold.sentences.size()) + ")");
  }
  M2Detail detail;
  long long tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < sources.size(); ++i) {
    if (sources[i] != gold.sentences[i].source) {
      throw ValidationError("m2_score: source " + std::to_string(i) +
                            " does not match the gold S line");
    }
    SentenceOutcome outcome =
        score_sentence(sources[i], hypotheses[i], gold.sentences[i], beta, max_unchanged);
    tp += outcome.tp;
    fp += outcome.fp;
    fn += outcome.fn;
    detail.sentence_f.push_back(outcome.f);
    detail.sentences.push_back(std::move(outcome));
  }
  detail.overall = EvalResult::from_counts(tp, fp, fn, beta);
  return detail;
}

EvalResult m2_score(const std::vector<Tokens>& sources, const std::vector<Tokens>& hypotheses,
                    const AnnotatedCorpus& gold, double beta) {
  return m2_score_detailed(sources, hypotheses, gold, beta).overall;
}

// ---------------------------------------------------------------------------
// Operation-level typing
// ---------------------------------------------------------------------------

const char* to_string(OpType type) {
  switch (type) {
    case OpType::Replacement: return "Replacement";
    case OpType::Missing: return "Missing";
    case OpType::Unnecessary: return "Unnecessary";
    case OpType::WordOrder: return "WordOrder";
  }
  return "?";
}

const char* short_label(OpType type) {
  switch (type) {
    case OpType::Replacement: return "R";
    case OpType::Missing: return "M";
    case OpType::Unnecessary: return "U";
    case OpType::WordOrder: return "WO";
  }
  return "?";
}

OpType classify_op_level(int start, int end, const Tokens& correction, const Tokens& source) {
  if (start < 0 || end < start || end > static_cast<int>(source.size())) {
    throw ValidationError("classify_op_level: invalid span");
  }
  if (start == end) return OpType::Missing;
  if (correction.empty()) return OpType::Unnecessary;
  Tokens span(source.begin() + start, source.begin() + end);
  if (span != correction) {
    Tokens a = span, b = correction;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    if (a == b) return OpType::WordOrder;
  }
  return OpType::Replacement;
}

OpType classify_op_level(const HypEdit& edit, const Tokens& source) {
  return classify_op_level(edit.start, edit.end, edit.correction, source);
}

OpType classify_op_level(const GoldEdit& edit, const Tokens& source) {
  return classify_op_level(edit.start, edit.end, edit.correction, source);
}

std::map<OpType, EvalResult> breakdown(const std::vector<Tokens>& sources,
                                       const std::vector<Tokens>& hypotheses,
                                       const AnnotatedCorpus& gold, double beta) {
  const M2Detail detail = m2_score_detailed(sources, hypotheses, gold, beta);
  std::map<OpType, std::array<long long, 3>> counts;  // tp, fp, fn
  for (OpType t : {OpType::Replacement, OpType::Missing, OpType::Unnecessary, OpType::WordOrder}) {
    counts[t] = {0, 0, 0};
  }
  for (std::size_t i = 0; i < detail.sentences.size(); ++i) {
    const Tokens& source = sources[i];
    const SentenceOutcome& outcome = detail.sentences[i];
    for (const GoldEdit& g : outcome.matched_gold) counts[classify_op_level(g, source)][0]++;
    for (const HypEdit& h : outcome.unmatched_hyp) counts[classify_op_level(h, source)][1]++;
    for (const GoldEdit& g : outcome.unmatched_gold) counts[classify_op_level(g, source)][2]++;
  }
  std::map<OpType, EvalResult> results;
  for (const auto& [type, c] : counts) {
    results[type] = EvalResult::from_counts(c[0], c[1], c[2], beta);
  }
  return results;
}

// ---------------------------------------------------------------------------
// Paired t-test
// ---------------------------------------------------------------------------

namespace {

// Continued-fraction evaluation of the incomplete beta (Lentz's method).
double betacf(double a, double b, double x) {
  constexpr int kMaxIter = 300;
  constexpr double kEps = 3e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h;
}

// Regularized incomplete beta I_x(a, b).
double ibeta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                          a * std::log(x) + b * std::log(1.0 - x);
  const double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * betacf(a, b, x) / a;
  }
  return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

}  // namespace

double student_t_two_sided_p(double t, int df) {
  if (df < 1) throw ValidationError("student_t_two_sided_p: df must be >= 1");
  const double x = static_cast<double>(df) / (static_cast<double>(df) + t * t);
  return ibeta(static_cast<double>(df) / 2.0, 0.5, x);
}

double paired_t_test(const std::vector<double>& scores_a, const std::vector<double>& scores_b) {
  if (scores_a.size() != scores_b.size()) {
    throw ValidationError("paired_t_test: score lists differ in length");
  }
  const std::size_t n = scores_a.size();
  if (n < 2) throw ValidationError("paired_t_test: need at least 2 paired scores");

  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) mean += scores_a[i] - scores_b[i];
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = scores_a[i] - scores_b[i] - mean;
    var += d * d;
  }
  var /= static_cast<double>(n - 1);
  if (var == 0.0) {
    // Degenerate zero-variance convention, documented: identical systems are
    // maximally insignificant, a constant shift maximally significant.
    return mean == 0.0 ? 1.0 : 0.0;
  }
  const double t = mean / std::sqrt(var / static_cast<double>(n));
  return student_t_two_sided_p(t, static_cast<int>(n) - 1);
}

// ---------------------------------------------------------------------------
// Stage reports
// ---------------------------------------------------------------------------

StageReport make_stage_report(std::vector<StageEntry> stages,
                              std::optional<Significance> significance) {
  if (stages.empty()) throw ValidationError("stage_report: need at least one stage");
  return StageReport{std::move(stages), std::move(significance)};
}

namespace {

nlohmann::json result_to_json(const EvalResult& r) {
  return {{"tp", r.tp},       {"fp", r.fp},           {"fn", r.fn},
          {"precision", r.precision}, {"recall", r.recall}, {"f_half", r.f_half}};
}

EvalResult result_from_json(const nlohmann::json& j) {
  EvalResult r;
  r.tp = j.at("tp").get<long long>();
  r.fp = j.at("fp").get<long long>();
  r.fn = j.at("fn").get<long long>();
  r.precision = j.at("precision").get<double>();
  r.recall = j.at("recall").get<double>();
  r.f_half = j.at("f_half").get<double>();
  return r;
}

}  // namespace

std::string report_to_json(const StageReport& report) {
  nlohmann::json stages = nlohmann::json::array();
  for (const StageEntry& stage : report.stages) {
    nlohmann::json entry = result_to_json(stage.overall);
    entry["name"] = stage.name;
    nlohmann::json by_type;
    for (const auto& [type, result] : stage.by_type) {
      by_type[short_label(type)] = result_to_json(result);
    }
    entry["by_type"] = std::move(by_type);
    stages.push_back(std::move(entry));
  }
  nlohmann::json j{{"stages", std::move(stages)}};
  if (report.significance) {
    j["significance"] = {{"vs", report.significance->vs},
                         {"p_value", report.significance->p_value}};
  } else {
    j["significance"] = nullptr;
  }
  return j.dump(2) + "\n";
}

StageReport report_from_json(const std::string& json_text) {
  nlohmann::json j = nlohmann::json::parse(json_text);
  StageReport report;
  for (const auto& s : j.at("stages")) {
    StageEntry entry;
    entry.name = s.at("name").get<std::string>();
    entry.overall = result_from_json(s);
    if (s.contains("by_type")) {
      for (OpType t :
           {OpType::Replacement, OpType::Missing, OpType::Unnecessary, OpType::WordOrder}) {
        if (s["by_type"].contains(short_label(t))) {
          entry.by_type[t] = result_from_json(s["by_type"][short_label(t)]);
        }
      }
    }
    report.stages.push_back(std::move(entry));
  }
  if (j.contains("significance") && !j["significance"].is_null()) {
    report.significance = Significance{j["significance"].at("vs").get<std::string>(),
                                       j["significance"].at("p_value").get<double>()};
  }
  return report;
}

std::string render_report_table(const StageReport& report) {
  std::string out;
  char line[160];
  std::snprintf(line, sizeof(line), "%-12s %6s %6s %6s %8s %8s %8s\n", "stage", "tp", "fp", "fn",
                "prec", "rec", "f0.5");
  out += line;
  auto row = [&](const std::string& name, const EvalResult& r) {
    std::snprintf(line, sizeof(line), "%-12s %6lld %6lld %6lld %8.4f %8.4f %8.4f\n", name.c_str(),
                  r.tp, r.fp, r.fn, r.precision, r.recall, r.f_half);
    out += line;
  };
  for (const StageEntry& stage : report.stages) {
    row(stage.name, stage.overall);
  }
  for (const StageEntry& stage : report.stages) {
    if (stage.by_type.empty()) continue;
    out += "\n[" + stage.name + "] by operation type\n";
    for (const auto& [type, result] : stage.by_type) {
      row(std::string("  ") + short_label(type), result);
    }
  }
  if (report.significance) {
    std::snprintf(line, sizeof(line), "\nsignificance vs %s: p = %.6f\n",
                  report.significance->vs.c_str(), report.significance->p_value);
    out += line;
  }
  return out;
}

}  // namespace geccl
