#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "geccl/corpus.hpp"

namespace geccl {

struct EvalResult {
  long long tp = 0;
  long long fp = 0;
  long long fn = 0;
  double precision = 1.0;  // 1.0 on an empty denominator
  double recall = 1.0;
  double f_half = 1.0;

  static EvalResult from_counts(long long tp, long long fp, long long fn, double beta = 0.5);
  bool operator==(const EvalResult&) const = default;
};

// (1 + b^2) P R / (b^2 P + R); 0 when P = R = 0, and P (R) is 1 when its
// denominator is empty.
double f_beta(long long tp, long long fp, long long fn, double beta);

// A hypothesis-side edit: replace source[start, end) with the correction.
struct HypEdit {
  int start = 0;
  int end = 0;
  Tokens correction;

  bool operator==(const HypEdit&) const = default;
};

using EditDecomposition = std::vector<HypEdit>;

// Alignment lattice between a source sentence and a hypothesis. Vertices are
// Levenshtein matrix cells on optimal paths; atomic edges are single edit ops;
// composite edges merge adjacent edits separated by at most max_unchanged
// unchanged tokens. Every (0,0) -> (n,m) path is one way of decomposing the
// hypothesis into edits.
struct EditLattice {
  struct Edge {
    int from = 0;
    int to = 0;
    bool noop = false;  // a single matched token; contributes no edit
    HypEdit edit;       // meaningful when !noop
  };

  std::vector<std::pair<int, int>> vertices;  // (i, j), topologically ordered
  std::vector<Edge> edges;
  std::vector<std::vector<int>> out_edges;  // vertex -> edge indices
  int start = 0;
  int end = 0;

  // Enumerates decompositions by path DFS. Exact but exponential; meant for
  // short sentences and tests.
  std::vector<EditDecomposition> decompositions(std::size_t limit = 100000) const;
};

EditLattice hypothesis_edits(const Tokens& source, const Tokens& hypothesis,
                             int max_unchanged = 2);

// Per-sentence scoring outcome under the chosen annotator.
struct SentenceOutcome {
  int annotator = 0;
  long long tp = 0;
  long long fp = 0;
  long long fn = 0;
  double f = 1.0;
  std::vector<GoldEdit> matched_gold;
  std::vector<GoldEdit> unmatched_gold;
  std::vector<HypEdit> unmatched_hyp;
};

// Maximal matching for one sentence: for every annotator pick the
// decomposition maximizing matched gold edits (exact span + correction), with
// fewest proposed edits among those; then keep the annotator with the best
// sentence-level F_beta (ties: lower id). Gold noop edits count as an empty
// annotation.
SentenceOutcome score_sentence(const Tokens& source, const Tokens& hypothesis,
                               const AnnotatedSentence& gold, double beta = 0.5,
                               int max_unchanged = 2);

struct M2Detail {
  EvalResult overall;
  std::vector<SentenceOutcome> sentences;
  std::vector<double> sentence_f;  // per-sentence F_beta, the t-test unit
};

EvalResult m2_score(const std::vector<Tokens>& sources, const std::vector<Tokens>& hypotheses,
                    const AnnotatedCorpus& gold, double beta = 0.5);
M2Detail m2_score_detailed(const std::vector<Tokens>& sources,
                           const std::vector<Tokens>& hypotheses, const AnnotatedCorpus& gold,
                           double beta = 0.5, int max_unchanged = 2);

// Operation-level error taxonomy.
enum class OpType { Replacement, Missing, Unnecessary, WordOrder };

const char* to_string(OpType type);
const char* short_label(OpType type);  // R / M / U / WO

// Insertion -> Missing, deletion -> Unnecessary, same token multiset in a new
// order -> WordOrder, anything else -> Replacement.
OpType classify_op_level(int start, int end, const Tokens& correction, const Tokens& source);
OpType classify_op_level(const HypEdit& edit, const Tokens& source);
OpType classify_op_level(const GoldEdit& edit, const Tokens& source);

// Per-type tp/fp/fn using the same per-sentence outcomes as m2_score; the
// per-type counts sum to the overall ones.
std::map<OpType, EvalResult> breakdown(const std::vector<Tokens>& sources,
                                       const std::vector<Tokens>& hypotheses,
                                       const AnnotatedCorpus& gold, double beta = 0.5);

// Two-sided paired t-test on per-sentence scores. Zero-variance differences:
// p = 1 when the mean difference is 0, else p = 0.
double paired_t_test(const std::vector<double>& scores_a, const std::vector<double>& scores_b);

// Two-sided tail probability of Student's t via the regularized incomplete
// beta function.
double student_t_two_sided_p(double t, int df);

struct StageEntry {
  std::string name;
  EvalResult overall;
  std::map<OpType, EvalResult> by_type;
};

struct Significance {
  std::string vs;
  double p_value = 1.0;
};

struct StageReport {
  std::vector<StageEntry> stages;
  std::optional<Significance> significance;
};

StageReport make_stage_report(std::vector<StageEntry> stages,
                              std::optional<Significance> significance = std::nullopt);
std::string report_to_json(const StageReport& report);
StageReport report_from_json(const std::string& json_text);
std::string render_report_table(const StageReport& report);

}  // namespace geccl
