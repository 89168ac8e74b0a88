#pragma once

// Brute-force M2 scoring oracle for tests. Independent of the library's
// lattice implementation: it rebuilds the Levenshtein matrices from scratch,
// enumerates every optimal alignment path by forward+backward distance
// checks, tries every legal merge segmentation per path, and scores the
// matching as a multiset intersection.

#include <string>
#include <vector>

#include "geccl/corpus.hpp"

namespace geccl::oracle {

struct SentenceCounts {
  long long tp = 0;
  long long fp = 0;
  long long fn = 0;
  int annotator = 0;
  double f = 1.0;
};

SentenceCounts score_sentence(const Tokens& source, const Tokens& hypothesis,
                              const AnnotatedSentence& gold, double beta = 0.5,
                              int max_unchanged = 2);

struct CorpusCounts {
  long long tp = 0;
  long long fp = 0;
  long long fn = 0;
};

CorpusCounts m2_counts(const std::vector<Tokens>& sources, const std::vector<Tokens>& hypotheses,
                       const AnnotatedCorpus& gold, double beta = 0.5, int max_unchanged = 2);

}  // namespace geccl::oracle
