#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "geccl/corpus.hpp"

namespace geccl {

// Desk-scale stand-in for a real GEC training corpus: correct base sentences
// from a small template grammar, with errors planted by difficulty class.
struct SyntheticSpec {
  int n_pairs = 2000;
  double identity_rate = 0.4;
  int n_dev = 150;
  int n_test = 200;
  double noop_rate = 0.15;  // fraction of dev/test sentences left error-free

  // Class mix among the changed training pairs (normalized internally).
  double easy_weight = 0.38;
  double medium_weight = 0.35;
  double hard_weight = 0.27;

  std::uint64_t seed = 42;

  // Planted rule inventory. Easy: single-token substitutions (correct token ->
  // corrupted form). Medium: function words inserted spuriously or dropped.
  // Hard: reorder window sizes.
  std::vector<std::pair<std::string, std::string>> easy_substitutions;
  std::vector<std::string> medium_insertables;
  std::vector<std::string> medium_deletables;
  std::vector<int> hard_windows;

  static SyntheticSpec with_defaults();
};

struct PlantedExample {
  int id = 0;
  std::string label;  // identical | easy | medium | hard
  GoldEdit edit;      // on the source; noop for identical pairs
};

struct SyntheticCorpus {
  std::string parallel_tsv;
  std::string gold_dev_m2;
  std::string gold_test_m2;
  std::string sidecar_json;

  // Generator bookkeeping, also encoded in the sidecar.
  std::vector<PlantedExample> planted;
  std::map<std::string, int> class_counts;
  std::vector<Tokens> dev_targets;   // corrected dev sentences
  std::vector<Tokens> test_targets;  // corrected test sentences
};

// Deterministic under spec.seed. Generated (source, target) pairs are unique,
// so deduplication is a no-op and sidecar ids line up with parse order.
SyntheticCorpus gen_synthetic(const SyntheticSpec& spec);

// JSON round-trip for the spec so runs can archive it.
std::string synthetic_spec_to_json(const SyntheticSpec& spec);
SyntheticSpec synthetic_spec_from_json(const std::string& json_text);

}  // namespace geccl
