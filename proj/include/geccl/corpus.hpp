#pragma once

#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace geccl {

// All data is pre-tokenized; tokens are separated by single spaces.
using Tokens = std::vector<std::string>;

Tokens split_tokens(std::string_view text);
std::string join_tokens(const Tokens& tokens);

// One source/target sentence pair of a parallel GEC corpus.
struct ParallelExample {
  int id = 0;
  Tokens source;
  Tokens target;
  bool identical = false;

  bool operator==(const ParallelExample&) const = default;
};

// One gold edit in M2 annotation: replace source[start, end) with the
// correction. start == end is an insertion. start == end == -1 with etype
// "noop" marks an annotator who proposed no change for the sentence.
struct GoldEdit {
  int start = 0;
  int end = 0;
  std::string etype;
  Tokens correction;
  int annotator = 0;

  bool is_noop() const { return start == -1 && end == -1; }
  bool operator==(const GoldEdit&) const = default;
};

struct AnnotatedSentence {
  Tokens source;
  std::vector<GoldEdit> edits;  // file order, each edit carries its annotator

  // Edits grouped by annotator id. Annotators with only a noop line map to an
  // empty group; a sentence with no A lines at all yields {0: []}.
  std::map<int, std::vector<GoldEdit>> edits_by_annotator() const;

  bool operator==(const AnnotatedSentence&) const = default;
};

struct AnnotatedCorpus {
  std::vector<AnnotatedSentence> sentences;

  bool operator==(const AnnotatedCorpus&) const = default;
};

// Parses tab-separated source/target pairs, one per line, UTF-8, LF endings.
// Ids are assigned in file order starting at 0. Throws ParseError with the
// 1-based line number on a malformed line.
std::vector<ParallelExample> parse_parallel(std::string_view tsv_text);

// Drops later exact (source, target) duplicates, keeps first occurrences in
// order, reassigns ids densely from 0.
std::vector<ParallelExample> deduplicate(const std::vector<ParallelExample>& examples);

// Splits into (changed, identical). Only changed pairs are eligible for
// difficulty scoring.
std::pair<std::vector<ParallelExample>, std::vector<ParallelExample>>
partition_identical(const std::vector<ParallelExample>& examples);

// Parses M2 annotation blocks: one "S <tokens>" line followed by zero or more
// "A <start> <end>|||<type>|||<correction>|||<required>|||-NONE-|||<annotator>"
// lines, blank line between blocks. Offsets are validated against the source;
// malformed blocks throw ParseError with the 1-based block index.
AnnotatedCorpus parse_m2(std::string_view text);

// Canonical M2 writer; parse_m2(write_m2(c)) == c, and write_m2(parse_m2(t))
// is byte-identical for canonical input.
std::string write_m2(const AnnotatedCorpus& corpus);

// Small file helpers shared by the CLI and pipeline.
std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

}  // namespace geccl
