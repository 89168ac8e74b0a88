#include "geccl/corpus.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "geccl/errors.hpp"

namespace geccl {

namespace {

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) {
      if (pos < text.size()) lines.push_back(text.substr(pos));
      break;
    }
    lines.push_back(text.substr(pos, nl - pos));
    pos = nl + 1;
  }
  return lines;
}

int parse_int(std::string_view field, const std::string& context) {
  int value = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size()) {
    throw ParseError(context + ": expected integer, got '" + std::string(field) + "'");
  }
  return value;
}

std::vector<std::string_view> split_on(std::string_view s, std::string_view sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t hit = s.find(sep, pos);
    if (hit == std::string_view::npos) {
      out.push_back(s.substr(pos));
      return out;
    }
    out.push_back(s.substr(pos, hit - pos));
    pos = hit + sep.size();
  }
}

}  // namespace

Tokens split_tokens(std::string_view text) {
  Tokens tokens;
  if (text.empty()) return tokens;
  for (std::string_view part : split_on(text, " ")) {
    tokens.emplace_back(part);
  }
  return tokens;
}

std::string join_tokens(const Tokens& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += ' ';
    out += tokens[i];
  }
  return out;
}

std::vector<ParallelExample> parse_parallel(std::string_view tsv_text) {
  std::vector<ParallelExample> examples;
  const auto lines = split_lines(tsv_text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string_view line = lines[i];
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(i + 1);

    const std::size_t tab = line.find('\t');
    if (tab == std::string_view::npos || line.find('\t', tab + 1) != std::string_view::npos) {
      throw ParseError(where + ": expected exactly one tab between source and target");
    }
    ParallelExample ex;
    ex.id = static_cast<int>(examples.size());
    ex.source = split_tokens(line.substr(0, tab));
    ex.target = split_tokens(line.substr(tab + 1));
    if (ex.source.empty()) throw ParseError(where + ": empty source");
    if (ex.target.empty()) throw ParseError(where + ": empty target");
    for (const auto& side : {ex.source, ex.target}) {
      for (const auto& tok : side) {
        if (tok.empty()) throw ParseError(where + ": empty token (double space)");
      }
    }
    ex.identical = ex.source == ex.target;
    examples.push_back(std::move(ex));
  }
  return examples;
}

std::vector<ParallelExample> deduplicate(const std::vector<ParallelExample>& examples) {
  std::vector<ParallelExample> kept;
  std::map<std::pair<std::string, std::string>, bool> seen;
  for (const ParallelExample& ex : examples) {
    auto key = std::make_pair(join_tokens(ex.source), join_tokens(ex.target));
    if (seen.emplace(std::move(key), true).second) {
      ParallelExample copy = ex;
      copy.id = static_cast<int>(kept.size());
      kept.push_back(std::move(copy));
    }
  }
  return kept;
}

std::pair<std::vector<ParallelExample>, std::vector<ParallelExample>>
partition_identical(const std::vector<ParallelExample>& examples) {
  std::pair<std::vector<ParallelExample>, std::vector<ParallelExample>> out;
  for (const ParallelExample& ex : examples) {
    (ex.identical ? out.second : out.first).push_back(ex);
  }
  return out;
}

std::map<int, std::vector<GoldEdit>> AnnotatedSentence::edits_by_annotator() const {
  std::map<int, std::vector<GoldEdit>> groups;
  for (const GoldEdit& edit : edits) {
    auto& group = groups[edit.annotator];
    if (!edit.is_noop()) group.push_back(edit);
  }
  if (groups.empty()) groups[0] = {};
  return groups;
}

AnnotatedCorpus parse_m2(std::string_view text) {
  AnnotatedCorpus corpus;
  const auto lines = split_lines(text);

  bool in_block = false;
  int block_index = 0;  // 1-based once a block starts
  int max_annotator = -1;
  std::vector<bool> annotators_seen;

  auto note_annotator = [&](int id) {
    if (id < 0) throw ParseError("block " + std::to_string(block_index) + ": negative annotator id");
    if (id >= static_cast<int>(annotators_seen.size())) annotators_seen.resize(id + 1, false);
    annotators_seen[id] = true;
    if (id > max_annotator) max_annotator = id;
  };

  for (const std::string_view line : lines) {
    if (line.empty()) {
      in_block = false;
      continue;
    }
    if (line.rfind("S ", 0) == 0) {
      if (in_block) {
        throw ParseError("block " + std::to_string(block_index) + ": second S line in block");
      }
      in_block = true;
      ++block_index;
      AnnotatedSentence sentence;
      sentence.source = split_tokens(line.substr(2));
      if (sentence.source.empty()) {
        throw ParseError("block " + std::to_string(block_index) + ": empty S line");
      }
      corpus.sentences.push_back(std::move(sentence));
      continue;
    }
    if (line.rfind("A ", 0) == 0) {
      if (!in_block) {
        throw ParseError("A line without preceding S line (block " +
                         std::to_string(block_index + 1) + ")");
      }
      const std::string where = "block " + std::to_string(block_index);
      const auto fields = split_on(line.substr(2), "|||");
      if (fields.size() != 6) {
        throw ParseError(where + ": expected 6 |||-separated fields, got " +
                         std::to_string(fields.size()));
      }
      const std::size_t space = fields[0].find(' ');
      if (space == std::string_view::npos) {
        throw ParseError(where + ": span must be '<start> <end>'");
      }
      GoldEdit edit;
      edit.start = parse_int(fields[0].substr(0, space), where);
      edit.end = parse_int(fields[0].substr(space + 1), where);
      edit.etype = std::string(fields[1]);
      if (fields[2] != "-NONE-") edit.correction = split_tokens(fields[2]);
      edit.annotator = parse_int(fields[5], where);
      note_annotator(edit.annotator);

      const int source_len = static_cast<int>(corpus.sentences.back().source.size());
      if (edit.start == -1 || edit.end == -1 || edit.etype == "noop") {
        if (!(edit.start == -1 && edit.end == -1 && edit.etype == "noop")) {
          throw ParseError(where + ": noop edits must be '-1 -1' with type 'noop'");
        }
        if (!edit.correction.empty()) {
          throw ParseError(where + ": noop edits must carry -NONE- correction");
        }
      } else {
        if (edit.start < 0 || edit.start > edit.end || edit.end > source_len) {
          throw ParseError(where + ": edit span " + std::to_string(edit.start) + ".." +
                           std::to_string(edit.end) + " out of bounds for " +
                           std::to_string(source_len) + " tokens");
        }
      }
      corpus.sentences.back().edits.push_back(std::move(edit));
      continue;
    }
    throw ParseError("block " + std::to_string(block_index + (in_block ? 0 : 1)) +
                     ": unrecognized line '" + std::string(line.substr(0, 20)) + "'");
  }

  for (int a = 0; a <= max_annotator; ++a) {
    if (!annotators_seen[a]) {
      throw ParseError("annotator ids are not contiguous: id " + std::to_string(a) +
                       " missing while " + std::to_string(max_annotator) + " present");
    }
  }
  return corpus;
}

std::string write_m2(const AnnotatedCorpus& corpus) {
  std::string out;
  for (std::size_t i = 0; i < corpus.sentences.size(); ++i) {
    if (i) out += '\n';
    const AnnotatedSentence& sentence = corpus.sentences[i];
    out += "S " + join_tokens(sentence.source) + "\n";
    for (const GoldEdit& edit : sentence.edits) {
      out += "A " + std::to_string(edit.start) + " " + std::to_string(edit.end) + "|||" +
             edit.etype + "|||" +
             (edit.correction.empty() ? std::string("-NONE-") : join_tokens(edit.correction)) +
             "|||REQUIRED|||-NONE-|||" + std::to_string(edit.annotator) + "\n";
    }
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError("cannot write file: " + path);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw ValidationError("short write: " + path);
}

}  // namespace geccl
