#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "turngraph/error.hpp"

namespace turngraph {

// One (speaker, utterance) pair of a dialogue.
struct Turn {
  std::string speaker;
  std::string text;
};

// Query arguments q_1..q_k. k=2 for relation-style tasks, k=1 for
// utterance classification.
struct Query {
  std::vector<std::string> arguments;
};

// One classification example: dialogue + query + gold label index.
struct Instance {
  std::string id;
  std::vector<Turn> turns;
  Query query;
  int label = -1;
};

struct CorpusSchema {
  std::vector<std::string> class_names;
  std::optional<int> neutral_class;
};

struct Corpus {
  std::vector<Instance> instances;
  std::vector<std::string> class_names;
  std::optional<int> neutral_class;

  int class_count() const { return static_cast<int>(class_names.size()); }
};

// Whitespace tokenization. All token-level matching in the project is
// case-sensitive and whole-token.
std::vector<std::string> tokenize(std::string_view text);

// True iff `pattern` occurs as a contiguous subsequence of `tokens`.
bool contains_token_seq(const std::vector<std::string>& tokens,
                        const std::vector<std::string>& pattern);

// Checks every Instance invariant. Codes: NO_TURNS, EMPTY_SPEAKER,
// EMPTY_TEXT, NO_ARGS, TOO_MANY_ARGS, EMPTY_ARG, EMPTY_ID,
// LABEL_OUT_OF_RANGE, ARG_NOT_MENTIONED. An argument counts as mentioned if
// it equals some turn's speaker or occurs whole-token in some turn's text.
ValidationReport validate_instance(const Instance& inst, int class_count);

// Loads the sidecar schema file: {"class_names": [...], "neutral_class": n}.
CorpusSchema load_schema(const std::string& path);

// Parses a line-delimited corpus. One JSON record per line with fields
// `id`, `turns` ([{speaker, text}]), `arguments`, `label` (class name).
// Order-preserving. Throws a data error naming the offending line on
// malformed records, unknown class names, duplicate ids, or any instance
// that fails validate_instance; no partial corpus is ever returned.
Corpus parse_corpus(std::istream& stream, const CorpusSchema& schema);
Corpus parse_corpus_file(const std::string& corpus_path,
                         const std::string& schema_path);

// Writes the record format parse_corpus reads. serialize then re-parse is
// structurally the identity.
void serialize_corpus(const Corpus& corpus, std::ostream& out);
std::string serialize_record(const Instance& inst,
                             const std::vector<std::string>& class_names);

void write_corpus_file(const Corpus& corpus, const std::string& corpus_path);
void write_schema_file(const CorpusSchema& schema, const std::string& path);

// FNV-1a over the serialized corpus; used by the ablation report to show
// all variants saw identical data.
std::string corpus_content_hash(const Corpus& corpus);

}  // namespace turngraph
