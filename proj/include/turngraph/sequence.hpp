#pragma once

#include <string>
#include <utility>
#include <vector>

#include "turngraph/corpus.hpp"
#include "turngraph/vocab.hpp"

namespace turngraph {

// Half-open token interval [begin, end).
struct Span {
  int begin = 0;
  int end = 0;
  int length() const { return end - begin; }
  bool contains(int pos) const { return pos >= begin && pos < end; }
};

// The model input built from one instance. Normative layout:
//   [CLS] (for each turn: [T] speaker ":" text) [SEP] (for each arg: [T] [Sj]) [SEP]
// spans holds one segment per turn then per argument, each including its own
// leading [T]. When special tokens are disabled (ablation), tau_positions is
// empty and spans cover the bare segments.
struct EncodedSequence {
  std::string id;
  std::vector<int> token_ids;
  std::vector<int> speaker_ids;     // 0 = no speaker ([CLS], [SEP], query segment)
  std::vector<int> tau_positions;   // m turn taus then k argument taus
  std::vector<Span> spans;          // m + k segments, same order
  int cls_position = 0;
  int num_turns = 0;
  int num_args = 0;
  int label = -1;
  bool has_special_tokens = true;

  int size() const { return static_cast<int>(token_ids.size()); }
};

struct BuildOptions {
  int max_len = 128;
  bool special_tokens = true;  // false = "w/o special tokens" ablation
};

// Replaces every whole-token occurrence of argument q_j in turn texts, and
// every speaker equal to q_j, with the marker [Sj]. The arguments list is
// rewritten to the markers. Multi-token arguments match a contiguous token
// subsequence; matching is case-sensitive, text is re-joined with single
// spaces.
Instance substitute_arguments(const Instance& inst);

// Assembles the normative token layout from an already-substituted instance.
// Speaker ids are dense by order of first appearance (first speaker -> 1).
// Throws SEQUENCE_TOO_LONG if the result exceeds max_len; never truncates.
EncodedSequence build_sequence(const Instance& inst, const Vocab& vocab,
                               const BuildOptions& options = {});

// Restricts the dialogue to the shortest turn prefix in which every argument
// is either a prefix speaker or occurs whole-token in a prefix turn's text.
// Operates on unsubstituted instances; idempotent. Used by the early-prefix
// F1 variant only.
Instance truncate_to_prefix(const Instance& inst);

// Checks every EncodedSequence invariant; empty report iff all hold.
ValidationReport validate_sequence(const EncodedSequence& seq);

// Plain-text table of tokens, ids, speaker ids and segments; stable output
// for golden-file tests and the inspect-sequence subcommand.
std::string render_sequence_table(const EncodedSequence& seq, const Vocab& vocab);

}  // namespace turngraph
