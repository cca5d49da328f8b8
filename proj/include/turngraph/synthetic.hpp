#pragma once

#include <random>
#include <string>

#include "turngraph/corpus.hpp"

namespace turngraph {

// Hermetic cue-speaker task. Each dialogue hides one cue token (of two) in
// some turn, names a subject speaker (argument 1) and an entity token
// (argument 2), and the label encodes (cue identity, cue turn spoken by the
// subject): label = 2 * cue_index + same_speaker, four classes total.
// With cue_position = final the cue sits in the last turn while both
// arguments are mentioned in turn 1, so prefix truncation discards the cue.
enum class CuePosition { any, final };

struct SyntheticOptions {
  int train_count = 200;
  int dev_count = 50;
  int test_count = 50;
  unsigned long long seed = 7;
  CuePosition cue_position = CuePosition::any;
};

CuePosition parse_cue_position(const std::string& text);  // "any" | "final"

CorpusSchema synthetic_schema();

// One split. The rng stream is consumed in instance order, so a fixed
// (seed, prefix, count) always yields the same corpus.
Corpus gen_synthetic(int count, std::mt19937_64& rng, CuePosition cue_position,
                     const std::string& id_prefix);

// Writes train.jsonl, dev.jsonl, test.jsonl and schema.json under out_dir.
void write_synthetic(const SyntheticOptions& options, const std::string& out_dir);

}  // namespace turngraph
