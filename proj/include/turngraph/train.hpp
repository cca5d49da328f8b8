#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "turngraph/checkpoint.hpp"
#include "turngraph/config.hpp"
#include "turngraph/corpus.hpp"
#include "turngraph/metrics.hpp"
#include "turngraph/model.hpp"

namespace turngraph {

struct EpochLog {
  int epoch = 0;  // 1-based
  double train_loss = 0.0;
  std::optional<double> train_micro_f1;  // present when early stopping is on
  std::optional<double> dev_micro_f1;
};

struct TrainResult {
  Model model;
  std::vector<EpochLog> logs;
  int epochs_run = 0;
};

// Mini-batch SGD: per batch the mean of per-instance cross-entropy
// gradients, instance order reshuffled each epoch from the config seed.
// Logs one line per epoch; a non-finite loss aborts with NONFINITE_LOSS.
TrainResult train_on(const RunConfig& config, const Corpus& train_corpus,
                     const Corpus* dev_corpus, std::ostream& log);

// Loads corpora from the config paths, trains, writes
// <checkpoint_dir>/model.ckpt when checkpoint_dir is set.
TrainResult train(const RunConfig& config, std::ostream& log);

std::vector<Prediction> predict_corpus(const Model& model, const Corpus& corpus);

// Micro-F1 over prefix-truncated re-encodings of the k=2 instances.
double evaluate_f1c(const Model& model, const Corpus& corpus);

// Full report per the eval config's metric selection (f1c, neutral
// exclusion, symmetry/length breakdowns). Group names get a "sym:" or
// "len:" prefix so both groupings can coexist in one report.
MetricReport evaluate_corpus(const Model& model, const Corpus& corpus,
                             const RunConfig& eval_config);

// Checkpoint-vs-corpus compatibility guard; raises CONFIG_MISMATCH.
void check_evaluation_compatible(const Model& model, const Corpus& corpus);

extern const std::vector<std::string> kAblationVariants;  // full, no_mask, ...

// Returns the config with exactly the named variant's ablation flags set.
RunConfig apply_variant(const RunConfig& base, const std::string& variant);

// Trains every variant on the same data and seed; returns the comparative
// report text (variant summary lines, then one metric block per variant).
std::string ablate(const RunConfig& config, std::ostream& log);

// "class_name<TAB or space>group" lines; used for the symmetry breakdown.
std::vector<std::string> load_class_group_map(const std::string& path,
                                              const std::vector<std::string>& class_names);

// Whitespace token count over speakers and texts; the length bucket key.
long dialogue_token_length(const Instance& inst);

}  // namespace turngraph
