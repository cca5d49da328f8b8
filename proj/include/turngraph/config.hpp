#pragma once

#include <iosfwd>
#include <map>
#include <string>

namespace turngraph {

// Every field is addressable in the flat key=value config format under the
// exact field name. Paths stay empty when unused by a subcommand.
struct RunConfig {
  // paths
  std::string train_path;
  std::string dev_path;
  std::string test_path;
  std::string schema_path;
  std::string checkpoint_dir;
  std::string checkpoint_path;
  std::string report_path;
  std::string symmetry_map_path;

  // model dims
  int dim = 32;
  int ff_dim = 64;
  int layers = 2;
  int heads = 4;
  int gcn_layers = 2;
  int gtn_steps = 2;
  int k_max = 2;
  int max_len = 128;
  int max_speakers = 8;

  // optimizer
  double learning_rate = 0.2;
  int epochs = 50;
  int batch_size = 8;
  unsigned long long seed = 1;
  double dropout = 0.0;
  // Stop once train micro-F1 reaches this value; <= 0 disables the check.
  double early_stop_f1 = 0.0;

  // ablations
  bool no_turn_mask = false;
  bool no_special_tokens = false;
  bool intra_turn_only = false;

  // metric selection
  bool report_f1c = false;
  bool report_excl_neutral = false;
  bool report_length_groups = false;
  int neutral_class = -1;  // -1: take the schema's neutral class, if any
};

// Missing keys keep defaults; unknown keys raise UNKNOWN_KEY, bad values
// BAD_VALUE. Enforces the invariants (heads divide dim, k_max in {1,2},
// positive dims) and normalizes no_special_tokens to imply no_turn_mask.
RunConfig parse_config(std::istream& stream);
RunConfig load_config_file(const std::string& path);
RunConfig config_from_pairs(const std::map<std::string, std::string>& pairs);

// The raw key=value lines (comments and blanks skipped), before validation.
// Lets callers overlay overrides ahead of config_from_pairs.
std::map<std::string, std::string> read_config_pairs(std::istream& stream);

void validate_config(const RunConfig& config);

// Canonical key=value rendering, fixed key order; parse(serialize(c)) == c.
std::string serialize_config(const RunConfig& config);

// Fields that must agree between a checkpoint and an evaluation run for the
// forward pass to be meaningful (dims, ablations, sequence limits).
bool config_model_compatible(const RunConfig& a, const RunConfig& b);

}  // namespace turngraph
