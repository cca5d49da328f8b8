#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "turngraph/sequence.hpp"
#include "turngraph/tape.hpp"

namespace turngraph {

// Edge channels of the dialogue graph. IDENTITY is the self channel the
// composer can fall back to.
enum EdgeChannel {
  kDialogue = 0,
  kSpeaker = 1,
  kEntity = 2,
  kSequence = 3,
  kIdentity = 4,
};
constexpr int kNumChannels = 5;
extern const char* const kChannelNames[kNumChannels];

// Node layout: 0 = dialogue node, 1..m = turn nodes, m+1..m+k = argument
// nodes. All channels are symmetric 0/1 matrices; only IDENTITY touches the
// diagonal.
struct HetGraph {
  int num_turns = 0;
  int num_args = 0;
  Mat node_features;                        // n x d
  std::array<Mat, kNumChannels> channels;   // n x n each

  int node_count() const { return 1 + num_turns + num_args; }
  static int dialogue_node() { return 0; }
  int turn_node(int i) const { return 1 + i; }           // i in [0, m)
  int arg_node(int j) const { return 1 + num_turns + j; }  // j in [0, k)
};

struct GraphParams {
  std::vector<Mat> channel_logits;            // one 1 x 5 row per composition step
  std::vector<std::pair<Mat, Mat>> gcn;       // per layer: d x d weight, 1 x d bias
};

GraphParams init_graph_params(int dim, int gtn_steps, int gcn_layers,
                              std::mt19937_64& rng);

// Channels only; features left empty. Entity edges come from the marker
// tokens inside each turn span, so mention detection is independent of raw
// text matching.
HetGraph build_graph_structure(const EncodedSequence& seq);

// Structure plus node features copied from the hidden states: row 0 from
// [CLS], turn/argument rows from their tau positions.
HetGraph build_graph(const EncodedSequence& seq, const Mat& hidden);

// Symmetric degree normalization D^-1/2 A D^-1/2; zero-degree rows stay zero.
Mat normalize_channel(const Mat& adjacency);

// ---- tape-level ----
int gtn_compose_on_tape(ad::Tape& tape, const std::vector<int>& logit_ids,
                        const std::array<Mat, kNumChannels>& channels);
int gcn_forward_on_tape(ad::Tape& tape, int adjacency, int features,
                        const std::vector<std::pair<int, int>>& layers);

// ---- plain-value entry points ----

// Soft adjacency: per step a convex channel combination of the normalized
// channels, steps composed by matrix product.
Mat gtn_compose(const HetGraph& graph, const GraphParams& params);

// Per layer X <- ReLU(rownorm(A + I) X W + b); the final layer is linear.
Mat gcn_forward(const Mat& adjacency, const Mat& features, const GraphParams& params);

// gtn_compose then gcn_forward over the graph's own features.
Mat graph_forward(const HetGraph& graph, const GraphParams& params);

// Node list and per-channel edge lists in sorted order; stable output for
// golden-file tests and the inspect-graph subcommand.
std::string render_graph_listing(const EncodedSequence& seq);

}  // namespace turngraph
