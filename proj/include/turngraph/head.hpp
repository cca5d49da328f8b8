#pragma once

#include <random>
#include <vector>

#include "turngraph/tape.hpp"

namespace turngraph {

struct HeadParams {
  Mat weight;  // ((1 + k_max) * d) x C
  Mat bias;    // 1 x C
};

HeadParams init_head_params(int dim, int k_max, int classes, std::mt19937_64& rng);

// logits = concat(dialogue, args, zero pad to k_max slots) * weight + bias.
// Rows are 1 x d each; fewer than k_max arguments leave zero-padded slots.
Mat classify(const Mat& dialogue_node, const std::vector<Mat>& arg_nodes,
             const HeadParams& params, int k_max);

// Tape-level head over refined node features ((1+m+k) x d): keeps the
// dialogue row and the argument rows, zero-pads to 1 + k_max rows, flattens.
int head_logits_on_tape(ad::Tape& tape, int node_features, int num_turns,
                        int num_args, int k_max, int weight, int bias);

// -log softmax(logits)[gold] with max subtraction.
double cross_entropy(const Mat& logits, int gold);

}  // namespace turngraph
