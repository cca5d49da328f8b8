#include "turngraph/head.hpp"

#include <cmath>

#include "turngraph/encoder.hpp"
#include "turngraph/error.hpp"

namespace turngraph {

HeadParams init_head_params(int dim, int k_max, int classes, std::mt19937_64& rng) {
  if (dim < 1 || k_max < 1 || classes < 2) {
    throw config_error("BAD_HEAD_SHAPE", "head needs dim >= 1, k_max >= 1, classes >= 2");
  }
  HeadParams params;
  params.weight = uniform_matrix((1 + k_max) * dim, classes, rng);
  params.bias = Mat::Zero(1, classes);
  return params;
}

Mat classify(const Mat& dialogue_node, const std::vector<Mat>& arg_nodes,
             const HeadParams& params, int k_max) {
  const Eigen::Index d = dialogue_node.cols();
  if (dialogue_node.rows() != 1) {
    throw numeric_error("SHAPE_MISMATCH", "dialogue node must be a single row");
  }
  if (static_cast<int>(arg_nodes.size()) > k_max) {
    throw numeric_error("SHAPE_MISMATCH", "more argument nodes than k_max slots");
  }
  Mat input = Mat::Zero(1, (1 + k_max) * d);
  input.block(0, 0, 1, d) = dialogue_node;
  for (size_t j = 0; j < arg_nodes.size(); ++j) {
    if (arg_nodes[j].rows() != 1 || arg_nodes[j].cols() != d) {
      throw numeric_error("SHAPE_MISMATCH", "argument node shape differs from dialogue node");
    }
    input.block(0, static_cast<Eigen::Index>(1 + j) * d, 1, d) = arg_nodes[j];
  }
  if (params.weight.rows() != input.cols() || params.bias.cols() != params.weight.cols() ||
      params.bias.rows() != 1) {
    throw numeric_error("SHAPE_MISMATCH", "head parameter shapes do not match input");
  }
  return input * params.weight + params.bias;
}

int head_logits_on_tape(ad::Tape& tape, int node_features, int num_turns,
                        int num_args, int k_max, int weight, int bias) {
  std::vector<int> keep = {0};
  for (int j = 0; j < num_args; ++j) keep.push_back(1 + num_turns + j);
  const int picked = tape.pick_rows(node_features, keep);
  const int padded = tape.pad_rows(picked, 1 + k_max);
  const int flat = tape.reshape_to_row(padded);
  return tape.add_row_broadcast(tape.matmul(flat, weight), bias);
}

double cross_entropy(const Mat& logits, int gold) {
  if (logits.rows() != 1 || logits.cols() < 2) {
    throw numeric_error("SHAPE_MISMATCH", "logits must be a single row over >= 2 classes");
  }
  if (gold < 0 || gold >= logits.cols()) {
    throw data_error("LABEL_OUT_OF_RANGE", "gold class outside logit range");
  }
  const double max_logit = logits.maxCoeff();
  double denom = 0.0;
  for (Eigen::Index c = 0; c < logits.cols(); ++c) {
    denom += std::exp(logits(0, c) - max_logit);
  }
  return std::log(denom) - (logits(0, gold) - max_logit);
}

}  // namespace turngraph
