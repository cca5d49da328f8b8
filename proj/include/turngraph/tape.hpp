#pragma once

#include <Eigen/Dense>
#include <functional>
#include <random>
#include <utility>
#include <vector>

#include "turngraph/error.hpp"
#include "turngraph/mask.hpp"

namespace turngraph {

using Mat = Eigen::MatrixXd;

namespace ad {

// Reverse-mode accumulation over dense matrices. Every op appends one node;
// creation order is a topological order, so backward() is a single reverse
// sweep. A tape lives for one forward/backward pass over one instance.
//
// Node ids stay valid for the lifetime of the tape. Gradients are allocated
// eagerly with the node and accumulated additively.
class Tape {
 public:
  int leaf(Mat value);

  const Mat& val(int id) const { return nodes_[static_cast<size_t>(id)].value; }
  const Mat& grad(int id) const { return nodes_[static_cast<size_t>(id)].grad; }
  int size() const { return static_cast<int>(nodes_.size()); }

  // Seeds d(root)/d(root) = 1 and sweeps the tape in reverse. root must be
  // a 1x1 node.
  void backward(int root);

  // ---- elementwise / structural ----
  int add(int a, int b);
  int scale(int a, double s);
  int add_row_broadcast(int a, int bias);  // (r x c) + broadcast of (1 x c)
  int relu(int a);
  int gelu(int a);  // exact erf form
  int slice_cols(int a, int col0, int ncols);
  int concat_cols(const std::vector<int>& parts);
  int concat_rows(const std::vector<int>& parts);
  int pick_rows(int a, std::vector<int> rows);      // gather, scatter-add back
  int mean_rows_segments(int a, std::vector<std::pair<int, int>> segments);
  int pad_rows(int a, int total_rows);              // append zero rows
  int reshape_to_row(int a);                        // row-major flatten to 1 x (r*c)
  int dropout(int a, double rate, std::mt19937_64& rng);  // inverted scaling

  // Row gather that treats id 0 as a fixed all-zero row: no value is read
  // from row 0 and no gradient flows into it.
  int embed_rows_zero_guarded(int table, std::vector<int> ids);

  // ---- linear algebra ----
  int matmul(int a, int b);     // A * B
  int matmul_nt(int a, int b);  // A * B^T

  // ---- normalization / attention ----
  // Additive -1e9 on disallowed logits, max-subtracted softmax per row, then
  // an exact zeroing multiply by the mask. Disallowed weights are exactly 0
  // and allowed weights sum to 1. Throws EMPTY_MASK_ROW on an all-false row.
  int masked_softmax_rows(int logits, AttentionMask mask);
  int layer_norm_rows(int x, int gain, int bias, double eps = 1e-5);

  // ---- graph ----
  // Row-normalizes (A + I): out[i] = (A + I)[i] / rowsum_i(A + I).
  int row_normalize_self_loops(int a);
  // Convex channel mixture: sum_c softmax(logits)[0,c] * channels[c].
  int channel_mix(int logits, std::vector<Mat> channels);

  // ---- losses ----
  // -log softmax(logits)[gold] with max subtraction; logits is 1 x C.
  int cross_entropy_row(int logits, int gold);

 private:
  struct Node {
    Mat value;
    Mat grad;
    std::function<void()> back;  // accumulates into parents' grads
  };

  int push(Mat value, std::function<void()> back = {});
  Mat& grad_mut(int id) { return nodes_[static_cast<size_t>(id)].grad; }

  std::vector<Node> nodes_;
};

}  // namespace ad
}  // namespace turngraph
