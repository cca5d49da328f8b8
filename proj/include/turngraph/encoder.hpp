#pragma once

#include <random>
#include <vector>

#include "turngraph/mask.hpp"
#include "turngraph/sequence.hpp"
#include "turngraph/tape.hpp"

namespace turngraph {

// One post-norm transformer block: projections carry no bias, the
// feed-forward net does.
struct LayerParams {
  Mat wq, wk, wv, wo;          // d x d
  Mat ff_w1, ff_b1;            // d x d_ff, 1 x d_ff
  Mat ff_w2, ff_b2;            // d_ff x d, 1 x d
  Mat ln1_gain, ln1_bias;      // 1 x d
  Mat ln2_gain, ln2_bias;      // 1 x d
};

struct EncoderParams {
  Mat token_emb;    // V x d
  Mat pos_emb;      // N_max x d
  Mat speaker_emb;  // S_max x d; row 0 is a fixed all-zero, non-learnable row
  std::vector<LayerParams> layers;
  int heads = 4;

  int dim() const { return static_cast<int>(token_emb.cols()); }
  int vocab_size() const { return static_cast<int>(token_emb.rows()); }
  int max_len() const { return static_cast<int>(pos_emb.rows()); }
  int max_speakers() const { return static_cast<int>(speaker_emb.rows()); }
};

// Uniform(-0.05, 0.05) for embeddings and weight matrices, zeros for biases,
// layer-norm gain 1 / bias 0. Draw order is fixed: token, position, speaker
// tables, then per layer wq wk wv wo ff_w1 ff_w2.
EncoderParams init_encoder_params(int vocab_size, int dim, int d_ff, int layers,
                                  int heads, int n_max, int s_max,
                                  std::mt19937_64& rng);

Mat uniform_matrix(int rows, int cols, std::mt19937_64& rng, double range = 0.05);

// ---- Tape-level building blocks (used by the training pipeline) ----

// H0[p] = token_emb[id_p] + pos_emb[p] + speaker_emb[speaker_id_p].
int embed_on_tape(ad::Tape& tape, const EncodedSequence& seq, int token_table,
                  int pos_table, int speaker_table);

// Pre-residual multi-head attention output: softmax(Q K^T / sqrt(d/H)) V,
// heads concatenated, times the output projection.
int attention_block_on_tape(ad::Tape& tape, int x, const AttentionMask& mask,
                            int wq, int wk, int wv, int wo, int heads);

struct BoundLayer {
  int wq, wk, wv, wo;
  int ff_w1, ff_b1, ff_w2, ff_b2;
  int ln1_gain, ln1_bias, ln2_gain, ln2_bias;
};

int encoder_layer_on_tape(ad::Tape& tape, int x, const AttentionMask& mask,
                          const BoundLayer& layer, int heads, double dropout_rate,
                          std::mt19937_64* dropout_rng);

// ---- Plain-value entry points (tests, inspection) ----

// Token + position + speaker embedding rows; speaker id 0 contributes zero.
Mat embed(const EncodedSequence& seq, const EncoderParams& params);

// One full encoder block applied to an explicit hidden-state matrix.
Mat attention_layer(const Mat& hidden, const AttentionMask& mask,
                    const LayerParams& layer, int heads);

// Pre-residual attention block only (no residual, norm, or feed-forward).
Mat attention_block(const Mat& hidden, const AttentionMask& mask,
                    const LayerParams& layer, int heads);

// embed then every layer under the same mask.
Mat encode(const EncodedSequence& seq, const AttentionMask& mask,
           const EncoderParams& params);

}  // namespace turngraph
