#include "turngraph/encoder.hpp"

#include <cmath>

namespace turngraph {

Mat uniform_matrix(int rows, int cols, std::mt19937_64& rng, double range) {
  std::uniform_real_distribution<double> uni(-range, range);
  Mat m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = uni(rng);
  return m;
}

EncoderParams init_encoder_params(int vocab_size, int dim, int d_ff, int layers,
                                  int heads, int n_max, int s_max,
                                  std::mt19937_64& rng) {
  if (heads <= 0 || dim % heads != 0)
    throw config_error("BAD_HEADS", "head count must divide the model dimension");

  EncoderParams p;
  p.heads = heads;
  p.token_emb = uniform_matrix(vocab_size, dim, rng);
  p.pos_emb = uniform_matrix(n_max, dim, rng);
  p.speaker_emb = uniform_matrix(s_max, dim, rng);
  p.speaker_emb.row(0).setZero();  // id 0 = "no speaker", never trained
  for (int l = 0; l < layers; ++l) {
    LayerParams layer;
    layer.wq = uniform_matrix(dim, dim, rng);
    layer.wk = uniform_matrix(dim, dim, rng);
    layer.wv = uniform_matrix(dim, dim, rng);
    layer.wo = uniform_matrix(dim, dim, rng);
    layer.ff_w1 = uniform_matrix(dim, d_ff, rng);
    layer.ff_b1 = Mat::Zero(1, d_ff);
    layer.ff_w2 = uniform_matrix(d_ff, dim, rng);
    layer.ff_b2 = Mat::Zero(1, dim);
    layer.ln1_gain = Mat::Ones(1, dim);
    layer.ln1_bias = Mat::Zero(1, dim);
    layer.ln2_gain = Mat::Ones(1, dim);
    layer.ln2_bias = Mat::Zero(1, dim);
    p.layers.push_back(std::move(layer));
  }
  return p;
}

int embed_on_tape(ad::Tape& tape, const EncodedSequence& seq, int token_table,
                  int pos_table, int speaker_table) {
  const int n = seq.size();
  const int v = static_cast<int>(tape.val(token_table).rows());
  const int n_max = static_cast<int>(tape.val(pos_table).rows());
  const int s_max = static_cast<int>(tape.val(speaker_table).rows());

  if (n > n_max)
    throw data_error("ID_OUT_OF_RANGE",
                     "sequence length " + std::to_string(n) + " exceeds position table " +
                         std::to_string(n_max));
  std::vector<int> positions(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    positions[static_cast<size_t>(i)] = i;
    if (seq.token_ids[static_cast<size_t>(i)] < 0 ||
        seq.token_ids[static_cast<size_t>(i)] >= v)
      throw data_error("ID_OUT_OF_RANGE",
                       "token id " + std::to_string(seq.token_ids[static_cast<size_t>(i)]));
    if (seq.speaker_ids[static_cast<size_t>(i)] < 0 ||
        seq.speaker_ids[static_cast<size_t>(i)] >= s_max)
      throw data_error("ID_OUT_OF_RANGE",
                       "speaker id " + std::to_string(seq.speaker_ids[static_cast<size_t>(i)]));
  }

  int tok = tape.pick_rows(token_table, seq.token_ids);
  int pos = tape.pick_rows(pos_table, positions);
  int spk = tape.embed_rows_zero_guarded(speaker_table, seq.speaker_ids);
  return tape.add(tape.add(tok, pos), spk);
}

int attention_block_on_tape(ad::Tape& tape, int x, const AttentionMask& mask,
                            int wq, int wk, int wv, int wo, int heads) {
  const int d = static_cast<int>(tape.val(x).cols());
  const int dh = d / heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));

  int q = tape.matmul(x, wq);
  int k = tape.matmul(x, wk);
  int v = tape.matmul(x, wv);

  std::vector<int> contexts;
  contexts.reserve(static_cast<size_t>(heads));
  for (int h = 0; h < heads; ++h) {
    int qh = tape.slice_cols(q, h * dh, dh);
    int kh = tape.slice_cols(k, h * dh, dh);
    int vh = tape.slice_cols(v, h * dh, dh);
    int scores = tape.scale(tape.matmul_nt(qh, kh), scale);
    int probs = tape.masked_softmax_rows(scores, mask);
    contexts.push_back(tape.matmul(probs, vh));
  }
  return tape.matmul(tape.concat_cols(contexts), wo);
}

int encoder_layer_on_tape(ad::Tape& tape, int x, const AttentionMask& mask,
                          const BoundLayer& layer, int heads, double dropout_rate,
                          std::mt19937_64* dropout_rng) {
  int attn = attention_block_on_tape(tape, x, mask, layer.wq, layer.wk, layer.wv,
                                     layer.wo, heads);
  if (dropout_rng && dropout_rate > 0.0)
    attn = tape.dropout(attn, dropout_rate, *dropout_rng);
  int x1 = tape.layer_norm_rows(tape.add(x, attn), layer.ln1_gain, layer.ln1_bias);

  int ff = tape.add_row_broadcast(tape.matmul(x1, layer.ff_w1), layer.ff_b1);
  ff = tape.gelu(ff);
  ff = tape.add_row_broadcast(tape.matmul(ff, layer.ff_w2), layer.ff_b2);
  if (dropout_rng && dropout_rate > 0.0)
    ff = tape.dropout(ff, dropout_rate, *dropout_rng);
  return tape.layer_norm_rows(tape.add(x1, ff), layer.ln2_gain, layer.ln2_bias);
}

namespace {

BoundLayer bind_layer(ad::Tape& tape, const LayerParams& layer) {
  BoundLayer b;
  b.wq = tape.leaf(layer.wq);
  b.wk = tape.leaf(layer.wk);
  b.wv = tape.leaf(layer.wv);
  b.wo = tape.leaf(layer.wo);
  b.ff_w1 = tape.leaf(layer.ff_w1);
  b.ff_b1 = tape.leaf(layer.ff_b1);
  b.ff_w2 = tape.leaf(layer.ff_w2);
  b.ff_b2 = tape.leaf(layer.ff_b2);
  b.ln1_gain = tape.leaf(layer.ln1_gain);
  b.ln1_bias = tape.leaf(layer.ln1_bias);
  b.ln2_gain = tape.leaf(layer.ln2_gain);
  b.ln2_bias = tape.leaf(layer.ln2_bias);
  return b;
}

}  // namespace

Mat embed(const EncodedSequence& seq, const EncoderParams& params) {
  ad::Tape tape;
  int tok = tape.leaf(params.token_emb);
  int pos = tape.leaf(params.pos_emb);
  int spk = tape.leaf(params.speaker_emb);
  return tape.val(embed_on_tape(tape, seq, tok, pos, spk));
}

Mat attention_block(const Mat& hidden, const AttentionMask& mask,
                    const LayerParams& layer, int heads) {
  ad::Tape tape;
  int x = tape.leaf(hidden);
  BoundLayer b = bind_layer(tape, layer);
  return tape.val(
      attention_block_on_tape(tape, x, mask, b.wq, b.wk, b.wv, b.wo, heads));
}

Mat attention_layer(const Mat& hidden, const AttentionMask& mask,
                    const LayerParams& layer, int heads) {
  ad::Tape tape;
  int x = tape.leaf(hidden);
  BoundLayer b = bind_layer(tape, layer);
  return tape.val(encoder_layer_on_tape(tape, x, mask, b, heads, 0.0, nullptr));
}

Mat encode(const EncodedSequence& seq, const AttentionMask& mask,
           const EncoderParams& params) {
  ad::Tape tape;
  int tok = tape.leaf(params.token_emb);
  int pos = tape.leaf(params.pos_emb);
  int spk = tape.leaf(params.speaker_emb);
  int h = embed_on_tape(tape, seq, tok, pos, spk);
  for (const LayerParams& layer : params.layers) {
    BoundLayer b = bind_layer(tape, layer);
    h = encoder_layer_on_tape(tape, h, mask, b, params.heads, 0.0, nullptr);
  }
  return tape.val(h);
}

}  // namespace turngraph
