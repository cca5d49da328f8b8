#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "turngraph/sequence.hpp"

namespace turngraph {

// N x N boolean allow-matrix: allow(i, j) means query position i may attend
// to key position j.
struct AttentionMask {
  int n = 0;
  std::vector<uint8_t> allow;  // row-major

  static AttentionMask all_true(int n) {
    AttentionMask m;
    m.n = n;
    m.allow.assign(static_cast<size_t>(n) * static_cast<size_t>(n), 1);
    return m;
  }

  bool at(int i, int j) const {
    return allow[static_cast<size_t>(i) * static_cast<size_t>(n) +
                 static_cast<size_t>(j)] != 0;
  }
  void set(int i, int j, bool v) {
    allow[static_cast<size_t>(i) * static_cast<size_t>(n) +
          static_cast<size_t>(j)] = v ? 1 : 0;
  }
  int row_sum(int i) const {
    int s = 0;
    for (int j = 0; j < n; ++j) s += at(i, j) ? 1 : 0;
    return s;
  }
};

// Turn-level restriction: each tau row is true exactly on its own span;
// every other row (including [CLS] and [SEP]) is all-true. With
// disabled=true (the "w/o attention mask" ablation) the mask is all-true.
AttentionMask build_turn_mask(const EncodedSequence& seq, bool disabled = false);

// Zeroes the columns at and beyond valid_len in every row. Rows beyond
// valid_len stay defined but are never consumed.
AttentionMask apply_padding(const AttentionMask& mask, int valid_len, int padded_len);

// 0/1 grid, one row per line; stable output for golden-file tests and the
// inspect-mask subcommand.
std::string render_mask_grid(const AttentionMask& mask);

}  // namespace turngraph
