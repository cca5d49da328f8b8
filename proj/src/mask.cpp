#include "turngraph/mask.hpp"

#include <sstream>

namespace turngraph {

AttentionMask build_turn_mask(const EncodedSequence& seq, bool disabled) {
  AttentionMask mask = AttentionMask::all_true(seq.size());
  if (disabled || !seq.has_special_tokens) return mask;

  for (size_t i = 0; i < seq.tau_positions.size(); ++i) {
    const int p = seq.tau_positions[i];
    const Span& span = seq.spans[i];
    for (int j = 0; j < mask.n; ++j) mask.set(p, j, span.contains(j));
  }
  return mask;
}

AttentionMask apply_padding(const AttentionMask& mask, int valid_len, int padded_len) {
  if (valid_len > padded_len)
    throw data_error("BAD_PADDING", "valid_len exceeds padded_len");

  AttentionMask out;
  out.n = padded_len;
  out.allow.assign(static_cast<size_t>(padded_len) * static_cast<size_t>(padded_len), 0);
  for (int i = 0; i < mask.n && i < padded_len; ++i)
    for (int j = 0; j < mask.n && j < valid_len; ++j)
      out.set(i, j, mask.at(i, j));
  return out;
}

std::string render_mask_grid(const AttentionMask& mask) {
  std::ostringstream out;
  for (int i = 0; i < mask.n; ++i) {
    for (int j = 0; j < mask.n; ++j) out << (mask.at(i, j) ? '1' : '0');
    out << "\n";
  }
  return out.str();
}

}  // namespace turngraph
