#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "turngraph/corpus.hpp"

namespace turngraph {

// Token vocabulary with a fixed reserved block:
//   [PAD]=0 [UNK]=1 [CLS]=2 [SEP]=3 [T]=4 [S1]=5 [S2]=6
// Open vocabulary starts at 7. Built from the training split only; tokens
// unseen at encoding time map to [UNK].
class Vocab {
 public:
  static constexpr int pad_id = 0;
  static constexpr int unk_id = 1;
  static constexpr int cls_id = 2;
  static constexpr int sep_id = 3;
  static constexpr int turn_id = 4;  // the shared turn-level special token [T]
  static constexpr int first_open_id = 7;
  static constexpr int max_arguments = 2;

  Vocab();

  // Reserved block, then ":", then corpus speaker/text tokens in first-seen
  // order (instances in file order, speaker before text within a turn).
  static Vocab build(const Corpus& corpus);

  // Argument marker token [Sj], j in [1, max_arguments].
  static std::string marker_token(int j);
  static int marker_id(int j);  // 5 for [S1], 6 for [S2]
  static bool is_marker_id(int id) { return id == 5 || id == 6; }

  int add(const std::string& token);  // idempotent, returns the token's id
  int id(const std::string& token) const;       // unk_id if absent
  const std::string& token(int id) const;       // throws on out-of-range
  bool contains(const std::string& token) const;
  int size() const { return static_cast<int>(tokens_.size()); }

  const std::vector<std::string>& tokens() const { return tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> ids_;
};

}  // namespace turngraph
