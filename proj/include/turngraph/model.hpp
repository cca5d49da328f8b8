#pragma once

#include <functional>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "turngraph/config.hpp"
#include "turngraph/corpus.hpp"
#include "turngraph/encoder.hpp"
#include "turngraph/graph.hpp"
#include "turngraph/head.hpp"
#include "turngraph/metrics.hpp"
#include "turngraph/sequence.hpp"

namespace turngraph {

// Full pipeline state: preprocessing vocabulary plus every learnable tensor.
// graph_invocations counts gtn/gcn passes so the intra_turn_only ablation can
// prove the graph module never ran.
struct Model {
  RunConfig config;
  Vocab vocab;
  std::vector<std::string> class_names;
  EncoderParams encoder;
  GraphParams graph;
  HeadParams head;
  mutable long graph_invocations = 0;

  static Model init(const RunConfig& config, const Corpus& train_corpus);
  static Model init(const RunConfig& config, Vocab vocab,
                    std::vector<std::string> class_names);

  int classes() const { return static_cast<int>(class_names.size()); }

  // Visits every learnable tensor in a fixed order under a stable name.
  void for_each_param(const std::function<void(const std::string&, Mat&)>& fn);
  void for_each_param(
      const std::function<void(const std::string&, const Mat&)>& fn) const;

  // zeta substitution plus sequence assembly under the config's ablations.
  EncodedSequence encode_instance(const Instance& inst) const;

  Mat logits(const EncodedSequence& seq) const;
  Prediction predict(const Instance& inst) const;
  double instance_loss(const Instance& inst) const;
};

// Binds every model tensor as a tape leaf; lookup is by tensor address.
class Binder {
 public:
  Binder(ad::Tape& tape, const Model& model);

  int id(const Mat& tensor) const;
  // (name, leaf id) in for_each_param order.
  const std::vector<std::pair<std::string, int>>& entries() const { return entries_; }

 private:
  std::unordered_map<const Mat*, int> ids_;
  std::vector<std::pair<std::string, int>> entries_;
};

// Forward pass to the logits node. dropout_rng may be null for rate 0.
int logits_on_tape(ad::Tape& tape, const Binder& binder, const Model& model,
                   const EncodedSequence& seq, std::mt19937_64* dropout_rng = nullptr);

// cross_entropy_row over the forward logits.
int loss_on_tape(ad::Tape& tape, const Binder& binder, const Model& model,
                 const EncodedSequence& seq, int gold,
                 std::mt19937_64* dropout_rng = nullptr);

struct GradCheckGroup {
  std::string name;
  double max_rel = 0.0;
  double max_abs = 0.0;
  bool pass = true;
};

struct GradCheckReport {
  std::vector<GradCheckGroup> groups;
  bool pass = true;
  double worst_rel = 0.0;
  std::string worst_group;
};

// Central finite differences over every entry of every parameter tensor.
// Entries whose analytic gradient is below grad_floor are compared
// absolutely at abs_tol, the rest relatively at rel_tol.
GradCheckReport grad_check(Model& model, const Instance& inst, double eps = 1e-4,
                           double rel_tol = 1e-3, double abs_tol = 1e-6,
                           double grad_floor = 1e-8);

std::string render_grad_check(const GradCheckReport& report);

}  // namespace turngraph
