#include "turngraph/model.hpp"

#include <cmath>
#include <cstdio>

#include "turngraph/error.hpp"
#include "turngraph/mask.hpp"

namespace turngraph {

namespace {

// Shared by the const and non-const traversals so the order and the names
// cannot drift apart.
template <typename ModelT, typename Fn>
void visit_params(ModelT& model, Fn&& fn) {
  fn("token_emb", model.encoder.token_emb);
  fn("pos_emb", model.encoder.pos_emb);
  fn("speaker_emb", model.encoder.speaker_emb);
  for (size_t l = 0; l < model.encoder.layers.size(); ++l) {
    auto& layer = model.encoder.layers[l];
    const std::string prefix = "layer" + std::to_string(l) + ".";
    fn(prefix + "wq", layer.wq);
    fn(prefix + "wk", layer.wk);
    fn(prefix + "wv", layer.wv);
    fn(prefix + "wo", layer.wo);
    fn(prefix + "ff_w1", layer.ff_w1);
    fn(prefix + "ff_b1", layer.ff_b1);
    fn(prefix + "ff_w2", layer.ff_w2);
    fn(prefix + "ff_b2", layer.ff_b2);
    fn(prefix + "ln1_gain", layer.ln1_gain);
    fn(prefix + "ln1_bias", layer.ln1_bias);
    fn(prefix + "ln2_gain", layer.ln2_gain);
    fn(prefix + "ln2_bias", layer.ln2_bias);
  }
  for (size_t g = 0; g < model.graph.channel_logits.size(); ++g) {
    fn("gtn" + std::to_string(g) + ".logits", model.graph.channel_logits[g]);
  }
  for (size_t l = 0; l < model.graph.gcn.size(); ++l) {
    const std::string prefix = "gcn" + std::to_string(l) + ".";
    fn(prefix + "w", model.graph.gcn[l].first);
    fn(prefix + "b", model.graph.gcn[l].second);
  }
  fn("head.w", model.head.weight);
  fn("head.b", model.head.bias);
}

}  // namespace

Model Model::init(const RunConfig& config, const Corpus& train_corpus) {
  return init(config, Vocab::build(train_corpus), train_corpus.class_names);
}

Model Model::init(const RunConfig& config, Vocab vocab,
                  std::vector<std::string> class_names) {
  validate_config(config);
  if (class_names.size() < 2) {
    throw config_error("BAD_CLASS_COUNT", "need at least 2 classes");
  }
  Model model;
  model.config = config;
  model.vocab = std::move(vocab);
  model.class_names = std::move(class_names);
  std::mt19937_64 rng(config.seed);
  // Speaker ids run 1..max_speakers; row 0 is the fixed no-speaker row.
  model.encoder =
      init_encoder_params(model.vocab.size(), config.dim, config.ff_dim, config.layers,
                          config.heads, config.max_len, config.max_speakers + 1, rng);
  model.graph = init_graph_params(config.dim, config.gtn_steps, config.gcn_layers, rng);
  model.head = init_head_params(config.dim, config.k_max, model.classes(), rng);
  return model;
}

void Model::for_each_param(const std::function<void(const std::string&, Mat&)>& fn) {
  visit_params(*this, fn);
}

void Model::for_each_param(
    const std::function<void(const std::string&, const Mat&)>& fn) const {
  visit_params(*this, fn);
}

EncodedSequence Model::encode_instance(const Instance& inst) const {
  if (static_cast<int>(inst.query.arguments.size()) > config.k_max) {
    throw data_error("TOO_MANY_ARGS",
                     "instance " + inst.id + " has more arguments than k_max");
  }
  BuildOptions options;
  options.max_len = config.max_len;
  options.special_tokens = !config.no_special_tokens;
  return build_sequence(substitute_arguments(inst), vocab, options);
}

Binder::Binder(ad::Tape& tape, const Model& model) {
  model.for_each_param([&](const std::string& name, const Mat& tensor) {
    const int leaf = tape.leaf(tensor);
    ids_.emplace(&tensor, leaf);
    entries_.emplace_back(name, leaf);
  });
}

int Binder::id(const Mat& tensor) const {
  const auto it = ids_.find(&tensor);
  if (it == ids_.end()) {
    throw numeric_error("SHAPE_MISMATCH", "tensor not bound on this tape");
  }
  return it->second;
}

int logits_on_tape(ad::Tape& tape, const Binder& binder, const Model& model,
                   const EncodedSequence& seq, std::mt19937_64* dropout_rng) {
  const RunConfig& config = model.config;
  const AttentionMask mask = build_turn_mask(seq, config.no_turn_mask);

  int x = embed_on_tape(tape, seq, binder.id(model.encoder.token_emb),
                        binder.id(model.encoder.pos_emb),
                        binder.id(model.encoder.speaker_emb));
  for (const LayerParams& layer : model.encoder.layers) {
    BoundLayer bound;
    bound.wq = binder.id(layer.wq);
    bound.wk = binder.id(layer.wk);
    bound.wv = binder.id(layer.wv);
    bound.wo = binder.id(layer.wo);
    bound.ff_w1 = binder.id(layer.ff_w1);
    bound.ff_b1 = binder.id(layer.ff_b1);
    bound.ff_w2 = binder.id(layer.ff_w2);
    bound.ff_b2 = binder.id(layer.ff_b2);
    bound.ln1_gain = binder.id(layer.ln1_gain);
    bound.ln1_bias = binder.id(layer.ln1_bias);
    bound.ln2_gain = binder.id(layer.ln2_gain);
    bound.ln2_bias = binder.id(layer.ln2_bias);
    x = encoder_layer_on_tape(tape, x, mask, bound, model.encoder.heads, config.dropout,
                              dropout_rng);
  }

  int nodes;
  if (seq.has_special_tokens) {
    std::vector<int> keep = {seq.cls_position};
    keep.insert(keep.end(), seq.tau_positions.begin(), seq.tau_positions.end());
    nodes = tape.pick_rows(x, keep);
  } else {
    // Without tau tokens each node is the mean of its span's hidden rows.
    std::vector<std::pair<int, int>> segments;
    segments.reserve(seq.spans.size());
    for (const Span& span : seq.spans) segments.emplace_back(span.begin, span.end);
    nodes = tape.concat_rows(
        {tape.pick_rows(x, {seq.cls_position}), tape.mean_rows_segments(x, segments)});
  }

  int refined = nodes;
  if (!config.intra_turn_only) {
    model.graph_invocations += 1;
    const HetGraph structure = build_graph_structure(seq);
    std::vector<int> logit_ids;
    logit_ids.reserve(model.graph.channel_logits.size());
    for (const Mat& logits : model.graph.channel_logits) {
      logit_ids.push_back(binder.id(logits));
    }
    const int composed = gtn_compose_on_tape(tape, logit_ids, structure.channels);
    std::vector<std::pair<int, int>> gcn_layers;
    gcn_layers.reserve(model.graph.gcn.size());
    for (const auto& [w, b] : model.graph.gcn) {
      gcn_layers.emplace_back(binder.id(w), binder.id(b));
    }
    refined = gcn_forward_on_tape(tape, composed, nodes, gcn_layers);
  }

  return head_logits_on_tape(tape, refined, seq.num_turns, seq.num_args, config.k_max,
                             binder.id(model.head.weight), binder.id(model.head.bias));
}

int loss_on_tape(ad::Tape& tape, const Binder& binder, const Model& model,
                 const EncodedSequence& seq, int gold, std::mt19937_64* dropout_rng) {
  return tape.cross_entropy_row(logits_on_tape(tape, binder, model, seq, dropout_rng),
                                gold);
}

Mat Model::logits(const EncodedSequence& seq) const {
  ad::Tape tape;
  const Binder binder(tape, *this);
  return tape.val(logits_on_tape(tape, binder, *this, seq));
}

Prediction Model::predict(const Instance& inst) const {
  const Mat row = logits(encode_instance(inst));
  std::vector<double> values(row.data(), row.data() + row.size());
  return make_prediction(inst.id, std::move(values), inst.label);
}

double Model::instance_loss(const Instance& inst) const {
  if (inst.label < 0 || inst.label >= classes()) {
    throw data_error("LABEL_OUT_OF_RANGE", "instance " + inst.id + " lacks a valid label");
  }
  ad::Tape tape;
  const Binder binder(tape, *this);
  return tape.val(loss_on_tape(tape, binder, *this, encode_instance(inst), inst.label))(0, 0);
}

GradCheckReport grad_check(Model& model, const Instance& inst, double eps,
                           double rel_tol, double abs_tol, double grad_floor) {
  const EncodedSequence seq = model.encode_instance(inst);
  const int gold = inst.label;
  if (gold < 0 || gold >= model.classes()) {
    throw data_error("LABEL_OUT_OF_RANGE", "gradient check needs a labeled instance");
  }

  auto loss_value = [&]() {
    ad::Tape tape;
    const Binder binder(tape, model);
    return tape.val(loss_on_tape(tape, binder, model, seq, gold))(0, 0);
  };

  // One reverse sweep gives every analytic gradient.
  ad::Tape tape;
  const Binder binder(tape, model);
  tape.backward(loss_on_tape(tape, binder, model, seq, gold));
  std::vector<std::pair<std::string, Mat>> analytic;
  for (const auto& [name, leaf] : binder.entries()) {
    analytic.emplace_back(name, tape.grad(leaf));
  }

  GradCheckReport report;
  size_t index = 0;
  model.for_each_param([&](const std::string& name, Mat& tensor) {
    const Mat& grad = analytic[index].second;
    if (analytic[index].first != name) {
      throw numeric_error("SHAPE_MISMATCH", "parameter order drifted during grad check");
    }
    ++index;
    GradCheckGroup group;
    group.name = name;
    for (Eigen::Index i = 0; i < tensor.rows(); ++i) {
      for (Eigen::Index j = 0; j < tensor.cols(); ++j) {
        const double saved = tensor(i, j);
        tensor(i, j) = saved + eps;
        const double up = loss_value();
        tensor(i, j) = saved - eps;
        const double down = loss_value();
        tensor(i, j) = saved;
        const double fd = (up - down) / (2.0 * eps);
        const double g = grad(i, j);
        const double diff = std::abs(fd - g);
        if (std::abs(g) < grad_floor) {
          group.max_abs = std::max(group.max_abs, diff);
          if (diff > abs_tol) group.pass = false;
        } else {
          const double rel = diff / std::max(std::abs(fd), std::abs(g));
          group.max_rel = std::max(group.max_rel, rel);
          if (rel > rel_tol) group.pass = false;
        }
      }
    }
    if (!group.pass) report.pass = false;
    if (group.max_rel >= report.worst_rel) {
      report.worst_rel = group.max_rel;
      report.worst_group = group.name;
    }
    report.groups.push_back(std::move(group));
  });
  return report;
}

std::string render_grad_check(const GradCheckReport& report) {
  std::string out;
  char line[160];
  for (const GradCheckGroup& group : report.groups) {
    std::snprintf(line, sizeof(line), "param %-14s max_rel %.3e max_abs %.3e %s\n",
                  group.name.c_str(), group.max_rel, group.max_abs,
                  group.pass ? "ok" : "FAIL");
    out += line;
  }
  std::snprintf(line, sizeof(line), "grad_check %s worst %s max_rel %.3e\n",
                report.pass ? "pass" : "FAIL", report.worst_group.c_str(),
                report.worst_rel);
  out += line;
  return out;
}

}  // namespace turngraph
