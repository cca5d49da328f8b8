#include "turngraph/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "turngraph/encoder.hpp"
#include "turngraph/error.hpp"
#include "turngraph/vocab.hpp"

namespace turngraph {

const char* const kChannelNames[kNumChannels] = {
    "DIALOGUE", "SPEAKER", "ENTITY", "SEQUENCE", "IDENTITY",
};

namespace {

void set_edge(Mat& a, int u, int v) {
  a(u, v) = 1.0;
  a(v, u) = 1.0;
}

int turn_speaker(const EncodedSequence& seq, int turn) {
  return seq.speaker_ids[static_cast<size_t>(seq.spans[static_cast<size_t>(turn)].begin)];
}

bool marker_in_span(const EncodedSequence& seq, const Span& span, int marker_id) {
  for (int p = span.begin; p < span.end; ++p) {
    if (seq.token_ids[static_cast<size_t>(p)] == marker_id) return true;
  }
  return false;
}

}  // namespace

GraphParams init_graph_params(int dim, int gtn_steps, int gcn_layers,
                              std::mt19937_64& rng) {
  if (gtn_steps < 1 || gcn_layers < 1) {
    throw config_error("BAD_GRAPH_DEPTH", "gtn steps and gcn layers must be >= 1");
  }
  GraphParams params;
  for (int g = 0; g < gtn_steps; ++g) {
    params.channel_logits.push_back(uniform_matrix(1, kNumChannels, rng));
  }
  for (int l = 0; l < gcn_layers; ++l) {
    params.gcn.emplace_back(uniform_matrix(dim, dim, rng), Mat::Zero(1, dim));
  }
  return params;
}

HetGraph build_graph_structure(const EncodedSequence& seq) {
  const int m = seq.num_turns;
  const int k = seq.num_args;
  if (m < 1 || k < 1) {
    throw data_error("EMPTY_GRAPH", "graph needs at least one turn and one argument");
  }
  HetGraph graph;
  graph.num_turns = m;
  graph.num_args = k;
  const int n = graph.node_count();
  for (auto& channel : graph.channels) channel = Mat::Zero(n, n);
  graph.channels[kIdentity] = Mat::Identity(n, n);

  for (int i = 0; i < m; ++i) {
    set_edge(graph.channels[kDialogue], HetGraph::dialogue_node(), graph.turn_node(i));
    for (int j = i + 1; j < m; ++j) {
      set_edge(graph.channels[kSequence], graph.turn_node(i), graph.turn_node(j));
      if (turn_speaker(seq, i) == turn_speaker(seq, j)) {
        set_edge(graph.channels[kSpeaker], graph.turn_node(i), graph.turn_node(j));
      }
    }
  }
  for (int j = 0; j < k; ++j) {
    const int marker = Vocab::marker_id(j + 1);
    for (int i = 0; i < m; ++i) {
      if (marker_in_span(seq, seq.spans[static_cast<size_t>(i)], marker)) {
        set_edge(graph.channels[kEntity], graph.turn_node(i), graph.arg_node(j));
      }
    }
  }
  return graph;
}

HetGraph build_graph(const EncodedSequence& seq, const Mat& hidden) {
  if (hidden.rows() != seq.size()) {
    throw numeric_error("SHAPE_MISMATCH", "hidden rows do not match sequence length");
  }
  const size_t want_taus = static_cast<size_t>(seq.num_turns + seq.num_args);
  if (seq.tau_positions.size() != want_taus) {
    throw data_error("BAD_TAUS", "sequence lacks one turn token per span");
  }
  HetGraph graph = build_graph_structure(seq);
  graph.node_features = Mat::Zero(graph.node_count(), hidden.cols());
  graph.node_features.row(0) = hidden.row(seq.cls_position);
  for (size_t t = 0; t < seq.tau_positions.size(); ++t) {
    graph.node_features.row(static_cast<Eigen::Index>(1 + t)) =
        hidden.row(seq.tau_positions[t]);
  }
  return graph;
}

Mat normalize_channel(const Mat& adjacency) {
  const Eigen::Index n = adjacency.rows();
  Eigen::VectorXd scale(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double degree = adjacency.row(i).sum();
    scale(i) = degree > 0.0 ? 1.0 / std::sqrt(degree) : 0.0;
  }
  return scale.asDiagonal() * adjacency * scale.asDiagonal();
}

int gtn_compose_on_tape(ad::Tape& tape, const std::vector<int>& logit_ids,
                        const std::array<Mat, kNumChannels>& channels) {
  if (logit_ids.empty()) {
    throw config_error("BAD_GRAPH_DEPTH", "gtn needs at least one composition step");
  }
  std::vector<Mat> normed(channels.size());
  for (size_t c = 0; c < channels.size(); ++c) normed[c] = normalize_channel(channels[c]);
  int composed = tape.channel_mix(logit_ids[0], normed);
  for (size_t g = 1; g < logit_ids.size(); ++g) {
    composed = tape.matmul(composed, tape.channel_mix(logit_ids[g], normed));
  }
  return composed;
}

int gcn_forward_on_tape(ad::Tape& tape, int adjacency, int features,
                        const std::vector<std::pair<int, int>>& layers) {
  if (layers.empty()) {
    throw config_error("BAD_GRAPH_DEPTH", "gcn needs at least one layer");
  }
  const int norm = tape.row_normalize_self_loops(adjacency);
  int x = features;
  for (size_t l = 0; l < layers.size(); ++l) {
    x = tape.add_row_broadcast(tape.matmul(tape.matmul(norm, x), layers[l].first),
                               layers[l].second);
    if (l + 1 < layers.size()) x = tape.relu(x);
  }
  return x;
}

Mat gtn_compose(const HetGraph& graph, const GraphParams& params) {
  ad::Tape tape;
  std::vector<int> logit_ids;
  logit_ids.reserve(params.channel_logits.size());
  for (const Mat& logits : params.channel_logits) logit_ids.push_back(tape.leaf(logits));
  return tape.val(gtn_compose_on_tape(tape, logit_ids, graph.channels));
}

Mat gcn_forward(const Mat& adjacency, const Mat& features, const GraphParams& params) {
  ad::Tape tape;
  std::vector<std::pair<int, int>> layers;
  layers.reserve(params.gcn.size());
  for (const auto& [w, b] : params.gcn) layers.emplace_back(tape.leaf(w), tape.leaf(b));
  return tape.val(
      gcn_forward_on_tape(tape, tape.leaf(adjacency), tape.leaf(features), layers));
}

Mat graph_forward(const HetGraph& graph, const GraphParams& params) {
  return gcn_forward(gtn_compose(graph, params), graph.node_features, params);
}

std::string render_graph_listing(const EncodedSequence& seq) {
  const HetGraph graph = build_graph_structure(seq);
  std::string out;
  char line[128];
  std::snprintf(line, sizeof(line), "nodes %d\n", graph.node_count());
  out += line;
  out += "node 0 dialogue\n";
  for (int i = 0; i < graph.num_turns; ++i) {
    std::snprintf(line, sizeof(line), "node %d turn %d speaker %d\n",
                  graph.turn_node(i), i + 1, turn_speaker(seq, i));
    out += line;
  }
  for (int j = 0; j < graph.num_args; ++j) {
    std::snprintf(line, sizeof(line), "node %d argument %d\n", graph.arg_node(j), j + 1);
    out += line;
  }
  for (int c = 0; c < kNumChannels; ++c) {
    const Mat& a = graph.channels[static_cast<size_t>(c)];
    std::vector<std::pair<int, int>> edges;
    for (int u = 0; u < graph.node_count(); ++u) {
      for (int v = u; v < graph.node_count(); ++v) {
        if (a(u, v) != 0.0) edges.emplace_back(u, v);
      }
    }
    std::snprintf(line, sizeof(line), "channel %s edges %zu\n", kChannelNames[c],
                  edges.size());
    out += line;
    for (const auto& [u, v] : edges) {
      std::snprintf(line, sizeof(line), "edge %d %d\n", u, v);
      out += line;
    }
  }
  return out;
}

}  // namespace turngraph
