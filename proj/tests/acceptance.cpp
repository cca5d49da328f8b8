// Acceptance harness: one line per criterion, nonzero exit on any failure.
// argv[1] is the turngraph CLI binary (used by the end-to-end criteria),
// argv[2] an optional scratch directory.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "turngraph/checkpoint.hpp"
#include "turngraph/encoder.hpp"
#include "turngraph/error.hpp"
#include "turngraph/graph.hpp"
#include "turngraph/mask.hpp"
#include "turngraph/metrics.hpp"
#include "turngraph/model.hpp"
#include "turngraph/sequence.hpp"
#include "turngraph/synthetic.hpp"
#include "turngraph/train.hpp"

using namespace turngraph;
namespace fs = std::filesystem;

namespace {

struct Context {
  std::string cli;
  fs::path scratch;
};

[[noreturn]] void fail(const std::string& msg) { throw std::runtime_error(msg); }

void require(bool cond, const std::string& msg) {
  if (!cond) fail(msg);
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

int run_cmd(const std::string& cmd) {
  const int status = std::system(cmd.c_str());
  if (status == -1) return -1;
  if (WIFEXITED(status)) return WEXITSTATUS(status);
  return 128;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  require(bool(in), "cannot read " + path.string());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

std::vector<std::string> lines_with_prefix(const std::string& text,
                                           const std::string& prefix) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind(prefix, 0) == 0) out.push_back(line);
  }
  return out;
}

double last_value_after(const std::string& text, const std::string& key) {
  const size_t at = text.rfind(key + " ");
  require(at != std::string::npos, "no '" + key + "' in output");
  return std::stod(text.substr(at + key.size() + 1));
}

// ---- criterion 1: turn mask law --------------------------------------------

std::string criterion_mask_law() {
  std::mt19937_64 rng(101);
  const Corpus corpus = testutil::random_corpus(rng, 300, 8);
  const Vocab vocab = Vocab::build(corpus);
  long rows_checked = 0;
  for (const Instance& raw : corpus.instances) {
    const EncodedSequence seq = build_sequence(substitute_arguments(raw), vocab);
    const AttentionMask mask = build_turn_mask(seq);
    const int n = seq.size();
    require(mask.n == n, "mask size mismatch");
    for (int i = 0; i < n; ++i) {
      int tau_index = -1;
      for (size_t t = 0; t < seq.tau_positions.size(); ++t) {
        if (seq.tau_positions[t] == i) tau_index = static_cast<int>(t);
      }
      if (tau_index >= 0) {
        const Span span = seq.spans[static_cast<size_t>(tau_index)];
        for (int j = 0; j < n; ++j) {
          const bool expected = j >= span.begin && j < span.end;
          require(mask.at(i, j) == expected, "tau row allows outside its span");
        }
        require(mask.row_sum(i) == span.end - span.begin, "tau row-sum law violated");
      } else {
        for (int j = 0; j < n; ++j) require(mask.at(i, j), "non-tau row not all-true");
        require(mask.row_sum(i) == n, "non-tau row-sum law violated");
      }
      ++rows_checked;
    }
  }
  return "300 sequences, " + std::to_string(rows_checked) + " rows verified";
}

// ---- criterion 2: one-layer locality ----------------------------------------

std::string criterion_locality() {
  std::mt19937_64 rng(202);
  const Corpus corpus = testutil::random_corpus(rng, 50, 6);
  const Vocab vocab = Vocab::build(corpus);
  std::mt19937_64 init_rng(1);
  const EncoderParams params =
      init_encoder_params(vocab.size(), 16, 32, 1, 2, 128, 8, init_rng);

  int changed_without_mask = 0;
  for (const Instance& raw : corpus.instances) {
    const EncodedSequence seq = build_sequence(substitute_arguments(raw), vocab);
    const int turn = testutil::draw(rng, 0, seq.num_turns - 1);
    const int tau = seq.tau_positions[static_cast<size_t>(turn)];
    const Span span = seq.spans[static_cast<size_t>(turn)];

    std::vector<int> outside;
    for (int p = 0; p < seq.size(); ++p) {
      if (p < span.begin || p >= span.end) outside.push_back(p);
    }
    require(!outside.empty(), "no out-of-span position available");
    const int p = outside[static_cast<size_t>(
        testutil::draw(rng, 0, static_cast<int>(outside.size()) - 1))];

    EncodedSequence perturbed = seq;
    int new_id = Vocab::first_open_id;
    if (perturbed.token_ids[static_cast<size_t>(p)] == new_id) ++new_id;
    require(new_id < vocab.size(), "vocabulary too small to perturb");
    perturbed.token_ids[static_cast<size_t>(p)] = new_id;

    const AttentionMask mask = build_turn_mask(seq);
    const Mat before = encode(seq, mask, params);
    const Mat after = encode(perturbed, mask, params);
    require((before.row(tau).array() == after.row(tau).array()).all(),
            "masked tau row moved under an out-of-span perturbation");

    const AttentionMask open = build_turn_mask(seq, true);
    const Mat before_open = encode(seq, open, params);
    const Mat after_open = encode(perturbed, open, params);
    if ((before_open.row(tau).array() != after_open.row(tau).array()).any()) {
      ++changed_without_mask;
    }
  }
  require(changed_without_mask >= 48,
          "ablated mask left " + std::to_string(50 - changed_without_mask) +
              " of 50 tau rows unchanged");
  return "50 masked rows bitwise stable, " + std::to_string(changed_without_mask) +
         "/50 moved without the mask";
}

// ---- criterion 3: graph combinatorics ---------------------------------------

std::string criterion_graph_combinatorics() {
  std::mt19937_64 rng(303);
  Corpus corpus;
  corpus.class_names = {"north", "south", "east"};
  for (int i = 0; i < 200; ++i) corpus.instances.push_back(testutil::random_instance(rng, 10));
  const Vocab vocab = Vocab::build(corpus);

  auto mentions = [](const Instance& inst, size_t turn, const std::string& arg) {
    return inst.turns[turn].speaker == arg ||
           contains_token_seq(tokenize(inst.turns[turn].text), tokenize(arg));
  };

  long edges_checked = 0;
  for (const Instance& raw : corpus.instances) {
    const EncodedSequence seq = build_sequence(substitute_arguments(raw), vocab);
    const HetGraph graph = build_graph_structure(seq);
    const int m = seq.num_turns;
    const int k = seq.num_args;
    const int n = 1 + m + k;
    require(graph.node_count() == n, "node count mismatch");

    std::array<Mat, kNumChannels> expected;
    for (Mat& channel : expected) channel = Mat::Zero(n, n);
    expected[kIdentity] = Mat::Identity(n, n);
    for (int i = 0; i < m; ++i) {
      expected[kDialogue](0, 1 + i) = expected[kDialogue](1 + i, 0) = 1.0;
      for (int j = i + 1; j < m; ++j) {
        expected[kSequence](1 + i, 1 + j) = expected[kSequence](1 + j, 1 + i) = 1.0;
        if (raw.turns[static_cast<size_t>(i)].speaker ==
            raw.turns[static_cast<size_t>(j)].speaker) {
          expected[kSpeaker](1 + i, 1 + j) = expected[kSpeaker](1 + j, 1 + i) = 1.0;
        }
      }
      for (int j = 0; j < k; ++j) {
        if (mentions(raw, static_cast<size_t>(i), raw.query.arguments[static_cast<size_t>(j)])) {
          expected[kEntity](1 + m + j, 1 + i) = expected[kEntity](1 + i, 1 + m + j) = 1.0;
        }
      }
    }

    for (int c = 0; c < kNumChannels; ++c) {
      require(graph.channels[static_cast<size_t>(c)] == expected[static_cast<size_t>(c)],
              std::string("channel ") + kChannelNames[c] + " differs from the oracle on " +
                  raw.id);
      require(graph.channels[static_cast<size_t>(c)] ==
                  Mat(graph.channels[static_cast<size_t>(c)].transpose()),
              std::string("channel ") + kChannelNames[c] + " is not symmetric");
      edges_checked += static_cast<long>((expected[static_cast<size_t>(c)].array() != 0.0).count());
    }

    std::map<std::string, long> per_speaker;
    for (const Turn& turn : raw.turns) per_speaker[turn.speaker] += 1;
    long speaker_pairs = 0;
    for (const auto& [name, count] : per_speaker) speaker_pairs += count * (count - 1) / 2;
    const auto edge_count = [](const Mat& a) {
      long total = 0;
      for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = i + 1; j < a.cols(); ++j) total += a(i, j) != 0.0 ? 1 : 0;
      }
      return total;
    };
    require(edge_count(graph.channels[kDialogue]) == m, "|DIALOGUE| != m");
    require(edge_count(graph.channels[kSequence]) == static_cast<long>(m) * (m - 1) / 2,
            "|SEQUENCE| != m(m-1)/2");
    require(edge_count(graph.channels[kSpeaker]) == speaker_pairs,
            "|SPEAKER| != sum of same-speaker pairs");
  }
  return "200 instances, all channels equal the brute-force oracle (" +
         std::to_string(edges_checked) + " entries set)";
}

// ---- criterion 4: gradient correctness --------------------------------------

std::string criterion_gradients() {
  RunConfig config;
  config.dim = 8;
  config.ff_dim = 16;
  config.layers = 2;
  config.heads = 2;
  config.gcn_layers = 1;
  config.gtn_steps = 2;
  config.k_max = 2;
  config.max_len = 32;
  config.max_speakers = 4;
  config.seed = 1;

  Corpus corpus;
  corpus.class_names = synthetic_schema().class_names;
  Instance inst;
  inst.id = "probe";
  inst.turns = {Turn{"alice", "zorp gadget well"}, Turn{"bob", "sure fine okay"}};
  inst.query.arguments = {"alice", "gadget"};
  inst.label = 1;
  corpus.instances.push_back(inst);

  Model model = Model::init(config, corpus);
  const GradCheckReport report = grad_check(model, inst, 1e-4, 1e-3, 1e-6, 1e-8);
  if (!report.pass) {
    fail("finite differences disagree, worst group " + report.worst_group + " rel " +
         fmt(report.worst_rel) + "\n" + render_grad_check(report));
  }
  return std::to_string(report.groups.size()) + " parameter groups, worst rel " +
         fmt(report.worst_rel) + " (" + report.worst_group + ")";
}

// ---- criterion 5: metric oracle ----------------------------------------------

struct OracleScores {
  double micro = 0.0, macro = 0.0, weighted = 0.0;
  std::optional<double> excl;
  std::vector<double> per_class;
};

OracleScores metric_oracle(const std::vector<int>& golds, const std::vector<int>& preds,
                           int classes, std::optional<int> neutral) {
  std::vector<long> tp(static_cast<size_t>(classes), 0);
  std::vector<long> fp(static_cast<size_t>(classes), 0);
  std::vector<long> fn(static_cast<size_t>(classes), 0);
  std::vector<long> support(static_cast<size_t>(classes), 0);
  for (size_t i = 0; i < golds.size(); ++i) {
    const size_t g = static_cast<size_t>(golds[i]);
    const size_t p = static_cast<size_t>(preds[i]);
    support[g] += 1;
    if (g == p) {
      tp[g] += 1;
    } else {
      fn[g] += 1;
      fp[p] += 1;
    }
  }
  const auto f1_of = [](long tp_c, long fp_c, long fn_c) {
    const long denom = 2 * tp_c + fp_c + fn_c;
    return denom == 0 ? 0.0 : 2.0 * static_cast<double>(tp_c) / static_cast<double>(denom);
  };

  OracleScores out;
  long tp_sum = 0, fp_sum = 0, fn_sum = 0, support_sum = 0;
  double f1_sum = 0.0, f1_weighted = 0.0;
  for (int c = 0; c < classes; ++c) {
    const size_t s = static_cast<size_t>(c);
    const double f1 = f1_of(tp[s], fp[s], fn[s]);
    out.per_class.push_back(f1);
    tp_sum += tp[s];
    fp_sum += fp[s];
    fn_sum += fn[s];
    support_sum += support[s];
    f1_sum += f1;
    f1_weighted += static_cast<double>(support[s]) * f1;
  }
  const long denom = 2 * tp_sum + fp_sum + fn_sum;
  out.micro = denom == 0 ? 0.0 : 2.0 * static_cast<double>(tp_sum) / static_cast<double>(denom);
  out.macro = classes == 0 ? 0.0 : f1_sum / classes;
  out.weighted = support_sum == 0 ? 0.0 : f1_weighted / static_cast<double>(support_sum);
  if (neutral) {
    long tp_n = 0, fp_n = 0, fn_n = 0;
    for (int c = 0; c < classes; ++c) {
      if (c == *neutral) continue;
      const size_t s = static_cast<size_t>(c);
      tp_n += tp[s];
      fp_n += fp[s];
      fn_n += fn[s];
    }
    const long dn = 2 * tp_n + fp_n + fn_n;
    out.excl = dn == 0 ? 0.0 : 2.0 * static_cast<double>(tp_n) / static_cast<double>(dn);
  }
  return out;
}

std::vector<Prediction> as_predictions(const std::vector<int>& golds,
                                       const std::vector<int>& preds, int classes) {
  std::vector<Prediction> out;
  for (size_t i = 0; i < golds.size(); ++i) {
    std::vector<double> logits(static_cast<size_t>(classes), 0.0);
    logits[static_cast<size_t>(preds[i])] = 1.0;
    out.push_back(make_prediction("p" + std::to_string(i), std::move(logits), golds[i]));
  }
  return out;
}

std::string criterion_metric_oracle() {
  std::mt19937_64 rng(505);
  for (int round = 0; round < 500; ++round) {
    const int classes = testutil::draw(rng, 2, 6);
    const int count = testutil::draw(rng, 1, 60);
    std::vector<int> golds, preds;
    for (int i = 0; i < count; ++i) {
      golds.push_back(testutil::draw(rng, 0, classes - 1));
      preds.push_back(testutil::draw(rng, 0, classes - 1));
    }
    std::optional<int> neutral;
    if (round % 3 == 0) neutral = testutil::draw(rng, 0, classes - 1);

    const OracleScores oracle = metric_oracle(golds, preds, classes, neutral);
    const MetricReport report = f1_scores(as_predictions(golds, preds, classes), classes, neutral);
    require(std::abs(report.micro_f1 - oracle.micro) <= 1e-12, "micro-F1 drifted");
    require(std::abs(report.macro_f1 - oracle.macro) <= 1e-12, "macro-F1 drifted");
    require(std::abs(report.weighted_f1 - oracle.weighted) <= 1e-12, "weighted-F1 drifted");
    require(report.micro_f1_excl_neutral.has_value() == neutral.has_value(),
            "neutral-excluded micro presence mismatch");
    if (neutral) {
      require(std::abs(*report.micro_f1_excl_neutral - *oracle.excl) <= 1e-12,
              "neutral-excluded micro drifted");
    }
    for (int c = 0; c < classes; ++c) {
      require(std::abs(report.per_class[static_cast<size_t>(c)].f1 -
                       oracle.per_class[static_cast<size_t>(c)]) <= 1e-12,
              "per-class F1 drifted");
    }
  }

  const MetricReport worked =
      f1_scores(as_predictions({0, 0, 1, 1}, {0, 1, 1, 1}, 2), 2);
  require(std::abs(worked.micro_f1 - 0.75) <= 1e-9,
          "worked example micro-F1 is " + fmt(worked.micro_f1));
  const double weighted_expected = 0.5 * (2.0 / 3.0) + 0.5 * 0.8;
  require(std::abs(worked.weighted_f1 - weighted_expected) <= 1e-9,
          "worked example weighted-F1 is " + fmt(worked.weighted_f1));
  return "500 random sets within 1e-12; worked example micro 0.75, weighted " +
         fmt(worked.weighted_f1);
}

// ---- criterion 6: overfit through the CLI ------------------------------------

std::string criterion_overfit_cli(const Context& ctx) {
  const fs::path dir = ctx.scratch / "c6";
  fs::create_directories(dir);
  const fs::path data = dir / "data";

  require(run_cmd(ctx.cli + " gen-synthetic --out " + data.string() +
                  " --train-count 200 --dev-count 50 --test-count 50 --seed 7 > " +
                  (dir / "gen.log").string() + " 2>&1") == 0,
          "gen-synthetic failed");

  const fs::path cfg = dir / "train.cfg";
  {
    std::ofstream out(cfg);
    out << "train_path = " << (data / "train.jsonl").string() << "\n"
        << "dev_path = " << (data / "dev.jsonl").string() << "\n"
        << "schema_path = " << (data / "schema.json").string() << "\n"
        << "checkpoint_dir = " << (dir / "run1").string() << "\n"
        << "epochs = 500\n"
        << "early_stop_f1 = 0.995\n";
  }

  const auto t0 = std::chrono::steady_clock::now();
  require(run_cmd(ctx.cli + " train --config " + cfg.string() + " > " +
                  (dir / "log1.txt").string() + " 2>&1") == 0,
          "first training run failed");
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  require(seconds < 120.0, "training took " + fmt(seconds) + "s (budget 120s)");

  const std::string log1 = slurp(dir / "log1.txt");
  const double final_f1 = last_value_after(log1, "train_micro_f1");
  require(final_f1 >= 0.99, "train micro-F1 stalled at " + fmt(final_f1));

  require(run_cmd(ctx.cli + " train --config " + cfg.string() +
                  " --set checkpoint_dir=" + (dir / "run2").string() + " > " +
                  (dir / "log2.txt").string() + " 2>&1") == 0,
          "second training run failed");
  const std::string log2 = slurp(dir / "log2.txt");
  const auto epochs1 = lines_with_prefix(log1, "epoch ");
  const auto epochs2 = lines_with_prefix(log2, "epoch ");
  require(!epochs1.empty(), "no epoch lines in the training log");
  require(epochs1 == epochs2, "per-epoch metrics differ between identical runs");

  for (int run = 1; run <= 2; ++run) {
    const std::string tag = std::to_string(run);
    require(run_cmd(ctx.cli + " evaluate --config " + cfg.string() +
                    " --set checkpoint_path=" +
                    (dir / ("run" + tag) / "model.ckpt").string() + " --corpus " +
                    (data / "dev.jsonl").string() + " > " +
                    (dir / ("eval" + tag + ".txt")).string() + " 2>&1") == 0,
            "evaluate failed on run " + tag);
  }
  require(slurp(dir / "eval1.txt") == slurp(dir / "eval2.txt"),
          "dev reports differ between identical runs");
  return "train micro-F1 " + fmt(final_f1) + " after " +
         std::to_string(epochs1.size()) + " epochs in " + fmt(seconds) +
         "s, rerun bitwise identical";
}

// ---- criterion 7: ablation ordering over seeds --------------------------------

std::string criterion_ablation_ordering() {
  std::mt19937_64 data_rng(7);
  const Corpus train_corpus = gen_synthetic(300, data_rng, CuePosition::any, "train");
  const Corpus dev_corpus = gen_synthetic(150, data_rng, CuePosition::any, "dev");

  RunConfig base;
  base.dim = 16;
  base.ff_dim = 32;
  base.layers = 1;
  base.heads = 2;
  base.gcn_layers = 1;
  base.gtn_steps = 2;
  base.k_max = 2;
  base.max_len = 64;
  base.max_speakers = 6;
  base.epochs = 400;
  base.batch_size = 8;
  base.learning_rate = 0.1;  // 0.2 diverges on one seed at this data scale
  base.early_stop_f1 = 0.995;

  int wins = 0;
  std::string per_seed;
  for (unsigned long long seed = 1; seed <= 5; ++seed) {
    base.seed = seed;
    double dev_f1[2];
    const std::string variants[2] = {"full", "no_special_tokens"};
    for (int v = 0; v < 2; ++v) {
      const RunConfig config = apply_variant(base, variants[v]);
      std::ostringstream sink;
      const TrainResult result = train_on(config, train_corpus, nullptr, sink);
      dev_f1[v] =
          f1_scores(predict_corpus(result.model, dev_corpus), result.model.classes()).micro_f1;
    }
    if (dev_f1[0] >= dev_f1[1]) ++wins;
    per_seed += (per_seed.empty() ? "" : ", ") + std::to_string(seed) + ": " +
                fmt(dev_f1[0]) + (dev_f1[0] >= dev_f1[1] ? " >= " : " < ") + fmt(dev_f1[1]);
  }
  require(wins >= 4, "full beat no_special_tokens on only " + std::to_string(wins) +
                         "/5 seeds (" + per_seed + ")");
  return "full >= no_special_tokens on " + std::to_string(wins) + "/5 seeds (" + per_seed + ")";
}

// ---- criterion 8: prefix F1 drop on cue-final data -----------------------------

std::string criterion_prefix_f1() {
  std::mt19937_64 data_rng(11);
  const Corpus train_corpus = gen_synthetic(160, data_rng, CuePosition::final, "train");
  const Corpus dev_corpus = gen_synthetic(60, data_rng, CuePosition::final, "dev");

  RunConfig config;
  config.dim = 16;
  config.ff_dim = 32;
  config.layers = 1;
  config.heads = 2;
  config.gcn_layers = 1;
  config.gtn_steps = 2;
  config.k_max = 2;
  config.max_len = 64;
  config.max_speakers = 6;
  config.epochs = 400;
  config.batch_size = 8;
  config.early_stop_f1 = 0.995;
  config.seed = 1;

  std::ostringstream sink;
  const TrainResult result = train_on(config, train_corpus, &dev_corpus, sink);
  const double dev_f1 =
      f1_scores(predict_corpus(result.model, dev_corpus), result.model.classes()).micro_f1;
  require(dev_f1 >= 0.9, "model reached only dev micro-F1 " + fmt(dev_f1) +
                             ", below the 0.9 floor the criterion needs");
  const double f1c = evaluate_f1c(result.model, dev_corpus);
  require(f1c < dev_f1, "prefix F1 " + fmt(f1c) + " did not drop below F1 " + fmt(dev_f1));
  return "dev F1 " + fmt(dev_f1) + " vs prefix F1_c " + fmt(f1c);
}

// ---- criterion 9: checkpoint round-trip ----------------------------------------

std::string criterion_checkpoint_roundtrip(const Context& ctx) {
  std::mt19937_64 data_rng(5);
  const Corpus train_corpus = gen_synthetic(40, data_rng, CuePosition::any, "train");
  const Corpus dev_corpus = gen_synthetic(30, data_rng, CuePosition::any, "dev");

  RunConfig config;
  config.dim = 16;
  config.ff_dim = 32;
  config.layers = 1;
  config.heads = 2;
  config.gcn_layers = 1;
  config.gtn_steps = 1;
  config.k_max = 2;
  config.max_len = 64;
  config.max_speakers = 6;
  config.epochs = 5;
  config.batch_size = 8;
  config.seed = 3;
  config.report_f1c = true;
  config.report_length_groups = true;

  std::ostringstream sink;
  const TrainResult result = train_on(config, train_corpus, nullptr, sink);

  const fs::path path = ctx.scratch / "c9-model.ckpt";
  save_checkpoint_file(result.model, path.string());
  const Model loaded = load_checkpoint_file(path.string());

  const std::string before =
      render_metric_report(evaluate_corpus(result.model, dev_corpus, config),
                           result.model.class_names);
  const std::string after = render_metric_report(
      evaluate_corpus(loaded, dev_corpus, config), loaded.class_names);
  require(before == after, "dev report changed across save -> load");
  require(!before.empty(), "empty dev report");
  return "save -> load reproduced the " + std::to_string(before.size()) +
         "-byte dev report bitwise";
}

// ---- harness -------------------------------------------------------------------

int run_criterion(int number, const std::string& name,
                  const std::function<std::string()>& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  std::string detail;
  bool pass = true;
  try {
    detail = fn();
  } catch (const std::exception& e) {
    pass = false;
    detail = e.what();
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  char timing[32];
  std::snprintf(timing, sizeof(timing), "%.1fs", seconds);
  std::cout << "criterion " << number << " (" << name << ") "
            << (pass ? "pass" : "FAIL") << ": " << detail << " [" << timing << "]"
            << std::endl;
  return pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: turngraph_acceptance <turngraph-cli> [scratch-dir]\n";
    return 2;
  }
  Context ctx;
  ctx.cli = argv[1];
  ctx.scratch = argc > 2 ? fs::path(argv[2])
                         : fs::temp_directory_path() / "turngraph-acceptance";
  std::error_code ec;
  fs::remove_all(ctx.scratch, ec);
  fs::create_directories(ctx.scratch);

  int failures = 0;
  failures += run_criterion(1, "turn mask law", criterion_mask_law);
  failures += run_criterion(2, "one-layer locality", criterion_locality);
  failures += run_criterion(3, "graph combinatorics", criterion_graph_combinatorics);
  failures += run_criterion(4, "gradient correctness", criterion_gradients);
  failures += run_criterion(5, "metric oracle", criterion_metric_oracle);
  failures += run_criterion(6, "synthetic overfit via CLI",
                            [&] { return criterion_overfit_cli(ctx); });
  failures += run_criterion(7, "ablation ordering", criterion_ablation_ordering);
  failures += run_criterion(8, "prefix F1 drop", criterion_prefix_f1);
  failures += run_criterion(9, "checkpoint round-trip",
                            [&] { return criterion_checkpoint_roundtrip(ctx); });

  if (failures > 0) {
    std::cout << failures << " criterion(s) failed" << std::endl;
    return 1;
  }
  std::cout << "all 9 criteria passed" << std::endl;
  return 0;
}
