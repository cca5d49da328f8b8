#include "turngraph/train.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <ostream>
#include <unordered_map>

#include "turngraph/error.hpp"

namespace turngraph {

namespace {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double micro_f1_of(const Model& model, const Corpus& corpus) {
  return f1_scores(predict_corpus(model, corpus), model.classes()).micro_f1;
}

Corpus load_required(const std::string& path, const std::string& schema_path,
                     const char* what) {
  if (path.empty()) {
    throw config_error("BAD_CONFIG", std::string(what) + "_path is required");
  }
  return parse_corpus_file(path, schema_path);
}

}  // namespace

TrainResult train_on(const RunConfig& config, const Corpus& train_corpus,
                     const Corpus* dev_corpus, std::ostream& log) {
  validate_config(config);
  if (train_corpus.instances.empty()) {
    throw data_error("EMPTY_PREDICTIONS", "training corpus is empty");
  }

  TrainResult result{Model::init(config, train_corpus), {}, 0};
  Model& model = result.model;

  // Pre-encode once; ablations are fixed for the whole run. This also
  // surfaces data errors before step 1.
  std::vector<EncodedSequence> sequences;
  sequences.reserve(train_corpus.instances.size());
  for (const Instance& inst : train_corpus.instances) {
    if (inst.label < 0 || inst.label >= model.classes()) {
      throw data_error("LABEL_OUT_OF_RANGE", "instance " + inst.id + " lacks a label");
    }
    sequences.push_back(model.encode_instance(inst));
  }

  std::vector<Mat*> params;
  model.for_each_param([&](const std::string&, Mat& tensor) { params.push_back(&tensor); });
  std::vector<Mat> grads(params.size());

  std::mt19937_64 shuffle_rng(config.seed + 0x9e3779b97f4a7c15ULL);
  std::mt19937_64 dropout_rng(config.seed + 0x6a09e667f3bcc909ULL);
  std::mt19937_64* dropout = config.dropout > 0.0 ? &dropout_rng : nullptr;

  std::vector<size_t> order(sequences.size());
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double loss_sum = 0.0;

    for (size_t start = 0; start < order.size(); start += static_cast<size_t>(config.batch_size)) {
      const size_t stop = std::min(order.size(), start + static_cast<size_t>(config.batch_size));
      for (size_t p = 0; p < params.size(); ++p) {
        grads[p] = Mat::Zero(params[p]->rows(), params[p]->cols());
      }
      for (size_t b = start; b < stop; ++b) {
        const EncodedSequence& seq = sequences[order[b]];
        const int gold = train_corpus.instances[order[b]].label;
        ad::Tape tape;
        const Binder binder(tape, model);
        const int loss = loss_on_tape(tape, binder, model, seq, gold, dropout);
        const double value = tape.val(loss)(0, 0);
        if (!std::isfinite(value)) {
          throw numeric_error("NONFINITE_LOSS",
                              "loss diverged at epoch " + std::to_string(epoch));
        }
        loss_sum += value;
        tape.backward(loss);
        size_t p = 0;
        for (const auto& [name, leaf] : binder.entries()) {
          (void)name;
          grads[p++] += tape.grad(leaf);
        }
      }
      const double step = config.learning_rate / static_cast<double>(stop - start);
      for (size_t p = 0; p < params.size(); ++p) *params[p] -= step * grads[p];
    }

    EpochLog entry;
    entry.epoch = epoch;
    entry.train_loss = loss_sum / static_cast<double>(sequences.size());
    if (config.early_stop_f1 > 0.0) entry.train_micro_f1 = micro_f1_of(model, train_corpus);
    if (dev_corpus && !dev_corpus->instances.empty()) {
      entry.dev_micro_f1 = micro_f1_of(model, *dev_corpus);
    }

    log << "epoch " << entry.epoch << " train_loss " << format_double(entry.train_loss);
    if (entry.train_micro_f1) log << " train_micro_f1 " << format_double(*entry.train_micro_f1);
    if (entry.dev_micro_f1) log << " dev_micro_f1 " << format_double(*entry.dev_micro_f1);
    log << "\n";

    result.logs.push_back(entry);
    result.epochs_run = epoch;
    if (entry.train_micro_f1 && *entry.train_micro_f1 >= config.early_stop_f1) break;
  }
  return result;
}

TrainResult train(const RunConfig& config, std::ostream& log) {
  const Corpus train_corpus = load_required(config.train_path, config.schema_path, "train");
  std::optional<Corpus> dev_corpus;
  if (!config.dev_path.empty()) {
    dev_corpus = parse_corpus_file(config.dev_path, config.schema_path);
  }
  TrainResult result = train_on(config, train_corpus, dev_corpus ? &*dev_corpus : nullptr, log);
  if (!config.checkpoint_dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(config.checkpoint_dir, ec);
    if (ec) throw data_error("MISSING_FILE", "cannot create " + config.checkpoint_dir);
    const auto path = std::filesystem::path(config.checkpoint_dir) / "model.ckpt";
    save_checkpoint_file(result.model, path.string());
    log << "checkpoint " << path.string() << "\n";
  }
  return result;
}

std::vector<Prediction> predict_corpus(const Model& model, const Corpus& corpus) {
  std::vector<Prediction> preds;
  preds.reserve(corpus.instances.size());
  for (const Instance& inst : corpus.instances) preds.push_back(model.predict(inst));
  return preds;
}

double evaluate_f1c(const Model& model, const Corpus& corpus) {
  std::vector<Prediction> preds;
  for (const Instance& inst : corpus.instances) {
    if (inst.query.arguments.size() != 2) continue;
    preds.push_back(model.predict(truncate_to_prefix(inst)));
  }
  if (preds.empty()) {
    throw data_error("EMPTY_PREDICTIONS", "no two-argument instances for the prefix metric");
  }
  return f1_scores(preds, model.classes()).micro_f1;
}

void check_evaluation_compatible(const Model& model, const Corpus& corpus) {
  if (corpus.class_names != model.class_names) {
    throw config_error("CONFIG_MISMATCH",
                       "corpus schema classes differ from the checkpoint's");
  }
}

long dialogue_token_length(const Instance& inst) {
  long total = 0;
  for (const Turn& turn : inst.turns) {
    total += static_cast<long>(tokenize(turn.speaker).size());
    total += static_cast<long>(tokenize(turn.text).size());
  }
  return total;
}

std::vector<std::string> load_class_group_map(const std::string& path,
                                              const std::vector<std::string>& class_names) {
  std::ifstream in(path);
  if (!in) throw data_error("MISSING_FILE", "cannot open symmetry map " + path);
  std::unordered_map<std::string, std::string> by_name;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto split = line.find_last_of(" \t");
    if (split == std::string::npos || split == 0 || split + 1 == line.size()) {
      throw data_error("UNMAPPED_CLASS",
                       "symmetry map line " + std::to_string(line_no) +
                           ": expected 'class group'");
    }
    std::string name = line.substr(0, split);
    while (!name.empty() && (name.back() == ' ' || name.back() == '\t')) name.pop_back();
    by_name[name] = line.substr(split + 1);
  }
  std::vector<std::string> groups;
  groups.reserve(class_names.size());
  for (const std::string& name : class_names) {
    const auto it = by_name.find(name);
    if (it == by_name.end()) {
      throw data_error("UNMAPPED_CLASS", "class '" + name + "' missing from symmetry map");
    }
    groups.push_back(it->second);
  }
  return groups;
}

MetricReport evaluate_corpus(const Model& model, const Corpus& corpus,
                             const RunConfig& eval_config) {
  check_evaluation_compatible(model, corpus);
  const std::vector<Prediction> preds = predict_corpus(model, corpus);

  std::optional<int> neutral;
  if (eval_config.neutral_class >= 0) {
    neutral = eval_config.neutral_class;
  } else if (corpus.neutral_class) {
    neutral = corpus.neutral_class;
  }
  if (eval_config.report_excl_neutral && !neutral) {
    throw config_error("BAD_CONFIG",
                       "neutral exclusion requested but no neutral class is known");
  }

  MetricReport report = f1_scores(preds, model.classes(), neutral);

  if (!eval_config.symmetry_map_path.empty()) {
    const std::vector<std::string> groups =
        load_class_group_map(eval_config.symmetry_map_path, model.class_names);
    MetricReport sym = group_report_by_class(preds, model.classes(), neutral, groups);
    for (GroupScore& g : sym.groups) {
      g.name = "sym:" + g.name;
      report.groups.push_back(std::move(g));
    }
  }
  if (eval_config.report_length_groups) {
    std::unordered_map<std::string, long> lengths;
    for (const Instance& inst : corpus.instances) {
      lengths[inst.id] = dialogue_token_length(inst);
    }
    MetricReport len = group_report_by_length(preds, model.classes(), neutral, lengths);
    for (GroupScore& g : len.groups) {
      g.name = "len:" + g.name;
      report.groups.push_back(std::move(g));
    }
  }
  if (eval_config.report_f1c) {
    report.f1c = evaluate_f1c(model, corpus);
  }
  return report;
}

const std::vector<std::string> kAblationVariants = {"full", "no_mask",
                                                    "no_special_tokens", "intra_only"};

RunConfig apply_variant(const RunConfig& base, const std::string& variant) {
  RunConfig config = base;
  config.no_turn_mask = false;
  config.no_special_tokens = false;
  config.intra_turn_only = false;
  if (variant == "full") {
  } else if (variant == "no_mask") {
    config.no_turn_mask = true;
  } else if (variant == "no_special_tokens") {
    config.no_special_tokens = true;
    config.no_turn_mask = true;
  } else if (variant == "intra_only") {
    config.intra_turn_only = true;
  } else {
    throw config_error("BAD_VALUE", "unknown ablation variant '" + variant + "'");
  }
  validate_config(config);
  return config;
}

std::string ablate(const RunConfig& config, std::ostream& log) {
  const Corpus train_corpus = load_required(config.train_path, config.schema_path, "train");
  const Corpus dev_corpus = load_required(config.dev_path, config.schema_path, "dev");
  const std::string hash = corpus_content_hash(train_corpus);

  std::string summary;
  std::string blocks;
  for (const std::string& variant : kAblationVariants) {
    const RunConfig variant_config = apply_variant(config, variant);
    log << "variant " << variant << "\n";
    TrainResult result = train_on(variant_config, train_corpus, &dev_corpus, log);
    const MetricReport report = evaluate_corpus(result.model, dev_corpus, variant_config);
    summary += "variant " + variant + " data_hash " + hash + " epochs " +
               std::to_string(result.epochs_run) + " dev_micro_f1 " +
               format_double(report.micro_f1) + "\n";
    blocks += "[report " + variant + "]\n";
    blocks += render_metric_report(report, result.model.class_names);
  }
  return summary + blocks;
}

}  // namespace turngraph
