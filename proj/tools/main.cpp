#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "turngraph/checkpoint.hpp"
#include "turngraph/config.hpp"
#include "turngraph/corpus.hpp"
#include "turngraph/error.hpp"
#include "turngraph/graph.hpp"
#include "turngraph/mask.hpp"
#include "turngraph/metrics.hpp"
#include "turngraph/model.hpp"
#include "turngraph/sequence.hpp"
#include "turngraph/synthetic.hpp"
#include "turngraph/train.hpp"

namespace {

using namespace turngraph;

RunConfig load_config_with_overrides(const std::string& path,
                                     const std::vector<std::string>& overrides) {
  std::map<std::string, std::string> pairs;
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw config_error("MISSING_FILE", "cannot open config file " + path);
    pairs = read_config_pairs(in);
  }
  for (const std::string& item : overrides) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw config_error("BAD_VALUE", "--set expects key=value, got '" + item + "'");
    }
    pairs[item.substr(0, eq)] = item.substr(eq + 1);
  }
  return config_from_pairs(pairs);
}

// Shared flags of the inspect commands: a corpus, its schema, and the
// instance to look at.
struct InspectArgs {
  std::string corpus_path;
  std::string schema_path;
  std::string id;
  bool no_special_tokens = false;
  int max_len = 128;
};

void add_inspect_options(CLI::App* cmd, InspectArgs& args) {
  cmd->add_option("--corpus", args.corpus_path, "corpus .jsonl path")->required();
  cmd->add_option("--schema", args.schema_path, "schema .json path")->required();
  cmd->add_option("--id", args.id, "instance id (default: first instance)");
  cmd->add_option("--max-len", args.max_len, "sequence length budget");
  cmd->add_flag("--no-special-tokens", args.no_special_tokens,
                "assemble the sequence without [T] tokens");
}

const Instance& find_instance(const Corpus& corpus, const std::string& id) {
  if (id.empty()) return corpus.instances.front();
  for (const Instance& inst : corpus.instances) {
    if (inst.id == id) return inst;
  }
  throw data_error("UNKNOWN_ID", "no instance with id '" + id + "'");
}

EncodedSequence inspect_sequence(const InspectArgs& args, Vocab& vocab_out) {
  const Corpus corpus = parse_corpus_file(args.corpus_path, args.schema_path);
  if (corpus.instances.empty()) {
    throw data_error("EMPTY_PREDICTIONS", "corpus has no instances");
  }
  vocab_out = Vocab::build(corpus);
  BuildOptions options;
  options.max_len = args.max_len;
  options.special_tokens = !args.no_special_tokens;
  return build_sequence(substitute_arguments(find_instance(corpus, args.id)), vocab_out,
                        options);
}

int run(int argc, char** argv) {
  CLI::App app{"turngraph: hierarchical dialogue classification at desk scale"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;

  auto* train_cmd = app.add_subcommand("train", "train a model and write a checkpoint");
  train_cmd->add_option("--config", config_path, "run config file")->required();
  train_cmd->add_option("--set", overrides, "override config entries (key=value)");

  auto* eval_cmd = app.add_subcommand("evaluate", "evaluate a checkpoint on a corpus");
  eval_cmd->add_option("--config", config_path, "run config file")->required();
  eval_cmd->add_option("--set", overrides, "override config entries (key=value)");
  std::string eval_corpus_path;
  eval_cmd->add_option("--corpus", eval_corpus_path,
                       "corpus to score (default: config test_path, then dev_path)");

  auto* ablate_cmd = app.add_subcommand("ablate", "train and compare all ablation variants");
  ablate_cmd->add_option("--config", config_path, "run config file")->required();
  ablate_cmd->add_option("--set", overrides, "override config entries (key=value)");

  auto* gen_cmd = app.add_subcommand("gen-synthetic", "write the synthetic cue-speaker corpus");
  SyntheticOptions gen_options;
  std::string gen_out = "synthetic";
  std::string cue_position = "any";
  gen_cmd->add_option("--out", gen_out, "output directory");
  gen_cmd->add_option("--train-count", gen_options.train_count, "train split size");
  gen_cmd->add_option("--dev-count", gen_options.dev_count, "dev split size");
  gen_cmd->add_option("--test-count", gen_options.test_count, "test split size");
  gen_cmd->add_option("--seed", gen_options.seed, "generator seed");
  gen_cmd->add_option("--cue-position", cue_position, "'any' or 'final'");

  InspectArgs seq_args;
  auto* seq_cmd = app.add_subcommand("inspect-sequence", "print the encoded token table");
  add_inspect_options(seq_cmd, seq_args);

  InspectArgs mask_args;
  bool mask_disabled = false;
  auto* mask_cmd = app.add_subcommand("inspect-mask", "print the turn-level attention mask");
  add_inspect_options(mask_cmd, mask_args);
  mask_cmd->add_flag("--no-turn-mask", mask_disabled, "show the all-true ablation mask");

  InspectArgs graph_args;
  auto* graph_cmd = app.add_subcommand("inspect-graph", "print nodes and edge channels");
  add_inspect_options(graph_cmd, graph_args);

  auto* grad_cmd = app.add_subcommand("grad-check", "finite-difference check on a tiny model");
  int gc_dim = 8, gc_ff = 16, gc_layers = 2, gc_heads = 2, gc_gcn = 1, gc_gtn = 2;
  unsigned long long gc_seed = 1;
  double gc_eps = 1e-4;
  grad_cmd->add_option("--dim", gc_dim, "model width");
  grad_cmd->add_option("--ff-dim", gc_ff, "feed-forward width");
  grad_cmd->add_option("--layers", gc_layers, "encoder layers");
  grad_cmd->add_option("--heads", gc_heads, "attention heads");
  grad_cmd->add_option("--gcn-layers", gc_gcn, "graph convolution layers");
  grad_cmd->add_option("--gtn-steps", gc_gtn, "channel composition steps");
  grad_cmd->add_option("--seed", gc_seed, "init seed");
  grad_cmd->add_option("--eps", gc_eps, "finite-difference step");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // bad flags are config errors
  }

  if (train_cmd->parsed()) {
    const RunConfig config = load_config_with_overrides(config_path, overrides);
    const TrainResult result = train(config, std::cout);
    std::cout << "epochs_run " << result.epochs_run << "\n";
    return 0;
  }

  if (eval_cmd->parsed()) {
    const RunConfig config = load_config_with_overrides(config_path, overrides);
    if (config.checkpoint_path.empty()) {
      throw config_error("BAD_CONFIG", "evaluate needs checkpoint_path");
    }
    std::string corpus_path = eval_corpus_path;
    if (corpus_path.empty()) corpus_path = config.test_path;
    if (corpus_path.empty()) corpus_path = config.dev_path;
    if (corpus_path.empty()) {
      throw config_error("BAD_CONFIG", "evaluate needs a corpus (--corpus or test/dev path)");
    }
    const Model model = load_checkpoint_file(config.checkpoint_path);
    const Corpus corpus = parse_corpus_file(corpus_path, config.schema_path);
    const MetricReport report = evaluate_corpus(model, corpus, config);
    const std::string text = render_metric_report(report, model.class_names);
    std::cout << text;
    if (!config.report_path.empty()) {
      std::ofstream out(config.report_path);
      if (!out) throw data_error("MISSING_FILE", "cannot write " + config.report_path);
      out << text;
    }
    return 0;
  }

  if (ablate_cmd->parsed()) {
    const RunConfig config = load_config_with_overrides(config_path, overrides);
    std::cout << ablate(config, std::cerr);
    return 0;
  }

  if (gen_cmd->parsed()) {
    gen_options.cue_position = parse_cue_position(cue_position);
    write_synthetic(gen_options, gen_out);
    std::cout << "wrote " << gen_out << "/{schema.json,train.jsonl,dev.jsonl,test.jsonl}\n";
    return 0;
  }

  if (seq_cmd->parsed()) {
    Vocab vocab;
    const EncodedSequence seq = inspect_sequence(seq_args, vocab);
    std::cout << render_sequence_table(seq, vocab);
    return 0;
  }

  if (mask_cmd->parsed()) {
    Vocab vocab;
    const EncodedSequence seq = inspect_sequence(mask_args, vocab);
    std::cout << render_mask_grid(build_turn_mask(seq, mask_disabled));
    return 0;
  }

  if (graph_cmd->parsed()) {
    Vocab vocab;
    const EncodedSequence seq = inspect_sequence(graph_args, vocab);
    std::cout << render_graph_listing(seq);
    return 0;
  }

  if (grad_cmd->parsed()) {
    RunConfig config;
    config.dim = gc_dim;
    config.ff_dim = gc_ff;
    config.layers = gc_layers;
    config.heads = gc_heads;
    config.gcn_layers = gc_gcn;
    config.gtn_steps = gc_gtn;
    config.seed = gc_seed;
    config.max_len = 64;
    validate_config(config);

    Corpus corpus;
    corpus.class_names = synthetic_schema().class_names;
    Instance inst;
    inst.id = "probe";
    inst.turns = {Turn{"alice", "zorp gadget well"}, Turn{"bob", "sure fine okay"}};
    inst.query.arguments = {"alice", "gadget"};
    inst.label = 1;
    corpus.instances.push_back(inst);

    Model model = Model::init(config, corpus);
    const GradCheckReport report = grad_check(model, inst, gc_eps);
    std::cout << render_grad_check(report);
    if (!report.pass) {
      throw numeric_error("GRAD_CHECK_FAILED", "finite differences disagree with the tape");
    }
    return 0;
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const turngraph::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
