#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <fstream>
#include <sstream>

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

namespace py = pybind11;
using namespace turngraph;

namespace {

Mat mask_matrix(const AttentionMask& mask) {
  Mat out(mask.n, mask.n);
  for (int i = 0; i < mask.n; ++i) {
    for (int j = 0; j < mask.n; ++j) out(i, j) = mask.at(i, j) ? 1.0 : 0.0;
  }
  return out;
}

RunConfig config_from_dict(const py::dict& entries) {
  std::map<std::string, std::string> pairs;
  for (const auto& item : entries) {
    pairs[py::cast<std::string>(item.first)] = py::cast<std::string>(py::str(item.second));
  }
  return config_from_pairs(pairs);
}

py::dict report_to_dict(const MetricReport& report) {
  py::dict out;
  out["total"] = report.total;
  out["micro_f1"] = report.micro_f1;
  out["macro_f1"] = report.macro_f1;
  out["weighted_f1"] = report.weighted_f1;
  if (report.micro_f1_excl_neutral) {
    out["micro_f1_excl_neutral"] = *report.micro_f1_excl_neutral;
  }
  if (report.f1c) out["f1c"] = *report.f1c;
  py::list per_class;
  for (const ClassScore& s : report.per_class) {
    py::dict row;
    row["support"] = s.support;
    row["predicted"] = s.predicted;
    row["tp"] = s.tp;
    row["precision"] = s.precision;
    row["recall"] = s.recall;
    row["f1"] = s.f1;
    per_class.append(row);
  }
  out["per_class"] = per_class;
  py::dict groups;
  for (const GroupScore& g : report.groups) {
    py::dict row;
    row["support"] = g.support;
    row["micro_f1"] = g.micro_f1;
    groups[py::str(g.name)] = row;
  }
  out["groups"] = groups;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "turngraph core: dialogue preprocessing, masked encoder, dialogue graph";

  py::register_exception<Error>(m, "TurngraphError");

  py::class_<Turn>(m, "Turn")
      .def(py::init<>())
      .def(py::init([](std::string speaker, std::string text) {
             return Turn{std::move(speaker), std::move(text)};
           }),
           py::arg("speaker"), py::arg("text"))
      .def_readwrite("speaker", &Turn::speaker)
      .def_readwrite("text", &Turn::text);

  py::class_<Instance>(m, "Instance")
      .def(py::init<>())
      .def(py::init([](std::string id, std::vector<Turn> turns,
                       std::vector<std::string> arguments, int label) {
             Instance inst;
             inst.id = std::move(id);
             inst.turns = std::move(turns);
             inst.query.arguments = std::move(arguments);
             inst.label = label;
             return inst;
           }),
           py::arg("id"), py::arg("turns"), py::arg("arguments"), py::arg("label") = -1)
      .def_readwrite("id", &Instance::id)
      .def_readwrite("turns", &Instance::turns)
      .def_property(
          "arguments", [](const Instance& inst) { return inst.query.arguments; },
          [](Instance& inst, std::vector<std::string> args) {
            inst.query.arguments = std::move(args);
          })
      .def_readwrite("label", &Instance::label);

  py::class_<Corpus>(m, "Corpus")
      .def_static("load", &parse_corpus_file, py::arg("corpus_path"), py::arg("schema_path"))
      .def_readonly("class_names", &Corpus::class_names)
      .def_readonly("neutral_class", &Corpus::neutral_class)
      .def("__len__", [](const Corpus& c) { return c.instances.size(); })
      .def("__getitem__",
           [](const Corpus& c, size_t i) {
             if (i >= c.instances.size()) throw py::index_error();
             return c.instances[i];
           })
      .def("content_hash", &corpus_content_hash);

  py::class_<Vocab>(m, "Vocab")
      .def_static("build", &Vocab::build, py::arg("corpus"))
      .def("id", &Vocab::id, py::arg("token"))
      .def("token", &Vocab::token, py::arg("id"))
      .def("__len__", &Vocab::size);

  py::class_<Span>(m, "Span")
      .def_readonly("begin", &Span::begin)
      .def_readonly("end", &Span::end);

  py::class_<EncodedSequence>(m, "EncodedSequence")
      .def_readonly("id", &EncodedSequence::id)
      .def_readonly("token_ids", &EncodedSequence::token_ids)
      .def_readonly("speaker_ids", &EncodedSequence::speaker_ids)
      .def_readonly("tau_positions", &EncodedSequence::tau_positions)
      .def_readonly("spans", &EncodedSequence::spans)
      .def_readonly("num_turns", &EncodedSequence::num_turns)
      .def_readonly("num_args", &EncodedSequence::num_args)
      .def_readonly("label", &EncodedSequence::label)
      .def("__len__", [](const EncodedSequence& s) { return s.token_ids.size(); });

  m.def("tokenize", [](const std::string& text) { return tokenize(text); }, py::arg("text"));
  m.def("substitute_arguments", &substitute_arguments, py::arg("instance"));
  m.def(
      "build_sequence",
      [](const Instance& inst, const Vocab& vocab, int max_len, bool special_tokens) {
        BuildOptions options;
        options.max_len = max_len;
        options.special_tokens = special_tokens;
        return build_sequence(inst, vocab, options);
      },
      py::arg("instance"), py::arg("vocab"), py::arg("max_len") = 128,
      py::arg("special_tokens") = true);
  m.def("truncate_to_prefix", &truncate_to_prefix, py::arg("instance"));
  m.def(
      "build_turn_mask",
      [](const EncodedSequence& seq, bool disabled) {
        return mask_matrix(build_turn_mask(seq, disabled));
      },
      py::arg("sequence"), py::arg("disabled") = false);
  m.def(
      "graph_channels",
      [](const EncodedSequence& seq) {
        const HetGraph graph = build_graph_structure(seq);
        py::dict out;
        for (int c = 0; c < kNumChannels; ++c) {
          out[kChannelNames[c]] = graph.channels[static_cast<size_t>(c)];
        }
        return out;
      },
      py::arg("sequence"));

  m.def(
      "f1_scores",
      [](const std::vector<int>& golds, const std::vector<int>& preds, int class_count,
         std::optional<int> neutral) {
        if (golds.size() != preds.size()) {
          throw numeric_error("SHAPE_MISMATCH", "golds and preds differ in length");
        }
        std::vector<Prediction> rows;
        rows.reserve(golds.size());
        for (size_t i = 0; i < golds.size(); ++i) {
          Prediction p;
          p.id = std::to_string(i);
          p.gold = golds[i];
          p.predicted = preds[i];
          rows.push_back(std::move(p));
        }
        return report_to_dict(f1_scores(rows, class_count, neutral));
      },
      py::arg("golds"), py::arg("preds"), py::arg("class_count"),
      py::arg("neutral") = std::nullopt);

  py::class_<Model>(m, "Model")
      .def_static(
          "load", [](const std::string& path) { return load_checkpoint_file(path); },
          py::arg("path"))
      .def_readonly("class_names", &Model::class_names)
      .def("save",
           [](const Model& model, const std::string& path) {
             save_checkpoint_file(model, path);
           })
      .def("encode_instance", &Model::encode_instance, py::arg("instance"))
      .def(
          "logits",
          [](const Model& model, const Instance& inst) {
            return model.logits(model.encode_instance(inst));
          },
          py::arg("instance"))
      .def(
          "predict",
          [](const Model& model, const Instance& inst) {
            const Prediction p = model.predict(inst);
            return py::make_tuple(p.predicted, p.logits);
          },
          py::arg("instance"))
      .def(
          "evaluate",
          [](const Model& model, const Corpus& corpus, const py::dict& config) {
            return report_to_dict(evaluate_corpus(model, corpus, config_from_dict(config)));
          },
          py::arg("corpus"), py::arg("config") = py::dict());

  m.def(
      "train",
      [](const py::dict& config) {
        std::ostringstream log;
        TrainResult result = train(config_from_dict(config), log);
        return py::make_tuple(std::move(result.model), log.str());
      },
      py::arg("config"));
  m.def(
      "gen_synthetic",
      [](const std::string& out_dir, int train_count, int dev_count, int test_count,
         unsigned long long seed, const std::string& cue_position) {
        SyntheticOptions options;
        options.train_count = train_count;
        options.dev_count = dev_count;
        options.test_count = test_count;
        options.seed = seed;
        options.cue_position = parse_cue_position(cue_position);
        write_synthetic(options, out_dir);
      },
      py::arg("out_dir"), py::arg("train_count") = 200, py::arg("dev_count") = 50,
      py::arg("test_count") = 50, py::arg("seed") = 7, py::arg("cue_position") = "any");
}
