#include "turngraph/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include "json.hpp"

namespace turngraph {

using ordered_json = nlohmann::ordered_json;

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    size_t start = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i > start) out.emplace_back(text.substr(start, i - start));
  }
  return out;
}

bool contains_token_seq(const std::vector<std::string>& tokens,
                        const std::vector<std::string>& pattern) {
  if (pattern.empty() || pattern.size() > tokens.size()) return false;
  for (size_t i = 0; i + pattern.size() <= tokens.size(); ++i) {
    bool match = true;
    for (size_t j = 0; j < pattern.size(); ++j) {
      if (tokens[i + j] != pattern[j]) {
        match = false;
        break;
      }
    }
    if (match) return true;
  }
  return false;
}

ValidationReport validate_instance(const Instance& inst, int class_count) {
  ValidationReport report;
  auto add = [&report](const char* code, const std::string& msg) {
    report.push_back({code, msg});
  };

  if (inst.id.empty()) add("EMPTY_ID", "instance has no id");
  if (inst.turns.empty()) add("NO_TURNS", "dialogue has no turns");
  for (size_t i = 0; i < inst.turns.size(); ++i) {
    const Turn& t = inst.turns[i];
    if (t.speaker.empty())
      add("EMPTY_SPEAKER", "turn " + std::to_string(i + 1) + " has empty speaker");
    if (tokenize(t.text).empty())
      add("EMPTY_TEXT", "turn " + std::to_string(i + 1) + " has no tokens");
  }

  const auto& args = inst.query.arguments;
  if (args.empty()) add("NO_ARGS", "query has no arguments");
  if (args.size() > 2)
    add("TOO_MANY_ARGS", "query has " + std::to_string(args.size()) + " arguments, max 2");
  for (size_t j = 0; j < args.size(); ++j) {
    if (args[j].empty()) {
      add("EMPTY_ARG", "argument " + std::to_string(j + 1) + " is empty");
      continue;
    }
    std::vector<std::string> pattern = tokenize(args[j]);
    bool mentioned = false;
    for (const Turn& t : inst.turns) {
      if (t.speaker == args[j] || contains_token_seq(tokenize(t.text), pattern)) {
        mentioned = true;
        break;
      }
    }
    if (!mentioned)
      add("ARG_NOT_MENTIONED",
          "argument \"" + args[j] + "\" is neither a speaker nor mentioned in any turn");
  }

  if (inst.label < 0 || inst.label >= class_count)
    add("LABEL_OUT_OF_RANGE",
        "label " + std::to_string(inst.label) + " outside [0, " +
            std::to_string(class_count) + ")");
  return report;
}

CorpusSchema load_schema(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw data_error("SCHEMA_NOT_FOUND", "cannot open schema file " + path);
  ordered_json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw data_error("MALFORMED_SCHEMA", path + ": " + e.what());
  }
  CorpusSchema schema;
  if (!j.contains("class_names") || !j["class_names"].is_array())
    throw data_error("MALFORMED_SCHEMA", path + ": missing class_names array");
  for (const auto& name : j["class_names"]) {
    if (!name.is_string())
      throw data_error("MALFORMED_SCHEMA", path + ": class names must be strings");
    schema.class_names.push_back(name.get<std::string>());
  }
  std::unordered_set<std::string> seen;
  for (const auto& name : schema.class_names) {
    if (!seen.insert(name).second)
      throw data_error("DUPLICATE_CLASS", path + ": duplicate class name \"" + name + "\"");
  }
  if (j.contains("neutral_class") && !j["neutral_class"].is_null()) {
    int n = j["neutral_class"].get<int>();
    if (n < 0 || n >= static_cast<int>(schema.class_names.size()))
      throw data_error("NEUTRAL_OUT_OF_RANGE",
                       path + ": neutral_class " + std::to_string(n) + " not a valid index");
    schema.neutral_class = n;
  }
  return schema;
}

Corpus parse_corpus(std::istream& stream, const CorpusSchema& schema) {
  Corpus corpus;
  corpus.class_names = schema.class_names;
  corpus.neutral_class = schema.neutral_class;

  std::unordered_set<std::string> ids;
  std::string line;
  long line_no = 0;
  while (std::getline(stream, line)) {
    ++line_no;
    if (line.empty()) continue;
    ordered_json j;
    try {
      j = ordered_json::parse(line);
    } catch (const std::exception& e) {
      throw data_error("MALFORMED_RECORD",
                       "line " + std::to_string(line_no) + ": " + e.what());
    }

    Instance inst;
    try {
      inst.id = j.at("id").get<std::string>();
      for (const auto& turn : j.at("turns")) {
        inst.turns.push_back(Turn{turn.at("speaker").get<std::string>(),
                                  turn.at("text").get<std::string>()});
      }
      for (const auto& arg : j.at("arguments"))
        inst.query.arguments.push_back(arg.get<std::string>());
      std::string label = j.at("label").get<std::string>();
      auto it = std::find(corpus.class_names.begin(), corpus.class_names.end(), label);
      if (it == corpus.class_names.end())
        throw data_error("UNKNOWN_CLASS", "line " + std::to_string(line_no) +
                                              ": unknown class \"" + label + "\"");
      inst.label = static_cast<int>(it - corpus.class_names.begin());
    } catch (const Error&) {
      throw;
    } catch (const std::exception& e) {
      throw data_error("MALFORMED_RECORD",
                       "line " + std::to_string(line_no) + ": " + e.what());
    }

    if (!ids.insert(inst.id).second)
      throw data_error("DUPLICATE_ID", "line " + std::to_string(line_no) +
                                           ": duplicate id \"" + inst.id + "\"");

    ValidationReport report = validate_instance(inst, corpus.class_count());
    if (!report.empty()) {
      std::string codes;
      for (const auto& v : report) {
        if (!codes.empty()) codes += ", ";
        codes += v.code;
      }
      throw data_error("INVALID_INSTANCE", "line " + std::to_string(line_no) + " (" +
                                               inst.id + "): " + codes);
    }
    corpus.instances.push_back(std::move(inst));
  }
  return corpus;
}

Corpus parse_corpus_file(const std::string& corpus_path, const std::string& schema_path) {
  CorpusSchema schema = load_schema(schema_path);
  std::ifstream in(corpus_path);
  if (!in) throw data_error("CORPUS_NOT_FOUND", "cannot open corpus file " + corpus_path);
  return parse_corpus(in, schema);
}

std::string serialize_record(const Instance& inst,
                             const std::vector<std::string>& class_names) {
  ordered_json j;
  j["id"] = inst.id;
  j["turns"] = ordered_json::array();
  for (const Turn& t : inst.turns)
    j["turns"].push_back({{"speaker", t.speaker}, {"text", t.text}});
  j["arguments"] = inst.query.arguments;
  j["label"] = class_names.at(static_cast<size_t>(inst.label));
  return j.dump();
}

void serialize_corpus(const Corpus& corpus, std::ostream& out) {
  for (const Instance& inst : corpus.instances)
    out << serialize_record(inst, corpus.class_names) << "\n";
}

void write_corpus_file(const Corpus& corpus, const std::string& corpus_path) {
  std::ofstream out(corpus_path);
  if (!out) throw data_error("WRITE_FAILED", "cannot write " + corpus_path);
  serialize_corpus(corpus, out);
}

void write_schema_file(const CorpusSchema& schema, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw data_error("WRITE_FAILED", "cannot write " + path);
  ordered_json j;
  j["class_names"] = schema.class_names;
  if (schema.neutral_class)
    j["neutral_class"] = *schema.neutral_class;
  else
    j["neutral_class"] = nullptr;
  out << j.dump(2) << "\n";
}

std::string corpus_content_hash(const Corpus& corpus) {
  std::ostringstream buf;
  serialize_corpus(corpus, buf);
  const std::string bytes = buf.str();
  unsigned long long h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", h);
  return std::string(hex);
}

}  // namespace turngraph
