#include "turngraph/checkpoint.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "turngraph/error.hpp"
#include "turngraph/vocab.hpp"

namespace turngraph {

namespace {

constexpr const char* kVersionLine = "turngraph checkpoint v1";

[[noreturn]] void malformed(const std::string& what) {
  throw data_error("MALFORMED_CHECKPOINT", what);
}

std::string next_line(std::istream& in, const char* context) {
  std::string line;
  if (!std::getline(in, line)) malformed(std::string("unexpected end of file in ") + context);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

// "<keyword> <rest>" with the rest returned verbatim (names may hold spaces).
std::string expect_tag(const std::string& line, const std::string& keyword) {
  if (line.rfind(keyword + " ", 0) != 0) {
    malformed("expected '" + keyword + " ...', got '" + line + "'");
  }
  return line.substr(keyword.size() + 1);
}

long parse_count(const std::string& text, const char* what) {
  try {
    size_t pos = 0;
    const long v = std::stol(text, &pos);
    if (pos != text.size() || v < 0) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    malformed(std::string("bad ") + what + " count '" + text + "'");
  }
}

}  // namespace

void save_checkpoint(const Model& model, std::ostream& out) {
  out << kVersionLine << "\n";

  const std::string config_text = serialize_config(model.config);
  long config_lines = 0;
  for (char c : config_text) config_lines += c == '\n' ? 1 : 0;
  out << "config " << config_lines << "\n" << config_text;

  out << "classes " << model.classes() << "\n";
  for (const std::string& name : model.class_names) out << "class " << name << "\n";

  out << "vocab " << model.vocab.size() << "\n";
  for (int id = Vocab::first_open_id; id < model.vocab.size(); ++id) {
    out << "token " << model.vocab.token(id) << "\n";
  }

  char number[48];
  model.for_each_param([&](const std::string& name, const Mat& tensor) {
    out << "tensor " << name << " " << tensor.rows() << " " << tensor.cols() << "\n";
    for (Eigen::Index i = 0; i < tensor.rows(); ++i) {
      for (Eigen::Index j = 0; j < tensor.cols(); ++j) {
        std::snprintf(number, sizeof(number), "%a", tensor(i, j));
        if (j > 0) out << " ";
        out << number;
      }
      out << "\n";
    }
  });
  out << "end\n";
}

void save_checkpoint_file(const Model& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw data_error("MISSING_FILE", "cannot write checkpoint " + path);
  save_checkpoint(model, out);
  out.flush();
  if (!out) throw data_error("MISSING_FILE", "failed writing checkpoint " + path);
}

Model load_checkpoint(std::istream& in) {
  if (next_line(in, "header") != kVersionLine) malformed("bad version line");

  const long config_lines = parse_count(expect_tag(next_line(in, "config"), "config"), "config line");
  std::string config_text;
  for (long i = 0; i < config_lines; ++i) config_text += next_line(in, "config body") + "\n";
  std::istringstream config_stream(config_text);
  const RunConfig config = parse_config(config_stream);

  const long class_count = parse_count(expect_tag(next_line(in, "classes"), "classes"), "class");
  std::vector<std::string> class_names;
  for (long i = 0; i < class_count; ++i) {
    class_names.push_back(expect_tag(next_line(in, "class list"), "class"));
  }

  const long vocab_size = parse_count(expect_tag(next_line(in, "vocab"), "vocab"), "vocab");
  Vocab vocab;
  for (int id = Vocab::first_open_id; id < vocab_size; ++id) {
    const std::string token = expect_tag(next_line(in, "vocab list"), "token");
    if (vocab.add(token) != id) malformed("duplicate vocab token '" + token + "'");
  }
  if (vocab.size() != vocab_size) malformed("vocab size mismatch");

  std::map<std::string, Mat> tensors;
  std::string line = next_line(in, "tensor list");
  while (line != "end") {
    std::istringstream header(line);
    std::string tag, name;
    long rows = -1, cols = -1;
    header >> tag >> name >> rows >> cols;
    if (tag != "tensor" || name.empty() || rows < 0 || cols < 0 || !header.eof()) {
      malformed("bad tensor header '" + line + "'");
    }
    if (tensors.count(name)) malformed("duplicate tensor '" + name + "'");
    Mat tensor(rows, cols);
    for (long i = 0; i < rows; ++i) {
      const std::string row = next_line(in, "tensor row");
      const char* cursor = row.c_str();
      for (long j = 0; j < cols; ++j) {
        char* done = nullptr;
        const double v = std::strtod(cursor, &done);
        if (done == cursor) malformed("bad value in tensor '" + name + "'");
        tensor(i, j) = v;
        cursor = done;
      }
      while (*cursor == ' ') ++cursor;
      if (*cursor != '\0') malformed("trailing data in tensor '" + name + "'");
    }
    tensors.emplace(std::move(name), std::move(tensor));
    line = next_line(in, "tensor list");
  }

  Model model = Model::init(config, std::move(vocab), std::move(class_names));
  size_t used = 0;
  model.for_each_param([&](const std::string& name, Mat& tensor) {
    const auto it = tensors.find(name);
    if (it == tensors.end()) malformed("missing tensor '" + name + "'");
    if (it->second.rows() != tensor.rows() || it->second.cols() != tensor.cols()) {
      malformed("tensor '" + name + "' has the wrong shape");
    }
    tensor = it->second;
    ++used;
  });
  if (used != tensors.size()) malformed("checkpoint holds unknown tensors");
  return model;
}

Model load_checkpoint_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw data_error("MISSING_FILE", "cannot open checkpoint " + path);
  return load_checkpoint(in);
}

}  // namespace turngraph
