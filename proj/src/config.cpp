#include "turngraph/config.hpp"

#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <vector>

#include "turngraph/error.hpp"

namespace turngraph {

namespace {

struct Field {
  std::string key;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&)> set;
};

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

int parse_int(const std::string& key, const std::string& value) {
  try {
    size_t pos = 0;
    const int v = std::stoi(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw config_error("BAD_VALUE", key + " expects an integer, got '" + value + "'");
  }
}

unsigned long long parse_ull(const std::string& key, const std::string& value) {
  try {
    size_t pos = 0;
    const unsigned long long v = std::stoull(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw config_error("BAD_VALUE",
                       key + " expects a non-negative integer, got '" + value + "'");
  }
}

double parse_real(const std::string& key, const std::string& value) {
  try {
    size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw config_error("BAD_VALUE", key + " expects a real number, got '" + value + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw config_error("BAD_VALUE", key + " expects true/false, got '" + value + "'");
}

std::string render_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<Field> field_table() {
  std::vector<Field> fields;
  auto str = [&](const char* key, std::string RunConfig::*member) {
    fields.push_back({key, [member](const RunConfig& c) { return c.*member; },
                      [member](RunConfig& c, const std::string& v) { c.*member = v; }});
  };
  auto num = [&](const char* key, int RunConfig::*member) {
    fields.push_back({key,
                      [member](const RunConfig& c) { return std::to_string(c.*member); },
                      [member, key](RunConfig& c, const std::string& v) {
                        c.*member = parse_int(key, v);
                      }});
  };
  auto real = [&](const char* key, double RunConfig::*member) {
    fields.push_back({key, [member](const RunConfig& c) { return render_real(c.*member); },
                      [member, key](RunConfig& c, const std::string& v) {
                        c.*member = parse_real(key, v);
                      }});
  };
  auto flag = [&](const char* key, bool RunConfig::*member) {
    fields.push_back({key,
                      [member](const RunConfig& c) {
                        return std::string(c.*member ? "true" : "false");
                      },
                      [member, key](RunConfig& c, const std::string& v) {
                        c.*member = parse_bool(key, v);
                      }});
  };

  str("train_path", &RunConfig::train_path);
  str("dev_path", &RunConfig::dev_path);
  str("test_path", &RunConfig::test_path);
  str("schema_path", &RunConfig::schema_path);
  str("checkpoint_dir", &RunConfig::checkpoint_dir);
  str("checkpoint_path", &RunConfig::checkpoint_path);
  str("report_path", &RunConfig::report_path);
  str("symmetry_map_path", &RunConfig::symmetry_map_path);
  num("dim", &RunConfig::dim);
  num("ff_dim", &RunConfig::ff_dim);
  num("layers", &RunConfig::layers);
  num("heads", &RunConfig::heads);
  num("gcn_layers", &RunConfig::gcn_layers);
  num("gtn_steps", &RunConfig::gtn_steps);
  num("k_max", &RunConfig::k_max);
  num("max_len", &RunConfig::max_len);
  num("max_speakers", &RunConfig::max_speakers);
  real("learning_rate", &RunConfig::learning_rate);
  num("epochs", &RunConfig::epochs);
  num("batch_size", &RunConfig::batch_size);
  fields.push_back({"seed",
                    [](const RunConfig& c) { return std::to_string(c.seed); },
                    [](RunConfig& c, const std::string& v) { c.seed = parse_ull("seed", v); }});
  real("dropout", &RunConfig::dropout);
  real("early_stop_f1", &RunConfig::early_stop_f1);
  flag("no_turn_mask", &RunConfig::no_turn_mask);
  flag("no_special_tokens", &RunConfig::no_special_tokens);
  flag("intra_turn_only", &RunConfig::intra_turn_only);
  flag("report_f1c", &RunConfig::report_f1c);
  flag("report_excl_neutral", &RunConfig::report_excl_neutral);
  flag("report_length_groups", &RunConfig::report_length_groups);
  num("neutral_class", &RunConfig::neutral_class);
  return fields;
}

}  // namespace

void validate_config(const RunConfig& config) {
  auto bad = [](const std::string& msg) { throw config_error("BAD_CONFIG", msg); };
  if (config.dim < 1 || config.ff_dim < 1 || config.layers < 1 || config.heads < 1 ||
      config.gcn_layers < 1 || config.gtn_steps < 1 || config.max_len < 4 ||
      config.max_speakers < 1) {
    bad("model dimensions must be positive (max_len >= 4)");
  }
  if (config.dim % config.heads != 0) bad("heads must divide dim");
  if (config.k_max != 1 && config.k_max != 2) bad("k_max must be 1 or 2");
  if (config.learning_rate <= 0.0) bad("learning_rate must be > 0");
  if (config.epochs < 0) bad("epochs must be >= 0");
  if (config.batch_size < 1) bad("batch_size must be >= 1");
  if (config.dropout < 0.0 || config.dropout >= 1.0) bad("dropout must be in [0, 1)");
  if (config.early_stop_f1 > 1.0) bad("early_stop_f1 must be <= 1");
  if (config.neutral_class < -1) bad("neutral_class must be -1 or a class index");
}

RunConfig config_from_pairs(const std::map<std::string, std::string>& pairs) {
  RunConfig config;
  const std::vector<Field> fields = field_table();
  for (const auto& [key, value] : pairs) {
    bool known = false;
    for (const Field& field : fields) {
      if (field.key == key) {
        field.set(config, value);
        known = true;
        break;
      }
    }
    if (!known) throw config_error("UNKNOWN_KEY", "unknown config key '" + key + "'");
  }
  if (config.no_special_tokens) config.no_turn_mask = true;
  validate_config(config);
  return config;
}

std::map<std::string, std::string> read_config_pairs(std::istream& stream) {
  std::map<std::string, std::string> pairs;
  std::string line;
  int line_no = 0;
  while (std::getline(stream, line)) {
    ++line_no;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw config_error("BAD_VALUE",
                         "line " + std::to_string(line_no) + ": expected key=value");
    }
    const std::string key = trim(stripped.substr(0, eq));
    if (key.empty()) {
      throw config_error("BAD_VALUE", "line " + std::to_string(line_no) + ": empty key");
    }
    if (!pairs.emplace(key, trim(stripped.substr(eq + 1))).second) {
      throw config_error("BAD_VALUE",
                         "line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    }
  }
  return pairs;
}

RunConfig parse_config(std::istream& stream) {
  return config_from_pairs(read_config_pairs(stream));
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("MISSING_FILE", "cannot open config file " + path);
  return parse_config(in);
}

std::string serialize_config(const RunConfig& config) {
  std::string out;
  for (const Field& field : field_table()) {
    out += field.key;
    out += "=";
    out += field.get(config);
    out += "\n";
  }
  return out;
}

bool config_model_compatible(const RunConfig& a, const RunConfig& b) {
  return a.dim == b.dim && a.ff_dim == b.ff_dim && a.layers == b.layers &&
         a.heads == b.heads && a.gcn_layers == b.gcn_layers &&
         a.gtn_steps == b.gtn_steps && a.k_max == b.k_max && a.max_len == b.max_len &&
         a.max_speakers == b.max_speakers && a.no_turn_mask == b.no_turn_mask &&
         a.no_special_tokens == b.no_special_tokens &&
         a.intra_turn_only == b.intra_turn_only;
}

}  // namespace turngraph
