#include <doctest.h>

#include <sstream>

#include "turngraph/config.hpp"
#include "turngraph/error.hpp"

using namespace turngraph;

namespace {

RunConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

}  // namespace

TEST_CASE("empty config keeps every default") {
  const RunConfig config = parse("");
  CHECK(config.dim == 32);
  CHECK(config.ff_dim == 64);
  CHECK(config.layers == 2);
  CHECK(config.heads == 4);
  CHECK(config.gcn_layers == 2);
  CHECK(config.gtn_steps == 2);
  CHECK(config.k_max == 2);
  CHECK(config.max_len == 128);
  CHECK(config.max_speakers == 8);
  CHECK(config.learning_rate == 0.2);
  CHECK(config.epochs == 50);
  CHECK(config.batch_size == 8);
  CHECK(config.seed == 1);
  CHECK(config.dropout == 0.0);
  CHECK(config.early_stop_f1 == 0.0);
  CHECK_FALSE(config.no_turn_mask);
  CHECK_FALSE(config.no_special_tokens);
  CHECK_FALSE(config.intra_turn_only);
  CHECK_FALSE(config.report_f1c);
  CHECK(config.neutral_class == -1);
  CHECK(config.train_path.empty());
}

TEST_CASE("key=value parsing with comments and whitespace") {
  const RunConfig config = parse(
      "# toy run\n"
      "\n"
      "dim = 16\n"
      "  heads=2  \n"
      "train_path = data/train.jsonl\n"
      "learning_rate = 0.05\n"
      "seed = 42\n"
      "no_turn_mask = true\n"
      "report_f1c = false\n");
  CHECK(config.dim == 16);
  CHECK(config.heads == 2);
  CHECK(config.train_path == "data/train.jsonl");
  CHECK(config.learning_rate == 0.05);
  CHECK(config.seed == 42);
  CHECK(config.no_turn_mask);
  CHECK_FALSE(config.report_f1c);
}

TEST_CASE("parse failures") {
  CHECK_THROWS_WITH_AS(parse("made_up_key = 3\n"), doctest::Contains("UNKNOWN_KEY"),
                       Error);
  CHECK_THROWS_WITH_AS(parse("dim = banana\n"), doctest::Contains("BAD_VALUE"), Error);
  CHECK_THROWS_WITH_AS(parse("dropout = lots\n"), doctest::Contains("BAD_VALUE"), Error);
  CHECK_THROWS_WITH_AS(parse("no_turn_mask = maybe\n"), doctest::Contains("BAD_VALUE"),
                       Error);
  CHECK_THROWS_WITH_AS(parse("dim 16\n"), doctest::Contains("BAD_VALUE"), Error);
  CHECK_THROWS_WITH_AS(parse("= 16\n"), doctest::Contains("BAD_VALUE"), Error);
  CHECK_THROWS_WITH_AS(parse("dim = 16\ndim = 32\n"), doctest::Contains("BAD_VALUE"),
                       Error);
  CHECK_THROWS_AS(load_config_file("/nonexistent/config"), Error);
  try {
    parse("whatever = 1\n");
  } catch (const Error& e) {
    CHECK(e.exit_code() == 2);
  }
}

TEST_CASE("validation rules") {
  CHECK_THROWS_WITH_AS(parse("dim = 0\n"), doctest::Contains("BAD_CONFIG"), Error);
  CHECK_THROWS_WITH_AS(parse("ff_dim = -4\n"), doctest::Contains("BAD_CONFIG"), Error);
  CHECK_THROWS_WITH_AS(parse("layers = 0\n"), doctest::Contains("BAD_CONFIG"), Error);
  CHECK_THROWS_WITH_AS(parse("gcn_layers = 0\n"), doctest::Contains("BAD_CONFIG"), Error);
  CHECK_THROWS_WITH_AS(parse("gtn_steps = 0\n"), doctest::Contains("BAD_CONFIG"), Error);
  CHECK_THROWS_WITH_AS(parse("max_len = 3\n"), doctest::Contains("BAD_CONFIG"), Error);
  CHECK_THROWS_WITH_AS(parse("dim = 30\nheads = 4\n"), doctest::Contains("BAD_CONFIG"),
                       Error);
  CHECK_THROWS_WITH_AS(parse("k_max = 3\n"), doctest::Contains("BAD_CONFIG"), Error);
  CHECK_THROWS_WITH_AS(parse("k_max = 0\n"), doctest::Contains("BAD_CONFIG"), Error);
  CHECK_THROWS_WITH_AS(parse("learning_rate = 0\n"), doctest::Contains("BAD_CONFIG"),
                       Error);
  CHECK_THROWS_WITH_AS(parse("learning_rate = -0.1\n"), doctest::Contains("BAD_CONFIG"),
                       Error);
  CHECK_THROWS_WITH_AS(parse("epochs = -1\n"), doctest::Contains("BAD_CONFIG"), Error);
  CHECK_THROWS_WITH_AS(parse("batch_size = 0\n"), doctest::Contains("BAD_CONFIG"), Error);
  CHECK_THROWS_WITH_AS(parse("dropout = 1.0\n"), doctest::Contains("BAD_CONFIG"), Error);
  CHECK_THROWS_WITH_AS(parse("dropout = -0.1\n"), doctest::Contains("BAD_CONFIG"), Error);
  CHECK_THROWS_WITH_AS(parse("early_stop_f1 = 1.5\n"), doctest::Contains("BAD_CONFIG"),
                       Error);
  CHECK_THROWS_WITH_AS(parse("neutral_class = -2\n"), doctest::Contains("BAD_CONFIG"),
                       Error);
  CHECK_NOTHROW(parse("epochs = 0\n"));
  CHECK_NOTHROW(parse("k_max = 1\n"));
}

TEST_CASE("no_special_tokens implies no_turn_mask") {
  const RunConfig config = parse("no_special_tokens = true\n");
  CHECK(config.no_special_tokens);
  CHECK(config.no_turn_mask);
  // The reverse implication does not hold.
  const RunConfig other = parse("no_turn_mask = true\n");
  CHECK(other.no_turn_mask);
  CHECK_FALSE(other.no_special_tokens);
}

TEST_CASE("serialize then parse is the identity") {
  RunConfig config = parse(
      "dim = 16\nheads = 2\nff_dim = 24\nseed = 987654321987\n"
      "learning_rate = 0.125\ntrain_path = a/b.jsonl\nintra_turn_only = true\n"
      "neutral_class = 3\nearly_stop_f1 = 0.5\n");
  const std::string text = serialize_config(config);
  const RunConfig again = parse(text);
  CHECK(serialize_config(again) == text);
  CHECK(again.dim == 16);
  CHECK(again.heads == 2);
  CHECK(again.seed == 987654321987ULL);
  CHECK(again.learning_rate == 0.125);
  CHECK(again.train_path == "a/b.jsonl");
  CHECK(again.intra_turn_only);
  CHECK(again.neutral_class == 3);
  CHECK(again.early_stop_f1 == 0.5);
}

TEST_CASE("pair overlays for CLI overrides") {
  std::istringstream in("dim = 16\nheads = 2\n");
  auto pairs = read_config_pairs(in);
  pairs["heads"] = "4";
  pairs["epochs"] = "3";
  const RunConfig config = config_from_pairs(pairs);
  CHECK(config.dim == 16);
  CHECK(config.heads == 4);
  CHECK(config.epochs == 3);
}

TEST_CASE("model compatibility covers dims and ablations, not paths") {
  const RunConfig a = parse("dim = 16\nheads = 2\n");
  RunConfig b = a;
  CHECK(config_model_compatible(a, b));
  b.train_path = "elsewhere.jsonl";
  b.learning_rate = 0.7;
  CHECK(config_model_compatible(a, b));  // optimizer and paths are free
  b.dim = 32;
  CHECK_FALSE(config_model_compatible(a, b));
  RunConfig c = a;
  c.no_turn_mask = true;
  CHECK_FALSE(config_model_compatible(a, c));
  RunConfig d = a;
  d.k_max = 1;
  CHECK_FALSE(config_model_compatible(a, d));
}
