#include <doctest.h>

#include <set>

#include "helpers.hpp"
#include "turngraph/sequence.hpp"

using namespace turngraph;
using testutil::make_instance;

namespace {

// Independent single-pass oracle for zeta-substitution on one text: walks the
// token list and emits the marker wherever the pattern matches, as the spec
// prose describes, with none of the production code's joining machinery.
std::vector<std::string> scan_replace(const std::vector<std::string>& tokens,
                                      const std::vector<std::string>& pattern,
                                      const std::string& marker) {
  std::vector<std::string> out;
  size_t i = 0;
  while (i < tokens.size()) {
    bool hit = i + pattern.size() <= tokens.size() && !pattern.empty();
    for (size_t j = 0; hit && j < pattern.size(); ++j) hit = tokens[i + j] == pattern[j];
    if (hit) {
      out.push_back(marker);
      i += pattern.size();
    } else {
      out.push_back(tokens[i++]);
    }
  }
  return out;
}

// Linear-scan oracle for the early-prefix rule: smallest p such that every
// argument is a speaker of, or occurs whole-token in, turns[0..p).
size_t prefix_oracle(const Instance& inst) {
  for (size_t p = 1; p <= inst.turns.size(); ++p) {
    bool all = true;
    for (const std::string& arg : inst.query.arguments) {
      bool found = false;
      const std::vector<std::string> pattern = tokenize(arg);
      for (size_t i = 0; i < p && !found; ++i) {
        found = inst.turns[i].speaker == arg ||
                contains_token_seq(tokenize(inst.turns[i].text), pattern);
      }
      all = all && found;
    }
    if (all) return p;
  }
  return inst.turns.size();
}

}  // namespace

TEST_CASE("substitute_arguments rewrites speakers and in-text mentions") {
  const Instance inst = make_instance(
      "x", {{"Speaker 1", "hi Frank"}, {"Frank", "hello"}}, {"Speaker 1", "Frank"}, 0);
  const Instance out = substitute_arguments(inst);
  CHECK(out.turns[0].speaker == "[S1]");
  CHECK(out.turns[0].text == "hi [S2]");
  CHECK(out.turns[1].speaker == "[S2]");
  CHECK(out.turns[1].text == "hello");
  CHECK(out.query.arguments == std::vector<std::string>{"[S1]", "[S2]"});
}

TEST_CASE("substitute_arguments leaves non-speaker arguments in speakers alone") {
  const Instance inst =
      make_instance("x", {{"ann", "take the lantern now"}}, {"lantern"}, 0);
  const Instance out = substitute_arguments(inst);
  CHECK(out.turns[0].speaker == "ann");
  CHECK(out.turns[0].text == "take the [S1] now");
}

TEST_CASE("substitution is whole-token: Franklin survives argument Frank") {
  const Instance inst =
      make_instance("x", {{"ann", "ask Franklin about Frank"}}, {"Frank"}, 0);
  const Instance out = substitute_arguments(inst);
  const auto oracle =
      scan_replace(tokenize(inst.turns[0].text), tokenize("Frank"), "[S1]");
  CHECK(tokenize(out.turns[0].text) == oracle);
  CHECK(out.turns[0].text == "ask Franklin about [S1]");
}

TEST_CASE("substitution matches the token-scan oracle on random instances") {
  std::mt19937_64 rng(21);
  for (int round = 0; round < 50; ++round) {
    const Instance inst = testutil::random_instance(rng);
    const Instance out = substitute_arguments(inst);
    for (size_t t = 0; t < inst.turns.size(); ++t) {
      std::vector<std::string> expect = tokenize(inst.turns[t].text);
      for (size_t j = 0; j < inst.query.arguments.size(); ++j)
        expect = scan_replace(expect, tokenize(inst.query.arguments[j]),
                              Vocab::marker_token(static_cast<int>(j) + 1));
      CHECK(tokenize(out.turns[t].text) == expect);
    }
  }
}

TEST_CASE("build_sequence assembles the normative layout") {
  // Hand-assembled: [CLS] [T] [S1] : a b [SEP] [T] [S1] [SEP]
  Vocab vocab;
  vocab.add(":");
  vocab.add("a");
  vocab.add("b");
  REQUIRE(vocab.id(":") == 7);
  REQUIRE(vocab.id("a") == 8);
  REQUIRE(vocab.id("b") == 9);

  const Instance inst = make_instance("ex", {{"[S1]", "a b"}}, {"[S1]"}, 0);
  const EncodedSequence seq = build_sequence(inst, vocab);
  CHECK(seq.token_ids == std::vector<int>{2, 4, 5, 7, 8, 9, 3, 4, 5, 3});
  CHECK(seq.tau_positions == std::vector<int>{1, 7});
  REQUIRE(seq.spans.size() == 2);
  CHECK(seq.spans[0].begin == 1);
  CHECK(seq.spans[0].end == 6);
  CHECK(seq.spans[1].begin == 7);
  CHECK(seq.spans[1].end == 9);
  CHECK(seq.speaker_ids == std::vector<int>{0, 1, 1, 1, 1, 1, 0, 0, 0, 0});
  CHECK(seq.cls_position == 0);
  CHECK(seq.num_turns == 1);
  CHECK(seq.num_args == 1);
  CHECK(validate_sequence(seq).empty());
}

TEST_CASE("same speaker across turns keeps one dense id") {
  Vocab vocab;
  vocab.add(":");
  const Instance inst =
      make_instance("x", {{"ann", "hi"}, {"ann", "again"}, {"ben", "ok"}}, {"ann"}, 0);
  const EncodedSequence seq = build_sequence(substitute_arguments(inst), vocab);
  CHECK(seq.speaker_ids[static_cast<size_t>(seq.spans[0].begin)] == 1);
  CHECK(seq.speaker_ids[static_cast<size_t>(seq.spans[1].begin)] == 1);
  CHECK(seq.speaker_ids[static_cast<size_t>(seq.spans[2].begin)] == 2);
}

TEST_CASE("unseen tokens map to [UNK]") {
  Vocab vocab;
  vocab.add(":");
  const Instance inst = make_instance("x", {{"ann", "mystery cave"}}, {"cave"}, 0);
  const EncodedSequence seq = build_sequence(substitute_arguments(inst), vocab);
  // Layout: [CLS] [T] ann : mystery [S1] [SEP] [T] [S1] [SEP]; the two
  // surviving open-vocabulary tokens are absent from this vocab, while the
  // substituted argument keeps its reserved id.
  CHECK(seq.token_ids[2] == Vocab::unk_id);
  CHECK(seq.token_ids[4] == Vocab::unk_id);
  CHECK(seq.token_ids[5] == Vocab::marker_id(1));
}

TEST_CASE("build_sequence never truncates") {
  Vocab vocab;
  vocab.add(":");
  const Instance inst = make_instance("long", {{"ann", "a b c d e f"}}, {"ann"}, 0);
  BuildOptions options;
  options.max_len = 8;
  CHECK_THROWS_WITH_AS(build_sequence(substitute_arguments(inst), vocab, options),
                       doctest::Contains("SEQUENCE_TOO_LONG"), Error);
  options.max_len = 14;  // exactly the assembled length
  CHECK_NOTHROW(build_sequence(substitute_arguments(inst), vocab, options));
}

TEST_CASE("span lengths plus structural tokens account for every position") {
  std::mt19937_64 rng(33);
  for (int round = 0; round < 100; ++round) {
    const Corpus corpus = testutil::random_corpus(rng, 1);
    const Vocab vocab = Vocab::build(corpus);
    const EncodedSequence seq =
        build_sequence(substitute_arguments(corpus.instances[0]), vocab);

    int span_total = 0;
    for (const Span& s : seq.spans) span_total += s.length();
    int seps = 0;
    for (int id : seq.token_ids) seps += id == Vocab::sep_id ? 1 : 0;
    CHECK(span_total + seps + 1 == seq.size());
    CHECK(seps == 2);
    CHECK(validate_sequence(seq).empty());

    // Taus strictly increase and each span starts at its tau.
    for (size_t i = 0; i < seq.tau_positions.size(); ++i) {
      CHECK(seq.spans[i].begin == seq.tau_positions[i]);
      if (i) CHECK(seq.tau_positions[i] > seq.tau_positions[i - 1]);
    }
  }
}

TEST_CASE("build_sequence is deterministic") {
  std::mt19937_64 rng(5);
  const Corpus corpus = testutil::random_corpus(rng, 4);
  const Vocab vocab = Vocab::build(corpus);
  for (const Instance& inst : corpus.instances) {
    const Instance sub = substitute_arguments(inst);
    const EncodedSequence a = build_sequence(sub, vocab);
    const EncodedSequence b = build_sequence(sub, vocab);
    CHECK(a.token_ids == b.token_ids);
    CHECK(a.speaker_ids == b.speaker_ids);
    CHECK(a.tau_positions == b.tau_positions);
  }
}

TEST_CASE("validate_sequence flags corrupted sequences") {
  Vocab vocab;
  vocab.add(":");
  const Instance inst = make_instance("x", {{"ann", "hi"}, {"ben", "yo"}}, {"ann"}, 0);
  const EncodedSequence good = build_sequence(substitute_arguments(inst), vocab);
  REQUIRE(validate_sequence(good).empty());

  SUBCASE("clobbered CLS") {
    EncodedSequence seq = good;
    seq.token_ids[0] = Vocab::pad_id;
    CHECK(has_code(validate_sequence(seq), "BAD_CLS"));
  }
  SUBCASE("span detached from its tau") {
    EncodedSequence seq = good;
    seq.spans[0].begin += 1;
    CHECK(has_code(validate_sequence(seq), "SPAN_TAU_MISMATCH"));
  }
  SUBCASE("speaker wanders inside a turn") {
    EncodedSequence seq = good;
    seq.speaker_ids[static_cast<size_t>(seq.spans[0].begin) + 1] = 9;
    CHECK(has_code(validate_sequence(seq), "SPEAKER_NOT_CONSTANT"));
  }
  SUBCASE("speaker id on a separator") {
    EncodedSequence seq = good;
    seq.speaker_ids.back() = 1;
    CHECK(has_code(validate_sequence(seq), "SPEAKER_OUTSIDE_TURN"));
  }
  SUBCASE("overlapping spans") {
    EncodedSequence seq = good;
    seq.spans[1].begin -= 1;
    ValidationReport report = validate_sequence(seq);
    CHECK_FALSE(report.empty());
  }
}

TEST_CASE("no-special-tokens ablation drops every [T] and all taus") {
  Vocab vocab;
  vocab.add(":");
  const Instance inst = make_instance("x", {{"ann", "hi"}}, {"ann"}, 0);
  BuildOptions options;
  options.special_tokens = false;
  const EncodedSequence seq = build_sequence(substitute_arguments(inst), vocab, options);
  CHECK(seq.tau_positions.empty());
  for (int id : seq.token_ids) CHECK(id != Vocab::turn_id);
  CHECK_FALSE(seq.has_special_tokens);
  // Segments still cover the turn and the argument.
  REQUIRE(seq.spans.size() == 2);
  CHECK(seq.spans[0].length() == 3);  // [S1] : hi
  CHECK(seq.spans[1].length() == 1);  // [S1]
}

TEST_CASE("truncate_to_prefix stops at the covering prefix") {
  SUBCASE("both arguments first mentioned in turn 2 of 5") {
    const Instance inst = make_instance("x",
                                        {{"ann", "well then"},
                                         {"ben", "lantern and compass"},
                                         {"ann", "more"},
                                         {"ben", "still more"},
                                         {"ann", "done"}},
                                        {"lantern", "compass"}, 0);
    const Instance out = truncate_to_prefix(inst);
    CHECK(out.turns.size() == 2);
    CHECK(prefix_oracle(inst) == 2);
  }
  SUBCASE("argument satisfied by the first speaker") {
    const Instance inst = make_instance(
        "x", {{"ann", "well"}, {"ben", "lantern"}}, {"ann", "lantern"}, 0);
    CHECK(truncate_to_prefix(inst).turns.size() == 2);
    const Instance lone = make_instance("x", {{"ann", "well"}, {"ben", "ok"}}, {"ann"}, 0);
    CHECK(truncate_to_prefix(lone).turns.size() == 1);
  }
  SUBCASE("mentions only in the final turn keep the whole dialogue") {
    const Instance inst = make_instance(
        "x", {{"ann", "well"}, {"ben", "ok"}, {"cara", "lantern"}}, {"lantern"}, 0);
    const Instance out = truncate_to_prefix(inst);
    CHECK(out.turns.size() == inst.turns.size());
  }
}

TEST_CASE("truncate_to_prefix matches the scan oracle and is idempotent") {
  std::mt19937_64 rng(44);
  for (int round = 0; round < 100; ++round) {
    const Instance inst = testutil::random_instance(rng);
    const Instance once = truncate_to_prefix(inst);
    CHECK(once.turns.size() == prefix_oracle(inst));
    const Instance twice = truncate_to_prefix(once);
    CHECK(twice.turns.size() == once.turns.size());
  }
}

TEST_CASE("render_sequence_table is stable") {
  Vocab vocab;
  vocab.add(":");
  vocab.add("a");
  vocab.add("b");
  const Instance inst = make_instance("ex", {{"[S1]", "a b"}}, {"[S1]"}, 0);
  const std::string table = render_sequence_table(build_sequence(inst, vocab), vocab);
  const std::string expect =
      "instance ex  turns 1  args 1  length 10\n"
      "pos   id  speaker  segment  token\n"
      "  0    2        0  -        [CLS]\n"
      "  1    4        1  turn1    [T]\n"
      "  2    5        1  turn1    [S1]\n"
      "  3    7        1  turn1    :\n"
      "  4    8        1  turn1    a\n"
      "  5    9        1  turn1    b\n"
      "  6    3        0  -        [SEP]\n"
      "  7    4        0  arg1     [T]\n"
      "  8    5        0  arg1     [S1]\n"
      "  9    3        0  -        [SEP]\n"
      "taus: 1 7\n"
      "spans: [1,6) [7,9)\n";
  CHECK(table == expect);
}
