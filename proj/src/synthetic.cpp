#include "turngraph/synthetic.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>

#include "turngraph/error.hpp"

namespace turngraph {

namespace {

// Pools are pairwise disjoint so the cue and entity occur exactly where the
// generator puts them.
const std::vector<std::string> kSpeakers = {"alice", "bob", "carol", "dave"};
const std::vector<std::string> kFillers = {"well", "so",   "right", "okay",
                                           "hmm",  "yeah", "look",  "fine",
                                           "sure", "maybe"};
const std::vector<std::string> kEntities = {"gadget", "widget", "lantern", "compass"};
const std::vector<std::string> kCues = {"zorp", "blick"};

int draw(std::mt19937_64& rng, int lo, int hi) {  // inclusive bounds
  return lo + static_cast<int>(rng() % static_cast<unsigned long long>(hi - lo + 1));
}

const std::string& pick(std::mt19937_64& rng, const std::vector<std::string>& pool) {
  return pool[static_cast<size_t>(draw(rng, 0, static_cast<int>(pool.size()) - 1))];
}

std::string join(const std::vector<std::string>& tokens) {
  std::string out;
  for (size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) out += " ";
    out += tokens[i];
  }
  return out;
}

}  // namespace

CuePosition parse_cue_position(const std::string& text) {
  if (text == "any") return CuePosition::any;
  if (text == "final") return CuePosition::final;
  throw config_error("BAD_VALUE", "cue position must be 'any' or 'final', got '" + text + "'");
}

CorpusSchema synthetic_schema() {
  CorpusSchema schema;
  schema.class_names = {"alpha", "beta", "gamma", "delta"};
  return schema;
}

Corpus gen_synthetic(int count, std::mt19937_64& rng, CuePosition cue_position,
                     const std::string& id_prefix) {
  if (count < 1) throw config_error("BAD_VALUE", "synthetic split count must be >= 1");
  const CorpusSchema schema = synthetic_schema();
  Corpus corpus;
  corpus.class_names = schema.class_names;
  corpus.neutral_class = schema.neutral_class;

  for (int n = 0; n < count; ++n) {
    const int m = draw(rng, 2, 5);
    const int cue_index = draw(rng, 0, 1);
    const bool same_speaker = draw(rng, 0, 1) == 1;
    const int cue_turn = cue_position == CuePosition::final ? m - 1 : draw(rng, 0, m - 1);
    // The subject's own turn; kept away from the cue turn when the label
    // says the cue speaker differs from the subject.
    int subject_turn = 0;
    if (cue_position == CuePosition::any && same_speaker) {
      subject_turn = cue_turn;
    } else if (cue_position == CuePosition::any) {
      subject_turn = draw(rng, 0, m - 2);
      if (subject_turn >= cue_turn) ++subject_turn;
    }

    std::vector<std::string> speakers(static_cast<size_t>(m));
    const std::string& subject = pick(rng, kSpeakers);
    for (int i = 0; i < m; ++i) speakers[static_cast<size_t>(i)] = pick(rng, kSpeakers);
    speakers[static_cast<size_t>(subject_turn)] = subject;
    if (same_speaker) {
      speakers[static_cast<size_t>(cue_turn)] = subject;
    } else if (speakers[static_cast<size_t>(cue_turn)] == subject) {
      const size_t shift = static_cast<size_t>(draw(rng, 1, static_cast<int>(kSpeakers.size()) - 1));
      const size_t at = static_cast<size_t>(
          std::find(kSpeakers.begin(), kSpeakers.end(), subject) - kSpeakers.begin());
      speakers[static_cast<size_t>(cue_turn)] = kSpeakers[(at + shift) % kSpeakers.size()];
    }

    const std::string& entity = pick(rng, kEntities);
    const int entity_turn =
        cue_position == CuePosition::final ? 0 : draw(rng, 0, m - 1);

    Instance inst;
    char id_buf[64];
    std::snprintf(id_buf, sizeof(id_buf), "%s-%05d", id_prefix.c_str(), n);
    inst.id = id_buf;
    for (int i = 0; i < m; ++i) {
      std::vector<std::string> words;
      const int fillers = draw(rng, 2, 4);
      for (int w = 0; w < fillers; ++w) words.push_back(pick(rng, kFillers));
      if (i == entity_turn) {
        words.insert(words.begin() + draw(rng, 0, static_cast<int>(words.size())), entity);
      }
      if (i == cue_turn) {
        words.insert(words.begin() + draw(rng, 0, static_cast<int>(words.size())),
                     kCues[static_cast<size_t>(cue_index)]);
      }
      inst.turns.push_back(Turn{speakers[static_cast<size_t>(i)], join(words)});
    }
    inst.query.arguments = {subject, entity};
    inst.label = 2 * cue_index + (same_speaker ? 1 : 0);
    corpus.instances.push_back(std::move(inst));
  }
  return corpus;
}

void write_synthetic(const SyntheticOptions& options, const std::string& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw data_error("MISSING_FILE", "cannot create directory " + out_dir);

  std::mt19937_64 rng(options.seed);
  const Corpus train = gen_synthetic(options.train_count, rng, options.cue_position, "train");
  const Corpus dev = gen_synthetic(options.dev_count, rng, options.cue_position, "dev");
  const Corpus test = gen_synthetic(options.test_count, rng, options.cue_position, "test");

  const std::filesystem::path dir(out_dir);
  write_schema_file(synthetic_schema(), (dir / "schema.json").string());
  write_corpus_file(train, (dir / "train.jsonl").string());
  write_corpus_file(dev, (dir / "dev.jsonl").string());
  write_corpus_file(test, (dir / "test.jsonl").string());
}

}  // namespace turngraph
