#pragma once

#include <random>
#include <string>
#include <vector>

#include "turngraph/corpus.hpp"
#include "turngraph/sequence.hpp"
#include "turngraph/vocab.hpp"

namespace testutil {

using turngraph::Corpus;
using turngraph::Instance;
using turngraph::Turn;

inline Instance make_instance(std::string id, std::vector<std::pair<std::string, std::string>> turns,
                              std::vector<std::string> arguments, int label = 0) {
  Instance inst;
  inst.id = std::move(id);
  for (auto& [speaker, text] : turns) inst.turns.push_back(Turn{speaker, text});
  inst.query.arguments = std::move(arguments);
  inst.label = label;
  return inst;
}

inline int draw(std::mt19937_64& rng, int lo, int hi) {
  return lo + static_cast<int>(rng() % static_cast<unsigned long long>(hi - lo + 1));
}

// Pools kept pairwise disjoint so mentions land only where the generator
// puts them. Arguments can be speakers, single text tokens, or a two-token
// phrase, exercising every zeta-substitution path.
inline Instance random_instance(std::mt19937_64& rng, int max_turns = 8, int min_turns = 1,
                                int classes = 3) {
  static const std::vector<std::string> speakers = {"ann", "ben", "cara", "dan"};
  static const std::vector<std::string> fillers = {"well", "this", "goes", "on",
                                                   "and",  "then", "some", "more"};
  static const std::vector<std::string> entities = {"lantern", "compass", "mirror"};

  const int m = draw(rng, min_turns, max_turns);
  Instance inst;
  inst.id = "rand-" + std::to_string(rng());
  for (int i = 0; i < m; ++i) {
    std::string text;
    const int words = draw(rng, 1, 5);
    for (int w = 0; w < words; ++w) {
      if (w > 0) text += " ";
      text += fillers[static_cast<size_t>(draw(rng, 0, static_cast<int>(fillers.size()) - 1))];
    }
    inst.turns.push_back(
        Turn{speakers[static_cast<size_t>(draw(rng, 0, static_cast<int>(speakers.size()) - 1))],
             text});
  }

  const int k = draw(rng, 1, 2);
  for (int j = 0; j < k; ++j) {
    const int mode = draw(rng, 0, 2);
    const int turn = draw(rng, 0, m - 1);
    if (mode == 0) {
      inst.query.arguments.push_back(inst.turns[static_cast<size_t>(turn)].speaker);
    } else if (mode == 1) {
      const std::string& entity =
          entities[static_cast<size_t>(draw(rng, 0, static_cast<int>(entities.size()) - 1))];
      inst.turns[static_cast<size_t>(turn)].text += " " + entity;
      inst.query.arguments.push_back(entity);
    } else {
      inst.turns[static_cast<size_t>(turn)].text += " red fox";
      inst.query.arguments.push_back("red fox");
    }
  }
  // Identical arguments would make the two markers ambiguous.
  if (k == 2 && inst.query.arguments[0] == inst.query.arguments[1]) {
    inst.turns[0].text += " beacon";
    inst.query.arguments[1] = "beacon";
  }
  inst.label = draw(rng, 0, classes - 1);
  return inst;
}

inline Corpus random_corpus(std::mt19937_64& rng, int count, int max_turns = 8) {
  Corpus corpus;
  corpus.class_names = {"north", "south", "east"};
  for (int i = 0; i < count; ++i) {
    Instance inst = random_instance(rng, max_turns);
    inst.id = "rand-" + std::to_string(i);
    corpus.instances.push_back(std::move(inst));
  }
  return corpus;
}

}  // namespace testutil
