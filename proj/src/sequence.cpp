#include "turngraph/sequence.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <sstream>

namespace turngraph {

Vocab::Vocab() {
  add("[PAD]");
  add("[UNK]");
  add("[CLS]");
  add("[SEP]");
  add("[T]");
  add("[S1]");
  add("[S2]");
}

std::string Vocab::marker_token(int j) { return "[S" + std::to_string(j) + "]"; }

int Vocab::marker_id(int j) { return 4 + j; }

int Vocab::add(const std::string& token) {
  auto it = ids_.find(token);
  if (it != ids_.end()) return it->second;
  int id = static_cast<int>(tokens_.size());
  tokens_.push_back(token);
  ids_.emplace(token, id);
  return id;
}

int Vocab::id(const std::string& token) const {
  auto it = ids_.find(token);
  return it == ids_.end() ? unk_id : it->second;
}

const std::string& Vocab::token(int id) const {
  if (id < 0 || id >= size())
    throw data_error("ID_OUT_OF_RANGE", "token id " + std::to_string(id));
  return tokens_[static_cast<size_t>(id)];
}

bool Vocab::contains(const std::string& token) const {
  return ids_.find(token) != ids_.end();
}

Vocab Vocab::build(const Corpus& corpus) {
  Vocab v;
  v.add(":");  // the speaker/text separator inserted by build_sequence
  for (const Instance& inst : corpus.instances) {
    for (const Turn& turn : inst.turns) {
      for (const std::string& tok : tokenize(turn.speaker)) v.add(tok);
      for (const std::string& tok : tokenize(turn.text)) v.add(tok);
    }
  }
  return v;
}

namespace {

// Replaces each contiguous match of `pattern` in `tokens` by `marker`.
std::vector<std::string> replace_token_seq(const std::vector<std::string>& tokens,
                                           const std::vector<std::string>& pattern,
                                           const std::string& marker) {
  std::vector<std::string> out;
  size_t i = 0;
  while (i < tokens.size()) {
    bool match = pattern.size() <= tokens.size() - i;
    for (size_t j = 0; match && j < pattern.size(); ++j)
      match = tokens[i + j] == pattern[j];
    if (match) {
      out.push_back(marker);
      i += pattern.size();
    } else {
      out.push_back(tokens[i]);
      ++i;
    }
  }
  return out;
}

std::string join(const std::vector<std::string>& tokens) {
  std::string out;
  for (size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += ' ';
    out += tokens[i];
  }
  return out;
}

}  // namespace

Instance substitute_arguments(const Instance& inst) {
  Instance out = inst;
  for (size_t j = 0; j < inst.query.arguments.size(); ++j) {
    const std::string& arg = inst.query.arguments[j];
    const std::string marker = Vocab::marker_token(static_cast<int>(j) + 1);
    const std::vector<std::string> pattern = tokenize(arg);
    for (Turn& turn : out.turns) {
      if (turn.speaker == arg) turn.speaker = marker;
      turn.text = join(replace_token_seq(tokenize(turn.text), pattern, marker));
    }
    out.query.arguments[j] = marker;
  }
  return out;
}

EncodedSequence build_sequence(const Instance& inst, const Vocab& vocab,
                               const BuildOptions& options) {
  EncodedSequence seq;
  seq.id = inst.id;
  seq.label = inst.label;
  seq.num_turns = static_cast<int>(inst.turns.size());
  seq.num_args = static_cast<int>(inst.query.arguments.size());
  seq.has_special_tokens = options.special_tokens;

  // Dense speaker numbering by order of first appearance.
  std::vector<std::string> speaker_order;
  auto speaker_num = [&speaker_order](const std::string& s) {
    for (size_t i = 0; i < speaker_order.size(); ++i)
      if (speaker_order[i] == s) return static_cast<int>(i) + 1;
    speaker_order.push_back(s);
    return static_cast<int>(speaker_order.size());
  };

  auto push = [&seq](int token_id, int speaker_id) {
    seq.token_ids.push_back(token_id);
    seq.speaker_ids.push_back(speaker_id);
  };

  push(Vocab::cls_id, 0);
  for (const Turn& turn : inst.turns) {
    Span span;
    span.begin = seq.size();
    int sid = speaker_num(turn.speaker);
    if (options.special_tokens) {
      seq.tau_positions.push_back(seq.size());
      push(Vocab::turn_id, sid);
    }
    for (const std::string& tok : tokenize(turn.speaker)) push(vocab.id(tok), sid);
    push(vocab.id(":"), sid);
    for (const std::string& tok : tokenize(turn.text)) push(vocab.id(tok), sid);
    span.end = seq.size();
    seq.spans.push_back(span);
  }
  push(Vocab::sep_id, 0);
  for (const std::string& arg : inst.query.arguments) {
    Span span;
    span.begin = seq.size();
    if (options.special_tokens) {
      seq.tau_positions.push_back(seq.size());
      push(Vocab::turn_id, 0);
    }
    push(vocab.id(arg), 0);
    span.end = seq.size();
    seq.spans.push_back(span);
  }
  push(Vocab::sep_id, 0);

  if (seq.size() > options.max_len)
    throw data_error("SEQUENCE_TOO_LONG",
                     "instance " + inst.id + ": assembled length " +
                         std::to_string(seq.size()) + " exceeds max_len " +
                         std::to_string(options.max_len));
  return seq;
}

Instance truncate_to_prefix(const Instance& inst) {
  size_t prefix = 0;
  std::vector<bool> satisfied(inst.query.arguments.size(), false);
  size_t remaining = inst.query.arguments.size();
  for (size_t i = 0; i < inst.turns.size() && remaining > 0; ++i) {
    const Turn& turn = inst.turns[i];
    const std::vector<std::string> text_tokens = tokenize(turn.text);
    for (size_t j = 0; j < inst.query.arguments.size(); ++j) {
      if (satisfied[j]) continue;
      const std::string& arg = inst.query.arguments[j];
      if (turn.speaker == arg || contains_token_seq(text_tokens, tokenize(arg))) {
        satisfied[j] = true;
        --remaining;
      }
    }
    if (remaining == 0) prefix = i + 1;
  }
  if (remaining > 0) prefix = inst.turns.size();  // validation guarantees this is unreachable

  Instance out = inst;
  out.turns.assign(inst.turns.begin(), inst.turns.begin() + static_cast<long>(prefix));
  return out;
}

ValidationReport validate_sequence(const EncodedSequence& seq) {
  ValidationReport report;
  auto add = [&report](const char* code, const std::string& msg) {
    report.push_back({code, msg});
  };
  const int n = seq.size();

  if (n == 0 || seq.token_ids[0] != Vocab::cls_id || seq.cls_position != 0)
    add("BAD_CLS", "sequence must start with [CLS] at position 0");
  if (static_cast<int>(seq.speaker_ids.size()) != n)
    add("BAD_SPEAKERS", "speaker_ids length mismatch");
  if (static_cast<int>(seq.spans.size()) != seq.num_turns + seq.num_args)
    add("BAD_SPANS", "expected one span per turn and per argument");
  if (seq.has_special_tokens &&
      static_cast<int>(seq.tau_positions.size()) != seq.num_turns + seq.num_args)
    add("BAD_TAUS", "expected m + k tau positions");

  for (size_t i = 1; i < seq.tau_positions.size(); ++i)
    if (seq.tau_positions[i] <= seq.tau_positions[i - 1])
      add("TAUS_NOT_INCREASING", "tau positions must be strictly increasing");

  if (seq.has_special_tokens && seq.tau_positions.size() == seq.spans.size()) {
    for (size_t i = 0; i < seq.spans.size(); ++i) {
      if (seq.spans[i].begin != seq.tau_positions[i])
        add("SPAN_TAU_MISMATCH", "span " + std::to_string(i) + " must start at its tau");
      if (!seq.spans[i].contains(seq.tau_positions[i]))
        add("TAU_OUTSIDE_SPAN", "tau " + std::to_string(i) + " outside its span");
    }
  }

  // Every position is in exactly one span, except [CLS] and the two [SEP]s.
  std::vector<int> cover(static_cast<size_t>(n), 0);
  for (const Span& s : seq.spans) {
    if (s.begin < 0 || s.end > n || s.begin >= s.end) {
      add("BAD_SPAN_BOUNDS", "span outside sequence");
      continue;
    }
    for (int p = s.begin; p < s.end; ++p) cover[static_cast<size_t>(p)]++;
  }
  for (int p = 0; p < n; ++p) {
    bool structural = p == 0 || seq.token_ids[static_cast<size_t>(p)] == Vocab::sep_id;
    int c = cover[static_cast<size_t>(p)];
    if (structural && c != 0)
      add("STRUCTURAL_IN_SPAN", "position " + std::to_string(p) + " is structural but covered");
    if (!structural && c != 1)
      add("BAD_COVER", "position " + std::to_string(p) + " covered " + std::to_string(c) + " times");
  }

  // Speaker ids: constant over each turn span, zero elsewhere.
  for (int i = 0; i < seq.num_turns && i < static_cast<int>(seq.spans.size()); ++i) {
    const Span& s = seq.spans[static_cast<size_t>(i)];
    for (int p = s.begin; p < s.end && p < n; ++p)
      if (seq.speaker_ids[static_cast<size_t>(p)] !=
          seq.speaker_ids[static_cast<size_t>(s.begin)])
        add("SPEAKER_NOT_CONSTANT", "turn span " + std::to_string(i));
  }
  for (int p = 0; p < n; ++p) {
    bool in_turn = false;
    for (int i = 0; i < seq.num_turns && i < static_cast<int>(seq.spans.size()); ++i)
      if (seq.spans[static_cast<size_t>(i)].contains(p)) in_turn = true;
    if (!in_turn && seq.speaker_ids[static_cast<size_t>(p)] != 0)
      add("SPEAKER_OUTSIDE_TURN", "position " + std::to_string(p));
  }
  return report;
}

std::string render_sequence_table(const EncodedSequence& seq, const Vocab& vocab) {
  std::ostringstream out;
  out << "instance " << seq.id << "  turns " << seq.num_turns << "  args "
      << seq.num_args << "  length " << seq.size() << "\n";
  out << "pos   id  speaker  segment  token\n";
  for (int p = 0; p < seq.size(); ++p) {
    std::string segment = "-";
    for (size_t i = 0; i < seq.spans.size(); ++i) {
      if (seq.spans[i].contains(p)) {
        segment = i < static_cast<size_t>(seq.num_turns)
                      ? "turn" + std::to_string(i + 1)
                      : "arg" + std::to_string(i - static_cast<size_t>(seq.num_turns) + 1);
        break;
      }
    }
    char line[128];
    std::snprintf(line, sizeof line, "%3d %4d  %7d  %-7s  %s\n", p,
                  seq.token_ids[static_cast<size_t>(p)],
                  seq.speaker_ids[static_cast<size_t>(p)], segment.c_str(),
                  vocab.token(seq.token_ids[static_cast<size_t>(p)]).c_str());
    out << line;
  }
  out << "taus:";
  for (int t : seq.tau_positions) out << " " << t;
  out << "\nspans:";
  for (const Span& s : seq.spans) out << " [" << s.begin << "," << s.end << ")";
  out << "\n";
  return out.str();
}

}  // namespace turngraph
