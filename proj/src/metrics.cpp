#include "turngraph/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <map>

#include "turngraph/error.hpp"

namespace turngraph {

namespace {

double safe_div(double num, double den) { return den > 0.0 ? num / den : 0.0; }

double f1_from(double precision, double recall) {
  const double sum = precision + recall;
  return sum > 0.0 ? 2.0 * precision * recall / sum : 0.0;
}

void check_range(const Prediction& p, int class_count) {
  if (p.gold < 0 || p.gold >= class_count || p.predicted < 0 ||
      p.predicted >= class_count) {
    throw data_error("LABEL_OUT_OF_RANGE",
                     "prediction " + p.id + " has classes outside [0, C)");
  }
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

int argmax_lowest(const std::vector<double>& logits) {
  if (logits.empty()) {
    throw numeric_error("SHAPE_MISMATCH", "argmax over empty logits");
  }
  size_t best = 0;
  for (size_t c = 1; c < logits.size(); ++c) {
    if (logits[c] > logits[best]) best = c;
  }
  return static_cast<int>(best);
}

Prediction make_prediction(std::string id, std::vector<double> logits, int gold) {
  Prediction p;
  p.id = std::move(id);
  p.predicted = argmax_lowest(logits);
  p.logits = std::move(logits);
  p.gold = gold;
  return p;
}

MetricReport f1_scores(const std::vector<Prediction>& preds, int class_count,
                       std::optional<int> neutral) {
  if (preds.empty()) {
    throw data_error("EMPTY_PREDICTIONS", "no predictions to score");
  }
  if (class_count < 1) {
    throw config_error("BAD_CLASS_COUNT", "class count must be >= 1");
  }
  if (neutral && (*neutral < 0 || *neutral >= class_count)) {
    throw config_error("NEUTRAL_OUT_OF_RANGE", "neutral class outside [0, C)");
  }

  MetricReport report;
  report.total = static_cast<long>(preds.size());
  report.per_class.assign(static_cast<size_t>(class_count), ClassScore{});
  for (const Prediction& p : preds) {
    check_range(p, class_count);
    report.per_class[static_cast<size_t>(p.gold)].support += 1;
    report.per_class[static_cast<size_t>(p.predicted)].predicted += 1;
    if (p.gold == p.predicted) report.per_class[static_cast<size_t>(p.gold)].tp += 1;
  }

  long tp_all = 0, fp_all = 0, fn_all = 0;
  long tp_excl = 0, fp_excl = 0, fn_excl = 0;
  double macro_sum = 0.0, weighted_sum = 0.0;
  for (int c = 0; c < class_count; ++c) {
    ClassScore& s = report.per_class[static_cast<size_t>(c)];
    const long fp = s.predicted - s.tp;
    const long fn = s.support - s.tp;
    s.precision = safe_div(static_cast<double>(s.tp), static_cast<double>(s.tp + fp));
    s.recall = safe_div(static_cast<double>(s.tp), static_cast<double>(s.tp + fn));
    s.f1 = f1_from(s.precision, s.recall);
    tp_all += s.tp;
    fp_all += fp;
    fn_all += fn;
    macro_sum += s.f1;
    weighted_sum += static_cast<double>(s.support) * s.f1;
    if (neutral && c != *neutral) {
      tp_excl += s.tp;
      fp_excl += fp;
      fn_excl += fn;
    }
  }
  report.micro_f1 = safe_div(2.0 * static_cast<double>(tp_all),
                             static_cast<double>(2 * tp_all + fp_all + fn_all));
  report.macro_f1 = macro_sum / static_cast<double>(class_count);
  report.weighted_f1 = weighted_sum / static_cast<double>(report.total);
  if (neutral) {
    report.micro_f1_excl_neutral = safe_div(
        2.0 * static_cast<double>(tp_excl),
        static_cast<double>(2 * tp_excl + fp_excl + fn_excl));
  }
  return report;
}

MetricReport group_report(const std::vector<Prediction>& preds, int class_count,
                          std::optional<int> neutral,
                          const std::function<std::string(const Prediction&)>& group_of) {
  MetricReport report = f1_scores(preds, class_count, neutral);
  std::map<std::string, std::pair<long, long>> counts;  // name -> (support, correct)
  for (const Prediction& p : preds) {
    const std::string name = group_of(p);
    if (name.empty()) {
      throw data_error("UNMAPPED_CLASS", "prediction " + p.id + " maps to an empty group");
    }
    auto& [support, correct] = counts[name];
    support += 1;
    if (p.gold == p.predicted) correct += 1;
  }
  for (const auto& [name, pair] : counts) {
    GroupScore g;
    g.name = name;
    g.support = pair.first;
    // Single-label micro-F1 over a subset reduces to accuracy.
    g.micro_f1 = safe_div(static_cast<double>(pair.second),
                          static_cast<double>(pair.first));
    report.groups.push_back(std::move(g));
  }
  return report;
}

MetricReport group_report_by_class(const std::vector<Prediction>& preds, int class_count,
                                   std::optional<int> neutral,
                                   const std::vector<std::string>& class_group) {
  return group_report(preds, class_count, neutral, [&](const Prediction& p) {
    if (p.gold < 0 || static_cast<size_t>(p.gold) >= class_group.size() ||
        class_group[static_cast<size_t>(p.gold)].empty()) {
      throw data_error("UNMAPPED_CLASS",
                       "class " + std::to_string(p.gold) + " has no group");
    }
    return class_group[static_cast<size_t>(p.gold)];
  });
}

std::string length_bucket_name(long tokens) {
  if (tokens >= 500) return "[500,inf)";
  const int lo = tokens < 0 ? 0 : static_cast<int>(tokens / 100) * 100;
  char buf[32];
  std::snprintf(buf, sizeof(buf), "[%d,%d)", lo, lo + 100);
  return buf;
}

MetricReport group_report_by_length(const std::vector<Prediction>& preds, int class_count,
                                    std::optional<int> neutral,
                                    const std::unordered_map<std::string, long>& id_tokens) {
  return group_report(preds, class_count, neutral, [&](const Prediction& p) {
    auto it = id_tokens.find(p.id);
    if (it == id_tokens.end()) {
      throw data_error("UNMAPPED_CLASS", "instance " + p.id + " has no length entry");
    }
    return length_bucket_name(it->second);
  });
}

std::string render_metric_report(const MetricReport& report,
                                 const std::vector<std::string>& class_names) {
  if (class_names.size() != report.per_class.size()) {
    throw numeric_error("SHAPE_MISMATCH", "class name count differs from per-class scores");
  }
  std::string out;
  out += "total " + std::to_string(report.total) + "\n";
  out += "micro_f1 " + format_double(report.micro_f1) + "\n";
  out += "macro_f1 " + format_double(report.macro_f1) + "\n";
  out += "weighted_f1 " + format_double(report.weighted_f1) + "\n";
  if (report.micro_f1_excl_neutral) {
    out += "micro_f1_excl_neutral " + format_double(*report.micro_f1_excl_neutral) + "\n";
  }
  if (report.f1c) {
    out += "f1c " + format_double(*report.f1c) + "\n";
  }
  for (size_t c = 0; c < report.per_class.size(); ++c) {
    const ClassScore& s = report.per_class[c];
    out += "class " + std::to_string(c);
    out += " support " + std::to_string(s.support);
    out += " predicted " + std::to_string(s.predicted);
    out += " tp " + std::to_string(s.tp);
    out += " precision " + format_double(s.precision);
    out += " recall " + format_double(s.recall);
    out += " f1 " + format_double(s.f1);
    out += " name " + class_names[c] + "\n";
  }
  for (const GroupScore& g : report.groups) {
    out += "group " + g.name;
    out += " support " + std::to_string(g.support);
    out += " micro_f1 " + format_double(g.micro_f1) + "\n";
  }
  return out;
}

}  // namespace turngraph
