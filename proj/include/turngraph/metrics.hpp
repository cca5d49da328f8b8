#pragma once

#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace turngraph {

struct Prediction {
  std::string id;
  std::vector<double> logits;
  int predicted = -1;
  int gold = -1;
};

// Ties resolve to the lowest class index.
int argmax_lowest(const std::vector<double>& logits);

Prediction make_prediction(std::string id, std::vector<double> logits, int gold);

struct ClassScore {
  long support = 0;    // gold count
  long predicted = 0;  // prediction count
  long tp = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct GroupScore {
  std::string name;
  long support = 0;
  double micro_f1 = 0.0;
};

struct MetricReport {
  long total = 0;
  double micro_f1 = 0.0;
  double macro_f1 = 0.0;
  double weighted_f1 = 0.0;
  std::optional<double> micro_f1_excl_neutral;
  std::optional<double> f1c;
  std::vector<ClassScore> per_class;
  std::vector<GroupScore> groups;
};

// Confusion-matrix scores. Zero denominators score 0; neutral exclusion drops
// the neutral class from both sides of the counting, so gold-neutral pairs
// still cost FP and predicted-neutral pairs still cost FN on the other class.
MetricReport f1_scores(const std::vector<Prediction>& preds, int class_count,
                       std::optional<int> neutral = std::nullopt);

// Global report plus per-group micro-F1 over the selected predictions.
// group_of must return a non-empty group name or throw.
MetricReport group_report(const std::vector<Prediction>& preds, int class_count,
                          std::optional<int> neutral,
                          const std::function<std::string(const Prediction&)>& group_of);

// Groups by the gold class' entry in class_group (size = class count).
MetricReport group_report_by_class(const std::vector<Prediction>& preds, int class_count,
                                   std::optional<int> neutral,
                                   const std::vector<std::string>& class_group);

// Groups by dialogue token length buckets [0,100),[100,200),...,[500,inf).
std::string length_bucket_name(long tokens);
MetricReport group_report_by_length(const std::vector<Prediction>& preds, int class_count,
                                    std::optional<int> neutral,
                                    const std::unordered_map<std::string, long>& id_tokens);

// Stable key-value text; class rows carry the class name last.
std::string render_metric_report(const MetricReport& report,
                                 const std::vector<std::string>& class_names);

}  // namespace turngraph
