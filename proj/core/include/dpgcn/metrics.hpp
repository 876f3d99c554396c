#pragma once

#include <cstdint>
#include <vector>

#include <nlohmann/json.hpp>

namespace dpgcn {

/// Accuracy plus per-class and macro-averaged precision/recall/F1.
/// Zero-denominator precision or recall counts as 0 and sets `has_undefined`.
struct EvalReport {
  int num_classes = 0;
  std::int64_t total = 0;
  double accuracy = 0.0;
  std::vector<double> precision;  // per class
  std::vector<double> recall;
  std::vector<double> f1;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;      // unweighted mean of per-class F1
  double weighted_f1 = 0.0;   // support-weighted mean of per-class F1
  std::vector<std::vector<std::int64_t>> confusion;  // [true][pred]
  std::vector<std::int64_t> support;                 // true count per class
  bool has_undefined = false;
};

/// Evaluates predictions against labels on the given node ids.
/// Throws std::invalid_argument when `ids` is empty or a label is out of range.
EvalReport evaluate(const std::vector<int>& predictions, const std::vector<int>& labels,
                    const std::vector<int>& ids, int num_classes);

nlohmann::json report_to_json(const EvalReport& report);

/// Confusion matrix as CSV: header `true\pred,0..C-1`, one row per true class.
std::string confusion_csv(const EvalReport& report);

}  // namespace dpgcn
