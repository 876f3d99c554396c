#include "dpgcn/metrics.hpp"

#include <stdexcept>
#include <string>

namespace dpgcn {

EvalReport evaluate(const std::vector<int>& predictions, const std::vector<int>& labels,
                    const std::vector<int>& ids, int num_classes) {
  if (ids.empty()) throw std::invalid_argument("evaluate: empty node set");
  if (num_classes < 1) throw std::invalid_argument("evaluate: num_classes must be >= 1");

  EvalReport r;
  r.num_classes = num_classes;
  r.total = static_cast<std::int64_t>(ids.size());
  r.confusion.assign(static_cast<std::size_t>(num_classes),
                     std::vector<std::int64_t>(static_cast<std::size_t>(num_classes), 0));
  std::int64_t correct = 0;
  for (int i : ids) {
    const int y = labels.at(static_cast<std::size_t>(i));
    const int p = predictions.at(static_cast<std::size_t>(i));
    if (y < 0 || y >= num_classes || p < 0 || p >= num_classes) {
      throw std::invalid_argument("evaluate: label/prediction out of range at node " +
                                  std::to_string(i));
    }
    ++r.confusion[static_cast<std::size_t>(y)][static_cast<std::size_t>(p)];
    if (y == p) ++correct;
  }
  r.accuracy = static_cast<double>(correct) / static_cast<double>(r.total);

  r.precision.assign(static_cast<std::size_t>(num_classes), 0.0);
  r.recall.assign(static_cast<std::size_t>(num_classes), 0.0);
  r.f1.assign(static_cast<std::size_t>(num_classes), 0.0);
  r.support.assign(static_cast<std::size_t>(num_classes), 0);
  for (int c = 0; c < num_classes; ++c) {
    std::int64_t tp = r.confusion[static_cast<std::size_t>(c)][static_cast<std::size_t>(c)];
    std::int64_t pred_c = 0;
    std::int64_t true_c = 0;
    for (int o = 0; o < num_classes; ++o) {
      pred_c += r.confusion[static_cast<std::size_t>(o)][static_cast<std::size_t>(c)];
      true_c += r.confusion[static_cast<std::size_t>(c)][static_cast<std::size_t>(o)];
    }
    r.support[static_cast<std::size_t>(c)] = true_c;
    double& prec = r.precision[static_cast<std::size_t>(c)];
    double& rec = r.recall[static_cast<std::size_t>(c)];
    if (pred_c == 0) {
      r.has_undefined = true;
    } else {
      prec = static_cast<double>(tp) / static_cast<double>(pred_c);
    }
    if (true_c == 0) {
      r.has_undefined = true;
    } else {
      rec = static_cast<double>(tp) / static_cast<double>(true_c);
    }
    if (prec + rec > 0.0) {
      r.f1[static_cast<std::size_t>(c)] = 2.0 * prec * rec / (prec + rec);
    }
    r.macro_precision += prec;
    r.macro_recall += rec;
    r.macro_f1 += r.f1[static_cast<std::size_t>(c)];
    r.weighted_f1 += static_cast<double>(true_c) * r.f1[static_cast<std::size_t>(c)];
  }
  r.macro_precision /= num_classes;
  r.macro_recall /= num_classes;
  r.macro_f1 /= num_classes;
  r.weighted_f1 /= static_cast<double>(r.total);
  return r;
}

std::string confusion_csv(const EvalReport& r) {
  std::string out = "true\\pred";
  for (int c = 0; c < r.num_classes; ++c) out += "," + std::to_string(c);
  out += "\n";
  for (int t = 0; t < r.num_classes; ++t) {
    out += std::to_string(t);
    for (int p = 0; p < r.num_classes; ++p) {
      out += "," + std::to_string(r.confusion[static_cast<std::size_t>(t)]
                                             [static_cast<std::size_t>(p)]);
    }
    out += "\n";
  }
  return out;
}

nlohmann::json report_to_json(const EvalReport& r) {
  return nlohmann::json{
      {"num_classes", r.num_classes},
      {"total", r.total},
      {"accuracy", r.accuracy},
      {"precision", r.precision},
      {"recall", r.recall},
      {"f1", r.f1},
      {"macro_precision", r.macro_precision},
      {"macro_recall", r.macro_recall},
      {"macro_f1", r.macro_f1},
      {"weighted_f1", r.weighted_f1},
      {"confusion", r.confusion},
      {"support", r.support},
      {"has_undefined", r.has_undefined},
  };
}

}  // namespace dpgcn
