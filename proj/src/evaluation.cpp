#include <algorithm>
#include <cmath>
#include <numeric>

#include "rsf/errors.hpp"
#include "rsf/pipeline.hpp"

namespace rsf {

RocCurve evaluate_roc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw ShapeError("score and label counts differ");
  std::size_t positives = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != 0 && labels[i] != 1) throw EvaluationError("labels must be 0 or 1");
    if (!std::isfinite(scores[i])) throw EvaluationError("scores must be finite");
    positives += labels[i] == 1 ? 1 : 0;
  }
  const std::size_t negatives = labels.size() - positives;
  if (positives == 0 || negatives == 0) throw EvaluationError("ROC needs both classes present");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  RocCurve roc;
  roc.fpr.push_back(0.0);
  roc.tpr.push_back(0.0);
  roc.thresholds.push_back(std::numeric_limits<double>::infinity());
  std::size_t tp = 0;
  std::size_t fp = 0;
  double area = 0.0;
  for (std::size_t k = 0; k < order.size();) {
    const double s = scores[order[k]];
    const std::size_t tp0 = tp;
    const std::size_t fp0 = fp;
    for (; k < order.size() && scores[order[k]] == s; ++k) {
      if (labels[order[k]] == 1) ++tp; else ++fp;
    }
    // Trapezoid in integer counts, normalized once at the end.
    area += static_cast<double>(fp - fp0) * static_cast<double>(tp + tp0);
    roc.fpr.push_back(static_cast<double>(fp) / static_cast<double>(negatives));
    roc.tpr.push_back(static_cast<double>(tp) / static_cast<double>(positives));
    roc.thresholds.push_back(s);
  }
  roc.auc = area / (2.0 * static_cast<double>(positives) * static_cast<double>(negatives));
  return roc;
}

namespace {

struct Counts {
  std::size_t tp = 0, fp = 0, fn = 0;
};

Counts confusion(const BinaryMask& mask, const BinaryMask& truth) {
  if (!mask.same_shape(truth)) throw ShapeError("mask and ground truth differ in size");
  Counts c;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i] && truth[i]) ++c.tp;
    else if (mask[i]) ++c.fp;
    else if (truth[i]) ++c.fn;
  }
  return c;
}

}  // namespace

double iou(const BinaryMask& mask, const BinaryMask& truth) {
  const Counts c = confusion(mask, truth);
  const std::size_t uni = c.tp + c.fp + c.fn;
  return uni == 0 ? 1.0 : static_cast<double>(c.tp) / static_cast<double>(uni);
}

double pixel_f1(const BinaryMask& mask, const BinaryMask& truth) {
  const Counts c = confusion(mask, truth);
  const std::size_t denom = 2 * c.tp + c.fp + c.fn;
  return denom == 0 ? 1.0 : 2.0 * static_cast<double>(c.tp) / static_cast<double>(denom);
}

}  // namespace rsf
