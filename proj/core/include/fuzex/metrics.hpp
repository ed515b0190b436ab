#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>

namespace fuzex {

// Binary confusion counts; the positive class is fraud (label 1).
struct ConfusionMatrix {
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t tn = 0;
  std::int64_t fn = 0;

  std::int64_t total() const { return tp + fp + tn + fn; }
};

struct Metrics {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double f2 = 0.0;
};

inline ConfusionMatrix confusion(std::span<const int> predictions, std::span<const int> labels) {
  if (predictions.size() != labels.size()) {
    throw std::invalid_argument("confusion: length mismatch (" +
                                std::to_string(predictions.size()) + " vs " +
                                std::to_string(labels.size()) + ")");
  }
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const bool pred = predictions[i] != 0;
    const bool truth = labels[i] != 0;
    if (pred && truth) ++cm.tp;
    else if (pred && !truth) ++cm.fp;
    else if (!pred && truth) ++cm.fn;
    else ++cm.tn;
  }
  return cm;
}

// Degenerate conventions: precision and recall are 0 when their denominator
// is 0, and each F-score is 0 when its own denominator vanishes. A predict-
// nothing expression must score 0, not NaN.
inline Metrics metrics_from(const ConfusionMatrix& cm) {
  if (cm.total() == 0) throw std::invalid_argument("metrics_from: empty confusion matrix");
  Metrics m;
  const double tp = static_cast<double>(cm.tp);
  m.precision = (cm.tp + cm.fp) > 0 ? tp / static_cast<double>(cm.tp + cm.fp) : 0.0;
  m.recall = (cm.tp + cm.fn) > 0 ? tp / static_cast<double>(cm.tp + cm.fn) : 0.0;
  m.f1 = (m.precision + m.recall) > 0.0
             ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
             : 0.0;
  m.f2 = (4.0 * m.precision + m.recall) > 0.0
             ? 5.0 * m.precision * m.recall / (4.0 * m.precision + m.recall)
             : 0.0;
  m.accuracy = static_cast<double>(cm.tp + cm.tn) / static_cast<double>(cm.total());
  return m;
}

}  // namespace fuzex
