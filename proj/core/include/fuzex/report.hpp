#pragma once

#include <string>
#include <vector>

#include "fuzex/dataset.hpp"
#include "fuzex/metrics.hpp"
#include "fuzex/pareto.hpp"
#include "fuzex/trainer.hpp"

namespace fuzex {

// One line of the comparison tables: an expression with its test-split
// metrics, or the per-seed average of such lines.
struct ReportRow {
  std::string method;
  std::string kind;  // "best" or "average"
  std::string expression;  // empty for average rows
  Metrics metrics;
  int complexity = 0;  // 0 for average rows
};

struct ComparisonReport {
  std::vector<ReportRow> rows;
  std::vector<ParetoPoint> front;  // pooled halls of fame, test reward

  std::string to_json() const;
  std::string to_text() const;
  std::string pareto_csv() const;
};

// Re-evaluates every seed's hall of fame on the test split and assembles the
// best-single-expression row plus the mean-of-best row per method, along with
// the pooled Pareto front. Ranking uses the reward metric each result was
// trained with.
ComparisonReport report(const std::vector<TrainResult>& results, const FuzzyDataset& test,
                        double threshold);

}  // namespace fuzex
