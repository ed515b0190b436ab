#pragma once

#include <string>
#include <vector>

namespace fuzex {

struct ParetoPoint {
  int complexity = 0;
  double reward = 0.0;
  std::string expression;

  friend bool operator==(const ParetoPoint&, const ParetoPoint&) = default;
};

// Non-dominated set in the (complexity, reward) plane: a point survives iff no
// other point has reward strictly greater at complexity <= its own, or reward
// greater-or-equal at strictly smaller complexity. Result sorted by complexity
// ascending with strictly increasing rewards; (complexity, reward) ties keep
// the lexicographically smallest expression.
std::vector<ParetoPoint> pareto_front(std::vector<ParetoPoint> points);

}  // namespace fuzex
