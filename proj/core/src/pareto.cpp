#include "fuzex/pareto.hpp"

#include <algorithm>

namespace fuzex {

std::vector<ParetoPoint> pareto_front(std::vector<ParetoPoint> points) {
  if (points.empty()) return {};
  std::sort(points.begin(), points.end(), [](const ParetoPoint& a, const ParetoPoint& b) {
    if (a.complexity != b.complexity) return a.complexity < b.complexity;
    if (a.reward != b.reward) return a.reward > b.reward;
    return a.expression < b.expression;
  });

  std::vector<ParetoPoint> front;
  double best = -1.0;
  std::size_t i = 0;
  while (i < points.size()) {
    // points[i] is the best candidate at this complexity level.
    const int c = points[i].complexity;
    if (points[i].reward > best) {
      front.push_back(points[i]);
      best = points[i].reward;
    }
    while (i < points.size() && points[i].complexity == c) ++i;
  }
  return front;
}

}  // namespace fuzex
