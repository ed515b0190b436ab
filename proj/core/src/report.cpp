#include "fuzex/report.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace fuzex {

namespace {

std::string method_name(const TrainResult& r) {
  if (r.config.library_mode == LibraryMode::combined) return "combined";
  return std::string(to_string(r.config.semantics));
}

Library library_of(const TrainResult& r) {
  return build_library(r.config.library_mode,
                       r.config.library_mode == LibraryMode::single
                           ? std::optional<Semantics>(r.config.semantics)
                           : std::nullopt,
                       r.feature_names);
}

Metrics evaluate_on(const ExprTree& tree, const FuzzyDataset& data, double threshold) {
  const auto values = evaluate_batch(tree, data);
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const bool pred = values[i].value() >= threshold;
    const bool truth = data.labels[i] != 0;
    if (pred && truth) ++cm.tp;
    else if (pred && !truth) ++cm.fp;
    else if (!pred && truth) ++cm.fn;
    else ++cm.tn;
  }
  return metrics_from(cm);
}

double reward_of(const Metrics& m, RewardKind kind) {
  return kind == RewardKind::f1 ? m.f1 : m.f2;
}

std::string fmt(double v) {
  char buf[32];
  const int len = std::snprintf(buf, sizeof(buf), "%.3f", v);
  return std::string(buf, static_cast<std::size_t>(len));
}

std::string fmt_full(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, static_cast<std::size_t>(ptr - buf));
}

}  // namespace

ComparisonReport report(const std::vector<TrainResult>& results, const FuzzyDataset& test,
                        double threshold) {
  if (results.empty()) throw std::invalid_argument("report: no results");
  if (test.rows() == 0) throw std::invalid_argument("report: empty test split");

  // Verify the test split covers every feature the expressions may use.
  for (const auto& r : results) {
    const auto names = test.terminal_names();
    for (const auto& feat : r.feature_names) {
      if (std::find(names.begin(), names.end(), feat) == names.end()) {
        throw std::invalid_argument("report: test split lacks feature '" + feat + "'");
      }
    }
  }

  struct SeedBest {
    Metrics metrics;
    std::string expression;
    int complexity = 0;
    double rank_reward = 0.0;
  };
  std::map<std::string, std::vector<SeedBest>> per_method;

  ComparisonReport out;
  std::vector<ParetoPoint> pool;

  for (const auto& r : results) {
    if (r.hall_of_fame.empty()) continue;
    const Library lib = library_of(r);

    // Test split columns in this result's feature order.
    FuzzyDataset view;
    view.labels = test.labels;
    for (const auto& feat : r.feature_names) {
      for (const auto& col : test.columns) {
        if (col.name == feat) {
          view.columns.push_back(col);
          view.columns.back().terminal = true;
          break;
        }
      }
    }

    const ExprTree best_tree = parse(r.best().expression, lib);
    SeedBest sb;
    sb.metrics = evaluate_on(best_tree, view, threshold);
    sb.expression = r.best().expression;
    sb.complexity = complexity(best_tree);
    sb.rank_reward = reward_of(sb.metrics, r.config.reward_kind);
    per_method[method_name(r)].push_back(std::move(sb));

    for (const auto& e : r.hall_of_fame) {
      const ExprTree tree = parse(e.expression, lib);
      const Metrics m = evaluate_on(tree, view, threshold);
      pool.push_back(
          ParetoPoint{complexity(tree), reward_of(m, r.config.reward_kind), e.expression});
    }
  }

  for (auto& [method, bests] : per_method) {
    const SeedBest* top = &bests.front();
    for (const auto& sb : bests) {
      if (sb.rank_reward > top->rank_reward) top = &sb;
    }
    ReportRow best_row;
    best_row.method = method;
    best_row.kind = "best";
    best_row.expression = top->expression;
    best_row.metrics = top->metrics;
    best_row.complexity = top->complexity;
    out.rows.push_back(std::move(best_row));

    ReportRow avg_row;
    avg_row.method = method;
    avg_row.kind = "average";
    Metrics avg;
    for (const auto& sb : bests) {
      avg.accuracy += sb.metrics.accuracy;
      avg.precision += sb.metrics.precision;
      avg.recall += sb.metrics.recall;
      avg.f1 += sb.metrics.f1;
      avg.f2 += sb.metrics.f2;
    }
    const double n = static_cast<double>(bests.size());
    avg.accuracy /= n;
    avg.precision /= n;
    avg.recall /= n;
    avg.f1 /= n;
    avg.f2 /= n;
    avg_row.metrics = avg;
    out.rows.push_back(std::move(avg_row));
  }

  out.front = pareto_front(std::move(pool));
  return out;
}

std::string ComparisonReport::to_json() const {
  nlohmann::json rows_json = nlohmann::json::array();
  for (const auto& r : rows) {
    rows_json.push_back(nlohmann::json{{"method", r.method},
                                       {"kind", r.kind},
                                       {"expression", r.expression},
                                       {"complexity", r.complexity},
                                       {"f1", r.metrics.f1},
                                       {"f2", r.metrics.f2},
                                       {"accuracy", r.metrics.accuracy},
                                       {"precision", r.metrics.precision},
                                       {"recall", r.metrics.recall}});
  }
  nlohmann::json front_json = nlohmann::json::array();
  for (const auto& p : front) {
    front_json.push_back(nlohmann::json{
        {"complexity", p.complexity}, {"reward", p.reward}, {"expression", p.expression}});
  }
  return nlohmann::json{{"format_version", 1}, {"rows", rows_json}, {"pareto_front", front_json}}
      .dump(2);
}

std::string ComparisonReport::to_text() const {
  std::ostringstream os;
  os << "method        kind      f1      f2      accuracy  precision  recall\n";
  for (const auto& r : rows) {
    char line[160];
    std::snprintf(line, sizeof(line), "%-13s %-9s %-7s %-7s %-9s %-10s %-7s\n", r.method.c_str(),
                  r.kind.c_str(), fmt(r.metrics.f1).c_str(), fmt(r.metrics.f2).c_str(),
                  fmt(r.metrics.accuracy).c_str(), fmt(r.metrics.precision).c_str(),
                  fmt(r.metrics.recall).c_str());
    os << line;
    if (!r.expression.empty()) {
      os << "              expression: " << r.expression << "\n";
    }
  }
  os << "\npareto front (complexity, reward, expression)\n";
  for (const auto& p : front) {
    os << "  " << p.complexity << "  " << fmt(p.reward) << "  " << p.expression << "\n";
  }
  return os.str();
}

std::string ComparisonReport::pareto_csv() const {
  std::string out = "complexity,reward,expression\n";
  for (const auto& p : front) {
    out += std::to_string(p.complexity);
    out += ',';
    out += fmt_full(p.reward);
    out += ',';
    out += p.expression;
    out += '\n';
  }
  return out;
}

}  // namespace fuzex
