// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Run via `ctest -R acceptance` or directly.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <string>
#include <vector>

#include "fuzex/constraints.hpp"
#include "fuzex/controller.hpp"
#include "fuzex/dataset.hpp"
#include "fuzex/expr.hpp"
#include "fuzex/fuzzy.hpp"
#include "fuzex/library.hpp"
#include "fuzex/metrics.hpp"
#include "fuzex/pareto.hpp"
#include "fuzex/report.hpp"
#include "fuzex/rng.hpp"
#include "fuzex/trainer.hpp"

using namespace fuzex;

namespace {

int g_failures = 0;

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

void criterion(int index, const char* name, bool pass, const std::string& detail,
               double seconds) {
  std::printf("[%s] criterion %2d: %s (%s, %.2fs)\n", pass ? "PASS" : "FAIL", index, name,
              detail.c_str(), seconds);
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

// ---------------------------------------------------------------------------
// 1. Operator algebra over >= 10,000 random triples at 1e-12.

bool algebra_suite(std::string& detail) {
  Rng rng(0xA15EB);
  constexpr double tol = 1e-12;
  const int triples = 12000;
  long checks = 0;
  for (int it = 0; it < triples; ++it) {
    const FuzzyValue a(rng.next_double());
    const FuzzyValue b(rng.next_double());
    const FuzzyValue c(rng.next_double());
    const FuzzyValue a_up(std::min(1.0, a.value() + rng.next_double() * (1.0 - a.value())));

    if (std::abs(fuzzy_neg(fuzzy_neg(a)).value() - a.value()) > tol) return false;
    ++checks;
    for (Semantics s : kAllSemantics) {
      if (fuzzy_tnorm(s, a, b).value() != fuzzy_tnorm(s, b, a).value()) return false;
      if (fuzzy_tconorm(s, a, b).value() != fuzzy_tconorm(s, b, a).value()) return false;
      if (std::abs(fuzzy_tnorm(s, a, FuzzyValue(1.0)).value() - a.value()) > tol) return false;
      if (fuzzy_tnorm(s, a, FuzzyValue(0.0)).value() != 0.0) return false;
      if (std::abs(fuzzy_tconorm(s, a, FuzzyValue(0.0)).value() - a.value()) > tol) return false;
      if (std::abs(fuzzy_tconorm(s, a, FuzzyValue(1.0)).value() - 1.0) > tol) return false;
      if (fuzzy_tnorm(s, a, b).value() > fuzzy_tnorm(s, a_up, b).value() + tol) return false;
      if (fuzzy_tconorm(s, a, b).value() > fuzzy_tconorm(s, a_up, b).value() + tol) return false;
      const double demorgan = fuzzy_neg(fuzzy_tnorm(s, fuzzy_neg(a), fuzzy_neg(b))).value();
      if (std::abs(fuzzy_tconorm(s, a, b).value() - demorgan) > tol) return false;
      const double s_impl = fuzzy_s_implication(s, a, c).value();
      if (std::abs(s_impl - fuzzy_tconorm(s, fuzzy_neg(a), c).value()) > tol) return false;
      for (double v : {fuzzy_tnorm(s, a, b).value(), fuzzy_tconorm(s, a, b).value(), s_impl,
                       fuzzy_r_implication(s, a, c).value()}) {
        if (v < 0.0 || v > 1.0) return false;
      }
      checks += 10;
    }
    if (fuzzy_r_implication(Semantics::lukasiewicz, a, c).value() !=
        fuzzy_s_implication(Semantics::lukasiewicz, a, c).value()) {
      return false;
    }
    const double t_lk = fuzzy_tnorm(Semantics::lukasiewicz, a, b).value();
    const double t_pr = fuzzy_tnorm(Semantics::product, a, b).value();
    const double t_gd = fuzzy_tnorm(Semantics::goedel, a, b).value();
    if (t_lk > t_pr + tol || t_pr > t_gd + tol) return false;
    checks += 2;
  }
  detail = std::to_string(triples) + " triples, " + std::to_string(checks) + " checks";
  return true;
}

// ---------------------------------------------------------------------------
// 2. Metric anchor: a confusion matrix realizing the published operating
// point (precision 0.154, recall 0.256 at three decimals) must give F1 within
// 0.193 +/- 0.0005.

bool metric_anchor(std::string& detail) {
  const ConfusionMatrix cm{1000, 5473, 991628, 2899};
  const Metrics m = metrics_from(cm);
  char buf[160];
  std::snprintf(buf, sizeof(buf), "P=%.6f R=%.6f F1=%.6f", m.precision, m.recall, m.f1);
  detail = buf;
  if (std::abs(m.precision - 0.154) >= 0.0005) return false;
  if (std::abs(m.recall - 0.256) >= 0.0005) return false;
  return std::abs(m.f1 - 0.193) <= 0.0005;
}

// ---------------------------------------------------------------------------
// 3. Complexity anchor: 2 t-norms + 2 t-conorms + 1 negation + 5 terminals
// scores 10.

bool complexity_anchor(std::string& detail) {
  const Library lib = build_library(LibraryMode::single, Semantics::product, {"NBD", "OBD"});
  const ExprTree tree = parse("and_pr(NBD, and_pr(not(or_pr(OBD, OBD)), or_pr(OBD, OBD)))", lib);
  const int got = complexity(tree);
  detail = "complexity=" + std::to_string(got);
  return got == 10;
}

// ---------------------------------------------------------------------------
// 4. Gradient correctness on a hidden_size=4, 5-token instance over 20 draws.

bool gradient_correctness(std::string& detail) {
  const Library lib = build_library(LibraryMode::single, Semantics::lukasiewicz, {"A"});
  const ConstraintConfig cfg{12, 1, false};
  Rng meta(0x6BADF00D);
  double worst_overall = 0.0;
  for (int draw = 0; draw < 20; ++draw) {
    Controller c(lib.size(), 4, 10000 + static_cast<std::uint64_t>(draw));
    ParamTensors& p = c.mutable_params();
    for (auto* vec : {&p.embed_parent, &p.embed_sibling, &p.w_in, &p.w_rec, &p.b_rec, &p.w_out,
                      &p.b_out}) {
      for (double& v : *vec) v = meta.next_uniform(-0.5, 0.5);
    }
    Rng rng(7000 + static_cast<std::uint64_t>(draw));
    const Trajectory traj = c.sample(lib, cfg, rng);
    const auto [lp, grad] = c.log_prob_and_grad(traj.traversal, lib, cfg);
    (void)lp;

    constexpr double h = 1e-5;
    const std::vector<std::pair<std::vector<double>*, const std::vector<double>*>> pairs = {
        {&p.embed_parent, &grad.embed_parent}, {&p.embed_sibling, &grad.embed_sibling},
        {&p.w_in, &grad.w_in},                 {&p.w_rec, &grad.w_rec},
        {&p.b_rec, &grad.b_rec},               {&p.w_out, &grad.w_out},
        {&p.b_out, &grad.b_out}};
    for (auto& [params, grads] : pairs) {
      for (std::size_t i = 0; i < params->size(); ++i) {
        const double saved = (*params)[i];
        (*params)[i] = saved + h;
        const double up = c.log_prob_and_grad(traj.traversal, lib, cfg).first;
        (*params)[i] = saved - h;
        const double down = c.log_prob_and_grad(traj.traversal, lib, cfg).first;
        (*params)[i] = saved;
        const double fd = (up - down) / (2.0 * h);
        const double an = (*grads)[i];
        const double abs_err = std::abs(fd - an);
        if (abs_err <= 1e-10) continue;
        worst_overall =
            std::max(worst_overall, abs_err / std::max({1e-8, std::abs(fd), std::abs(an)}));
      }
    }
  }
  char buf[80];
  std::snprintf(buf, sizeof(buf), "worst relative error %.3e over 20 draws", worst_overall);
  detail = buf;
  return worst_overall < 1e-4;
}

// ---------------------------------------------------------------------------
// 5 & 6. Planted-rule recovery across 16 seeds, plus the constrained variant.

struct PlantedData {
  FuzzyDataset train;
  FuzzyDataset test;
};

PlantedData make_planted() {
  const auto rows = generate_synthetic(10000, 0.0013, 17, std::string(kDefaultPlantedRule));
  const FeatureDataset features = engineer_features(rows);
  const auto [train_clean, test_features] = stratified_split(features, 0.7, 17);
  const FeatureDataset train_noised = add_gaussian_noise(train_clean, 0.05, 17);
  const FuzzifierModel model = fit_fuzzifier(train_noised);
  return PlantedData{apply_fuzzifier(model, train_noised),
                     apply_fuzzifier(model, test_features)};
}

double test_f1_of_best(const TrainResult& result, const FuzzyDataset& test) {
  const Library lib =
      build_library(result.config.library_mode,
                    result.config.library_mode == LibraryMode::single
                        ? std::optional<Semantics>(result.config.semantics)
                        : std::nullopt,
                    result.feature_names);
  const ExprTree tree = parse(result.best().expression, lib);
  const auto values = evaluate_columns(tree, test.terminal_columns());
  std::vector<int> preds(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) preds[i] = values[i].value() >= 0.5 ? 1 : 0;
  return metrics_from(confusion(preds, test.labels)).f1;
}

bool planted_recovery(const PlantedData& data, std::string& detail) {
  TrainConfig cfg;  // stock defaults
  cfg.n_samples = 20000;
  std::vector<std::uint64_t> seeds(16);
  std::iota(seeds.begin(), seeds.end(), 0);
  const std::vector<TrainResult> results = run_seed_sweep(cfg, data.train, seeds);
  if (results.size() != seeds.size()) return false;

  int passed = 0;
  double worst_train = 1.0, worst_test = 1.0;
  for (const TrainResult& result : results) {
    const double train_f1 = result.best().reward;
    const double test_f1 = test_f1_of_best(result, data.test);
    worst_train = std::min(worst_train, train_f1);
    worst_test = std::min(worst_test, test_f1);
    if (train_f1 >= 0.9 && test_f1 >= 0.85) ++passed;
  }
  char buf[120];
  std::snprintf(buf, sizeof(buf), "%d/16 seeds passed (worst train F1 %.4f, test F1 %.4f)",
                passed, worst_train, worst_test);
  detail = buf;
  return passed >= 12;
}

bool constrained_mode(const PlantedData& data, std::string& detail) {
  TrainConfig cfg;
  cfg.n_samples = 20000;
  cfg.mode = SearchMode::constrained;
  cfg.seed = 0;
  const TrainResult result = train(cfg, data.train);
  char buf[120];
  std::snprintf(buf, sizeof(buf), "%ld/%ld sampled expressions implication-rooted",
                result.n_s_implication_roots, result.n_expressions_evaluated);
  detail = buf;
  if (result.n_expressions_evaluated != 20000) return false;
  if (result.n_s_implication_roots != result.n_expressions_evaluated) return false;
  for (const auto& e : result.hall_of_fame) {
    if (e.expression.rfind("implies_", 0) != 0) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// 7. Risk filter against a sort-and-slice oracle.

bool risk_filter_check(std::string& detail) {
  // Distinct rewards: exactly 25 of 500 kept.
  {
    Rng rng(0xF17);
    std::vector<double> rewards(500);
    std::iota(rewards.begin(), rewards.end(), 0.0);
    for (auto& r : rewards) r /= 500.0;
    for (std::size_t i = rewards.size(); i > 1; --i) {
      std::swap(rewards[i - 1],
                rewards[static_cast<std::size_t>(rng.next_int(static_cast<int>(i)))]);
    }
    const auto [threshold, kept] = risk_filter(rewards, 0.05);
    if (kept.size() != 25) return false;
    for (std::size_t i : kept) {
      if (rewards[i] - threshold < 0.0) return false;
    }
  }
  // Ties at the quantile: every tied sample is kept with advantage 0.
  {
    std::vector<double> rewards(500, 0.5);
    for (int i = 0; i < 10; ++i) rewards[static_cast<std::size_t>(i)] = 0.9;
    const auto [threshold, kept] = risk_filter(rewards, 0.05);
    if (threshold != 0.5) return false;
    if (kept.size() != 500) return false;
  }
  // Random vectors against the oracle.
  Rng rng(0xCAFE);
  const int trials = 2000;
  for (int t = 0; t < trials; ++t) {
    const std::size_t n = 20 + static_cast<std::size_t>(rng.next_int(500));
    const double epsilon = 0.01 + rng.next_double() * 0.4;
    if (epsilon * static_cast<double>(n) < 1.0) continue;
    std::vector<double> rewards(n);
    const bool ties = rng.next_int(2) == 1;
    for (auto& r : rewards) {
      r = ties ? static_cast<double>(rng.next_int(8)) / 8.0 : rng.next_double();
    }
    const auto [threshold, kept] = risk_filter(rewards, epsilon);
    std::vector<double> sorted = rewards;
    std::sort(sorted.rbegin(), sorted.rend());
    const std::size_t k = static_cast<std::size_t>(std::ceil(epsilon * static_cast<double>(n)));
    if (threshold != sorted[k - 1]) return false;
    if (kept.size() < k) return false;
    std::size_t expected = 0;
    for (double r : rewards) expected += r >= threshold ? 1 : 0;
    if (kept.size() != expected) return false;
    for (std::size_t i : kept) {
      if (rewards[i] < threshold) return false;
    }
  }
  detail = std::to_string(trials) + " random vectors + tie cases";
  return true;
}

// ---------------------------------------------------------------------------
// 8. Pareto front against the O(n^2) domination oracle.

std::vector<ParetoPoint> brute_front(const std::vector<ParetoPoint>& points) {
  std::vector<ParetoPoint> kept;
  for (const auto& p : points) {
    bool dominated = false;
    for (const auto& q : points) {
      if ((q.complexity <= p.complexity && q.reward > p.reward) ||
          (q.complexity < p.complexity && q.reward >= p.reward)) {
        dominated = true;
        break;
      }
    }
    if (dominated) continue;
    bool dup = false;
    for (auto& k : kept) {
      if (k.complexity == p.complexity && k.reward == p.reward) {
        dup = true;
        if (p.expression < k.expression) k.expression = p.expression;
        break;
      }
    }
    if (!dup) kept.push_back(p);
  }
  std::sort(kept.begin(), kept.end(), [](const ParetoPoint& a, const ParetoPoint& b) {
    return a.complexity < b.complexity;
  });
  return kept;
}

bool pareto_check(std::string& detail) {
  Rng rng(0x9A12E70);
  const int sets = 1000;
  for (int t = 0; t < sets; ++t) {
    const std::size_t n = 1 + static_cast<std::size_t>(rng.next_int(200));
    std::vector<ParetoPoint> pts;
    pts.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      pts.push_back(ParetoPoint{1 + rng.next_int(40),
                                static_cast<double>(rng.next_int(64)) / 64.0,
                                "e" + std::to_string(rng.next_int(50))});
    }
    const auto fast = pareto_front(pts);
    if (fast != brute_front(pts)) return false;
    if (pareto_front(fast) != fast) return false;
  }
  detail = std::to_string(sets) + " random point sets";
  return true;
}

// ---------------------------------------------------------------------------
// 9. Fuzzification on a 100,000-row synthetic set, outliers included.

bool fuzzification_check(std::string& detail) {
  const auto rows = generate_synthetic(100000, 0.0013, 23, std::nullopt);
  const FeatureDataset features = engineer_features(rows);
  const auto [train_clean, test_features] = stratified_split(features, 0.7, 23);
  const FuzzifierModel model = fit_fuzzifier(train_clean);
  long scanned = 0;
  for (const FuzzyDataset& ds :
       {apply_fuzzifier(model, train_clean), apply_fuzzifier(model, test_features)}) {
    for (const auto& col : ds.columns) {
      for (const FuzzyValue v : col.values) {
        ++scanned;
        const double x = v.value();
        if (col.binary) {
          if (x != 0.0 && x != 1.0) return false;
        } else if (x != 0.2 && x != 0.4 && x != 0.6 && x != 0.8 && x != 1.0) {
          return false;
        }
      }
    }
  }

  // Monotonicity over random cutpoints.
  Rng rng(0xF022);
  for (int t = 0; t < 200; ++t) {
    std::array<double, 4> cuts{};
    for (auto& c : cuts) c = rng.next_double() * 10.0;
    std::sort(cuts.begin(), cuts.end());
    FuzzifierModel m2;
    m2.columns.push_back(FuzzifierColumn{"x", false, cuts});
    FeatureDataset probe;
    probe.labels.assign(64, 0);
    FeatureColumn col{"x", false, true, {}};
    for (int i = 0; i < 64; ++i) col.values.push_back(rng.next_double() * 20.0 - 5.0);
    std::sort(col.values.begin(), col.values.end());
    probe.columns = {col};
    const FuzzyDataset fz = apply_fuzzifier(m2, probe);
    for (std::size_t i = 1; i < fz.columns[0].values.size(); ++i) {
      if (fz.columns[0].values[i].value() < fz.columns[0].values[i - 1].value()) return false;
    }
  }
  detail = std::to_string(scanned) + " values scanned";
  return true;
}

// ---------------------------------------------------------------------------
// 10. Two full pipeline runs produce byte-identical results modulo the
// timestamp metadata field.

std::string strip_timestamp(const std::string& json_text) {
  std::string out;
  std::size_t start = 0;
  while (start <= json_text.size()) {
    const std::size_t end = json_text.find('\n', start);
    const std::string line = json_text.substr(start, end - start);
    if (line.find("\"timestamp\"") == std::string::npos) {
      out += line;
      out += '\n';
    }
    if (end == std::string::npos) break;
    start = end + 1;
  }
  return out;
}

bool determinism_check(std::string& detail) {
  auto pipeline = [](const char* stamp) {
    const auto rows = generate_synthetic(4000, 0.0013, 29, std::string(kDefaultPlantedRule));
    const FeatureDataset features = engineer_features(rows);
    const auto [train_clean, test_features] = stratified_split(features, 0.7, 29);
    const FeatureDataset train_noised = add_gaussian_noise(train_clean, 0.05, 29);
    const FuzzifierModel model = fit_fuzzifier(train_noised);
    const FuzzyDataset train_ds = apply_fuzzifier(model, train_noised);
    TrainConfig cfg;
    cfg.batch_size = 250;
    cfg.n_samples = 2000;
    cfg.seed = 3;
    return train(cfg, train_ds).to_json(stamp);
  };
  const std::string a = pipeline("2001-01-01T00:00:00Z");
  const std::string b = pipeline("2002-02-02T00:00:00Z");
  detail = "two runs, " + std::to_string(a.size()) + " bytes each";
  if (a == b) return false;  // the timestamp field must actually differ
  return strip_timestamp(a) == strip_timestamp(b);
}

// ---------------------------------------------------------------------------
// 11. F2-reward protocol: all four metrics reported for best and average
// rows, and F2 selection ranks the high-recall expression first.

bool f2_protocol_check(std::string& detail) {
  // Fixture: "a" has P=0.4, R=0.8; "b" has P=0.9, R=0.4. F1 prefers b.
  FuzzyDataset test;
  FuzzyColumn a{"a", false, true, {}};
  FuzzyColumn b{"b", false, true, {}};
  for (std::size_t i = 0; i < 105; ++i) {
    const bool positive = i < 45;
    test.labels.push_back(positive ? 1 : 0);
    const bool a_pred = positive ? i < 36 : i - 45 < 54;
    const bool b_pred = positive ? i < 18 : i - 45 < 2;
    a.values.push_back(FuzzyValue(a_pred ? 1.0 : 0.0));
    b.values.push_back(FuzzyValue(b_pred ? 1.0 : 0.0));
  }
  test.columns = {a, b};

  const Library lib = build_library(LibraryMode::single, Semantics::lukasiewicz, {"a", "b"});
  auto fake = [&](std::uint64_t seed, const std::string& expr) {
    TrainResult r;
    r.seed = seed;
    r.config.seed = seed;
    r.config.reward_kind = RewardKind::f2;
    r.config.library_mode = LibraryMode::single;
    r.config.semantics = Semantics::lukasiewicz;
    r.feature_names = {"a", "b"};
    HallOfFameEntry e;
    e.expression = expr;
    e.traversal = traversal_from_tree(parse(expr, lib));
    e.reward = 0.5;
    e.complexity = complexity(parse(expr, lib));
    r.hall_of_fame.push_back(e);
    return r;
  };
  const std::vector<TrainResult> results{fake(0, "a"), fake(1, "b")};
  const ComparisonReport rep = report(results, test, 0.5);

  const ReportRow* best = nullptr;
  const ReportRow* average = nullptr;
  for (const auto& row : rep.rows) {
    if (row.kind == "best") best = &row;
    if (row.kind == "average") average = &row;
  }
  if (best == nullptr || average == nullptr) return false;

  // Direct arithmetic for both operating points.
  const double f2_recall_heavy = 5.0 * 0.4 * 0.8 / (4.0 * 0.4 + 0.8);
  const double f2_precision_heavy = 5.0 * 0.9 * 0.4 / (4.0 * 0.9 + 0.4);
  const double f1_recall_heavy = 2.0 * 0.4 * 0.8 / (0.4 + 0.8);
  const double f1_precision_heavy = 2.0 * 0.9 * 0.4 / (0.9 + 0.4);
  if (f2_recall_heavy <= f2_precision_heavy) return false;
  if (f1_recall_heavy >= f1_precision_heavy) return false;  // fixture must be discriminating
  if (best->expression != "a") return false;                // high recall wins under F2
  if (std::abs(best->metrics.f2 - f2_recall_heavy) > 1e-12) return false;

  // All four table metrics present in both rows and in the JSON emission.
  const std::string json_text = rep.to_json();
  for (const char* key : {"\"f1\"", "\"accuracy\"", "\"precision\"", "\"recall\""}) {
    if (json_text.find(key) == std::string::npos) return false;
  }
  for (const ReportRow* row : {best, average}) {
    for (double v : {row->metrics.f1, row->metrics.accuracy, row->metrics.precision,
                     row->metrics.recall}) {
      if (!(v >= 0.0 && v <= 1.0)) return false;
    }
  }
  char buf[120];
  std::snprintf(buf, sizeof(buf), "F2 %.3f (recall-heavy) > %.3f (precision-heavy)",
                f2_recall_heavy, f2_precision_heavy);
  detail = buf;
  return true;
}

}  // namespace

int main() {
  {
    Stopwatch sw;
    std::string detail;
    const bool ok = algebra_suite(detail);
    criterion(1, "fuzzy operator algebra at 1e-12", ok, detail, sw.seconds());
  }
  {
    Stopwatch sw;
    std::string detail;
    const bool ok = metric_anchor(detail);
    criterion(2, "F1 metric anchor 0.193 +/- 0.0005", ok, detail, sw.seconds());
  }
  {
    Stopwatch sw;
    std::string detail;
    const bool ok = complexity_anchor(detail);
    criterion(3, "complexity anchor 10", ok, detail, sw.seconds());
  }
  {
    Stopwatch sw;
    std::string detail;
    const bool ok = gradient_correctness(detail);
    criterion(4, "policy gradient vs finite differences", ok, detail, sw.seconds());
  }
  {
    const PlantedData data = make_planted();
    {
      Stopwatch sw;
      std::string detail;
      const bool ok = planted_recovery(data, detail);
      criterion(5, "planted-rule recovery across 16 seeds", ok, detail, sw.seconds());
    }
    {
      Stopwatch sw;
      std::string detail;
      const bool ok = constrained_mode(data, detail);
      criterion(6, "constrained mode implication roots", ok, detail, sw.seconds());
    }
  }
  {
    Stopwatch sw;
    std::string detail;
    const bool ok = risk_filter_check(detail);
    criterion(7, "risk filter vs sort-and-slice oracle", ok, detail, sw.seconds());
  }
  {
    Stopwatch sw;
    std::string detail;
    const bool ok = pareto_check(detail);
    criterion(8, "pareto front vs domination oracle", ok, detail, sw.seconds());
  }
  {
    Stopwatch sw;
    std::string detail;
    const bool ok = fuzzification_check(detail);
    criterion(9, "fuzzification levels and monotonicity", ok, detail, sw.seconds());
  }
  {
    Stopwatch sw;
    std::string detail;
    const bool ok = determinism_check(detail);
    criterion(10, "byte-identical pipeline reruns", ok, detail, sw.seconds());
  }
  {
    Stopwatch sw;
    std::string detail;
    const bool ok = f2_protocol_check(detail);
    criterion(11, "F2 reward protocol and ranking", ok, detail, sw.seconds());
  }

  if (g_failures == 0) {
    std::printf("all criteria passed\n");
  } else {
    std::printf("%d criteria FAILED\n", g_failures);
  }
  return g_failures == 0 ? 0 : 1;
}
