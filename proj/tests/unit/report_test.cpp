#include <doctest.h>

#include <algorithm>

#include "fuzex/report.hpp"

using namespace fuzex;

namespace {

// Test split where expression "a" is the high-recall detector (P=0.4, R=0.8)
// and "b" is the high-precision one (P=0.9, R=0.4). F1 prefers b, F2 prefers a.
FuzzyDataset ranking_dataset() {
  const std::size_t positives = 45;
  const std::size_t negatives = 60;
  FuzzyDataset ds;
  FuzzyColumn a{"a", false, true, {}};
  FuzzyColumn b{"b", false, true, {}};
  for (std::size_t i = 0; i < positives + negatives; ++i) {
    const bool positive = i < positives;
    ds.labels.push_back(positive ? 1 : 0);
    bool a_pred, b_pred;
    if (positive) {
      a_pred = i < 36;  // tp_a = 36 of 45 -> R = 0.8
      b_pred = i < 18;  // tp_b = 18 of 45 -> R = 0.4
    } else {
      a_pred = i - positives < 54;  // fp_a = 54 -> P = 36/90 = 0.4
      b_pred = i - positives < 2;   // fp_b = 2 -> P = 18/20 = 0.9
    }
    a.values.push_back(FuzzyValue(a_pred ? 1.0 : 0.0));
    b.values.push_back(FuzzyValue(b_pred ? 1.0 : 0.0));
  }
  ds.columns = {a, b};
  return ds;
}

TrainResult fake_result(std::uint64_t seed, const std::string& best_expr, RewardKind kind) {
  TrainResult r;
  r.seed = seed;
  r.config.seed = seed;
  r.config.reward_kind = kind;
  r.config.library_mode = LibraryMode::single;
  r.config.semantics = Semantics::lukasiewicz;
  r.feature_names = {"a", "b"};
  const Library lib = build_library(LibraryMode::single, Semantics::lukasiewicz, {"a", "b"});
  HallOfFameEntry e;
  e.expression = best_expr;
  e.traversal = traversal_from_tree(parse(best_expr, lib));
  e.reward = 0.5;
  e.complexity = complexity(parse(best_expr, lib));
  r.hall_of_fame.push_back(e);
  return r;
}

}  // namespace

TEST_SUITE_BEGIN("report");

TEST_CASE("f2 reward ranks the high-recall expression first, f1 the high-precision one") {
  const FuzzyDataset test = ranking_dataset();

  const std::vector<TrainResult> f2_results{fake_result(0, "a", RewardKind::f2),
                                            fake_result(1, "b", RewardKind::f2)};
  const ComparisonReport f2_report = report(f2_results, test, 0.5);
  const auto f2_best = std::find_if(f2_report.rows.begin(), f2_report.rows.end(),
                                    [](const ReportRow& r) { return r.kind == "best"; });
  REQUIRE(f2_best != f2_report.rows.end());
  CHECK(f2_best->expression == "a");
  CHECK(f2_best->metrics.recall == doctest::Approx(0.8));
  CHECK(f2_best->metrics.precision == doctest::Approx(0.4));
  CHECK(f2_best->metrics.f2 == doctest::Approx(5.0 * 0.4 * 0.8 / (4.0 * 0.4 + 0.8)));

  const std::vector<TrainResult> f1_results{fake_result(0, "a", RewardKind::f1),
                                            fake_result(1, "b", RewardKind::f1)};
  const ComparisonReport f1_report = report(f1_results, test, 0.5);
  const auto f1_best = std::find_if(f1_report.rows.begin(), f1_report.rows.end(),
                                    [](const ReportRow& r) { return r.kind == "best"; });
  CHECK(f1_best->expression == "b");
}

TEST_CASE("average rows mean the per-seed best metrics") {
  const FuzzyDataset test = ranking_dataset();
  const std::vector<TrainResult> results{fake_result(0, "a", RewardKind::f1),
                                         fake_result(1, "b", RewardKind::f1)};
  const ComparisonReport rep = report(results, test, 0.5);
  REQUIRE(rep.rows.size() == 2);  // one method: best + average
  const auto avg = std::find_if(rep.rows.begin(), rep.rows.end(),
                                [](const ReportRow& r) { return r.kind == "average"; });
  REQUIRE(avg != rep.rows.end());
  CHECK(avg->metrics.recall == doctest::Approx((0.8 + 0.4) / 2.0));
  CHECK(avg->metrics.precision == doctest::Approx((0.4 + 0.9) / 2.0));
  CHECK(avg->expression.empty());
}

TEST_CASE("sixteen seeds yield one best row and one average row over all bests") {
  const FuzzyDataset test = ranking_dataset();
  std::vector<TrainResult> results;
  for (std::uint64_t seed = 0; seed < 16; ++seed) {
    results.push_back(fake_result(seed, seed % 2 == 0 ? "a" : "b", RewardKind::f1));
  }
  const ComparisonReport rep = report(results, test, 0.5);
  REQUIRE(rep.rows.size() == 2);

  const auto avg = std::find_if(rep.rows.begin(), rep.rows.end(),
                                [](const ReportRow& r) { return r.kind == "average"; });
  REQUIRE(avg != rep.rows.end());
  // Eight seeds each land on "a" (R=0.8) and "b" (R=0.4).
  CHECK(avg->metrics.recall == doctest::Approx((0.8 + 0.4) / 2.0));
  CHECK(avg->metrics.precision == doctest::Approx((0.4 + 0.9) / 2.0));
}

TEST_CASE("a single seed makes best and average coincide") {
  const FuzzyDataset test = ranking_dataset();
  const std::vector<TrainResult> results{fake_result(0, "a", RewardKind::f1)};
  const ComparisonReport rep = report(results, test, 0.5);
  REQUIRE(rep.rows.size() == 2);
  CHECK(rep.rows[0].metrics.f1 == doctest::Approx(rep.rows[1].metrics.f1));
  CHECK(rep.rows[0].metrics.recall == doctest::Approx(rep.rows[1].metrics.recall));
}

TEST_CASE("the pooled front is non-dominated and sourced from the inputs") {
  const FuzzyDataset test = ranking_dataset();
  std::vector<TrainResult> results{fake_result(0, "a", RewardKind::f1),
                                   fake_result(1, "not(not(b))", RewardKind::f1),
                                   fake_result(2, "b", RewardKind::f1)};
  const ComparisonReport rep = report(results, test, 0.5);
  REQUIRE(!rep.front.empty());
  CHECK(pareto_front(rep.front) == rep.front);
  for (std::size_t i = 1; i < rep.front.size(); ++i) {
    CHECK(rep.front[i].complexity > rep.front[i - 1].complexity);
    CHECK(rep.front[i].reward > rep.front[i - 1].reward);
  }
}

TEST_CASE("missing features in the test split are rejected") {
  FuzzyDataset test = ranking_dataset();
  test.columns.erase(test.columns.begin());  // drop "a"
  const std::vector<TrainResult> results{fake_result(0, "b", RewardKind::f1)};
  CHECK_THROWS_AS(report(results, test, 0.5), std::invalid_argument);
}

TEST_CASE("emitters produce the four metrics and csv rows per front point") {
  const FuzzyDataset test = ranking_dataset();
  const std::vector<TrainResult> results{fake_result(0, "a", RewardKind::f1)};
  const ComparisonReport rep = report(results, test, 0.5);

  const std::string json = rep.to_json();
  for (const char* key : {"\"f1\"", "\"f2\"", "\"accuracy\"", "\"precision\"", "\"recall\""}) {
    CHECK(json.find(key) != std::string::npos);
  }
  const std::string text = rep.to_text();
  CHECK(text.find("best") != std::string::npos);
  CHECK(text.find("average") != std::string::npos);

  const std::string csv = rep.pareto_csv();
  const std::size_t lines = static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n'));
  CHECK(lines == rep.front.size() + 1);  // header + one row per point

  CHECK_THROWS_AS(report({}, test, 0.5), std::invalid_argument);
}

TEST_SUITE_END();
