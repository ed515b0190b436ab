#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fuzex/controller.hpp"
#include "fuzex/dataset.hpp"
#include "fuzex/expr.hpp"
#include "fuzex/library.hpp"
#include "fuzex/metrics.hpp"

namespace fuzex {

enum class RewardKind { f1, f2 };
enum class SearchMode { unconstrained, constrained };

RewardKind reward_kind_from_string(const std::string& s);
std::string to_string(RewardKind k);
SearchMode search_mode_from_string(const std::string& s);
std::string to_string(SearchMode m);
std::string to_string(LibraryMode m);

struct TrainConfig {
  int batch_size = 500;
  long n_samples = 200000;
  double epsilon = 0.05;
  double learning_rate = 5e-4;
  double entropy_weight = 5e-3;
  double sigmoid_threshold = 0.5;
  RewardKind reward_kind = RewardKind::f1;
  SearchMode mode = SearchMode::unconstrained;
  LibraryMode library_mode = LibraryMode::single;
  Semantics semantics = Semantics::lukasiewicz;
  int hidden_size = 32;
  int max_length = 32;
  int min_length = 4;
  std::uint64_t seed = 0;

  void validate() const;
};

struct HallOfFameEntry {
  std::string expression;
  Traversal traversal;
  double reward = 0.0;
  int complexity = 0;
  Metrics train_metrics;
};

struct BatchStats {
  double max_reward = 0.0;
  double mean_reward = 0.0;
  double quantile = 0.0;
  double best_so_far = 0.0;
};

struct TrainResult {
  std::uint64_t seed = 0;
  TrainConfig config;
  std::vector<std::string> feature_names;
  std::vector<HallOfFameEntry> hall_of_fame;  // reward-descending
  std::vector<BatchStats> reward_curve;
  long n_expressions_evaluated = 0;
  long n_s_implication_roots = 0;

  const HallOfFameEntry& best() const { return hall_of_fame.front(); }
  std::string to_json(const std::string& timestamp = "") const;
  static TrainResult from_json(const std::string& text);
};

double compute_reward(const ExprTree& tree, const FuzzyDataset& data, double threshold,
                      RewardKind kind);

// Empirical risk threshold: the ceil(epsilon*n)-th largest reward. Every
// sample at or above it is kept, so ties widen the kept set.
std::pair<double, std::vector<std::size_t>> risk_filter(std::span<const double> rewards,
                                                        double epsilon);

using BatchLogger = std::function<void(int batch, const BatchStats&)>;

TrainResult train(const TrainConfig& cfg, const FuzzyDataset& data,
                  const BatchLogger& logger = nullptr);

std::vector<TrainResult> run_seed_sweep(const TrainConfig& cfg, const FuzzyDataset& data,
                                        std::span<const std::uint64_t> seeds,
                                        const BatchLogger& logger = nullptr);

}  // namespace fuzex
