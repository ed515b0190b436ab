#include "fuzex/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <thread>

#include <json.hpp>

namespace fuzex {

RewardKind reward_kind_from_string(const std::string& s) {
  if (s == "f1" || s == "F1") return RewardKind::f1;
  if (s == "f2" || s == "F2") return RewardKind::f2;
  throw std::invalid_argument("unknown reward kind: " + s);
}

std::string to_string(RewardKind k) { return k == RewardKind::f1 ? "f1" : "f2"; }

SearchMode search_mode_from_string(const std::string& s) {
  if (s == "unconstrained") return SearchMode::unconstrained;
  if (s == "constrained") return SearchMode::constrained;
  throw std::invalid_argument("unknown search mode: " + s);
}

std::string to_string(SearchMode m) {
  return m == SearchMode::unconstrained ? "unconstrained" : "constrained";
}

std::string to_string(LibraryMode m) {
  return m == LibraryMode::single ? "single" : "combined";
}

void TrainConfig::validate() const {
  if (batch_size < 1) throw std::invalid_argument("batch_size must be positive");
  if (n_samples < batch_size) throw std::invalid_argument("n_samples must be >= batch_size");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("epsilon must lie in (0,1)");
  if (epsilon * batch_size < 1.0) {
    throw std::invalid_argument("epsilon*batch_size must be >= 1");
  }
  if (!(learning_rate > 0.0)) throw std::invalid_argument("learning_rate must be positive");
  if (entropy_weight < 0.0) throw std::invalid_argument("entropy_weight must be >= 0");
  if (!(sigmoid_threshold > 0.0 && sigmoid_threshold < 1.0)) {
    throw std::invalid_argument("sigmoid_threshold must lie in (0,1)");
  }
  if (hidden_size < 1) throw std::invalid_argument("hidden_size must be positive");
  if (min_length < 1 || max_length < min_length) {
    throw std::invalid_argument("lengths must satisfy 1 <= min_length <= max_length");
  }
}

double compute_reward(const ExprTree& tree, const FuzzyDataset& data, double threshold,
                      RewardKind kind) {
  if (data.rows() == 0) throw std::invalid_argument("compute_reward: empty dataset");
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
  const Metrics m = metrics_from(cm);
  return kind == RewardKind::f1 ? m.f1 : m.f2;
}

std::pair<double, std::vector<std::size_t>> risk_filter(std::span<const double> rewards,
                                                        double epsilon) {
  if (rewards.empty()) throw std::invalid_argument("risk_filter: empty rewards");
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw std::invalid_argument("risk_filter: epsilon must lie in (0,1)");
  }
  const std::size_t n = rewards.size();
  const std::size_t k = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil(epsilon * static_cast<double>(n))));

  std::vector<double> sorted(rewards.begin(), rewards.end());
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(n - k),
                   sorted.end());
  const double threshold = sorted[n - k];

  std::vector<std::size_t> kept;
  kept.reserve(2 * k);
  for (std::size_t i = 0; i < n; ++i) {
    if (rewards[i] >= threshold) kept.push_back(i);
  }
  return {threshold, kept};
}

namespace {

// Chunked parallel map; degrades to the calling thread when the batch or the
// machine is small. Results land at fixed indices, so the output is
// independent of the thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  const unsigned hw = std::thread::hardware_concurrency();
  const std::size_t n_threads = std::min<std::size_t>(hw == 0 ? 1 : hw, n);
  if (n_threads <= 1 || n < 32) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(n_threads);
  for (std::size_t t = 0; t < n_threads; ++t) {
    pool.emplace_back([&, t]() {
      for (std::size_t i = t; i < n; i += n_threads) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

struct HofOrder {
  bool operator()(const HallOfFameEntry& a, const HallOfFameEntry& b) const {
    if (a.reward != b.reward) return a.reward > b.reward;
    if (a.complexity != b.complexity) return a.complexity < b.complexity;
    return a.expression < b.expression;
  }
};

constexpr std::size_t kHallOfFameSize = 20;

void hof_insert(std::vector<HallOfFameEntry>& hof, HallOfFameEntry entry) {
  for (const auto& e : hof) {
    if (e.expression == entry.expression) return;  // deduplicate by rendered form
  }
  hof.push_back(std::move(entry));
  std::sort(hof.begin(), hof.end(), HofOrder{});
  if (hof.size() > kHallOfFameSize) hof.resize(kHallOfFameSize);
}

Metrics metrics_on(const ExprTree& tree, const FuzzyDataset& data, double threshold) {
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

}  // namespace

TrainResult train(const TrainConfig& cfg, const FuzzyDataset& data, const BatchLogger& logger) {
  cfg.validate();
  if (data.rows() == 0) throw std::invalid_argument("train: empty dataset");
  {
    bool has_pos = false, has_neg = false;
    for (int l : data.labels) (l != 0 ? has_pos : has_neg) = true;
    if (!has_pos || !has_neg) {
      throw std::invalid_argument(
          "train: dataset holds a single class; the reward cannot rank expressions");
    }
  }

  const Library lib = build_library(
      cfg.library_mode,
      cfg.library_mode == LibraryMode::single ? std::optional<Semantics>(cfg.semantics)
                                              : std::nullopt,
      data.terminal_names());
  ConstraintConfig constraints{cfg.max_length, cfg.min_length,
                               cfg.mode == SearchMode::constrained};
  constraints.validate(lib);

  Controller controller(lib.size(), cfg.hidden_size, derive_seed(cfg.seed, 1));
  Rng sample_rng(derive_seed(cfg.seed, 2));

  TrainResult result;
  result.seed = cfg.seed;
  result.config = cfg;
  result.feature_names = data.terminal_names();

  const long n_batches =
      (cfg.n_samples + cfg.batch_size - 1) / static_cast<long>(cfg.batch_size);
  const std::size_t batch = static_cast<std::size_t>(cfg.batch_size);

  std::vector<Trajectory> trajectories(batch);
  std::vector<ExprTree> trees(batch);
  std::vector<double> rewards(batch);
  double best_so_far = 0.0;

  for (long b = 0; b < n_batches; ++b) {
    for (std::size_t i = 0; i < batch; ++i) {
      trajectories[i] = controller.sample(lib, constraints, sample_rng);
      if (cfg.mode == SearchMode::constrained) {
        // Masks already force the implication root; the repair is the
        // fallback for traversals produced outside this sampler.
        trajectories[i].traversal =
            enforce_root_implication(trajectories[i].traversal, lib, sample_rng);
      }
      trees[i] = tree_from_traversal(trajectories[i].traversal, lib);
    }

    parallel_for(batch, [&](std::size_t i) {
      rewards[i] = compute_reward(trees[i], data, cfg.sigmoid_threshold, cfg.reward_kind);
    });

    result.n_expressions_evaluated += static_cast<long>(batch);
    for (std::size_t i = 0; i < batch; ++i) {
      if (trees[i].root().token.kind == TokenKind::s_implication) {
        ++result.n_s_implication_roots;
      }
    }

    const auto [quantile, kept] = risk_filter(rewards, cfg.epsilon);
    std::vector<Trajectory> elite;
    std::vector<double> advantages;
    elite.reserve(kept.size());
    advantages.reserve(kept.size());
    for (std::size_t i : kept) {
      elite.push_back(trajectories[i]);
      advantages.push_back(rewards[i] - quantile);
    }
    controller.gradient_step(elite, advantages, lib, constraints, cfg.learning_rate,
                             cfg.entropy_weight);

    BatchStats stats;
    stats.max_reward = *std::max_element(rewards.begin(), rewards.end());
    stats.mean_reward =
        std::accumulate(rewards.begin(), rewards.end(), 0.0) / static_cast<double>(batch);
    stats.quantile = quantile;
    best_so_far = std::max(best_so_far, stats.max_reward);
    stats.best_so_far = best_so_far;
    result.reward_curve.push_back(stats);
    if (logger) logger(static_cast<int>(b), stats);

    for (std::size_t i = 0; i < batch; ++i) {
      HallOfFameEntry entry;
      entry.expression = render(trees[i]);
      entry.traversal = trajectories[i].traversal;
      entry.reward = rewards[i];
      entry.complexity = complexity(trees[i]);
      hof_insert(result.hall_of_fame, std::move(entry));
    }
  }

  for (auto& entry : result.hall_of_fame) {
    const ExprTree tree = tree_from_traversal(entry.traversal, lib);
    entry.train_metrics = metrics_on(tree, data, cfg.sigmoid_threshold);
  }
  return result;
}

std::vector<TrainResult> run_seed_sweep(const TrainConfig& cfg, const FuzzyDataset& data,
                                        std::span<const std::uint64_t> seeds,
                                        const BatchLogger& logger) {
  if (seeds.empty()) throw std::invalid_argument("run_seed_sweep: no seeds");
  std::vector<TrainResult> results;
  results.reserve(seeds.size());
  for (std::uint64_t seed : seeds) {
    TrainConfig per_seed = cfg;
    per_seed.seed = seed;
    results.push_back(train(per_seed, data, logger));
  }
  return results;
}

namespace {

nlohmann::json metrics_to_json(const Metrics& m) {
  return nlohmann::json{{"accuracy", m.accuracy},
                        {"precision", m.precision},
                        {"recall", m.recall},
                        {"f1", m.f1},
                        {"f2", m.f2}};
}

Metrics metrics_from_json(const nlohmann::json& j) {
  Metrics m;
  j.at("accuracy").get_to(m.accuracy);
  j.at("precision").get_to(m.precision);
  j.at("recall").get_to(m.recall);
  j.at("f1").get_to(m.f1);
  j.at("f2").get_to(m.f2);
  return m;
}

}  // namespace

std::string TrainResult::to_json(const std::string& timestamp) const {
  nlohmann::json hof = nlohmann::json::array();
  for (const auto& e : hall_of_fame) {
    hof.push_back(nlohmann::json{{"expression", e.expression},
                                 {"traversal", e.traversal.ids},
                                 {"reward", e.reward},
                                 {"complexity", e.complexity},
                                 {"train_metrics", metrics_to_json(e.train_metrics)}});
  }
  nlohmann::json curve = nlohmann::json::array();
  for (const auto& s : reward_curve) {
    curve.push_back(nlohmann::json{{"max", s.max_reward},
                                   {"mean", s.mean_reward},
                                   {"quantile", s.quantile},
                                   {"best_so_far", s.best_so_far}});
  }
  nlohmann::json j{
      {"format_version", 1},
      {"seed", seed},
      {"reward", to_string(config.reward_kind)},
      {"mode", to_string(config.mode)},
      {"library",
       {{"mode", to_string(config.library_mode)},
        {"semantics", std::string(to_string(config.semantics))},
        {"features", feature_names}}},
      {"config",
       {{"batch_size", config.batch_size},
        {"n_samples", config.n_samples},
        {"epsilon", config.epsilon},
        {"learning_rate", config.learning_rate},
        {"entropy_weight", config.entropy_weight},
        {"sigmoid_threshold", config.sigmoid_threshold},
        {"hidden_size", config.hidden_size},
        {"max_length", config.max_length},
        {"min_length", config.min_length}}},
      {"hall_of_fame", hof},
      {"reward_curve", curve},
      {"n_expressions_evaluated", n_expressions_evaluated},
      {"n_s_implication_roots", n_s_implication_roots}};
  if (!timestamp.empty()) j["timestamp"] = timestamp;
  return j.dump(2);
}

TrainResult TrainResult::from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  TrainResult r;
  r.seed = j.at("seed").get<std::uint64_t>();
  r.config.seed = r.seed;
  r.config.reward_kind = reward_kind_from_string(j.at("reward").get<std::string>());
  r.config.mode = search_mode_from_string(j.at("mode").get<std::string>());
  const auto& lib = j.at("library");
  r.config.library_mode = lib.at("mode").get<std::string>() == "single" ? LibraryMode::single
                                                                        : LibraryMode::combined;
  r.config.semantics = semantics_from_string(lib.at("semantics").get<std::string>());
  lib.at("features").get_to(r.feature_names);
  const auto& cfg = j.at("config");
  cfg.at("batch_size").get_to(r.config.batch_size);
  cfg.at("n_samples").get_to(r.config.n_samples);
  cfg.at("epsilon").get_to(r.config.epsilon);
  cfg.at("learning_rate").get_to(r.config.learning_rate);
  cfg.at("entropy_weight").get_to(r.config.entropy_weight);
  cfg.at("sigmoid_threshold").get_to(r.config.sigmoid_threshold);
  cfg.at("hidden_size").get_to(r.config.hidden_size);
  cfg.at("max_length").get_to(r.config.max_length);
  cfg.at("min_length").get_to(r.config.min_length);
  for (const auto& je : j.at("hall_of_fame")) {
    HallOfFameEntry e;
    e.expression = je.at("expression").get<std::string>();
    je.at("traversal").get_to(e.traversal.ids);
    je.at("reward").get_to(e.reward);
    je.at("complexity").get_to(e.complexity);
    e.train_metrics = metrics_from_json(je.at("train_metrics"));
    r.hall_of_fame.push_back(std::move(e));
  }
  for (const auto& js : j.at("reward_curve")) {
    BatchStats s;
    js.at("max").get_to(s.max_reward);
    js.at("mean").get_to(s.mean_reward);
    js.at("quantile").get_to(s.quantile);
    js.at("best_so_far").get_to(s.best_so_far);
    r.reward_curve.push_back(s);
  }
  j.at("n_expressions_evaluated").get_to(r.n_expressions_evaluated);
  j.at("n_s_implication_roots").get_to(r.n_s_implication_roots);
  return r;
}

}  // namespace fuzex
