#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fuzex/dataset.hpp"
#include "fuzex/report.hpp"
#include "fuzex/trainer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

enum class LogLevel { quiet = 0, info = 1, debug = 2 };

LogLevel log_level() {
  const char* env = std::getenv("FUZEX_LOG");
  if (env == nullptr) return LogLevel::info;
  const std::string v(env);
  if (v == "quiet") return LogLevel::quiet;
  if (v == "debug") return LogLevel::debug;
  return LogLevel::info;
}

void log_info(const std::string& msg) {
  if (log_level() >= LogLevel::info) std::cerr << msg << "\n";
}

void log_debug(const std::string& msg) {
  if (log_level() >= LogLevel::debug) std::cerr << msg << "\n";
}

// All artifacts go through write-temp-then-rename so an interrupted run never
// leaves a half-written file behind.
void write_atomic(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
  }
  fs::rename(tmp, path);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

std::string timestamp_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%FT%TZ", std::gmtime(&t));
  return buf;
}

struct RunConfig {
  std::string csv_path;  // exactly one of csv_path / synthetic
  bool synthetic = false;
  std::size_t synth_n = 10000;
  double synth_fraud_rate = 0.0013;
  std::uint64_t synth_seed = 0;
  std::optional<std::string> planted_rule;

  double split_ratio = 0.7;
  std::uint64_t split_seed = 0;
  double noise_level = 0.05;
  std::uint64_t noise_seed = 0;

  std::string out_dir = "runs/out";
  std::vector<std::string> methods{"lukasiewicz"};
  std::vector<std::uint64_t> seeds{0};
  fuzex::TrainConfig train;
};

RunConfig load_config(const std::string& path) {
  RunConfig cfg;
  if (path.empty()) return cfg;
  const json j = json::parse(read_file(path));
  if (j.contains("data")) {
    const auto& d = j.at("data");
    if (d.contains("csv") && d.contains("synthetic")) {
      throw std::runtime_error("config: data.csv and data.synthetic are mutually exclusive");
    }
    if (d.contains("csv")) {
      cfg.csv_path = d.at("csv").get<std::string>();
    } else if (d.contains("synthetic")) {
      cfg.synthetic = true;
      const auto& s = d.at("synthetic");
      if (s.contains("n")) s.at("n").get_to(cfg.synth_n);
      if (s.contains("fraud_rate")) s.at("fraud_rate").get_to(cfg.synth_fraud_rate);
      if (s.contains("seed")) s.at("seed").get_to(cfg.synth_seed);
      if (s.contains("planted_rule")) cfg.planted_rule = s.at("planted_rule").get<std::string>();
    }
  }
  if (j.contains("split")) {
    const auto& s = j.at("split");
    if (s.contains("ratio")) s.at("ratio").get_to(cfg.split_ratio);
    if (s.contains("seed")) s.at("seed").get_to(cfg.split_seed);
  }
  if (j.contains("noise")) {
    const auto& n = j.at("noise");
    if (n.contains("level")) n.at("level").get_to(cfg.noise_level);
    if (n.contains("seed")) n.at("seed").get_to(cfg.noise_seed);
  }
  if (j.contains("out")) j.at("out").get_to(cfg.out_dir);
  if (j.contains("methods")) j.at("methods").get_to(cfg.methods);
  if (j.contains("seeds")) j.at("seeds").get_to(cfg.seeds);
  if (j.contains("train")) {
    const auto& t = j.at("train");
    auto& tc = cfg.train;
    if (t.contains("batch_size")) t.at("batch_size").get_to(tc.batch_size);
    if (t.contains("n_samples")) t.at("n_samples").get_to(tc.n_samples);
    if (t.contains("epsilon")) t.at("epsilon").get_to(tc.epsilon);
    if (t.contains("learning_rate")) t.at("learning_rate").get_to(tc.learning_rate);
    if (t.contains("entropy_weight")) t.at("entropy_weight").get_to(tc.entropy_weight);
    if (t.contains("sigmoid_threshold")) t.at("sigmoid_threshold").get_to(tc.sigmoid_threshold);
    if (t.contains("hidden_size")) t.at("hidden_size").get_to(tc.hidden_size);
    if (t.contains("max_length")) t.at("max_length").get_to(tc.max_length);
    if (t.contains("min_length")) t.at("min_length").get_to(tc.min_length);
    if (t.contains("reward")) {
      tc.reward_kind = fuzex::reward_kind_from_string(t.at("reward").get<std::string>());
    }
    if (t.contains("mode")) {
      tc.mode = fuzex::search_mode_from_string(t.at("mode").get<std::string>());
    }
  }
  return cfg;
}

void apply_method(fuzex::TrainConfig& cfg, const std::string& method) {
  if (method == "combined") {
    cfg.library_mode = fuzex::LibraryMode::combined;
  } else {
    cfg.library_mode = fuzex::LibraryMode::single;
    cfg.semantics = fuzex::semantics_from_string(method);
  }
}

std::vector<fuzex::RawTransaction> acquire_rows(const RunConfig& cfg) {
  if (!cfg.csv_path.empty() && cfg.synthetic) {
    throw std::runtime_error("exactly one data source allowed (csv or synthetic)");
  }
  if (!cfg.csv_path.empty()) {
    if (!fs::exists(cfg.csv_path)) {
      throw std::runtime_error("input file not found: " + cfg.csv_path);
    }
    log_info("loading " + cfg.csv_path);
    return fuzex::load_paysim_csv(cfg.csv_path);
  }
  log_info("generating " + std::to_string(cfg.synth_n) + " synthetic transactions");
  return fuzex::generate_synthetic(cfg.synth_n, cfg.synth_fraud_rate, cfg.synth_seed,
                                   cfg.planted_rule);
}

json column_meta(const fuzex::FuzzyDataset& ds) {
  json cols = json::array();
  for (const auto& c : ds.columns) {
    cols.push_back(json{{"name", c.name}, {"binary", c.binary}, {"terminal", c.terminal}});
  }
  return cols;
}

void apply_column_meta(fuzex::FuzzyDataset& ds, const json& meta) {
  for (const auto& jc : meta.at("columns")) {
    const auto name = jc.at("name").get<std::string>();
    for (auto& c : ds.columns) {
      if (c.name == name) {
        jc.at("binary").get_to(c.binary);
        jc.at("terminal").get_to(c.terminal);
      }
    }
  }
}

std::size_t fraud_count(const std::vector<int>& labels) {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
}

int cmd_synth(const RunConfig& cfg) {
  const auto rows = fuzex::generate_synthetic(cfg.synth_n, cfg.synth_fraud_rate, cfg.synth_seed,
                                              cfg.planted_rule);
  const fs::path out = fs::path(cfg.out_dir) / "synthetic.csv";
  fs::create_directories(out.parent_path());
  const fs::path tmp = out.string() + ".tmp";
  fuzex::write_paysim_csv(tmp.string(), rows);
  fs::rename(tmp, out);
  std::printf("wrote %s: %zu rows, fraud rate %.5f\n", out.string().c_str(), rows.size(),
              fuzex::fraud_rate(rows));
  return 0;
}

int cmd_prepare(const RunConfig& cfg) {
  const auto rows = acquire_rows(cfg);
  const fuzex::FeatureDataset features = fuzex::engineer_features(rows);
  const auto [train_clean, test_features] =
      fuzex::stratified_split(features, cfg.split_ratio, cfg.split_seed);
  const fuzex::FeatureDataset train_features =
      fuzex::add_gaussian_noise(train_clean, cfg.noise_level, cfg.noise_seed);
  const fuzex::FuzzifierModel model = fuzex::fit_fuzzifier(train_features);
  const fuzex::FuzzyDataset train_ds = fuzex::apply_fuzzifier(model, train_features);
  const fuzex::FuzzyDataset test_ds = fuzex::apply_fuzzifier(model, test_features);

  const fs::path out(cfg.out_dir);
  fs::create_directories(out);
  {
    const fs::path tmp = (out / "train.csv").string() + ".tmp";
    fuzex::write_fuzzy_csv(tmp.string(), train_ds);
    fs::rename(tmp, out / "train.csv");
  }
  {
    const fs::path tmp = (out / "test.csv").string() + ".tmp";
    fuzex::write_fuzzy_csv(tmp.string(), test_ds);
    fs::rename(tmp, out / "test.csv");
  }
  write_atomic(out / "fuzzifier.json", model.to_json() + "\n");

  json meta{{"format_version", 1},
            {"columns", column_meta(train_ds)},
            {"split_ratio", cfg.split_ratio},
            {"split_seed", cfg.split_seed},
            {"noise_level", cfg.noise_level},
            {"noise_seed", cfg.noise_seed},
            {"train_rows", train_ds.rows()},
            {"test_rows", test_ds.rows()},
            {"train_frauds", fraud_count(train_ds.labels)},
            {"test_frauds", fraud_count(test_ds.labels)}};
  write_atomic(out / "meta.json", meta.dump(2) + "\n");

  std::printf("train: %zu rows, %zu frauds (rate %.5f)\n", train_ds.rows(),
              fraud_count(train_ds.labels),
              static_cast<double>(fraud_count(train_ds.labels)) /
                  static_cast<double>(train_ds.rows()));
  std::printf("test:  %zu rows, %zu frauds (rate %.5f)\n", test_ds.rows(),
              fraud_count(test_ds.labels),
              static_cast<double>(fraud_count(test_ds.labels)) /
                  static_cast<double>(test_ds.rows()));
  return 0;
}

fuzex::FuzzyDataset load_prepared(const fs::path& dir, const std::string& which) {
  const fs::path csv = dir / (which + ".csv");
  if (!fs::exists(csv)) {
    throw std::runtime_error("missing prepared artifact " + csv.string() +
                             " (run `fuzex prepare` first)");
  }
  fuzex::FuzzyDataset ds = fuzex::load_fuzzy_csv(csv.string());
  const fs::path meta = dir / "meta.json";
  if (fs::exists(meta)) {
    apply_column_meta(ds, json::parse(read_file(meta)));
  }
  return ds;
}

int cmd_train(const RunConfig& cfg) {
  const fs::path out(cfg.out_dir);
  const fuzex::FuzzyDataset train_ds = load_prepared(out, "train");

  json summary = json::array();
  for (const std::string& method : cfg.methods) {
    fuzex::TrainConfig tc = cfg.train;
    apply_method(tc, method);
    for (const std::uint64_t seed : cfg.seeds) {
      tc.seed = seed;
      const fs::path seed_dir = out / method / ("seed_" + std::to_string(seed));
      fs::create_directories(seed_dir);

      std::string log_csv = "batch,max_reward,mean_reward,quantile,best_so_far\n";
      const auto logger = [&](int batch, const fuzex::BatchStats& s) {
        char line[160];
        std::snprintf(line, sizeof(line), "%d,%.6f,%.6f,%.6f,%.6f\n", batch, s.max_reward,
                      s.mean_reward, s.quantile, s.best_so_far);
        log_csv += line;
        log_debug(method + " seed " + std::to_string(seed) + " batch " + line);
      };

      log_info("training " + method + " seed " + std::to_string(seed));
      const fuzex::TrainResult result = fuzex::train(tc, train_ds, logger);
      write_atomic(seed_dir / "result.json", result.to_json(timestamp_now()) + "\n");
      write_atomic(seed_dir / "train_log.csv", log_csv);

      summary.push_back(json{{"method", method},
                             {"seed", seed},
                             {"best_expression", result.best().expression},
                             {"best_reward", result.best().reward},
                             {"best_complexity", result.best().complexity}});
      std::printf("%s seed %llu: best %.4f  %s\n", method.c_str(),
                  static_cast<unsigned long long>(seed), result.best().reward,
                  result.best().expression.c_str());
    }
  }
  write_atomic(out / "summary.json", summary.dump(2) + "\n");
  return 0;
}

int cmd_evaluate(const RunConfig& cfg, const std::string& results_dir) {
  const fs::path out(cfg.out_dir);
  const fs::path results(results_dir.empty() ? cfg.out_dir : results_dir);
  const fuzex::FuzzyDataset test_ds = load_prepared(out, "test");

  std::vector<fuzex::TrainResult> loaded;
  if (fs::exists(results)) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::recursive_directory_iterator(results)) {
      if (entry.is_regular_file() && entry.path().filename() == "result.json") {
        files.push_back(entry.path());
      }
    }
    std::sort(files.begin(), files.end());
    for (const auto& file : files) {
      loaded.push_back(fuzex::TrainResult::from_json(read_file(file)));
      log_debug("loaded " + file.string());
    }
  }
  if (loaded.empty()) {
    throw std::runtime_error("no result.json files under " + results.string());
  }

  const fuzex::ComparisonReport rep =
      fuzex::report(loaded, test_ds, cfg.train.sigmoid_threshold);
  write_atomic(out / "report.json", rep.to_json() + "\n");
  write_atomic(out / "report.txt", rep.to_text());
  write_atomic(out / "pareto.csv", rep.pareto_csv());
  std::fputs(rep.to_text().c_str(), stdout);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fuzzy rule discovery for imbalanced binary classification"};
  app.require_subcommand(1);

  std::string config_path;
  std::string results_dir;
  app.add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);

  // Overrides shared across subcommands; unset options keep config values.
  std::optional<std::uint64_t> opt_seed;
  std::optional<std::string> opt_method, opt_reward, opt_out, opt_rule;
  std::optional<long> opt_n_samples;
  std::optional<int> opt_batch;
  std::optional<double> opt_epsilon, opt_lr, opt_entropy, opt_threshold, opt_noise,
      opt_fraud_rate;
  std::optional<std::size_t> opt_n;
  bool constrained = false;

  app.add_option("--seed", opt_seed, "single seed (replaces the seeds list)");
  app.add_option("--method", opt_method, "goedel | product | lukasiewicz | combined");
  app.add_option("--reward", opt_reward, "f1 | f2");
  app.add_flag("--constrained", constrained, "force an implication root");
  app.add_option("--n-samples", opt_n_samples, "total expression budget");
  app.add_option("--batch-size", opt_batch, "expressions per batch");
  app.add_option("--epsilon", opt_epsilon, "risk factor in (0,1)");
  app.add_option("--learning-rate", opt_lr, "optimizer learning rate");
  app.add_option("--entropy-weight", opt_entropy, "entropy bonus weight");
  app.add_option("--threshold", opt_threshold, "classification cutoff in (0,1)");
  app.add_option("--noise-level", opt_noise, "gaussian noise level");
  app.add_option("--out", opt_out, "output directory");
  app.add_option("--n", opt_n, "synthetic row count");
  app.add_option("--fraud-rate", opt_fraud_rate, "synthetic fraud rate in (0,1)");
  app.add_option("--rule", opt_rule, "planted rule expression for synthetic labels");

  auto* synth = app.add_subcommand("synth", "write a synthetic transactions csv");
  auto* prepare = app.add_subcommand("prepare", "engineer, split, fuzzify");
  auto* train_cmd = app.add_subcommand("train", "run the expression search");
  auto* evaluate = app.add_subcommand("evaluate", "score results on the test split");
  evaluate->add_option("--results", results_dir, "directory holding result.json files");
  for (auto* sub : {synth, prepare, train_cmd, evaluate}) sub->fallthrough();

  CLI11_PARSE(app, argc, argv);

  try {
    RunConfig cfg = load_config(config_path);
    if (opt_out) cfg.out_dir = *opt_out;
    if (opt_seed) cfg.seeds = {*opt_seed};
    if (opt_method) cfg.methods = {*opt_method};
    if (opt_reward) cfg.train.reward_kind = fuzex::reward_kind_from_string(*opt_reward);
    if (constrained) cfg.train.mode = fuzex::SearchMode::constrained;
    if (opt_n_samples) cfg.train.n_samples = *opt_n_samples;
    if (opt_batch) cfg.train.batch_size = *opt_batch;
    if (opt_epsilon) cfg.train.epsilon = *opt_epsilon;
    if (opt_lr) cfg.train.learning_rate = *opt_lr;
    if (opt_entropy) cfg.train.entropy_weight = *opt_entropy;
    if (opt_threshold) cfg.train.sigmoid_threshold = *opt_threshold;
    if (opt_noise) cfg.noise_level = *opt_noise;
    if (opt_n) {
      cfg.synth_n = *opt_n;
      cfg.synthetic = cfg.csv_path.empty();
    }
    if (opt_fraud_rate) cfg.synth_fraud_rate = *opt_fraud_rate;
    if (opt_rule) cfg.planted_rule = *opt_rule;
    if (opt_seed) cfg.synth_seed = *opt_seed;

    if (synth->parsed()) return cmd_synth(cfg);
    if (prepare->parsed()) return cmd_prepare(cfg);
    if (train_cmd->parsed()) return cmd_train(cfg);
    if (evaluate->parsed()) return cmd_evaluate(cfg, results_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
