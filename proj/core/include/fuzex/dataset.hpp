#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fuzex/expr.hpp"
#include "fuzex/fuzzy.hpp"

namespace fuzex {

enum class TransactionType { cash_in, cash_out, debit, payment, transfer };

constexpr std::array<const char*, 5> kTransactionTypeNames = {"CASH_IN", "CASH_OUT", "DEBIT",
                                                              "PAYMENT", "TRANSFER"};

TransactionType transaction_type_from_string(const std::string& s);

// One row of the PaySim schema.
struct RawTransaction {
  std::int64_t step = 1;  // hours since simulation start, >= 1
  TransactionType type = TransactionType::payment;
  double amount = 0.0;
  std::string name_orig;
  std::string name_dest;
  double oldbalance_org = 0.0;
  double newbalance_orig = 0.0;
  double oldbalance_dest = 0.0;
  double newbalance_dest = 0.0;
  int is_flagged_fraud = 0;
  int is_fraud = 0;
};

struct SchemaError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Engineered real-valued features plus labels. Raw balance columns never
// appear here. Binary columns are exempt from noise and fuzzification;
// non-terminal columns (the constant month) are kept out of search libraries.
struct FeatureColumn {
  std::string name;
  bool binary = false;
  bool terminal = true;
  std::vector<double> values;
};

struct FeatureDataset {
  std::vector<FeatureColumn> columns;
  std::vector<int> labels;

  std::size_t rows() const { return labels.size(); }
  const FeatureColumn* find(const std::string& name) const;
};

// Learned percentile cutpoints (20/40/60/80, nearest-rank) per non-binary
// column; binary columns are registered as exempt.
struct FuzzifierColumn {
  std::string name;
  bool binary = false;
  std::array<double, 4> cutpoints = {0.0, 0.0, 0.0, 0.0};
};

struct FuzzifierModel {
  std::vector<FuzzifierColumn> columns;

  const FuzzifierColumn* find(const std::string& name) const;
  std::string to_json() const;
  static FuzzifierModel from_json(const std::string& text);
};

struct FuzzyColumn {
  std::string name;
  bool binary = false;
  bool terminal = true;
  std::vector<FuzzyValue> values;
};

struct FuzzyDataset {
  std::vector<FuzzyColumn> columns;
  std::vector<int> labels;

  std::size_t rows() const { return labels.size(); }
  std::vector<std::string> terminal_names() const;
  std::vector<const std::vector<FuzzyValue>*> terminal_columns() const;
};

// PaySim CSV, header-validated (order-insensitive). Malformed rows raise
// SchemaError with the 1-based line number.
std::vector<RawTransaction> load_paysim_csv(const std::string& path);
void write_paysim_csv(const std::string& path, const std::vector<RawTransaction>& rows);

FeatureDataset engineer_features(const std::vector<RawTransaction>& rows);

// Elementwise N(0, (level*column_std)^2) on non-binary columns, floored at 0;
// binary columns and labels untouched.
FeatureDataset add_gaussian_noise(const FeatureDataset& ds, double level, std::uint64_t seed);

FuzzifierModel fit_fuzzifier(const FeatureDataset& train);
FuzzyDataset apply_fuzzifier(const FuzzifierModel& model, const FeatureDataset& ds);

std::pair<FeatureDataset, FeatureDataset> stratified_split(const FeatureDataset& ds, double ratio,
                                                           std::uint64_t seed);

// Rowwise expression values over the dataset's terminal columns; elementwise
// identical to evaluate() per row.
std::vector<FuzzyValue> evaluate_batch(const ExprTree& tree, const FuzzyDataset& data);

// Schema-valid synthetic transactions over one 744-hour month. With a planted
// rule (rendered expression over engineered feature names), labels are the
// rule's fuzzified evaluation thresholded at 0.5 with 2% flip noise; otherwise
// Bernoulli(fraud_rate).
std::vector<RawTransaction> generate_synthetic(std::size_t n, double fraud_rate,
                                               std::uint64_t seed,
                                               const std::optional<std::string>& planted_rule);

double fraud_rate(const std::vector<RawTransaction>& rows);

// Fuzzified CSV: feature columns in order, then isFraud.
void write_fuzzy_csv(const std::string& path, const FuzzyDataset& ds);
FuzzyDataset load_fuzzy_csv(const std::string& path);

inline constexpr const char* kDefaultPlantedRule = "implies_lk(type_TRANSFER, maxDest7)";

}  // namespace fuzex
