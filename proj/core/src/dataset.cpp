#include "fuzex/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "fuzex/expr.hpp"
#include "fuzex/library.hpp"
#include "fuzex/rng.hpp"

namespace fuzex {

namespace {

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, static_cast<std::size_t>(ptr - buf));
}

double parse_double(const std::string& field, std::size_t line) {
  double v = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last) {
    throw SchemaError("line " + std::to_string(line) + ": unparseable number '" + field + "'");
  }
  return v;
}

std::int64_t parse_int(const std::string& field, std::size_t line) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc{} || ptr != field.data() + field.size()) {
    throw SchemaError("line " + std::to_string(line) + ": unparseable integer '" + field + "'");
  }
  return v;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

constexpr std::array<const char*, 11> kPaysimHeader = {
    "step",     "type",           "amount",         "nameOrig",       "oldbalanceOrg",
    "newbalanceOrig", "nameDest", "oldbalanceDest", "newbalanceDest", "isFlaggedFraud",
    "isFraud"};

}  // namespace

TransactionType transaction_type_from_string(const std::string& s) {
  for (std::size_t i = 0; i < kTransactionTypeNames.size(); ++i) {
    if (s == kTransactionTypeNames[i]) return static_cast<TransactionType>(i);
  }
  throw SchemaError("unknown transaction type '" + s + "'");
}

const FeatureColumn* FeatureDataset::find(const std::string& name) const {
  for (const auto& c : columns) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

const FuzzifierColumn* FuzzifierModel::find(const std::string& name) const {
  for (const auto& c : columns) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

std::vector<std::string> FuzzyDataset::terminal_names() const {
  std::vector<std::string> names;
  for (const auto& c : columns) {
    if (c.terminal) names.push_back(c.name);
  }
  return names;
}

std::vector<const std::vector<FuzzyValue>*> FuzzyDataset::terminal_columns() const {
  std::vector<const std::vector<FuzzyValue>*> cols;
  for (const auto& c : columns) {
    if (c.terminal) cols.push_back(&c.values);
  }
  return cols;
}

std::vector<RawTransaction> load_paysim_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open " + path);

  std::string line;
  if (!std::getline(in, line)) throw SchemaError(path + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();

  const auto header = split_csv_line(line);
  std::unordered_map<std::string, std::size_t> col_of;
  for (std::size_t i = 0; i < header.size(); ++i) col_of[header[i]] = i;
  for (const char* required : kPaysimHeader) {
    if (!col_of.count(required)) {
      throw SchemaError(path + ": missing column '" + std::string(required) + "'");
    }
  }

  std::vector<RawTransaction> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() < header.size()) {
      throw SchemaError("line " + std::to_string(line_no) + ": expected " +
                        std::to_string(header.size()) + " fields, got " +
                        std::to_string(fields.size()));
    }
    auto field = [&](const char* name) -> const std::string& { return fields[col_of.at(name)]; };
    RawTransaction tx;
    tx.step = parse_int(field("step"), line_no);
    if (tx.step < 1) {
      throw SchemaError("line " + std::to_string(line_no) + ": step must be >= 1");
    }
    try {
      tx.type = transaction_type_from_string(field("type"));
    } catch (const SchemaError& e) {
      throw SchemaError("line " + std::to_string(line_no) + ": " + e.what());
    }
    tx.amount = parse_double(field("amount"), line_no);
    tx.name_orig = field("nameOrig");
    tx.name_dest = field("nameDest");
    tx.oldbalance_org = parse_double(field("oldbalanceOrg"), line_no);
    tx.newbalance_orig = parse_double(field("newbalanceOrig"), line_no);
    tx.oldbalance_dest = parse_double(field("oldbalanceDest"), line_no);
    tx.newbalance_dest = parse_double(field("newbalanceDest"), line_no);
    tx.is_flagged_fraud = static_cast<int>(parse_int(field("isFlaggedFraud"), line_no));
    tx.is_fraud = static_cast<int>(parse_int(field("isFraud"), line_no));
    if (tx.is_fraud != 0 && tx.is_fraud != 1) {
      throw SchemaError("line " + std::to_string(line_no) + ": isFraud must be 0 or 1");
    }
    rows.push_back(std::move(tx));
  }
  return rows;
}

void write_paysim_csv(const std::string& path, const std::vector<RawTransaction>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw SchemaError("cannot write " + path);
  for (std::size_t i = 0; i < kPaysimHeader.size(); ++i) {
    out << (i ? "," : "") << kPaysimHeader[i];
  }
  out << '\n';
  for (const auto& tx : rows) {
    out << tx.step << ',' << kTransactionTypeNames[static_cast<std::size_t>(tx.type)] << ','
        << format_double(tx.amount) << ',' << tx.name_orig << ','
        << format_double(tx.oldbalance_org) << ',' << format_double(tx.newbalance_orig) << ','
        << tx.name_dest << ',' << format_double(tx.oldbalance_dest) << ','
        << format_double(tx.newbalance_dest) << ',' << tx.is_flagged_fraud << ',' << tx.is_fraud
        << '\n';
  }
}

FeatureDataset engineer_features(const std::vector<RawTransaction>& rows) {
  if (rows.empty()) throw std::invalid_argument("engineer_features: no rows");
  const std::size_t n = rows.size();

  std::vector<double> derived_nbd(n), derived_obo(n), amount(n), hour(n), day(n), month(n),
      workday(n), avg3(n), avg7(n), max3(n), max7(n);
  std::array<std::vector<double>, 5> onehot;
  for (auto& col : onehot) col.assign(n, 0.0);

  // Weekday flag: the five highest-volume days of the week.
  std::array<std::int64_t, 7> dow_counts{};
  for (const auto& tx : rows) ++dow_counts[static_cast<std::size_t>((tx.step / 24) % 7)];
  std::array<int, 7> dow_order{0, 1, 2, 3, 4, 5, 6};
  std::stable_sort(dow_order.begin(), dow_order.end(), [&](int a, int b) {
    if (dow_counts[static_cast<std::size_t>(a)] != dow_counts[static_cast<std::size_t>(b)]) {
      return dow_counts[static_cast<std::size_t>(a)] > dow_counts[static_cast<std::size_t>(b)];
    }
    return a < b;
  });
  std::array<bool, 7> is_work{};
  for (int r = 0; r < 5; ++r) is_work[static_cast<std::size_t>(dow_order[static_cast<std::size_t>(r)])] = true;

  for (std::size_t i = 0; i < n; ++i) {
    const auto& tx = rows[i];
    derived_nbd[i] = tx.oldbalance_dest + tx.amount;
    derived_obo[i] = tx.newbalance_orig + tx.amount;
    amount[i] = tx.amount;
    hour[i] = static_cast<double>(tx.step % 24);
    day[i] = static_cast<double>((tx.step / 24) % 31);
    month[i] = static_cast<double>(tx.step / 744);
    workday[i] = is_work[static_cast<std::size_t>((tx.step / 24) % 7)] ? 1.0 : 0.0;
    onehot[static_cast<std::size_t>(tx.type)][i] = 1.0;
  }

  // Rolling mean/max of amounts per recipient over the 3 and 7 most recent
  // transactions, current row included; ordered by step then file order.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return rows[a].step < rows[b].step; });
  std::unordered_map<std::string, std::vector<double>> history;
  history.reserve(n / 4);
  for (std::size_t idx : order) {
    auto& amounts = history[rows[idx].name_dest];
    amounts.push_back(rows[idx].amount);
    const std::size_t sz = amounts.size();
    auto window = [&](std::size_t w) {
      const std::size_t lo = sz > w ? sz - w : 0;
      double sum = 0.0, mx = amounts[lo];
      for (std::size_t k = lo; k < sz; ++k) {
        sum += amounts[k];
        mx = std::max(mx, amounts[k]);
      }
      return std::pair<double, double>{sum / static_cast<double>(sz - lo), mx};
    };
    const auto [a3, m3] = window(3);
    const auto [a7, m7] = window(7);
    avg3[idx] = a3;
    max3[idx] = m3;
    avg7[idx] = a7;
    max7[idx] = m7;
  }

  FeatureDataset ds;
  ds.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) ds.labels[i] = rows[i].is_fraud;
  auto add = [&ds](std::string name, bool binary, bool terminal, std::vector<double> values) {
    ds.columns.push_back(FeatureColumn{std::move(name), binary, terminal, std::move(values)});
  };
  add("derived_newbalanceDest", false, true, std::move(derived_nbd));
  add("derived_oldbalanceOrig", false, true, std::move(derived_obo));
  add("amount", false, true, std::move(amount));
  add("hour_of_day", false, true, std::move(hour));
  add("day", false, true, std::move(day));
  add("month", false, false, std::move(month));  // constant over one month
  add("is_workday", true, true, std::move(workday));
  for (std::size_t t = 0; t < kTransactionTypeNames.size(); ++t) {
    add(std::string("type_") + kTransactionTypeNames[t], true, true, std::move(onehot[t]));
  }
  add("avgDest3", false, true, std::move(avg3));
  add("avgDest7", false, true, std::move(avg7));
  add("maxDest3", false, true, std::move(max3));
  add("maxDest7", false, true, std::move(max7));
  return ds;
}

FeatureDataset add_gaussian_noise(const FeatureDataset& ds, double level, std::uint64_t seed) {
  if (level < 0.0) throw std::invalid_argument("noise level must be >= 0");
  FeatureDataset out = ds;
  Rng rng(derive_seed(seed, 0xA01));
  for (auto& col : out.columns) {
    if (col.binary || col.values.empty()) continue;
    const double n = static_cast<double>(col.values.size());
    const double mean = std::accumulate(col.values.begin(), col.values.end(), 0.0) / n;
    double var = 0.0;
    for (double v : col.values) var += (v - mean) * (v - mean);
    const double stdev = std::sqrt(var / n);
    if (stdev == 0.0) continue;
    for (double& v : col.values) {
      v = std::max(0.0, v + rng.next_gaussian() * level * stdev);
    }
  }
  return out;
}

FuzzifierModel fit_fuzzifier(const FeatureDataset& train) {
  if (train.rows() == 0) throw std::invalid_argument("fit_fuzzifier: empty dataset");
  FuzzifierModel model;
  for (const auto& col : train.columns) {
    FuzzifierColumn fc;
    fc.name = col.name;
    fc.binary = col.binary;
    if (!col.binary) {
      std::vector<double> sorted = col.values;
      std::sort(sorted.begin(), sorted.end());
      const std::size_t n = sorted.size();
      const std::array<int, 4> percentiles{20, 40, 60, 80};
      for (std::size_t j = 0; j < percentiles.size(); ++j) {
        // Nearest-rank: ceil(p*n/100), 1-based.
        const std::size_t rank =
            (static_cast<std::size_t>(percentiles[j]) * n + 99) / 100;
        fc.cutpoints[j] = sorted[std::max<std::size_t>(rank, 1) - 1];
      }
    }
    model.columns.push_back(std::move(fc));
  }
  return model;
}

FuzzyDataset apply_fuzzifier(const FuzzifierModel& model, const FeatureDataset& ds) {
  FuzzyDataset out;
  out.labels = ds.labels;
  for (const auto& col : ds.columns) {
    const FuzzifierColumn* fc = model.find(col.name);
    if (fc == nullptr) {
      throw SchemaError("apply_fuzzifier: no cutpoints for column '" + col.name + "'");
    }
    FuzzyColumn fz;
    fz.name = col.name;
    fz.binary = fc->binary;
    fz.terminal = col.terminal;
    fz.values.reserve(col.values.size());
    if (fc->binary) {
      for (double v : col.values) fz.values.push_back(FuzzyValue(v));
    } else {
      const auto& cp = fc->cutpoints;
      for (double v : col.values) {
        double level = 1.0;
        if (v <= cp[0]) level = 0.2;
        else if (v <= cp[1]) level = 0.4;
        else if (v <= cp[2]) level = 0.6;
        else if (v <= cp[3]) level = 0.8;
        fz.values.push_back(FuzzyValue::unchecked(level));
      }
    }
    out.columns.push_back(std::move(fz));
  }
  return out;
}

std::pair<FeatureDataset, FeatureDataset> stratified_split(const FeatureDataset& ds, double ratio,
                                                           std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0)) {
    throw std::invalid_argument("split ratio must lie strictly in (0,1)");
  }
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < ds.rows(); ++i) {
    (ds.labels[i] != 0 ? pos : neg).push_back(i);
  }
  if (pos.empty() || neg.empty()) {
    throw std::invalid_argument("stratified_split: both classes must be present");
  }

  Rng rng(derive_seed(seed, 0x5B17));
  auto shuffle = [&rng](std::vector<std::size_t>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[static_cast<std::size_t>(rng.next_int(static_cast<int>(i)))]);
    }
  };
  shuffle(neg);
  shuffle(pos);

  std::vector<std::size_t> train_idx, test_idx;
  for (auto* cls : {&neg, &pos}) {
    const auto k = static_cast<std::size_t>(
        std::llround(ratio * static_cast<double>(cls->size())));
    train_idx.insert(train_idx.end(), cls->begin(), cls->begin() + static_cast<std::ptrdiff_t>(k));
    test_idx.insert(test_idx.end(), cls->begin() + static_cast<std::ptrdiff_t>(k), cls->end());
  }
  if (train_idx.empty() || test_idx.empty()) {
    throw std::invalid_argument("stratified_split: a split would be empty");
  }
  std::sort(train_idx.begin(), train_idx.end());
  std::sort(test_idx.begin(), test_idx.end());

  auto take = [&ds](const std::vector<std::size_t>& idx) {
    FeatureDataset part;
    part.labels.reserve(idx.size());
    for (std::size_t i : idx) part.labels.push_back(ds.labels[i]);
    for (const auto& col : ds.columns) {
      FeatureColumn c;
      c.name = col.name;
      c.binary = col.binary;
      c.terminal = col.terminal;
      c.values.reserve(idx.size());
      for (std::size_t i : idx) c.values.push_back(col.values[i]);
      part.columns.push_back(std::move(c));
    }
    return part;
  };
  return {take(train_idx), take(test_idx)};
}

std::vector<FuzzyValue> evaluate_batch(const ExprTree& tree, const FuzzyDataset& data) {
  const auto cols = data.terminal_columns();
  return evaluate_columns(tree, cols);
}

std::vector<RawTransaction> generate_synthetic(std::size_t n, double fraud_rate_target,
                                               std::uint64_t seed,
                                               const std::optional<std::string>& planted_rule) {
  if (n == 0) throw std::invalid_argument("generate_synthetic: n must be positive");
  if (!(fraud_rate_target > 0.0 && fraud_rate_target < 1.0)) {
    throw std::invalid_argument("generate_synthetic: fraud_rate must lie in (0,1)");
  }

  Rng rng(derive_seed(seed, 0x5E1));
  const std::size_t dest_pool = std::max<std::size_t>(5, n / 20);

  std::vector<RawTransaction> rows;
  rows.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    RawTransaction tx;
    tx.step = 1 + static_cast<std::int64_t>((i * 744) / n);
    const double u = rng.next_double();
    if (u < 0.22) tx.type = TransactionType::cash_in;
    else if (u < 0.57) tx.type = TransactionType::cash_out;
    else if (u < 0.58) tx.type = TransactionType::debit;
    else if (u < 0.92) tx.type = TransactionType::payment;
    else tx.type = TransactionType::transfer;
    tx.amount = std::exp(rng.next_gaussian() * 1.4 + 9.5);
    tx.name_orig = "C" + std::to_string(1000000 + i);
    tx.name_dest = "C" + std::to_string(2000000 + static_cast<std::size_t>(rng.next_int(
                                                      static_cast<int>(dest_pool))));
    tx.oldbalance_org = rng.next_double() < 0.25 ? 0.0 : std::exp(rng.next_gaussian() * 1.5 + 9.0);
    tx.newbalance_orig = std::max(0.0, tx.oldbalance_org - tx.amount);
    tx.oldbalance_dest = rng.next_double() < 0.30 ? 0.0 : std::exp(rng.next_gaussian() * 1.5 + 9.5);
    tx.newbalance_dest = tx.oldbalance_dest + tx.amount;
    tx.is_flagged_fraud = 0;
    tx.is_fraud = 0;
    rows.push_back(std::move(tx));
  }

  if (planted_rule.has_value()) {
    // Label by the rule's fuzzified evaluation with 2% flip noise. Features
    // and cutpoints are derived from the generated rows themselves.
    FeatureDataset features = engineer_features(rows);
    const FuzzifierModel model = fit_fuzzifier(features);
    const FuzzyDataset fuzzy = apply_fuzzifier(model, features);
    const Library lib = build_library(LibraryMode::combined, std::nullopt,
                                      fuzzy.terminal_names());
    const ExprTree rule = parse(*planted_rule, lib);
    const auto cols = fuzzy.terminal_columns();
    const auto values = evaluate_columns(rule, cols);
    for (std::size_t i = 0; i < n; ++i) {
      int label = values[i].value() >= 0.5 ? 1 : 0;
      if (rng.next_double() < 0.02) label = 1 - label;
      rows[i].is_fraud = label;
    }
  } else {
    for (auto& tx : rows) tx.is_fraud = rng.next_double() < fraud_rate_target ? 1 : 0;
  }
  return rows;
}

double fraud_rate(const std::vector<RawTransaction>& rows) {
  if (rows.empty()) return 0.0;
  std::size_t frauds = 0;
  for (const auto& tx : rows) frauds += static_cast<std::size_t>(tx.is_fraud);
  return static_cast<double>(frauds) / static_cast<double>(rows.size());
}

std::string FuzzifierModel::to_json() const {
  nlohmann::json cols = nlohmann::json::array();
  for (const auto& c : columns) {
    nlohmann::json jc{{"name", c.name}, {"binary", c.binary}};
    if (!c.binary) {
      jc["cutpoints"] = c.cutpoints;
    }
    cols.push_back(std::move(jc));
  }
  return nlohmann::json{{"format_version", 1}, {"columns", cols}}.dump(2);
}

FuzzifierModel FuzzifierModel::from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  FuzzifierModel model;
  for (const auto& jc : j.at("columns")) {
    FuzzifierColumn c;
    c.name = jc.at("name").get<std::string>();
    c.binary = jc.at("binary").get<bool>();
    if (!c.binary) {
      const auto cp = jc.at("cutpoints").get<std::vector<double>>();
      if (cp.size() != 4) throw SchemaError("fuzzifier column needs 4 cutpoints");
      std::copy(cp.begin(), cp.end(), c.cutpoints.begin());
    }
    model.columns.push_back(std::move(c));
  }
  return model;
}

void write_fuzzy_csv(const std::string& path, const FuzzyDataset& ds) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw SchemaError("cannot write " + path);
  for (const auto& col : ds.columns) out << col.name << ',';
  out << "isFraud\n";
  for (std::size_t i = 0; i < ds.rows(); ++i) {
    for (const auto& col : ds.columns) out << format_double(col.values[i].value()) << ',';
    out << ds.labels[i] << '\n';
  }
}

FuzzyDataset load_fuzzy_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw SchemaError(path + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_csv_line(line);
  if (header.empty() || header.back() != "isFraud") {
    throw SchemaError(path + ": last column must be isFraud");
  }

  FuzzyDataset ds;
  ds.columns.resize(header.size() - 1);
  for (std::size_t i = 0; i + 1 < header.size(); ++i) ds.columns[i].name = header[i];

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      throw SchemaError("line " + std::to_string(line_no) + ": field count mismatch");
    }
    for (std::size_t i = 0; i + 1 < fields.size(); ++i) {
      ds.columns[i].values.push_back(FuzzyValue(parse_double(fields[i], line_no)));
    }
    ds.labels.push_back(static_cast<int>(parse_int(fields.back(), line_no)));
  }
  // Flags are inferred; prepared runs carry them in the sidecar metadata.
  for (auto& col : ds.columns) {
    col.binary = std::all_of(col.values.begin(), col.values.end(), [](FuzzyValue v) {
      return v.value() == 0.0 || v.value() == 1.0;
    });
    col.terminal = true;
  }
  return ds;
}

}  // namespace fuzex
