#include "qbench/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string_view>

#include "qbench/errors.hpp"
#include "qbench/rng.hpp"

namespace qbench {

DataTable DataTable::subset(std::span<const std::size_t> indices) const {
  DataTable out;
  out.features = features.select_rows(indices);
  out.labels.reserve(indices.size());
  for (std::size_t i : indices) out.labels.push_back(labels.at(i));
  out.feature_names = feature_names;
  return out;
}

std::size_t DataTable::count(Label label) const {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), label));
}

double DataTable::positive_fraction() const {
  if (labels.empty()) return 0.0;
  return static_cast<double>(count(1)) / static_cast<double>(labels.size());
}

void DataTable::validate() const {
  if (labels.size() != features.rows())
    throw std::invalid_argument("DataTable: label count does not match feature rows");
  if (!feature_names.empty() && feature_names.size() != features.cols())
    throw std::invalid_argument("DataTable: feature name count does not match columns");
  for (Label l : labels)
    if (l != 0 && l != 1) throw std::invalid_argument("DataTable: labels must be 0 or 1");
  if (!features.all_finite()) throw std::invalid_argument("DataTable: non-finite feature values");
}

namespace {

// Splits text into RFC-4180 records. Quoted fields may contain commas,
// escaped quotes ("") and line breaks.
std::vector<std::vector<std::string>> parse_records(std::string_view text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  std::size_t i = 0;

  auto end_record = [&] {
    if (field_started || !record.empty()) {
      record.push_back(std::move(field));
      records.push_back(std::move(record));
    }
    record.clear();
    field.clear();
    field_started = false;
  };

  // Skip a UTF-8 byte order mark.
  if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") i = 3;

  for (; i < text.size(); ++i) {
    const char ch = text[i];
    if (in_quotes) {
      if (ch == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(ch);
      }
      continue;
    }
    switch (ch) {
      case '"':
        in_quotes = true;
        field_started = true;
        break;
      case ',':
        record.push_back(std::move(field));
        field.clear();
        field_started = true;
        break;
      case '\r':
        break;
      case '\n':
        end_record();
        break;
      default:
        field.push_back(ch);
        field_started = true;
    }
  }
  if (in_quotes) throw DataError("csv: unterminated quoted field");
  end_record();
  return records;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

bool parse_number(std::string_view s, double& out) {
  s = trim(s);
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(out);
}

}  // namespace

std::vector<std::string> split_csv_record(std::string_view line) {
  auto records = parse_records(line);
  if (records.empty()) return {};
  return std::move(records.front());
}

LoadReport parse_csv(const std::string& text, const std::string& target_column,
                     std::span<const std::string> drop_columns) {
  const auto records = parse_records(text);
  if (records.empty()) throw DataError("csv: no header row");
  const auto& header = records.front();

  std::size_t target = header.size();
  for (std::size_t c = 0; c < header.size(); ++c)
    if (trim(header[c]) == target_column) target = c;
  if (target == header.size()) throw DataError("csv: target column '" + target_column + "' not found");

  LoadReport report;
  std::vector<bool> keep(header.size(), true);
  keep[target] = false;
  for (const auto& name : drop_columns) {
    bool found = false;
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (trim(header[c]) == name) {
        keep[c] = false;
        found = true;
      }
    }
    if (!found) report.missing_drop_columns.push_back(name);
  }

  std::vector<std::size_t> kept;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (keep[c]) {
      kept.push_back(c);
      report.table.feature_names.emplace_back(trim(header[c]));
    }
  }

  std::vector<double> values;
  std::vector<double> row(kept.size());
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    ++report.rows_read;
    if (rec.size() != header.size()) {
      ++report.rows_dropped;
      continue;
    }
    double y = 0.0;
    if (trim(rec[target]).empty()) {
      ++report.rows_dropped;
      continue;
    }
    if (!parse_number(rec[target], y) || (y != 0.0 && y != 1.0))
      throw DataError("csv: non-binary target value '" + rec[target] + "' on data row " + std::to_string(r));
    bool ok = true;
    for (std::size_t j = 0; j < kept.size() && ok; ++j) ok = parse_number(rec[kept[j]], row[j]);
    if (!ok) {
      ++report.rows_dropped;
      continue;
    }
    values.insert(values.end(), row.begin(), row.end());
    report.table.labels.push_back(static_cast<Label>(y));
  }

  if (report.table.labels.empty()) throw DataError("csv: no usable rows after cleaning");
  report.table.features = Matrix(report.table.labels.size(), kept.size(), std::move(values));
  return report;
}

LoadReport load_csv(const std::filesystem::path& path, const std::string& target_column,
                    std::span<const std::string> drop_columns) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("csv: cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str(), target_column, drop_columns);
}

namespace {

std::string quote_if_needed(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace

void write_csv(const DataTable& table, const std::filesystem::path& path, const std::string& target_column) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("csv: cannot write '" + path.string() + "'");
  for (std::size_t c = 0; c < table.n_features(); ++c) {
    const std::string name = c < table.feature_names.size() ? table.feature_names[c] : "f" + std::to_string(c);
    out << quote_if_needed(name) << ',';
  }
  out << quote_if_needed(target_column) << '\n';
  out << std::setprecision(17);
  for (std::size_t r = 0; r < table.n_samples(); ++r) {
    for (double v : table.features.row(r)) out << v << ',';
    out << table.labels[r] << '\n';
  }
}

void Scaler::apply_in_place(Matrix& features) const {
  if (features.cols() != means.size()) throw std::invalid_argument("Scaler: feature dimension mismatch");
  for (std::size_t r = 0; r < features.rows(); ++r) {
    auto row = features.row(r);
    for (std::size_t c = 0; c < row.size(); ++c)
      row[c] = stds[c] > 0.0 ? (row[c] - means[c]) / stds[c] : 0.0;
  }
}

DataTable Scaler::apply(const DataTable& table) const {
  DataTable out = table;
  apply_in_place(out.features);
  return out;
}

std::pair<DataTable, Scaler> standardize(const DataTable& table) {
  const std::size_t n = table.n_samples();
  const std::size_t d = table.n_features();
  if (n == 0) throw std::invalid_argument("standardize: empty table");
  Scaler s{std::vector<double>(d, 0.0), std::vector<double>(d, 0.0)};
  for (std::size_t c = 0; c < d; ++c) {
    double mean = 0.0;
    for (std::size_t r = 0; r < n; ++r) mean += table.features(r, c);
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      const double dv = table.features(r, c) - mean;
      var += dv * dv;
    }
    var /= static_cast<double>(n);
    s.means[c] = mean;
    // Relative cut so columns that are constant up to rounding count as constant.
    s.stds[c] = var > 1e-24 * std::max(1.0, mean * mean) ? std::sqrt(var) : 0.0;
  }
  return {s.apply(table), std::move(s)};
}

namespace {

// Largest-remainder apportionment of `total` over `weights`, never
// exceeding `caps`.
std::vector<std::size_t> apportion(std::size_t total, const std::vector<std::size_t>& weights,
                                   const std::vector<std::size_t>& caps) {
  const std::size_t sum = std::accumulate(weights.begin(), weights.end(), std::size_t{0});
  std::vector<std::size_t> out(weights.size(), 0);
  std::vector<std::pair<double, std::size_t>> remainders;
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double exact = static_cast<double>(total) * static_cast<double>(weights[i]) / static_cast<double>(sum);
    out[i] = std::min(caps[i], static_cast<std::size_t>(std::floor(exact)));
    assigned += out[i];
    remainders.emplace_back(exact - std::floor(exact), i);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  while (assigned < total) {
    bool progressed = false;
    for (const auto& [rem, i] : remainders) {
      if (assigned == total) break;
      if (out[i] < caps[i]) {
        ++out[i];
        ++assigned;
        progressed = true;
      }
    }
    if (!progressed) break;
  }
  return out;
}

}  // namespace

SplitPlan subsample(std::span<const Label> labels, std::size_t n_train, std::size_t n_test,
                    std::uint64_t seed, bool stratified) {
  const std::size_t n = labels.size();
  if (n_train + n_test > n)
    throw DataError("subsample: requested " + std::to_string(n_train + n_test) + " rows but table has " +
                    std::to_string(n));
  Rng rng(seed);
  SplitPlan plan;
  plan.seed = seed;

  if (!stratified) {
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    rng.shuffle(std::span(perm));
    plan.train_indices.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_train));
    plan.test_indices.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_train),
                             perm.begin() + static_cast<std::ptrdiff_t>(n_train + n_test));
    return plan;
  }

  std::vector<std::vector<std::size_t>> by_class(2);
  for (std::size_t i = 0; i < n; ++i) {
    if (labels[i] != 0 && labels[i] != 1) throw DataError("subsample: labels must be 0 or 1");
    by_class[static_cast<std::size_t>(labels[i])].push_back(i);
  }
  const std::vector<std::size_t> sizes{by_class[0].size(), by_class[1].size()};
  const auto train_quota = apportion(n_train, sizes, sizes);
  const std::vector<std::size_t> left{sizes[0] - train_quota[0], sizes[1] - train_quota[1]};
  const auto test_quota = apportion(n_test, sizes, left);

  for (std::size_t c = 0; c < 2; ++c) {
    if (sizes[c] == 0) continue;
    if ((n_train > 0 && train_quota[c] == 0) || (n_test > 0 && test_quota[c] == 0))
      throw DataError("subsample: class " + std::to_string(c) + " would be absent from a stratified part");
  }

  for (std::size_t c = 0; c < 2; ++c) {
    auto& idx = by_class[c];
    rng.shuffle(std::span(idx));
    plan.train_indices.insert(plan.train_indices.end(), idx.begin(),
                              idx.begin() + static_cast<std::ptrdiff_t>(train_quota[c]));
    plan.test_indices.insert(plan.test_indices.end(), idx.begin() + static_cast<std::ptrdiff_t>(train_quota[c]),
                             idx.begin() + static_cast<std::ptrdiff_t>(train_quota[c] + test_quota[c]));
  }
  rng.shuffle(std::span(plan.train_indices));
  rng.shuffle(std::span(plan.test_indices));
  return plan;
}

FoldPlan kfold(std::size_t n, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw std::invalid_argument("kfold: k must be at least 2");
  if (k > n) throw std::invalid_argument("kfold: k exceeds the number of samples");
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(seed);
  rng.shuffle(std::span(perm));

  FoldPlan plan;
  plan.k = k;
  plan.folds.resize(k);
  const std::size_t base = n / k;
  const std::size_t extra = n % k;
  std::size_t start = 0;
  for (std::size_t f = 0; f < k; ++f) {
    const std::size_t size = base + (f < extra ? 1 : 0);
    auto& fold = plan.folds[f];
    fold.test_indices.assign(perm.begin() + static_cast<std::ptrdiff_t>(start),
                             perm.begin() + static_cast<std::ptrdiff_t>(start + size));
    fold.train_indices.reserve(n - size);
    fold.train_indices.insert(fold.train_indices.end(), perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(start));
    fold.train_indices.insert(fold.train_indices.end(), perm.begin() + static_cast<std::ptrdiff_t>(start + size),
                              perm.end());
    start += size;
  }
  return plan;
}

std::uint64_t index_fingerprint(std::span<const std::size_t> indices) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::size_t idx : indices) {
    auto v = static_cast<std::uint64_t>(idx);
    for (int b = 0; b < 8; ++b) {
      h ^= (v >> (8 * b)) & 0xffU;
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

}  // namespace qbench
