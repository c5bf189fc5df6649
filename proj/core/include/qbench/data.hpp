#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qbench/linalg.hpp"

namespace qbench {

/// Binary class label. Class 1 is the positive (minority) class.
using Label = int;

/// Numeric features plus binary labels, after cleaning.
struct DataTable {
  Matrix features;  // n_samples x n_features
  std::vector<Label> labels;
  std::vector<std::string> feature_names;

  std::size_t n_samples() const noexcept { return features.rows(); }
  std::size_t n_features() const noexcept { return features.cols(); }

  /// Rows picked by index, in order.
  DataTable subset(std::span<const std::size_t> indices) const;
  /// Fraction of labels equal to 1.
  double positive_fraction() const;
  std::size_t count(Label label) const;

  /// Throws std::invalid_argument if the shape or label domain is broken.
  void validate() const;

  friend bool operator==(const DataTable&, const DataTable&) = default;
};

struct LoadReport {
  DataTable table;
  std::size_t rows_read = 0;
  std::size_t rows_dropped = 0;
  /// Requested drop columns that were not in the header.
  std::vector<std::string> missing_drop_columns;
};

/// Reads an RFC-4180 CSV with a header row.
///
/// The target column becomes the label vector and is removed from the
/// features together with `drop_columns` (names absent from the header are
/// tolerated and listed in the report). Rows holding an empty or
/// non-numeric cell in a retained column are dropped and counted. Target
/// values must parse to exactly 0 or 1.
///
/// Throws DataError for a missing file, missing target column, non-binary
/// target values or an empty result.
LoadReport load_csv(const std::filesystem::path& path, const std::string& target_column,
                    std::span<const std::string> drop_columns = {});

/// Same as load_csv, reading from an in-memory string.
LoadReport parse_csv(const std::string& text, const std::string& target_column,
                     std::span<const std::string> drop_columns = {});

/// Writes the table back out as CSV, label last under `target_column`.
void write_csv(const DataTable& table, const std::filesystem::path& path,
               const std::string& target_column = "target");

/// Splits one CSV record into fields, honouring quotes and "" escapes.
std::vector<std::string> split_csv_record(std::string_view line);

/// Per-column z-score parameters fitted on a training table.
struct Scaler {
  std::vector<double> means;
  std::vector<double> stds;  // zero marks a constant column

  /// Applies (x - mean) / std; constant columns map to 0.
  DataTable apply(const DataTable& table) const;
  void apply_in_place(Matrix& features) const;
};

/// Fits a Scaler (population std) and returns the standardised table.
std::pair<DataTable, Scaler> standardize(const DataTable& table);

struct SplitPlan {
  std::vector<std::size_t> train_indices;
  std::vector<std::size_t> test_indices;
  std::uint64_t seed = 0;
};

/// Draws disjoint train/test index sets.
///
/// When `stratified`, each class contributes to each part in proportion
/// to its share of the table (largest-remainder rounding), so the part
/// proportions stay within one sample per class of the full table.
/// Throws DataError when n_train + n_test exceeds the table, or when a
/// stratified non-empty part would miss a class present in the table.
SplitPlan subsample(std::span<const Label> labels, std::size_t n_train, std::size_t n_test,
                    std::uint64_t seed, bool stratified = true);

struct Fold {
  std::vector<std::size_t> train_indices;
  std::vector<std::size_t> test_indices;
};

struct FoldPlan {
  std::vector<Fold> folds;
  std::size_t k = 0;
};

/// Shuffled k-fold partition of [0, n); the first n % k folds get one
/// extra element. Throws std::invalid_argument unless 2 <= k <= n.
FoldPlan kfold(std::size_t n, std::size_t k, std::uint64_t seed);

/// FNV-1a over an index list, used to trace which rows a fit saw.
std::uint64_t index_fingerprint(std::span<const std::size_t> indices);

}  // namespace qbench
