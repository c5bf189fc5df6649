#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qbench/data.hpp"

namespace qbench {

/// Confusion counts with class 1 as the positive class.
struct ConfusionCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;

  std::size_t total() const noexcept { return tp + fp + tn + fn; }
  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

/// Throws std::invalid_argument on a length mismatch or a label outside {0, 1}.
ConfusionCounts confusion(std::span<const Label> y_true, std::span<const Label> y_pred);

enum class Metric { kPrecision, kRecall, kF1, kMcc, kBalancedAccuracy };

inline constexpr std::array<Metric, 5> kAllMetrics{Metric::kPrecision, Metric::kRecall, Metric::kF1, Metric::kMcc,
                                                   Metric::kBalancedAccuracy};

/// "precision", "recall", "f1", "mcc", "balanced_accuracy".
std::string_view to_string(Metric m);
/// Column header used in text tables: "Precision", "Recall", "F1", "MCC", "BA".
std::string_view short_label(Metric m);
Metric parse_metric(std::string_view name);

struct MetricSet {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double mcc = 0.0;
  double balanced_accuracy = 0.0;
  /// Set when y_true holds no positive / no negative sample; the matching
  /// balanced-accuracy term was taken as 0.
  bool missing_positive = false;
  bool missing_negative = false;

  double value(Metric m) const;
};

/// Precision, recall, F1, MCC and balanced accuracy (TPR + TNR) / 2.
/// Every 0/0 resolves to 0. Throws std::invalid_argument for zero counts.
MetricSet metrics(const ConfusionCounts& c);

struct MetricSummary {
  double mean = 0.0;
  double std = 0.0;  // population
};

struct EvalReport {
  std::string dataset;
  std::string reducer;
  std::string model;
  std::uint64_t seed = 0;
  std::vector<MetricSet> folds;
  std::array<MetricSummary, 5> summary{};
  /// Evaluated on one train/test split rather than k folds.
  bool single_split = false;
  /// Non-empty when the run failed; names the stage, e.g. "train: ...".
  std::string failure;

  const MetricSummary& of(Metric m) const { return summary[static_cast<std::size_t>(m)]; }
  bool failed() const noexcept { return !failure.empty(); }
};

/// Mean and population std of each metric. Throws std::invalid_argument
/// for an empty list.
EvalReport aggregate(std::span<const MetricSet> per_fold);

/// "mean (std)" in percent with two decimals, or just "mean" when
/// `with_std` is false. MCC is scaled by 100 like the other metrics.
std::string format_cell(const MetricSummary& s, bool with_std = true);

/// Long format, one row per report x metric:
/// dataset,reducer,model,metric,mean,std,seed. Failed reports get one row
/// with metric "failed" and empty values.
void write_results_csv(std::span<const EvalReport> reports, std::ostream& out);

/// Reads write_results_csv output back. Reports are grouped by
/// (dataset, reducer, model, seed) in order of first appearance; fold
/// lists stay empty. Throws std::runtime_error on a malformed row.
std::vector<EvalReport> read_results_csv(std::istream& in);

/// Aligned results table, one row per report.
void write_table(std::span<const EvalReport> reports, const std::string& title, std::ostream& out);

/// One group (model x reducer) per report and one value per metric.
struct PlotGroup {
  std::string model;
  std::string reducer;
  std::array<double, 5> values{};

  friend bool operator==(const PlotGroup&, const PlotGroup&) = default;
};

/// Writes a whitespace-separated grouped-bar table of metric means.
/// Failed reports are skipped. Throws std::invalid_argument for no
/// reports and std::runtime_error when the file cannot be written.
void emit_plotdata(std::span<const EvalReport> reports, const std::filesystem::path& path);
std::vector<PlotGroup> read_plotdata(const std::filesystem::path& path);

}  // namespace qbench
