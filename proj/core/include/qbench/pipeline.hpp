#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "qbench/classical.hpp"
#include "qbench/dimred.hpp"
#include "qbench/metrics.hpp"
#include "qbench/quantum.hpp"

namespace qbench {

inline constexpr const char* kVersion = "0.3.0";

/// Target and dropped columns of a named dataset. "uci_credit" and
/// "bank_fraud" are built in; other names need an explicit target.
struct DatasetSchema {
  std::string target;
  std::vector<std::string> drop;
};

/// Returns false for names without a built-in schema.
bool builtin_schema(const std::string& dataset, DatasetSchema& out);

struct RunConfig {
  std::string dataset = "uci_credit";
  /// CSV location per dataset name.
  std::map<std::string, std::filesystem::path> paths;
  std::string target;             // overrides the built-in schema
  std::vector<std::string> drop;  // overrides the built-in schema
  ReductionMethod reducer = ReductionMethod::kLdaSplit;
  std::vector<ModelKind> models{ModelKind::kLogistic, ModelKind::kKnn, ModelKind::kCart, ModelKind::kNaiveBayes,
                                ModelKind::kSvm,      ModelKind::kQsvc, ModelKind::kVqc};
  std::size_t n_train = 800;
  std::size_t n_test = 200;
  std::size_t n_qubits = 2;
  std::size_t folds = 10;
  std::uint64_t seed = 0;
  bool stratified = true;
  bool standardize = true;
  /// Cross-validate the VQC like every other model.
  bool cv_all = false;
  /// Cross-validate classical models over the whole table instead of the
  /// training subsample.
  bool full_data = false;
  FeatureMapKind featuremap = FeatureMapKind::kZz;
  std::size_t reps = 2;
  std::size_t vqc_layers = 4;
  std::size_t vqc_epochs = 100;
  double vqc_lr = 0.5;
  std::size_t skpp_restarts = 5;
  double svm_c = 1.0;
  std::filesystem::path out_dir = "results";
};

/// Sets one key; the keys are the RunConfig field names plus "path" (the
/// path of the selected dataset) and "path.<dataset>". Lists are comma
/// separated. Throws ConfigError on an unknown key or a bad value.
void set_config_value(RunConfig& config, const std::string& key, const std::string& value);

/// Parses "key = value" lines; '#' starts a comment.
RunConfig parse_config(std::istream& in, RunConfig base = {});
RunConfig load_config(const std::filesystem::path& path, RunConfig base = {});

/// Every key = value line that parse_config would read back to `config`.
void write_config(const RunConfig& config, std::ostream& out);

/// Checks what can be checked without the data. Throws ConfigError.
void validate_config(const RunConfig& config);

/// Output dimension of the configured reducer, or 0 for "identity" (the
/// feature count).
std::size_t reducer_output_dimension(const RunConfig& config);

struct DatasetFingerprint {
  std::size_t rows = 0;
  std::size_t columns = 0;
  std::size_t rows_dropped = 0;
  double positive_fraction = 0.0;
};

/// Which rows (as indices into the loaded table) a scaler/reducer fit saw.
struct FitRecord {
  std::string split;  // "fold 3" or "holdout"
  std::size_t train_rows = 0;
  std::uint64_t fit_hash = 0;
  std::uint64_t eval_hash = 0;
};

struct RunManifest {
  RunConfig config;
  DatasetFingerprint dataset;
  std::vector<EvalReport> reports;  // in config.models order
  std::vector<FitRecord> fits;
  std::map<std::string, double> seconds;  // wall clock per model
  std::string failure;                    // whole-run failure, if any

  bool failed() const noexcept { return !failure.empty(); }
};

/// Load, clean, reduce, encode, train and evaluate as configured.
///
/// Classical models and QSVC are cross-validated over the training
/// subsample with the scaler and reducer refitted on every fold; the VQC
/// is trained on the subsample and scored on the held-out part. A model
/// that fails leaves a failed report naming the stage and the others still
/// run. Throws ConfigError / DataError before any fitting starts.
RunManifest run_benchmark(const RunConfig& config);

/// Runs every config, isolating failures, and returns the manifests sorted
/// by (dataset, reducer).
std::vector<RunManifest> run_matrix(const std::vector<RunConfig>& configs);

/// The Cartesian sweep of `datasets` x {svd, pca, skpp, lda_split} with
/// every model, based on `base`.
std::vector<RunConfig> sweep_configs(const RunConfig& base, const std::vector<std::string>& datasets);

/// Writes results.csv, tables/<dataset>_<reducer>.txt, manifest.txt and
/// timings.txt under `dir`. Everything except timings.txt is a pure
/// function of the manifests.
void write_outputs(const std::vector<RunManifest>& runs, const std::filesystem::path& dir);

void write_manifest(const RunManifest& run, std::ostream& out);

/// Flattened reports of all runs, in run order.
std::vector<EvalReport> collect_reports(const std::vector<RunManifest>& runs);

}  // namespace qbench
