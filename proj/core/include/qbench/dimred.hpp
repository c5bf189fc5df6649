#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qbench/data.hpp"
#include "qbench/linalg.hpp"

namespace qbench {

enum class ReductionMethod { kSvd, kPca, kSkpp, kLda, kLdaSplit, kIdentity };

std::string_view to_string(ReductionMethod m);
/// Accepts "svd", "pca", "skpp", "lda", "lda_split" and "none" (also
/// "identity"). The identity prints as "none".
ReductionMethod parse_reduction_method(std::string_view name);

/// A fitted linear reduction: y = (x - mean) * projection.
struct Reducer {
  ReductionMethod method = ReductionMethod::kIdentity;
  std::vector<double> mean;  // n_features; zeros for uncentred SVD
  Matrix projection;         // n_features x components, unit-norm columns
  std::map<std::string, double> metadata;

  std::size_t n_features() const noexcept { return projection.rows(); }
  std::size_t components() const noexcept { return projection.cols(); }

  friend bool operator==(const Reducer&, const Reducer&) = default;
};

/// Kurtosis index m4 / m2^2 with biased (1/n) central moments.
/// Throws std::domain_error for fewer than two samples or zero variance.
double kurtosis(std::span<const double> z);

/// Top principal directions of the mean-centred covariance.
/// Sets metadata "degenerate" = 1 when two retained (or the last retained
/// and first dropped) eigenvalues lie within 10% of the leading one.
Reducer fit_pca(const DataTable& train, std::size_t n_components);

/// Top right singular vectors of the raw (uncentred) feature matrix.
/// Pads with an orthogonal complement and sets "rank_deficient" when the
/// table has fewer rows than requested components.
Reducer fit_svd(const DataTable& train, std::size_t n_components);

enum class KurtosisGoal { kMinimize, kMaximize };

struct SkppOptions {
  std::size_t restarts = 5;
  std::uint64_t seed = 0;
  KurtosisGoal goal = KurtosisGoal::kMinimize;
  int max_iterations = 300;
};

/// Supervised kurtosis projection pursuit.
///
/// Each component optimises the class-weighted sum of per-class kurtosis
/// indices of the projected data, sum_c (n_c / n) K(X_c w), over unit
/// directions orthogonal to the earlier components. Uses Riemannian
/// gradient steps with backtracking from `restarts` random unit starts.
/// Achieved objective values are stored as metadata "index_<k>".
/// Throws std::runtime_error when no restart improves on its start.
Reducer fit_skpp(const DataTable& train, std::size_t n_components, const SkppOptions& options);

/// The pooled within-class kurtosis objective for direction `w`.
double pooled_class_kurtosis(const DataTable& train, std::span<const double> w);

/// Fisher ratio (w.(mu1 - mu0))^2 / (w' Sigma_W w), Sigma_W being the
/// pooled within-class covariance.
double fisher_ratio(const Matrix& features, std::span<const Label> labels, std::span<const double> w);

/// One-component Fisher LDA, w proportional to (S_W + eps I)^-1 (mu1 - mu0)
/// with eps = 1e-6 trace(S_W) / d. Throws std::domain_error when the
/// class means coincide or a class is absent.
Reducer fit_lda(const DataTable& train);

enum class FeatureSplit { kContiguous, kRandom };

/// Split-half LDA: one Fisher direction per feature half, giving two
/// output dimensions. Contiguous halves put the extra column of an odd
/// feature count in the first half; kRandom permutes columns by `seed`
/// first. Halves whose class means coincide fall back to the half's first
/// axis and are flagged "degenerate_half_<h>"; Fisher ratios below 0.1 are
/// flagged "weak_half_<h>".
Reducer fit_lda_split(const DataTable& train, std::uint64_t seed,
                      FeatureSplit split = FeatureSplit::kContiguous);

/// Projection onto all features unchanged.
Reducer identity_reducer(std::size_t n_features);

/// Throws std::invalid_argument on a feature dimension mismatch.
Matrix transform(const Reducer& reducer, const Matrix& features);
std::vector<double> transform(const Reducer& reducer, std::span<const double> x);
DataTable transform(const Reducer& reducer, const DataTable& table);

/// Plain-text dump: key/value header lines, then the projection rows.
void write_reducer(const Reducer& reducer, std::ostream& out);
Reducer read_reducer(std::istream& in);

}  // namespace qbench
