#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qbench/data.hpp"
#include "qbench/linalg.hpp"

namespace qbench {

enum class ModelKind { kLogistic, kKnn, kCart, kNaiveBayes, kSvm, kQsvc, kVqc };

std::string_view to_string(ModelKind kind);
/// Accepts "lr", "knn", "cart", "nb", "svm", "qsvc", "vqc".
ModelKind parse_model_kind(std::string_view name);
bool is_quantum(ModelKind kind);

/// A fitted binary classifier.
class Model {
 public:
  virtual ~Model() = default;

  virtual ModelKind kind() const = 0;
  virtual std::size_t n_features() const = 0;
  /// Throws std::invalid_argument on a feature dimension mismatch.
  virtual Label predict(std::span<const double> x) const = 0;

  std::vector<Label> predict(const Matrix& x) const;

 protected:
  void check_dimension(std::size_t got) const;
};

// ---------------------------------------------------------------------------
// Logistic regression

struct LogisticOptions {
  int max_iter = 1000;
  double learning_rate = 0.1;
  double gradient_tol = 1e-6;
};

class LogisticModel final : public Model {
 public:
  LogisticModel(double intercept, std::vector<double> coefficients, bool converged, int iterations);

  ModelKind kind() const override { return ModelKind::kLogistic; }
  std::size_t n_features() const override { return coefficients_.size(); }
  using Model::predict;
  Label predict(std::span<const double> x) const override;

  /// P(y = 1 | x) through the logistic link.
  double probability(std::span<const double> x) const;

  double intercept() const noexcept { return intercept_; }
  const std::vector<double>& coefficients() const noexcept { return coefficients_; }
  bool converged() const noexcept { return converged_; }
  int iterations() const noexcept { return iterations_; }

 private:
  double intercept_;
  std::vector<double> coefficients_;
  bool converged_;
  int iterations_;
};

/// Full-batch gradient descent on the mean log-loss. Steps that make the
/// loss non-finite or larger are retried at half the learning rate. After
/// 60 consecutive halvings fitting stops, or throws std::runtime_error if
/// every trial loss was non-finite.
/// Requires both classes.
std::unique_ptr<LogisticModel> train_logistic(const DataTable& train, const LogisticOptions& options = {});

/// Mean log-loss gradient (intercept first) at the given parameters.
std::vector<double> logistic_gradient(const DataTable& train, double intercept, std::span<const double> coefficients);

double sigmoid(double t);

// ---------------------------------------------------------------------------
// k-nearest neighbours

class KnnModel final : public Model {
 public:
  KnnModel(DataTable train, std::size_t k);

  ModelKind kind() const override { return ModelKind::kKnn; }
  std::size_t n_features() const override { return train_.n_features(); }
  using Model::predict;
  /// Majority vote of the k closest training rows (Euclidean). Distance
  /// ties keep the lower training index; vote ties go to class 0.
  Label predict(std::span<const double> x) const override;

  std::size_t k() const noexcept { return k_; }

 private:
  DataTable train_;
  std::size_t k_;
};

std::unique_ptr<KnnModel> train_knn(const DataTable& train, std::size_t k = 7);

// ---------------------------------------------------------------------------
// CART

enum class SplitCriterion { kGini, kEntropy };

/// Node of a binary decision tree stored in a flat array.
struct TreeNode {
  int feature = -1;        // -1 marks a leaf
  double threshold = 0.0;  // go left when x[feature] <= threshold
  int left = -1;
  int right = -1;
  double probability = 0.0;  // share of class 1 among the node's samples
  std::size_t samples = 0;
};

class TreeModel final : public Model {
 public:
  TreeModel(std::vector<TreeNode> nodes, std::size_t n_features);

  ModelKind kind() const override { return ModelKind::kCart; }
  std::size_t n_features() const override { return n_features_; }
  using Model::predict;
  Label predict(std::span<const double> x) const override;
  double probability(std::span<const double> x) const;

  const std::vector<TreeNode>& nodes() const noexcept { return nodes_; }
  std::size_t depth() const;
  std::size_t leaf_count() const;

 private:
  std::vector<TreeNode> nodes_;
  std::size_t n_features_;
};

/// Binary entropy magnitude -sum p log2 p over the given class shares.
double entropy(std::span<const double> probabilities);
double gini(std::span<const double> probabilities);

/// Greedy CART. `max_depth` 0 means unlimited. A node becomes a leaf when
/// it is pure, the depth cap is reached, or every feature is constant on
/// it. Otherwise the best split is taken even at zero impurity decrease, so
/// XOR-like layouts still separate; ties keep the first feature/threshold.
std::unique_ptr<TreeModel> train_cart(const DataTable& train, SplitCriterion criterion = SplitCriterion::kGini,
                                      std::size_t max_depth = 0);

// ---------------------------------------------------------------------------
// Gaussian naive Bayes

class NaiveBayesModel final : public Model {
 public:
  struct ClassStats {
    double prior = 0.0;
    std::vector<double> means;
    std::vector<double> variances;
  };

  explicit NaiveBayesModel(std::array<ClassStats, 2> stats);

  ModelKind kind() const override { return ModelKind::kNaiveBayes; }
  std::size_t n_features() const override { return stats_[0].means.size(); }
  using Model::predict;
  /// Argmax posterior; an exact tie goes to class 0.
  Label predict(std::span<const double> x) const override;
  /// Posterior P(y = 1 | x).
  double posterior(std::span<const double> x) const;

  const ClassStats& stats(Label c) const { return stats_[static_cast<std::size_t>(c)]; }

 private:
  std::array<ClassStats, 2> stats_;
};

inline constexpr double kNaiveBayesVarianceFloor = 1e-9;

std::unique_ptr<NaiveBayesModel> train_nb(const DataTable& train);

// ---------------------------------------------------------------------------
// Support vector machine

enum class KernelType { kLinear, kRbf, kPrecomputed };

struct KernelSpec {
  KernelType type = KernelType::kRbf;
  /// RBF width; a non-positive value means 1 / (n_features * Var(X)) with
  /// the variance taken over every entry of the training matrix.
  double gamma = 0.0;
};

struct SvmOptions {
  double c = 1.0;
  KernelSpec kernel{};
  double tolerance = 1e-3;
  long max_iterations = 10'000'000;
  /// Shift used in the PSD check of precomputed kernels.
  double psd_shift = 1e-8;
};

/// Dual solution of the soft-margin SVM.
struct SvmSolution {
  std::vector<double> alpha;  // one per training sample
  std::vector<double> y;      // +-1 targets
  double bias = 0.0;
  long iterations = 0;
  double objective = 0.0;  // sum alpha - 1/2 sum alpha_i alpha_j y_i y_j K_ij
};

class SvmModel final : public Model {
 public:
  SvmModel(KernelSpec kernel, Matrix support_vectors, std::vector<double> coefficients, double bias,
           std::vector<std::size_t> support_indices, SvmSolution solution);

  ModelKind kind() const override { return ModelKind::kSvm; }
  std::size_t n_features() const override { return support_vectors_.cols(); }
  using Model::predict;
  /// Class 1 when the decision value is positive. Not available for
  /// precomputed kernels; use predict_from_kernel.
  Label predict(std::span<const double> x) const override;
  double decision(std::span<const double> x) const;

  /// Decision value from kernel values against each support vector, in
  /// support_indices() order.
  double decision_from_kernel(std::span<const double> kernel_row) const;
  Label predict_from_kernel(std::span<const double> kernel_row) const;

  const KernelSpec& kernel() const noexcept { return kernel_; }
  const Matrix& support_vectors() const noexcept { return support_vectors_; }
  /// alpha_i * y_i for each support vector.
  const std::vector<double>& coefficients() const noexcept { return coefficients_; }
  const std::vector<std::size_t>& support_indices() const noexcept { return support_indices_; }
  double bias() const noexcept { return bias_; }
  const SvmSolution& solution() const noexcept { return solution_; }

 private:
  KernelSpec kernel_;
  Matrix support_vectors_;
  std::vector<double> coefficients_;
  double bias_;
  std::vector<std::size_t> support_indices_;
  SvmSolution solution_;
};

double kernel_value(const KernelSpec& spec, std::span<const double> a, std::span<const double> b);

/// Supplies row i of the kernel matrix, K(i, 0..n-1).
using KernelRowFn = std::function<void(std::size_t i, std::span<double> row)>;

/// Solves the dual with SMO using second-order working-set selection.
/// Throws ConvergenceError at the iteration cap.
SvmSolution solve_svm_dual(std::size_t n, const KernelRowFn& kernel_row, std::span<const Label> labels, double c,
                           double tolerance, long max_iterations);
SvmSolution solve_svm_dual(const Matrix& gram, std::span<const Label> labels, double c, double tolerance,
                           long max_iterations);

/// Trains on features with a linear or RBF kernel.
std::unique_ptr<SvmModel> train_svm(const DataTable& train, const SvmOptions& options = {});

/// Trains on a precomputed Gram matrix. Throws std::invalid_argument when
/// the Gram is not square, not symmetric or fails the PSD check.
std::unique_ptr<SvmModel> train_svm_precomputed(const Matrix& gram, std::span<const Label> labels,
                                                const SvmOptions& options = {});

}  // namespace qbench
