#include <algorithm>
#include <cmath>
#include <limits>
#include <list>
#include <stdexcept>
#include <unordered_map>

#include "qbench/classical.hpp"
#include "qbench/errors.hpp"

namespace qbench {

double kernel_value(const KernelSpec& spec, std::span<const double> a, std::span<const double> b) {
  switch (spec.type) {
    case KernelType::kLinear:
      return dot(a, b);
    case KernelType::kRbf: {
      double s = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
      return std::exp(-spec.gamma * s);
    }
    case KernelType::kPrecomputed:
      break;
  }
  throw std::logic_error("kernel_value: precomputed kernels have no feature-space form");
}

SvmModel::SvmModel(KernelSpec kernel, Matrix support_vectors, std::vector<double> coefficients, double bias,
                   std::vector<std::size_t> support_indices, SvmSolution solution)
    : kernel_(kernel),
      support_vectors_(std::move(support_vectors)),
      coefficients_(std::move(coefficients)),
      bias_(bias),
      support_indices_(std::move(support_indices)),
      solution_(std::move(solution)) {}

double SvmModel::decision(std::span<const double> x) const {
  if (kernel_.type == KernelType::kPrecomputed)
    throw std::logic_error("svm: precomputed-kernel model needs kernel rows, not features");
  check_dimension(x.size());
  double f = bias_;
  for (std::size_t s = 0; s < coefficients_.size(); ++s)
    f += coefficients_[s] * kernel_value(kernel_, support_vectors_.row(s), x);
  return f;
}

Label SvmModel::predict(std::span<const double> x) const { return decision(x) > 0.0 ? 1 : 0; }

double SvmModel::decision_from_kernel(std::span<const double> kernel_row) const {
  if (kernel_row.size() != coefficients_.size())
    throw std::invalid_argument("svm: kernel row length does not match the support vector count");
  double f = bias_;
  for (std::size_t s = 0; s < coefficients_.size(); ++s) f += coefficients_[s] * kernel_row[s];
  return f;
}

Label SvmModel::predict_from_kernel(std::span<const double> kernel_row) const {
  return decision_from_kernel(kernel_row) > 0.0 ? 1 : 0;
}

namespace {

// Kernel rows served either from a dense table or an LRU cache.
class RowCache {
 public:
  RowCache(std::size_t n, const KernelRowFn& fn, std::size_t capacity_rows)
      : n_(n), fn_(fn), capacity_(std::max<std::size_t>(2, capacity_rows)) {}

  std::span<const double> row(std::size_t i) {
    auto it = index_.find(i);
    if (it != index_.end()) {
      lru_.splice(lru_.begin(), lru_, it->second);
      return it->second->second;
    }
    if (lru_.size() >= capacity_) {
      index_.erase(lru_.back().first);
      lru_.pop_back();
    }
    lru_.emplace_front(i, std::vector<double>(n_));
    fn_(i, lru_.front().second);
    index_[i] = lru_.begin();
    return lru_.front().second;
  }

 private:
  using Entry = std::pair<std::size_t, std::vector<double>>;
  std::size_t n_;
  const KernelRowFn& fn_;
  std::size_t capacity_;
  std::list<Entry> lru_;
  std::unordered_map<std::size_t, std::list<Entry>::iterator> index_;
};

constexpr double kTau = 1e-12;

}  // namespace

SvmSolution solve_svm_dual(std::size_t n, const KernelRowFn& kernel_row, std::span<const Label> labels, double c,
                           double tolerance, long max_iterations) {
  if (labels.size() != n) throw std::invalid_argument("svm: label count does not match kernel size");
  if (!(c > 0.0)) throw std::invalid_argument("svm: C must be positive");
  std::size_t pos = 0;
  for (Label l : labels) pos += l == 1 ? 1 : 0;
  if (pos == 0 || pos == n) throw std::invalid_argument("svm: both classes must be present");

  SvmSolution sol;
  sol.y.resize(n);
  for (std::size_t i = 0; i < n; ++i) sol.y[i] = labels[i] == 1 ? 1.0 : -1.0;
  sol.alpha.assign(n, 0.0);
  const auto& y = sol.y;
  auto& alpha = sol.alpha;

  // ~256 MB of cached rows at most.
  const std::size_t capacity = std::min<std::size_t>(n, (std::size_t{32} << 20) / std::max<std::size_t>(1, n));
  RowCache cache(n, kernel_row, capacity);
  std::vector<double> diag(n);
  for (std::size_t i = 0; i < n; ++i) diag[i] = cache.row(i)[i];

  // Gradient of f(a) = 1/2 a'Qa - e'a with Q_ij = y_i y_j K_ij.
  std::vector<double> grad(n, -1.0);
  auto upper = [&](std::size_t t) { return alpha[t] >= c; };
  auto lower = [&](std::size_t t) { return alpha[t] <= 0.0; };

  long iter = 0;
  for (;; ++iter) {
    if (iter >= max_iterations) throw ConvergenceError("svm: SMO did not reach the KKT tolerance", iter);

    double gmax = -std::numeric_limits<double>::infinity();
    std::size_t i = n;
    for (std::size_t t = 0; t < n; ++t) {
      if (y[t] > 0) {
        if (!upper(t) && -grad[t] >= gmax) {
          gmax = -grad[t];
          i = t;
        }
      } else if (!lower(t) && grad[t] >= gmax) {
        gmax = grad[t];
        i = t;
      }
    }
    if (i == n) break;
    const auto ki = cache.row(i);

    double gmax2 = -std::numeric_limits<double>::infinity();
    double best = std::numeric_limits<double>::infinity();
    std::size_t j = n;
    for (std::size_t t = 0; t < n; ++t) {
      if (y[t] > 0) {
        if (lower(t)) continue;
        const double diff = gmax + grad[t];
        gmax2 = std::max(gmax2, grad[t]);
        if (diff > 0.0) {
          double quad = diag[i] + diag[t] - 2.0 * ki[t];
          if (quad <= 0.0) quad = kTau;
          const double obj = -(diff * diff) / quad;
          if (obj <= best) {
            best = obj;
            j = t;
          }
        }
      } else {
        if (upper(t)) continue;
        const double diff = gmax - grad[t];
        gmax2 = std::max(gmax2, -grad[t]);
        if (diff > 0.0) {
          double quad = diag[i] + diag[t] - 2.0 * ki[t];
          if (quad <= 0.0) quad = kTau;
          const double obj = -(diff * diff) / quad;
          if (obj <= best) {
            best = obj;
            j = t;
          }
        }
      }
    }
    if (gmax + gmax2 < tolerance || j == n) break;

    const auto kj = cache.row(j);
    const double qij = y[i] * y[j] * ki[j];
    const double old_i = alpha[i];
    const double old_j = alpha[j];
    if (y[i] != y[j]) {
      double quad = diag[i] + diag[j] + 2.0 * qij;
      if (quad <= 0.0) quad = kTau;
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0.0) {
        if (alpha[j] < 0.0) {
          alpha[j] = 0.0;
          alpha[i] = diff;
        }
      } else if (alpha[i] < 0.0) {
        alpha[i] = 0.0;
        alpha[j] = -diff;
      }
      if (diff > 0.0) {
        if (alpha[i] > c) {
          alpha[i] = c;
          alpha[j] = c - diff;
        }
      } else if (alpha[j] > c) {
        alpha[j] = c;
        alpha[i] = c + diff;
      }
    } else {
      double quad = diag[i] + diag[j] - 2.0 * qij;
      if (quad <= 0.0) quad = kTau;
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > c) {
        if (alpha[i] > c) {
          alpha[i] = c;
          alpha[j] = sum - c;
        }
      } else if (alpha[j] < 0.0) {
        alpha[j] = 0.0;
        alpha[i] = sum;
      }
      if (sum > c) {
        if (alpha[j] > c) {
          alpha[j] = c;
          alpha[i] = sum - c;
        }
      } else if (alpha[i] < 0.0) {
        alpha[i] = 0.0;
        alpha[j] = sum;
      }
    }

    const double di = alpha[i] - old_i;
    const double dj = alpha[j] - old_j;
    for (std::size_t t = 0; t < n; ++t) grad[t] += y[t] * (y[i] * ki[t] * di + y[j] * kj[t] * dj);
  }
  sol.iterations = iter;

  // Bias from free vectors, else midpoint of the feasible interval.
  double ub = std::numeric_limits<double>::infinity();
  double lb = -std::numeric_limits<double>::infinity();
  double sum_free = 0.0;
  std::size_t n_free = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const double yg = y[t] * grad[t];
    if (upper(t)) {
      if (y[t] < 0) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else if (lower(t)) {
      if (y[t] > 0) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else {
      ++n_free;
      sum_free += yg;
    }
  }
  const double rho = n_free > 0 ? sum_free / static_cast<double>(n_free) : 0.5 * (ub + lb);
  sol.bias = -rho;

  double f = 0.0;
  for (std::size_t t = 0; t < n; ++t) f += alpha[t] * (grad[t] - 1.0);
  sol.objective = -0.5 * f;
  return sol;
}

SvmSolution solve_svm_dual(const Matrix& gram, std::span<const Label> labels, double c, double tolerance,
                           long max_iterations) {
  if (gram.rows() != gram.cols()) throw std::invalid_argument("svm: Gram matrix must be square");
  const KernelRowFn row = [&gram](std::size_t i, std::span<double> out) {
    const auto src = gram.row(i);
    std::copy(src.begin(), src.end(), out.begin());
  };
  return solve_svm_dual(gram.rows(), row, labels, c, tolerance, max_iterations);
}

namespace {

std::unique_ptr<SvmModel> make_model(const KernelSpec& kernel, const Matrix* features, const SvmSolution& sol) {
  std::vector<std::size_t> sv;
  for (std::size_t i = 0; i < sol.alpha.size(); ++i)
    if (sol.alpha[i] > 0.0) sv.push_back(i);
  std::vector<double> coef;
  coef.reserve(sv.size());
  for (std::size_t i : sv) coef.push_back(sol.alpha[i] * sol.y[i]);
  Matrix vectors = features ? features->select_rows(sv) : Matrix();
  return std::make_unique<SvmModel>(kernel, std::move(vectors), std::move(coef), sol.bias, std::move(sv), sol);
}

}  // namespace

std::unique_ptr<SvmModel> train_svm(const DataTable& train, const SvmOptions& options) {
  train.validate();
  KernelSpec kernel = options.kernel;
  if (kernel.type == KernelType::kPrecomputed)
    throw std::invalid_argument("train_svm: use train_svm_precomputed for precomputed kernels");
  if (kernel.type == KernelType::kRbf && !(kernel.gamma > 0.0)) {
    const auto data = train.features.data();
    double mean = 0.0;
    for (double v : data) mean += v;
    mean /= static_cast<double>(data.size());
    double var = 0.0;
    for (double v : data) var += (v - mean) * (v - mean);
    var /= static_cast<double>(data.size());
    kernel.gamma = var > 0.0 ? 1.0 / (static_cast<double>(train.n_features()) * var) : 1.0;
  }
  const Matrix& x = train.features;
  const KernelRowFn row = [&](std::size_t i, std::span<double> out) {
    const auto xi = x.row(i);
    for (std::size_t t = 0; t < x.rows(); ++t) out[t] = kernel_value(kernel, xi, x.row(t));
  };
  const auto sol = solve_svm_dual(x.rows(), row, train.labels, options.c, options.tolerance, options.max_iterations);
  return make_model(kernel, &x, sol);
}

std::unique_ptr<SvmModel> train_svm_precomputed(const Matrix& gram, std::span<const Label> labels,
                                                const SvmOptions& options) {
  if (gram.rows() != gram.cols()) throw std::invalid_argument("train_svm: Gram matrix must be square");
  if (!gram.all_finite()) throw std::invalid_argument("train_svm: Gram matrix has non-finite entries");
  double scale = 1.0;
  for (std::size_t i = 0; i < gram.rows(); ++i) {
    scale = std::max(scale, std::abs(gram(i, i)));
    for (std::size_t j = i + 1; j < gram.cols(); ++j)
      if (std::abs(gram(i, j) - gram(j, i)) > 1e-10 * std::max(1.0, std::abs(gram(i, j))))
        throw std::invalid_argument("train_svm: precomputed kernel is not symmetric");
  }
  if (!cholesky_succeeds(gram, options.psd_shift * scale))
    throw std::invalid_argument("train_svm: precomputed kernel is not positive semidefinite");
  const auto sol = solve_svm_dual(gram, labels, options.c, options.tolerance, options.max_iterations);
  KernelSpec kernel{KernelType::kPrecomputed, 0.0};
  return make_model(kernel, nullptr, sol);
}

}  // namespace qbench
