#include <cmath>
#include <stdexcept>

#include "qbench/classical.hpp"

namespace qbench {

double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

LogisticModel::LogisticModel(double intercept, std::vector<double> coefficients, bool converged, int iterations)
    : intercept_(intercept), coefficients_(std::move(coefficients)), converged_(converged), iterations_(iterations) {}

double LogisticModel::probability(std::span<const double> x) const {
  check_dimension(x.size());
  return sigmoid(intercept_ + dot(coefficients_, x));
}

Label LogisticModel::predict(std::span<const double> x) const { return probability(x) >= 0.5 ? 1 : 0; }

namespace {

double log_loss(const DataTable& t, double b0, std::span<const double> b) {
  double loss = 0.0;
  for (std::size_t i = 0; i < t.n_samples(); ++i) {
    const double z = b0 + dot(b, t.features.row(i));
    // log(1 + e^z) - y z, evaluated without overflow.
    loss += std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))) - (t.labels[i] == 1 ? z : 0.0);
  }
  return loss / static_cast<double>(t.n_samples());
}

}  // namespace

std::vector<double> logistic_gradient(const DataTable& train, double intercept, std::span<const double> coefficients) {
  const std::size_t d = train.n_features();
  std::vector<double> g(d + 1, 0.0);
  for (std::size_t i = 0; i < train.n_samples(); ++i) {
    const auto x = train.features.row(i);
    const double r = sigmoid(intercept + dot(coefficients, x)) - static_cast<double>(train.labels[i]);
    g[0] += r;
    for (std::size_t j = 0; j < d; ++j) g[j + 1] += r * x[j];
  }
  for (double& v : g) v /= static_cast<double>(train.n_samples());
  return g;
}

std::unique_ptr<LogisticModel> train_logistic(const DataTable& train, const LogisticOptions& options) {
  train.validate();
  if (train.n_samples() < 2) throw std::invalid_argument("train_logistic: need at least two samples");
  if (train.count(0) == 0 || train.count(1) == 0)
    throw std::invalid_argument("train_logistic: both classes must be present");

  const std::size_t d = train.n_features();
  double b0 = 0.0;
  std::vector<double> b(d, 0.0);
  double lr = options.learning_rate;
  double loss = log_loss(train, b0, b);
  bool converged = false;
  int it = 0;
  std::vector<double> trial(d);
  for (; it < options.max_iter; ++it) {
    const auto g = logistic_gradient(train, b0, b);
    if (norm2(g) < options.gradient_tol) {
      converged = true;
      break;
    }
    int halvings = 0;
    bool any_finite = false;
    bool stalled = false;
    for (;;) {
      const double t0 = b0 - lr * g[0];
      for (std::size_t j = 0; j < d; ++j) trial[j] = b[j] - lr * g[j + 1];
      const double next = log_loss(train, t0, trial);
      any_finite = any_finite || std::isfinite(next);
      if (std::isfinite(next) && next <= loss) {
        b0 = t0;
        b.swap(trial);
        loss = next;
        break;
      }
      lr *= 0.5;
      if (++halvings > 60) {
        if (!any_finite) throw std::runtime_error("train_logistic: loss is non-finite at every step size");
        stalled = true;  // no decrease left at machine precision
        break;
      }
    }
    if (stalled) break;
  }
  if (!converged) converged = norm2(logistic_gradient(train, b0, b)) < options.gradient_tol;
  return std::make_unique<LogisticModel>(b0, std::move(b), converged, it);
}

}  // namespace qbench
