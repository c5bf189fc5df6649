#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "qbench/quantum.hpp"
#include "qbench/rng.hpp"

namespace qbench {

VqcModel init_vqc(std::size_t n_qubits, std::size_t n_layers, std::uint64_t seed) {
  if (n_qubits == 0 || n_layers == 0) throw std::invalid_argument("init_vqc: qubits and layers must be positive");
  VqcModel m;
  m.n_qubits = n_qubits;
  m.n_layers = n_layers;
  m.encoding.n_qubits = n_qubits;
  Rng rng(seed);
  m.weights.resize(m.parameter_count());
  for (auto& w : m.weights) w = rng.uniform(0.0, 2.0 * std::numbers::pi);
  return m;
}

Circuit vqc_circuit(const VqcModel& model, std::span<const double> x) {
  if (model.weights.size() != model.parameter_count())
    throw std::invalid_argument("vqc: expected " + std::to_string(model.parameter_count()) + " weights, got " +
                                std::to_string(model.weights.size()));
  FeatureMapSpec enc = model.encoding;
  enc.n_qubits = model.n_qubits;
  Circuit c = enc.kind == FeatureMapKind::kAngle ? angle_encoding_circuit(x, enc) : zz_feature_map_circuit(x, enc);
  const std::size_t n = model.n_qubits;
  for (std::size_t l = 0; l < model.n_layers; ++l) {
    for (std::size_t q = 0; q < n; ++q)
      c.push_back(Gate::rot(q, model.weight(l, q, 0), model.weight(l, q, 1), model.weight(l, q, 2)));
    if (model.entangle && n > 1) {
      const std::size_t r = (l % (n - 1)) + 1;
      for (std::size_t q = 0; q < n; ++q) c.push_back(Gate::cnot(q, (q + r) % n));
    }
  }
  return c;
}

double vqc_forward(const VqcModel& model, std::span<const double> x) {
  return run_circuit(vqc_circuit(model, x), model.n_qubits).expectation_z(0);
}

std::vector<double> vqc_expectation_gradient(const VqcModel& model, std::span<const double> x) {
  VqcModel shifted = model;
  std::vector<double> g(model.parameter_count());
  constexpr double s = std::numbers::pi / 2;
  for (std::size_t p = 0; p < g.size(); ++p) {
    const double w = model.weights[p];
    shifted.weights[p] = w + s;
    const double plus = vqc_forward(shifted, x);
    shifted.weights[p] = w - s;
    const double minus = vqc_forward(shifted, x);
    shifted.weights[p] = w;
    g[p] = 0.5 * (plus - minus);
  }
  return g;
}

namespace {

void check_batch(const Matrix& x, std::span<const double> targets) {
  if (x.rows() != targets.size()) throw std::invalid_argument("vqc: target count does not match rows");
  if (x.rows() == 0) throw std::invalid_argument("vqc: empty batch");
}

}  // namespace

double vqc_loss(const VqcModel& model, const Matrix& x, std::span<const double> targets) {
  check_batch(x, targets);
  double s = 0.0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const double e = vqc_forward(model, x.row(i)) - targets[i];
    s += e * e;
  }
  return s / static_cast<double>(x.rows());
}

std::vector<double> vqc_gradient(const VqcModel& model, const Matrix& x, std::span<const double> targets) {
  check_batch(x, targets);
  std::vector<double> g(model.parameter_count(), 0.0);
  const double scale = 2.0 / static_cast<double>(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const double e = vqc_forward(model, x.row(i)) - targets[i];
    const auto de = vqc_expectation_gradient(model, x.row(i));
    for (std::size_t p = 0; p < g.size(); ++p) g[p] += scale * e * de[p];
  }
  return g;
}

std::vector<double> vqc_targets(std::span<const Label> labels) {
  std::vector<double> t(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) t[i] = labels[i] == 1 ? 1.0 : -1.0;
  return t;
}

VqcTrainResult train_vqc(const DataTable& train, const VqcTrainOptions& options) {
  train.validate();
  if (!(options.learning_rate > 0.0)) throw std::invalid_argument("train_vqc: learning rate must be positive");
  VqcTrainResult result{init_vqc(train.n_features(), options.n_layers, options.seed), {}};
  const auto targets = vqc_targets(train.labels);
  VqcModel& model = result.model;
  double loss = vqc_loss(model, train.features, targets);
  if (!std::isfinite(loss)) throw std::runtime_error("train_vqc: non-finite loss");
  result.loss_trace.push_back(loss);
  double lr = options.learning_rate;

  for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
    const auto grad = vqc_gradient(model, train.features, targets);
    for (int attempt = 0;; ++attempt) {
      VqcModel trial = model;
      for (std::size_t p = 0; p < grad.size(); ++p) trial.weights[p] -= lr * grad[p];
      const double trial_loss = vqc_loss(trial, train.features, targets);
      if (!std::isfinite(trial_loss)) throw std::runtime_error("train_vqc: non-finite loss");
      if (!options.lr_halving || trial_loss <= loss) {
        model = std::move(trial);
        loss = trial_loss;
        break;
      }
      lr *= 0.5;
      if (attempt >= 30) break;
    }
    result.loss_trace.push_back(loss);
  }
  return result;
}

Label VqcClassifier::predict(std::span<const double> x) const {
  check_dimension(x.size());
  return vqc_forward(model_, x) > 0.0 ? 1 : 0;
}

}  // namespace qbench
