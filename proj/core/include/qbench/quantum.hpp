#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "qbench/classical.hpp"
#include "qbench/data.hpp"
#include "qbench/linalg.hpp"

namespace qbench {

using Amplitude = std::complex<double>;

enum class GateKind { kRx, kRy, kRz, kH, kCnot, kCz, kPhase, kRot };

std::string_view to_string(GateKind kind);

/// A gate on a register. Single-qubit kinds ignore `control`.
/// Angles are radians; ROT(a, b, c) = RZ(c) RY(b) RZ(a).
struct Gate {
  GateKind kind = GateKind::kH;
  std::size_t target = 0;
  std::size_t control = 0;
  std::array<double, 3> angles{};

  static Gate rx(std::size_t q, double theta) { return {GateKind::kRx, q, 0, {theta, 0, 0}}; }
  static Gate ry(std::size_t q, double theta) { return {GateKind::kRy, q, 0, {theta, 0, 0}}; }
  static Gate rz(std::size_t q, double theta) { return {GateKind::kRz, q, 0, {theta, 0, 0}}; }
  static Gate h(std::size_t q) { return {GateKind::kH, q, 0, {}}; }
  static Gate phase(std::size_t q, double phi) { return {GateKind::kPhase, q, 0, {phi, 0, 0}}; }
  static Gate rot(std::size_t q, double a, double b, double c) { return {GateKind::kRot, q, 0, {a, b, c}}; }
  static Gate cnot(std::size_t control, std::size_t target) { return {GateKind::kCnot, target, control, {}}; }
  static Gate cz(std::size_t control, std::size_t target) { return {GateKind::kCz, target, control, {}}; }

  bool two_qubit() const noexcept { return kind == GateKind::kCnot || kind == GateKind::kCz; }
};

using Circuit = std::vector<Gate>;

/// Row-major 2x2 unitary of a single-qubit gate.
std::array<Amplitude, 4> single_qubit_matrix(const Gate& gate);

/// Amplitudes of an n-qubit register. Qubit 0 is the leftmost ket symbol,
/// i.e. the most significant bit of the basis index: |10> has index 2.
class StateVector {
 public:
  /// |0...0>. Throws std::invalid_argument for 0 or more than 20 qubits.
  explicit StateVector(std::size_t n_qubits);
  StateVector(std::size_t n_qubits, std::vector<Amplitude> amplitudes);

  std::size_t n_qubits() const noexcept { return n_qubits_; }
  std::size_t dimension() const noexcept { return amplitudes_.size(); }
  std::span<const Amplitude> amplitudes() const noexcept { return amplitudes_; }
  Amplitude amplitude(std::size_t basis_index) const { return amplitudes_.at(basis_index); }

  /// Applies in place. Throws std::out_of_range for a qubit index past the
  /// register and std::invalid_argument when control equals target.
  void apply(const Gate& gate);
  void apply(const Circuit& circuit);

  double norm_squared() const;
  /// <Z> on qubit q.
  double expectation_z(std::size_t q) const;

 private:
  std::size_t n_qubits_;
  std::vector<Amplitude> amplitudes_;
};

StateVector apply_gate(StateVector state, const Gate& gate);
StateVector run_circuit(const Circuit& circuit, std::size_t n_qubits);

/// <a|b>.
Amplitude inner_product(const StateVector& a, const StateVector& b);
/// |<a|b>|^2.
double fidelity(const StateVector& a, const StateVector& b);

/// One text line per gate, e.g. "RY q0 1.5707963267948966" or "CNOT q0 q1".
void write_circuit_trace(const Circuit& circuit, std::ostream& out);

// ---------------------------------------------------------------------------
// Encodings

enum class FeatureMapKind { kAngle, kZz };
enum class RotationAxis { kX, kY, kZ };

std::string_view to_string(FeatureMapKind kind);
FeatureMapKind parse_feature_map_kind(std::string_view name);

struct FeatureMapSpec {
  FeatureMapKind kind = FeatureMapKind::kZz;
  std::size_t n_qubits = 2;
  std::size_t reps = 2;
  RotationAxis axis = RotationAxis::kY;  // angle encoding only
};

/// Product of one rotation per qubit, R(x_i) on qubit i.
Circuit angle_encoding_circuit(std::span<const double> x, const FeatureMapSpec& spec);

/// Second-order Pauli-Z evolution: `reps` times [H on every qubit;
/// PHASE(2 x_i) on qubit i; for i < j, CNOT(i, j) PHASE(2 (pi - x_i)(pi - x_j))
/// on j, CNOT(i, j)].
Circuit zz_feature_map_circuit(std::span<const double> x, const FeatureMapSpec& spec);

/// Throws std::invalid_argument when x.size() != spec.n_qubits.
StateVector encode_angle(std::span<const double> x, const FeatureMapSpec& spec);
StateVector encode_zz(std::span<const double> x, const FeatureMapSpec& spec);
StateVector encode(std::span<const double> x, const FeatureMapSpec& spec);

/// gram(i, j) = |<phi(a_i)|phi(b_j)>|^2.
Matrix quantum_kernel(const Matrix& a, const Matrix& b, const FeatureMapSpec& spec);
/// Symmetric training Gram; the lower triangle mirrors the upper.
Matrix quantum_kernel(const Matrix& a, const FeatureMapSpec& spec);

/// Per-dimension min-max map of training data onto [0, pi]. Values
/// outside the training range are clipped; constant dimensions map to 0.
struct AngleScaler {
  std::vector<double> mins;
  std::vector<double> maxs;

  static AngleScaler fit(const Matrix& features);
  Matrix apply(const Matrix& features) const;
  DataTable apply(const DataTable& table) const;
};

// ---------------------------------------------------------------------------
// Quantum-kernel SVM

class QsvcModel final : public Model {
 public:
  QsvcModel(FeatureMapSpec spec, std::vector<StateVector> support_states, std::unique_ptr<SvmModel> svm);

  ModelKind kind() const override { return ModelKind::kQsvc; }
  std::size_t n_features() const override { return spec_.n_qubits; }
  using Model::predict;
  Label predict(std::span<const double> x) const override;
  double decision(std::span<const double> x) const;

  const SvmModel& svm() const noexcept { return *svm_; }
  const FeatureMapSpec& spec() const noexcept { return spec_; }

 private:
  FeatureMapSpec spec_;
  std::vector<StateVector> support_states_;
  std::unique_ptr<SvmModel> svm_;
};

/// SVM on the fidelity Gram of the encoded training rows. Features must
/// already be in the encoding range.
std::unique_ptr<QsvcModel> train_qsvc(const DataTable& train, const FeatureMapSpec& spec, double c = 1.0);

// ---------------------------------------------------------------------------
// Variational classifier

/// Angle encoding followed by strongly entangling layers; readout <Z_0>.
/// Each layer applies ROT(w[l][q][0..2]) on every qubit, then (when
/// `entangle` and n_qubits > 1) CNOT(q, (q + r) mod n) for each q with
/// range r = (l mod (n - 1)) + 1.
struct VqcModel {
  std::size_t n_qubits = 2;
  std::size_t n_layers = 4;
  std::vector<double> weights;  // n_layers * n_qubits * 3, layer-major
  FeatureMapSpec encoding{FeatureMapKind::kAngle, 2, 1, RotationAxis::kY};
  bool entangle = true;

  std::size_t parameter_count() const noexcept { return n_layers * n_qubits * 3; }
  double& weight(std::size_t layer, std::size_t qubit, std::size_t k) {
    return weights[(layer * n_qubits + qubit) * 3 + k];
  }
  double weight(std::size_t layer, std::size_t qubit, std::size_t k) const {
    return weights[(layer * n_qubits + qubit) * 3 + k];
  }
};

/// Weights drawn uniformly from [0, 2 pi).
VqcModel init_vqc(std::size_t n_qubits, std::size_t n_layers, std::uint64_t seed);

Circuit vqc_circuit(const VqcModel& model, std::span<const double> x);

/// <Z_0> in [-1, 1]. Throws std::invalid_argument on a dimension mismatch
/// or a wrong weight count.
double vqc_forward(const VqcModel& model, std::span<const double> x);

/// d<Z_0>/d(weight) for every weight by the parameter-shift rule,
/// [f(w + pi/2) - f(w - pi/2)] / 2.
std::vector<double> vqc_expectation_gradient(const VqcModel& model, std::span<const double> x);

/// Mean square loss (1/m) sum (<Z_0>(x_i) - t_i)^2 against +-1 targets.
double vqc_loss(const VqcModel& model, const Matrix& x, std::span<const double> targets);

/// Gradient of vqc_loss, summed in sample order.
std::vector<double> vqc_gradient(const VqcModel& model, const Matrix& x, std::span<const double> targets);

/// Class 1 -> +1, class 0 -> -1.
std::vector<double> vqc_targets(std::span<const Label> labels);

struct VqcTrainOptions {
  std::size_t n_layers = 4;
  std::size_t epochs = 100;
  double learning_rate = 0.5;
  std::uint64_t seed = 0;
  /// Reject a step that raises the loss and halve the learning rate.
  bool lr_halving = true;
};

struct VqcTrainResult {
  VqcModel model;                  // lowest-loss weights seen
  std::vector<double> loss_trace;  // loss after each epoch, entry 0 = initial
};

/// Full-batch gradient descent on vqc_loss. Features must already be in
/// the encoding range. Throws std::runtime_error on a non-finite loss.
VqcTrainResult train_vqc(const DataTable& train, const VqcTrainOptions& options);

class VqcClassifier final : public Model {
 public:
  explicit VqcClassifier(VqcModel model) : model_(std::move(model)) {}

  ModelKind kind() const override { return ModelKind::kVqc; }
  std::size_t n_features() const override { return model_.n_qubits; }
  using Model::predict;
  /// Class 1 when <Z_0> > 0.
  Label predict(std::span<const double> x) const override;

  const VqcModel& model() const noexcept { return model_; }

 private:
  VqcModel model_;
};

}  // namespace qbench
