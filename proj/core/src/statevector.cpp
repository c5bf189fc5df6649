#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>
#include <string>

#include "qbench/quantum.hpp"

namespace qbench {

std::string_view to_string(GateKind kind) {
  switch (kind) {
    case GateKind::kRx: return "RX";
    case GateKind::kRy: return "RY";
    case GateKind::kRz: return "RZ";
    case GateKind::kH: return "H";
    case GateKind::kCnot: return "CNOT";
    case GateKind::kCz: return "CZ";
    case GateKind::kPhase: return "PHASE";
    case GateKind::kRot: return "ROT";
  }
  return "?";
}

namespace {

using M2 = std::array<Amplitude, 4>;

M2 mul(const M2& a, const M2& b) {
  return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3], a[2] * b[0] + a[3] * b[2],
          a[2] * b[1] + a[3] * b[3]};
}

M2 ry(double t) {
  const double c = std::cos(t / 2);
  const double s = std::sin(t / 2);
  return {c, -s, s, c};
}

M2 rz(double t) { return {std::polar(1.0, -t / 2), 0.0, 0.0, std::polar(1.0, t / 2)}; }

}  // namespace

std::array<Amplitude, 4> single_qubit_matrix(const Gate& gate) {
  const double t = gate.angles[0];
  switch (gate.kind) {
    case GateKind::kRx: {
      const double c = std::cos(t / 2);
      const Amplitude s(0.0, -std::sin(t / 2));
      return {c, s, s, c};
    }
    case GateKind::kRy: return ry(t);
    case GateKind::kRz: return rz(t);
    case GateKind::kH: {
      const double r = 1.0 / std::sqrt(2.0);
      return {r, r, r, -r};
    }
    case GateKind::kPhase: return {1.0, 0.0, 0.0, std::polar(1.0, t)};
    case GateKind::kRot: return mul(rz(gate.angles[2]), mul(ry(gate.angles[1]), rz(gate.angles[0])));
    case GateKind::kCnot:
    case GateKind::kCz: break;
  }
  throw std::invalid_argument("single_qubit_matrix: two-qubit gate");
}

StateVector::StateVector(std::size_t n_qubits) : n_qubits_(n_qubits) {
  if (n_qubits == 0 || n_qubits > 20) throw std::invalid_argument("StateVector: qubit count must be in [1, 20]");
  amplitudes_.assign(std::size_t{1} << n_qubits, 0.0);
  amplitudes_[0] = 1.0;
}

StateVector::StateVector(std::size_t n_qubits, std::vector<Amplitude> amplitudes)
    : n_qubits_(n_qubits), amplitudes_(std::move(amplitudes)) {
  if (n_qubits == 0 || n_qubits > 20 || amplitudes_.size() != (std::size_t{1} << n_qubits))
    throw std::invalid_argument("StateVector: amplitude count must be 2^n_qubits");
}

void StateVector::apply(const Gate& gate) {
  if (gate.target >= n_qubits_ || (gate.two_qubit() && gate.control >= n_qubits_))
    throw std::out_of_range("StateVector: qubit index " + std::to_string(std::max(gate.target, gate.control)) +
                            " out of range for " + std::to_string(n_qubits_) + " qubits");
  const std::size_t tmask = std::size_t{1} << (n_qubits_ - 1 - gate.target);
  const std::size_t dim = amplitudes_.size();

  if (gate.two_qubit()) {
    if (gate.control == gate.target) throw std::invalid_argument("StateVector: control equals target");
    const std::size_t cmask = std::size_t{1} << (n_qubits_ - 1 - gate.control);
    for (std::size_t i = 0; i < dim; ++i) {
      if (!(i & cmask)) continue;
      if (gate.kind == GateKind::kCnot) {
        if (!(i & tmask)) std::swap(amplitudes_[i], amplitudes_[i | tmask]);
      } else if (i & tmask) {
        amplitudes_[i] = -amplitudes_[i];
      }
    }
    return;
  }

  const auto m = single_qubit_matrix(gate);
  for (std::size_t i = 0; i < dim; ++i) {
    if (i & tmask) continue;
    const Amplitude a0 = amplitudes_[i];
    const Amplitude a1 = amplitudes_[i | tmask];
    amplitudes_[i] = m[0] * a0 + m[1] * a1;
    amplitudes_[i | tmask] = m[2] * a0 + m[3] * a1;
  }
}

void StateVector::apply(const Circuit& circuit) {
  for (const auto& g : circuit) apply(g);
}

double StateVector::norm_squared() const {
  double s = 0.0;
  for (const auto& a : amplitudes_) s += std::norm(a);
  return s;
}

double StateVector::expectation_z(std::size_t q) const {
  if (q >= n_qubits_) throw std::out_of_range("expectation_z: qubit index out of range");
  const std::size_t mask = std::size_t{1} << (n_qubits_ - 1 - q);
  double e = 0.0;
  for (std::size_t i = 0; i < amplitudes_.size(); ++i) e += (i & mask ? -1.0 : 1.0) * std::norm(amplitudes_[i]);
  return e;
}

StateVector apply_gate(StateVector state, const Gate& gate) {
  state.apply(gate);
  return state;
}

StateVector run_circuit(const Circuit& circuit, std::size_t n_qubits) {
  StateVector s(n_qubits);
  s.apply(circuit);
  return s;
}

Amplitude inner_product(const StateVector& a, const StateVector& b) {
  if (a.dimension() != b.dimension()) throw std::invalid_argument("inner_product: register size mismatch");
  Amplitude s = 0.0;
  const auto x = a.amplitudes();
  const auto y = b.amplitudes();
  for (std::size_t i = 0; i < x.size(); ++i) s += std::conj(x[i]) * y[i];
  return s;
}

double fidelity(const StateVector& a, const StateVector& b) { return std::norm(inner_product(a, b)); }

void write_circuit_trace(const Circuit& circuit, std::ostream& out) {
  const auto old = out.precision(17);
  for (const auto& g : circuit) {
    out << to_string(g.kind);
    if (g.two_qubit()) {
      out << " q" << g.control << " q" << g.target;
    } else {
      out << " q" << g.target;
      const int n_angles = g.kind == GateKind::kRot ? 3 : (g.kind == GateKind::kH ? 0 : 1);
      for (int k = 0; k < n_angles; ++k) out << ' ' << g.angles[static_cast<std::size_t>(k)];
    }
    out << '\n';
  }
  out.precision(old);
}

}  // namespace qbench
