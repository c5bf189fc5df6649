#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "qbench/quantum.hpp"

namespace qbench {

std::string_view to_string(FeatureMapKind kind) { return kind == FeatureMapKind::kAngle ? "angle" : "zz"; }

FeatureMapKind parse_feature_map_kind(std::string_view name) {
  if (name == "angle") return FeatureMapKind::kAngle;
  if (name == "zz") return FeatureMapKind::kZz;
  throw std::invalid_argument("unknown feature map '" + std::string(name) + "'");
}

namespace {

void check_dimension(std::span<const double> x, const FeatureMapSpec& spec) {
  if (x.size() != spec.n_qubits)
    throw std::invalid_argument("encoding: feature dimension " + std::to_string(x.size()) + " != qubit count " +
                                std::to_string(spec.n_qubits));
}

}  // namespace

Circuit angle_encoding_circuit(std::span<const double> x, const FeatureMapSpec& spec) {
  check_dimension(x, spec);
  Circuit c;
  for (std::size_t q = 0; q < x.size(); ++q) {
    switch (spec.axis) {
      case RotationAxis::kX: c.push_back(Gate::rx(q, x[q])); break;
      case RotationAxis::kY: c.push_back(Gate::ry(q, x[q])); break;
      case RotationAxis::kZ: c.push_back(Gate::rz(q, x[q])); break;
    }
  }
  return c;
}

Circuit zz_feature_map_circuit(std::span<const double> x, const FeatureMapSpec& spec) {
  check_dimension(x, spec);
  if (spec.reps == 0) throw std::invalid_argument("zz feature map: reps must be at least 1");
  constexpr double pi = std::numbers::pi;
  const std::size_t n = x.size();
  Circuit c;
  for (std::size_t r = 0; r < spec.reps; ++r) {
    for (std::size_t q = 0; q < n; ++q) c.push_back(Gate::h(q));
    for (std::size_t q = 0; q < n; ++q) c.push_back(Gate::phase(q, 2.0 * x[q]));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        c.push_back(Gate::cnot(i, j));
        c.push_back(Gate::phase(j, 2.0 * (pi - x[i]) * (pi - x[j])));
        c.push_back(Gate::cnot(i, j));
      }
    }
  }
  return c;
}

StateVector encode_angle(std::span<const double> x, const FeatureMapSpec& spec) {
  return run_circuit(angle_encoding_circuit(x, spec), spec.n_qubits);
}

StateVector encode_zz(std::span<const double> x, const FeatureMapSpec& spec) {
  return run_circuit(zz_feature_map_circuit(x, spec), spec.n_qubits);
}

StateVector encode(std::span<const double> x, const FeatureMapSpec& spec) {
  return spec.kind == FeatureMapKind::kAngle ? encode_angle(x, spec) : encode_zz(x, spec);
}

namespace {

std::vector<StateVector> encode_rows(const Matrix& m, const FeatureMapSpec& spec) {
  std::vector<StateVector> out;
  out.reserve(m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r) out.push_back(encode(m.row(r), spec));
  return out;
}

}  // namespace

Matrix quantum_kernel(const Matrix& a, const Matrix& b, const FeatureMapSpec& spec) {
  const auto sa = encode_rows(a, spec);
  const auto sb = encode_rows(b, spec);
  Matrix g(a.rows(), b.rows());
  for (std::size_t i = 0; i < sa.size(); ++i)
    for (std::size_t j = 0; j < sb.size(); ++j) g(i, j) = fidelity(sa[i], sb[j]);
  return g;
}

Matrix quantum_kernel(const Matrix& a, const FeatureMapSpec& spec) {
  const auto s = encode_rows(a, spec);
  Matrix g(a.rows(), a.rows());
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t j = i; j < s.size(); ++j) {
      const double f = fidelity(s[i], s[j]);
      g(i, j) = f;
      g(j, i) = f;
    }
  }
  return g;
}

AngleScaler AngleScaler::fit(const Matrix& features) {
  if (features.rows() == 0) throw std::invalid_argument("AngleScaler: empty matrix");
  AngleScaler s;
  s.mins.assign(features.cols(), 0.0);
  s.maxs.assign(features.cols(), 0.0);
  for (std::size_t c = 0; c < features.cols(); ++c) {
    s.mins[c] = s.maxs[c] = features(0, c);
    for (std::size_t r = 1; r < features.rows(); ++r) {
      s.mins[c] = std::min(s.mins[c], features(r, c));
      s.maxs[c] = std::max(s.maxs[c], features(r, c));
    }
  }
  return s;
}

Matrix AngleScaler::apply(const Matrix& features) const {
  if (features.cols() != mins.size()) throw std::invalid_argument("AngleScaler: dimension mismatch");
  Matrix out(features.rows(), features.cols());
  for (std::size_t r = 0; r < features.rows(); ++r) {
    for (std::size_t c = 0; c < features.cols(); ++c) {
      const double span = maxs[c] - mins[c];
      if (!(span > 0.0)) continue;
      const double u = std::clamp((features(r, c) - mins[c]) / span, 0.0, 1.0);
      out(r, c) = u * std::numbers::pi;
    }
  }
  return out;
}

DataTable AngleScaler::apply(const DataTable& table) const {
  DataTable out = table;
  out.features = apply(table.features);
  return out;
}

}  // namespace qbench
