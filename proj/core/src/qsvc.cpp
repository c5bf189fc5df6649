#include <stdexcept>

#include "qbench/quantum.hpp"

namespace qbench {

QsvcModel::QsvcModel(FeatureMapSpec spec, std::vector<StateVector> support_states, std::unique_ptr<SvmModel> svm)
    : spec_(spec), support_states_(std::move(support_states)), svm_(std::move(svm)) {}

double QsvcModel::decision(std::span<const double> x) const {
  check_dimension(x.size());
  const StateVector phi = encode(x, spec_);
  std::vector<double> row(support_states_.size());
  for (std::size_t s = 0; s < row.size(); ++s) row[s] = fidelity(support_states_[s], phi);
  return svm_->decision_from_kernel(row);
}

Label QsvcModel::predict(std::span<const double> x) const { return decision(x) > 0.0 ? 1 : 0; }

std::unique_ptr<QsvcModel> train_qsvc(const DataTable& train, const FeatureMapSpec& spec, double c) {
  train.validate();
  if (train.n_features() != spec.n_qubits)
    throw std::invalid_argument("train_qsvc: feature dimension must equal the qubit count");
  const Matrix gram = quantum_kernel(train.features, spec);
  SvmOptions options;
  options.c = c;
  auto svm = train_svm_precomputed(gram, train.labels, options);
  std::vector<StateVector> states;
  states.reserve(svm->support_indices().size());
  for (std::size_t i : svm->support_indices()) states.push_back(encode(train.features.row(i), spec));
  return std::make_unique<QsvcModel>(spec, std::move(states), std::move(svm));
}

}  // namespace qbench
