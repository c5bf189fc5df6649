#include <stdexcept>
#include <string>

#include "qbench/classical.hpp"

namespace qbench {

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::kLogistic: return "lr";
    case ModelKind::kKnn: return "knn";
    case ModelKind::kCart: return "cart";
    case ModelKind::kNaiveBayes: return "nb";
    case ModelKind::kSvm: return "svm";
    case ModelKind::kQsvc: return "qsvc";
    case ModelKind::kVqc: return "vqc";
  }
  return "?";
}

ModelKind parse_model_kind(std::string_view name) {
  if (name == "lr") return ModelKind::kLogistic;
  if (name == "knn") return ModelKind::kKnn;
  if (name == "cart") return ModelKind::kCart;
  if (name == "nb") return ModelKind::kNaiveBayes;
  if (name == "svm") return ModelKind::kSvm;
  if (name == "qsvc") return ModelKind::kQsvc;
  if (name == "vqc" || name == "vqa") return ModelKind::kVqc;
  throw std::invalid_argument("unknown model '" + std::string(name) + "'");
}

bool is_quantum(ModelKind kind) { return kind == ModelKind::kQsvc || kind == ModelKind::kVqc; }

std::vector<Label> Model::predict(const Matrix& x) const {
  std::vector<Label> out(x.rows());
  for (std::size_t r = 0; r < x.rows(); ++r) out[r] = predict(x.row(r));
  return out;
}

void Model::check_dimension(std::size_t got) const {
  if (got != n_features())
    throw std::invalid_argument(std::string(to_string(kind())) + ": expected " + std::to_string(n_features()) +
                                " features, got " + std::to_string(got));
}

}  // namespace qbench
