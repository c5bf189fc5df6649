#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <utility>

#include "qbench/classical.hpp"

namespace qbench {

KnnModel::KnnModel(DataTable train, std::size_t k) : train_(std::move(train)), k_(k) {}

Label KnnModel::predict(std::span<const double> x) const {
  check_dimension(x.size());
  const std::size_t n = train_.n_samples();
  std::vector<std::pair<double, std::size_t>> dist(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = train_.features.row(i);
    double s = 0.0;
    for (std::size_t j = 0; j < row.size(); ++j) {
      const double d = row[j] - x[j];
      s += d * d;
    }
    dist[i] = {s, i};
  }
  // Pairs compare by distance then index, which fixes tie order.
  std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k_), dist.end());
  std::size_t ones = 0;
  for (std::size_t i = 0; i < k_; ++i) ones += train_.labels[dist[i].second] == 1 ? 1 : 0;
  return 2 * ones > k_ ? 1 : 0;
}

std::unique_ptr<KnnModel> train_knn(const DataTable& train, std::size_t k) {
  train.validate();
  if (k == 0) throw std::invalid_argument("train_knn: k must be positive");
  if (k > train.n_samples()) throw std::invalid_argument("train_knn: k exceeds the number of training samples");
  return std::make_unique<KnnModel>(train, k);
}

}  // namespace qbench
