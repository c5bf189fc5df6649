#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "qbench/classical.hpp"

namespace qbench {

NaiveBayesModel::NaiveBayesModel(std::array<ClassStats, 2> stats) : stats_(std::move(stats)) {}

namespace {

double log_joint(const NaiveBayesModel::ClassStats& s, std::span<const double> x) {
  double lp = std::log(s.prior);
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double d = x[j] - s.means[j];
    lp += -0.5 * std::log(2.0 * std::numbers::pi * s.variances[j]) - 0.5 * d * d / s.variances[j];
  }
  return lp;
}

}  // namespace

double NaiveBayesModel::posterior(std::span<const double> x) const {
  check_dimension(x.size());
  const double l0 = log_joint(stats_[0], x);
  const double l1 = log_joint(stats_[1], x);
  const double m = std::max(l0, l1);
  const double e0 = std::exp(l0 - m);
  const double e1 = std::exp(l1 - m);
  return e1 / (e0 + e1);
}

Label NaiveBayesModel::predict(std::span<const double> x) const {
  check_dimension(x.size());
  return log_joint(stats_[1], x) > log_joint(stats_[0], x) ? 1 : 0;
}

std::unique_ptr<NaiveBayesModel> train_nb(const DataTable& train) {
  train.validate();
  const std::size_t d = train.n_features();
  std::array<NaiveBayesModel::ClassStats, 2> stats;
  for (Label c : {0, 1}) {
    auto& s = stats[static_cast<std::size_t>(c)];
    s.means.assign(d, 0.0);
    s.variances.assign(d, 0.0);
    double count = 0.0;
    for (std::size_t i = 0; i < train.n_samples(); ++i) {
      if (train.labels[i] != c) continue;
      count += 1.0;
      const auto row = train.features.row(i);
      for (std::size_t j = 0; j < d; ++j) s.means[j] += row[j];
    }
    if (count == 0.0) throw std::invalid_argument("train_nb: both classes must be present");
    for (double& m : s.means) m /= count;
    for (std::size_t i = 0; i < train.n_samples(); ++i) {
      if (train.labels[i] != c) continue;
      const auto row = train.features.row(i);
      for (std::size_t j = 0; j < d; ++j) s.variances[j] += (row[j] - s.means[j]) * (row[j] - s.means[j]);
    }
    for (double& v : s.variances) v = std::max(v / count, kNaiveBayesVarianceFloor);
    s.prior = count / static_cast<double>(train.n_samples());
  }
  return std::make_unique<NaiveBayesModel>(std::move(stats));
}

}  // namespace qbench
