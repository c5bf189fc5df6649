#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "oracles.hpp"
#include "qbench/classical.hpp"
#include "qbench/errors.hpp"

using qbench::DataTable;
using qbench::Matrix;

namespace {

double accuracy(const qbench::Model& m, const DataTable& t) {
  const auto p = m.predict(t.features);
  std::size_t hit = 0;
  for (std::size_t i = 0; i < p.size(); ++i) hit += p[i] == t.labels[i];
  return static_cast<double>(hit) / static_cast<double>(p.size());
}

DataTable xor_table() {
  DataTable t;
  t.features = Matrix{{0, 0}, {1, 1}, {0, 1}, {1, 0}};
  t.labels = {0, 0, 1, 1};
  return t;
}

}  // namespace

TEST(Logistic, SeparableOneDimensional) {
  DataTable t;
  t.features = Matrix{{-3}, {-2}, {-1}, {-0.5}, {0.5}, {1}, {2}, {3}};
  t.labels = {0, 0, 0, 0, 1, 1, 1, 1};
  const auto m = qbench::train_logistic(t);
  EXPECT_EQ(accuracy(*m, t), 1.0);
  EXPECT_GT(m->coefficients()[0], 0.0);
}

TEST(Logistic, RejectsSingleClass) {
  DataTable t;
  t.features = Matrix{{1}, {2}};
  t.labels = {1, 1};
  EXPECT_THROW(qbench::train_logistic(t), std::invalid_argument);
}

TEST(Logistic, ZeroLogitIsHalf) {
  const qbench::LogisticModel m(0.0, {2.0}, true, 0);
  EXPECT_EQ(m.probability(std::vector<double>{0.0}), 0.5);
  EXPECT_EQ(qbench::sigmoid(0.0), 0.5);
}

TEST(Logistic, GradientVanishesWhenConverged) {
  const auto t = oracle::blobs(60, 3, 0.4, 1.0, 8);
  qbench::LogisticOptions o;
  o.max_iter = 20000;
  o.gradient_tol = 1e-5;
  const auto m = qbench::train_logistic(t, o);
  ASSERT_TRUE(m->converged());
  const auto g = qbench::logistic_gradient(t, m->intercept(), m->coefficients());
  EXPECT_LT(qbench::norm2(g), 1e-4);
}

TEST(Logistic, GradientMatchesFiniteDifference) {
  const auto t = oracle::blobs(20, 2, 0.5, 1.0, 4);
  const std::vector<double> beta{0.3, -0.7};
  const double b0 = 0.2;
  auto loss = [&](double i0, const std::vector<double>& b) {
    double s = 0;
    for (std::size_t r = 0; r < t.n_samples(); ++r) {
      const double p = 1.0 / (1.0 + std::exp(-(i0 + b[0] * t.features(r, 0) + b[1] * t.features(r, 1))));
      s -= t.labels[r] ? std::log(p) : std::log(1 - p);
    }
    return s / static_cast<double>(t.n_samples());
  };
  const auto g = qbench::logistic_gradient(t, b0, beta);
  const double h = 1e-6;
  EXPECT_NEAR(g[0], (loss(b0 + h, beta) - loss(b0 - h, beta)) / (2 * h), 1e-7);
  for (std::size_t k = 0; k < 2; ++k) {
    auto p = beta, m = beta;
    p[k] += h;
    m[k] -= h;
    EXPECT_NEAR(g[k + 1], (loss(b0, p) - loss(b0, m)) / (2 * h), 1e-7);
  }
}

TEST(Knn, ExactMatchAndGlobalVote) {
  const auto t = oracle::blobs(10, 2, 2.0, 0.5, 1);
  const auto one = qbench::train_knn(t, 1);
  for (std::size_t i = 0; i < t.n_samples(); ++i) EXPECT_EQ(one->predict(t.features.row(i)), t.labels[i]);
  DataTable skew = t;
  skew.labels.assign(t.n_samples(), 0);
  skew.labels[0] = 1;
  const auto all = qbench::train_knn(skew, skew.n_samples());
  for (std::size_t i = 0; i < t.n_samples(); ++i) EXPECT_EQ(all->predict(t.features.row(i)), 0);
  EXPECT_THROW(qbench::train_knn(t, 0), std::invalid_argument);
  EXPECT_THROW(qbench::train_knn(t, 100), std::invalid_argument);
}

TEST(Knn, MatchesBruteForceSort) {
  const auto t = oracle::blobs(40, 2, 0.6, 1.0, 5);
  const auto m = qbench::train_knn(t, 7);
  qbench::Rng rng(6);
  for (int q = 0; q < 100; ++q) {
    const std::vector<double> x{rng.uniform(-3, 3), rng.uniform(-3, 3)};
    std::vector<std::pair<double, std::size_t>> d;
    for (std::size_t i = 0; i < t.n_samples(); ++i)
      d.emplace_back(std::pow(x[0] - t.features(i, 0), 2) + std::pow(x[1] - t.features(i, 1), 2), i);
    std::sort(d.begin(), d.end());
    int votes = 0;
    for (int k = 0; k < 7; ++k) votes += t.labels[d[static_cast<std::size_t>(k)].second];
    EXPECT_EQ(m->predict(x), votes >= 4 ? 1 : 0);
  }
}

TEST(Knn, VoteTieGoesToZero) {
  DataTable t;
  t.features = Matrix{{-1}, {1}};
  t.labels = {1, 0};
  EXPECT_EQ(qbench::train_knn(t, 2)->predict(std::vector<double>{0.9}), 0);
}

TEST(Cart, SolvesXor) {
  const auto m = qbench::train_cart(xor_table(), qbench::SplitCriterion::kGini, 2);
  EXPECT_EQ(accuracy(*m, xor_table()), 1.0);
  const auto e = qbench::train_cart(xor_table(), qbench::SplitCriterion::kEntropy);
  EXPECT_EQ(accuracy(*e, xor_table()), 1.0);
}

TEST(Cart, PureInputIsLeaf) {
  DataTable t;
  t.features = Matrix{{1, 2}, {3, 4}, {5, 6}};
  t.labels = {1, 1, 1};
  const auto m = qbench::train_cart(t);
  EXPECT_EQ(m->nodes().size(), 1u);
  EXPECT_EQ(m->nodes()[0].probability, 1.0);
}

TEST(Cart, Impurities) {
  const std::vector<double> half{0.5, 0.5};
  EXPECT_DOUBLE_EQ(qbench::entropy(half), 1.0);
  EXPECT_DOUBLE_EQ(qbench::gini(half), 0.5);
  const std::vector<double> pure{1.0, 0.0};
  EXPECT_EQ(qbench::entropy(pure), 0.0);
}

TEST(Cart, TreeInvariantsAndDepthMonotone) {
  const auto t = oracle::blobs(80, 3, 0.3, 1.0, 12);
  double prev = 0.0;
  for (std::size_t depth = 1; depth <= 8; ++depth) {
    const auto m = qbench::train_cart(t, qbench::SplitCriterion::kGini, depth);
    EXPECT_LE(m->depth(), depth);
    for (const auto& n : m->nodes()) {
      if (n.feature < 0) {
        EXPECT_GE(n.probability, 0.0);
        EXPECT_LE(n.probability, 1.0);
      } else {
        EXPECT_GE(n.left, 0);
        EXPECT_GE(n.right, 0);
      }
    }
    const double acc = accuracy(*m, t);
    EXPECT_GE(acc, prev);
    prev = acc;
  }
}

TEST(NaiveBayes, SymmetricTie) {
  DataTable t;
  t.features = Matrix{{-2}, {0}, {0}, {2}};
  t.labels = {0, 0, 1, 1};
  const auto m = qbench::train_nb(t);
  EXPECT_NEAR(m->posterior(std::vector<double>{0.0}), 0.5, 1e-15);
  EXPECT_EQ(m->predict(std::vector<double>{0.0}), 0);
}

TEST(NaiveBayes, ClassMeanWins) {
  const auto t = oracle::blobs(30, 2, 3.0, 0.5, 2);
  const auto m = qbench::train_nb(t);
  EXPECT_EQ(m->predict(std::vector<double>{3, 3}), 1);
  EXPECT_EQ(m->predict(std::vector<double>{-3, -3}), 0);
}

TEST(NaiveBayes, MatchesHandEvaluatedBayes) {
  const auto t = oracle::blobs(25, 2, 0.7, 1.2, 19);
  const auto m = qbench::train_nb(t);
  double mean[2][2] = {}, var[2][2] = {}, n[2] = {};
  for (std::size_t i = 0; i < t.n_samples(); ++i) {
    n[t.labels[i]] += 1;
    for (int d = 0; d < 2; ++d) mean[t.labels[i]][d] += t.features(i, static_cast<std::size_t>(d));
  }
  for (int c = 0; c < 2; ++c)
    for (int d = 0; d < 2; ++d) mean[c][d] /= n[c];
  for (std::size_t i = 0; i < t.n_samples(); ++i)
    for (int d = 0; d < 2; ++d) var[t.labels[i]][d] += std::pow(t.features(i, static_cast<std::size_t>(d)) - mean[t.labels[i]][d], 2);
  for (int c = 0; c < 2; ++c)
    for (int d = 0; d < 2; ++d) var[c][d] = std::max(var[c][d] / n[c], 1e-9);
  qbench::Rng rng(3);
  for (int q = 0; q < 20; ++q) {
    const std::vector<double> x{rng.uniform(-2, 2), rng.uniform(-2, 2)};
    double joint[2];
    for (int c = 0; c < 2; ++c) {
      joint[c] = n[c] / (n[0] + n[1]);
      for (int d = 0; d < 2; ++d)
        joint[c] *= std::exp(-std::pow(x[static_cast<std::size_t>(d)] - mean[c][d], 2) / (2 * var[c][d])) /
                    std::sqrt(2 * std::numbers::pi * var[c][d]);
    }
    EXPECT_NEAR(m->posterior(x), joint[1] / (joint[0] + joint[1]), 1e-12);
  }
}

TEST(Svm, SeparableLinear) {
  const auto t = oracle::blobs(20, 2, 3.0, 0.5, 3);
  qbench::SvmOptions o;
  o.kernel.type = qbench::KernelType::kLinear;
  const auto m = qbench::train_svm(t, o);
  EXPECT_EQ(accuracy(*m, t), 1.0);
  for (std::size_t i = 0; i < t.n_samples(); ++i) {
    const double f = m->decision(t.features.row(i));
    EXPECT_GT((t.labels[i] ? 1.0 : -1.0) * f, 0.0);
  }
}

TEST(Svm, ContradictoryPoints) {
  DataTable t;
  t.features = Matrix{{1, 1}, {1, 1}, {0, 0}, {0, 0}};
  t.labels = {0, 1, 0, 1};
  const auto m = qbench::train_svm(t);
  EXPECT_TRUE(std::isfinite(m->solution().objective));
  for (std::size_t i = 0; i < 4; ++i) {
    const auto l = m->predict(t.features.row(i));
    EXPECT_TRUE(l == 0 || l == 1);
  }
}

TEST(Svm, DualMatchesProjectedGradientOracle) {
  const auto t = oracle::blobs(20, 2, 0.5, 1.0, 40);
  for (auto type : {qbench::KernelType::kLinear, qbench::KernelType::kRbf}) {
    qbench::SvmOptions o;
    o.kernel.type = type;
    o.kernel.gamma = 0.5;
    const auto m = qbench::train_svm(t, o);
    Matrix k(40, 40);
    std::vector<double> y(40);
    for (std::size_t i = 0; i < 40; ++i) {
      y[i] = t.labels[i] ? 1.0 : -1.0;
      for (std::size_t j = 0; j < 40; ++j) k(i, j) = qbench::kernel_value(o.kernel, t.features.row(i), t.features.row(j));
    }
    const double ref = oracle::svm_dual_oracle(k, y, 1.0);
    EXPECT_NEAR(m->solution().objective, ref, 1e-3);
    EXPECT_NEAR(oracle::dual_objective(k, y, m->solution().alpha), m->solution().objective, 1e-9);
  }
}

TEST(Svm, DualFeasibility) {
  const auto t = oracle::blobs(50, 3, 0.3, 1.0, 41);
  const auto m = qbench::train_svm(t);
  const auto& s = m->solution();
  double balance = 0.0;
  for (std::size_t i = 0; i < s.alpha.size(); ++i) {
    EXPECT_GE(s.alpha[i], 0.0);
    EXPECT_LE(s.alpha[i], 1.0 + 1e-12);
    balance += s.alpha[i] * s.y[i];
  }
  EXPECT_NEAR(balance, 0.0, 1e-6);
}

TEST(Svm, DefaultGamma) {
  const auto t = oracle::blobs(10, 2, 1.0, 1.0, 9);
  const auto m = qbench::train_svm(t);
  double mean = 0, var = 0;
  for (double v : t.features.data()) mean += v;
  mean /= 40;
  for (double v : t.features.data()) var += (v - mean) * (v - mean);
  var /= 40;
  EXPECT_NEAR(m->kernel().gamma, 1.0 / (2 * var), 1e-12);
}

TEST(Svm, PrecomputedMatchesRbf) {
  const auto t = oracle::blobs(15, 2, 0.8, 1.0, 14);
  qbench::SvmOptions o;
  o.kernel.gamma = 0.7;
  const auto direct = qbench::train_svm(t, o);
  Matrix k(30, 30);
  for (std::size_t i = 0; i < 30; ++i)
    for (std::size_t j = 0; j < 30; ++j) k(i, j) = qbench::kernel_value(o.kernel, t.features.row(i), t.features.row(j));
  const auto pre = qbench::train_svm_precomputed(k, t.labels);
  EXPECT_NEAR(pre->solution().objective, direct->solution().objective, 1e-12);
  for (std::size_t i = 0; i < 30; ++i) {
    std::vector<double> row;
    for (auto s : pre->support_indices()) row.push_back(k(i, s));
    EXPECT_EQ(pre->predict_from_kernel(row), direct->predict(t.features.row(i)));
  }
}

TEST(Svm, RejectsBadGram) {
  const std::vector<int> y{0, 1};
  EXPECT_THROW(qbench::train_svm_precomputed(Matrix{{1, 2}, {2, 1}}, y), std::invalid_argument);
  EXPECT_THROW(qbench::train_svm_precomputed(Matrix{{1, 0.5}, {0.4, 1}}, y), std::invalid_argument);
}

TEST(Models, DimensionMismatchRejected) {
  const auto t = oracle::blobs(10, 2, 1.0, 1.0, 1);
  const std::vector<double> x{1, 2, 3};
  EXPECT_THROW(qbench::train_logistic(t)->predict(x), std::invalid_argument);
  EXPECT_THROW(qbench::train_knn(t, 3)->predict(x), std::invalid_argument);
  EXPECT_THROW(qbench::train_cart(t)->predict(x), std::invalid_argument);
  EXPECT_THROW(qbench::train_nb(t)->predict(x), std::invalid_argument);
  EXPECT_THROW(qbench::train_svm(t)->predict(x), std::invalid_argument);
}

TEST(Models, NamesRoundTrip) {
  for (auto k : {qbench::ModelKind::kLogistic, qbench::ModelKind::kKnn, qbench::ModelKind::kCart,
                 qbench::ModelKind::kNaiveBayes, qbench::ModelKind::kSvm, qbench::ModelKind::kQsvc,
                 qbench::ModelKind::kVqc})
    EXPECT_EQ(qbench::parse_model_kind(qbench::to_string(k)), k);
  EXPECT_THROW(qbench::parse_model_kind("rf"), std::invalid_argument);
}
