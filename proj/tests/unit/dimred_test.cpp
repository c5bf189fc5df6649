#include <Eigen/Dense>
#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "oracles.hpp"
#include "qbench/dimred.hpp"

using qbench::DataTable;
using qbench::Matrix;

namespace {

DataTable random_table(std::size_t n, std::size_t d, std::uint64_t seed) {
  qbench::Rng rng(seed);
  DataTable t;
  t.features = Matrix(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    t.labels.push_back(static_cast<int>(i % 3 == 0));
    for (std::size_t j = 0; j < d; ++j) t.features(i, j) = rng.normal() * (1.0 + j) + (t.labels[i] ? 0.8 : 0.0) * j;
  }
  for (std::size_t j = 0; j < d; ++j) t.feature_names.push_back("f" + std::to_string(j));
  return t;
}

Eigen::MatrixXd covariance(const Matrix& x) {
  Eigen::MatrixXd m(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = 0; j < x.cols(); ++j) m(i, j) = x(i, j);
  const Eigen::MatrixXd c = m.rowwise() - m.colwise().mean();
  return c.transpose() * c / static_cast<double>(x.rows());
}

// Largest principal angle between the column spans of two orthonormal bases.
// Frobenius norm of the part of span(a) outside span(b); both orthonormal.
double principal_angle(const Matrix& a, const Matrix& b) {
  return qbench::frobenius_norm(a - b * (b.transposed() * a));
}

}  // namespace

TEST(Kurtosis, ClosedForms) {
  EXPECT_DOUBLE_EQ(qbench::kurtosis(std::vector<double>{-1, 1}), 1.0);
  EXPECT_DOUBLE_EQ(qbench::kurtosis(std::vector<double>{0, 0, 3, -3}), 2.0);
  EXPECT_THROW(qbench::kurtosis(std::vector<double>{2, 2, 2}), std::domain_error);
  EXPECT_THROW(qbench::kurtosis(std::vector<double>{1}), std::domain_error);
}

TEST(Kurtosis, GaussianLimit) {
  qbench::Rng rng(1);
  std::vector<double> z(100000);
  for (auto& v : z) v = rng.normal();
  EXPECT_NEAR(qbench::kurtosis(z), 3.0, 0.1);
}

TEST(Kurtosis, AtLeastOne) {
  qbench::Rng rng(4);
  for (int t = 0; t < 50; ++t) {
    std::vector<double> z(2 + rng.index(20));
    for (auto& v : z) v = rng.uniform(-3, 3);
    EXPECT_GE(qbench::kurtosis(z), 1.0 - 1e-12);
  }
}

TEST(Pca, LineDirection) {
  DataTable t;
  t.features = Matrix{{-2, -2}, {-1, -1}, {0, 0}, {1, 1}, {2, 2}};
  t.labels = {0, 0, 1, 1, 1};
  const auto r = qbench::fit_pca(t, 1);
  EXPECT_NEAR(r.projection(0, 0), 1 / std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(r.projection(1, 0), 1 / std::sqrt(2.0), 1e-12);
  EXPECT_EQ(r.metadata.at("degenerate"), 0.0);
}

TEST(Pca, IsotropicFlaggedDegenerate) {
  DataTable t;
  t.features = Matrix{{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
  t.labels = {0, 1, 0, 1};
  const auto r = qbench::fit_pca(t, 2);
  EXPECT_EQ(r.metadata.at("degenerate"), 1.0);
  const Matrix ptp = r.projection.transposed() * r.projection;
  EXPECT_LT(qbench::frobenius_norm(ptp - Matrix::identity(2)), 1e-12);
}

TEST(Pca, MatchesCovarianceOracle) {
  const auto t = random_table(100, 5, 17);
  const auto r = qbench::fit_pca(t, 2);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ref(covariance(t.features));
  Matrix top(5, 2);
  for (std::size_t j = 0; j < 2; ++j)
    for (std::size_t i = 0; i < 5; ++i) top(i, j) = ref.eigenvectors()(static_cast<int>(i), 4 - static_cast<int>(j));
  EXPECT_LT(principal_angle(r.projection, top), 1e-8);
  for (std::size_t j = 0; j < 2; ++j) {
    auto col = r.projection.column(j);
    double d = 0;
    for (std::size_t i = 0; i < 5; ++i) d += col[i] * top(i, j);
    EXPECT_NEAR(std::abs(d), 1.0, 1e-8);
  }
}

TEST(Pca, OutputsUncorrelated) {
  const auto t = random_table(120, 6, 3);
  const auto r = qbench::fit_pca(t, 3);
  const Matrix y = qbench::transform(r, t.features);
  const auto c = covariance(y);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (i != j) EXPECT_LT(std::abs(c(i, j)), 1e-6);
}

TEST(Pca, MeanMapsToZero) {
  const auto t = random_table(40, 4, 8);
  const auto r = qbench::fit_pca(t, 2);
  const auto y = qbench::transform(r, std::span<const double>(r.mean));
  EXPECT_NEAR(y[0], 0.0, 1e-12);
  EXPECT_NEAR(y[1], 0.0, 1e-12);
}

TEST(Svd, SpansPcaSubspaceOnCentredData) {
  auto t = random_table(80, 5, 12);
  const auto [centred, scaler] = qbench::standardize(t);
  const auto s = qbench::fit_svd(centred, 2);
  const auto p = qbench::fit_pca(centred, 2);
  EXPECT_LT(principal_angle(s.projection, p.projection), 1e-6);
  for (double m : s.mean) EXPECT_EQ(m, 0.0);
}

TEST(Svd, RankDeficientPads) {
  DataTable t;
  t.features = Matrix{{1, 2, 3}};
  t.labels = {1};
  const auto r = qbench::fit_svd(t, 2);
  EXPECT_EQ(r.metadata.at("rank_deficient"), 1.0);
  const Matrix ptp = r.projection.transposed() * r.projection;
  EXPECT_LT(qbench::frobenius_norm(ptp - Matrix::identity(2)), 1e-10);
}

TEST(Reducer, UnitColumnsAndBounds) {
  const auto t = random_table(60, 4, 2);
  for (const auto& r : {qbench::fit_pca(t, 2), qbench::fit_svd(t, 2), qbench::fit_lda_split(t, 0),
                        qbench::fit_skpp(t, 2, {.restarts = 2, .seed = 1})}) {
    for (std::size_t j = 0; j < r.components(); ++j) EXPECT_NEAR(qbench::norm2(r.projection.column(j)), 1.0, 1e-8);
    EXPECT_LE(r.components(), t.n_features());
  }
  EXPECT_EQ(qbench::fit_lda(t).components(), 1u);
  EXPECT_THROW(qbench::fit_pca(t, 5), std::invalid_argument);
}

TEST(Reducer, IdentityAndMismatch) {
  const auto r = qbench::identity_reducer(3);
  const std::vector<double> x{1.5, -2, 7};
  EXPECT_EQ(qbench::transform(r, std::span<const double>(x)), x);
  EXPECT_THROW(qbench::transform(r, std::span<const double>(x.data(), 2)), std::invalid_argument);
}

TEST(Reducer, AffineTransform) {
  const auto t = random_table(50, 4, 6);
  const auto r = qbench::fit_pca(t, 2);
  const std::vector<double> a{1, 2, 3, 4};
  const std::vector<double> b{-1, 0.5, 2, 0};
  std::vector<double> mix(4);
  for (std::size_t i = 0; i < 4; ++i) mix[i] = 0.3 * a[i] + 0.7 * b[i];
  const auto ya = qbench::transform(r, std::span<const double>(a));
  const auto yb = qbench::transform(r, std::span<const double>(b));
  const auto ym = qbench::transform(r, std::span<const double>(mix));
  for (std::size_t k = 0; k < 2; ++k) EXPECT_NEAR(ym[k], 0.3 * ya[k] + 0.7 * yb[k], 1e-12);
}

TEST(Reducer, TextRoundTrip) {
  const auto t = random_table(30, 4, 9);
  for (const auto& r : {qbench::fit_pca(t, 2), qbench::fit_lda_split(t, 3)}) {
    std::stringstream ss;
    qbench::write_reducer(r, ss);
    EXPECT_EQ(qbench::read_reducer(ss), r);
  }
}

TEST(Skpp, SingleFeature) {
  DataTable t;
  t.features = Matrix{{1}, {2}, {4}, {-1}, {0}, {3}};
  t.labels = {0, 1, 0, 1, 0, 1};
  const auto r = qbench::fit_skpp(t, 1, {});
  EXPECT_NEAR(r.projection(0, 0), 1.0, 1e-12);
}

TEST(Skpp, FindsBimodalAxis) {
  qbench::Rng rng(10);
  DataTable t;
  t.features = Matrix(400, 2);
  for (std::size_t i = 0; i < 400; ++i) {
    t.features(i, 0) = rng.normal();
    t.features(i, 1) = rng.uniform() < 0.5 ? -1.0 : 1.0;
    t.labels.push_back(static_cast<int>(i % 2));
  }
  const auto r = qbench::fit_skpp(t, 1, {.restarts = 5, .seed = 3});
  EXPECT_GT(std::abs(r.projection(1, 0)), 0.99);
  const double grid = oracle::grid_best([&](auto w) { return oracle::class_weighted_kurtosis(t, w); }, false);
  EXPECT_LT(grid, 1.1);
  EXPECT_LE(r.metadata.at("index_0"), grid * 1.02);
}

TEST(Skpp, MatchesGridOracleOnSeededTable) {
  const auto t4 = random_table(200, 4, 31);
  // The grid covers 2D directions, so compare on the first two columns.
  DataTable t = t4;
  t.features = t4.features.column_block(0, 2);
  t.feature_names.resize(2);
  const auto r = qbench::fit_skpp(t, 1, {.restarts = 5, .seed = 7});
  const double achieved = oracle::class_weighted_kurtosis(t, r.projection.column(0));
  const double grid = oracle::grid_best([&](auto w) { return oracle::class_weighted_kurtosis(t, w); }, false);
  EXPECT_NEAR(achieved, r.metadata.at("index_0"), 1e-9);
  EXPECT_LE(achieved, grid * 1.02);
  const auto r4 = qbench::fit_skpp(t4, 2, {.restarts = 3, .seed = 7});
  EXPECT_NEAR(qbench::dot(r4.projection.column(0), r4.projection.column(1)), 0.0, 1e-10);
}

TEST(Lda, ClosedFormIsotropic) {
  qbench::Rng rng(13);
  DataTable t;
  t.features = Matrix(2000, 4);
  for (std::size_t i = 0; i < 2000; ++i) {
    const int y = static_cast<int>(i % 2);
    t.labels.push_back(y);
    t.features(i, 0) = (y ? 1 : -1) + rng.normal();
    t.features(i, 1) = (y ? 1 : -1) + rng.normal();
    t.features(i, 2) = rng.normal();
    t.features(i, 3) = rng.normal();
  }
  const auto r = qbench::fit_lda_split(t, 0);
  ASSERT_EQ(r.components(), 2u);
  EXPECT_NEAR(std::abs(r.projection(0, 0)), 1 / std::sqrt(2.0), 0.05);
  EXPECT_NEAR(std::abs(r.projection(1, 0)), 1 / std::sqrt(2.0), 0.05);
  EXPECT_EQ(r.projection(2, 0), 0.0);
  EXPECT_EQ(r.projection(0, 1), 0.0);
  EXPECT_EQ(r.metadata.at("weak_half_1"), 1.0);
  EXPECT_EQ(r.metadata.at("weak_half_0"), 0.0);
}

TEST(Lda, IdenticalMeans) {
  DataTable t;
  t.features = Matrix{{1, 1}, {-1, -1}, {1, -1}, {-1, 1}};
  t.labels = {0, 0, 1, 1};
  EXPECT_THROW(qbench::fit_lda(t), std::domain_error);
  const auto r = qbench::fit_lda_split(t, 0);
  EXPECT_EQ(r.metadata.at("degenerate_half_0"), 1.0);
  EXPECT_EQ(r.metadata.at("degenerate_half_1"), 1.0);
}

TEST(Lda, OddWidthSplit) {
  const auto t = random_table(90, 5, 4);
  const auto r = qbench::fit_lda_split(t, 0);
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_EQ(r.projection(i, 0) != 0.0 || i >= 3, true);
    if (i < 3) EXPECT_EQ(r.projection(i, 1), 0.0);
    else EXPECT_EQ(r.projection(i, 0), 0.0);
  }
}

TEST(Lda, HalvesMatchFisherGridOracle) {
  qbench::Rng rng(77);
  DataTable t;
  t.features = Matrix(300, 6);
  for (std::size_t i = 0; i < 300; ++i) {
    const int y = rng.uniform() < 0.3;
    t.labels.push_back(y);
    for (std::size_t d = 0; d < 6; ++d) t.features(i, d) = rng.normal() * (1 + 0.3 * d) + (y ? 0.4 * (d % 3) : 0.0);
  }
  // Six columns give halves of three; check each on its first two columns.
  for (std::size_t h = 0; h < 2; ++h) {
    DataTable half = t;
    half.features = t.features.column_block(3 * h, 2);
    half.feature_names = {"a", "b"};
    const auto r = qbench::fit_lda(half);
    const double got = oracle::fisher(half.features, half.labels, r.projection.column(0));
    const double grid = oracle::grid_best([&](auto w) { return oracle::fisher(half.features, half.labels, w); }, true);
    EXPECT_GE(got, grid * 0.99);
  }
}

TEST(Lda, BeatsRandomDirections) {
  const auto t = random_table(200, 6, 21);
  const auto r = qbench::fit_lda_split(t, 0);
  qbench::Rng rng(1);
  for (std::size_t h = 0; h < 2; ++h) {
    const Matrix half = t.features.column_block(3 * h, 3);
    std::vector<double> w(3);
    for (std::size_t i = 0; i < 3; ++i) w[i] = r.projection(3 * h + i, h);
    const double fitted = oracle::fisher(half, t.labels, w);
    for (int k = 0; k < 1000; ++k) {
      std::vector<double> u(3);
      for (auto& v : u) v = rng.normal();
      EXPECT_GE(fitted, oracle::fisher(half, t.labels, u) - 1e-9);
    }
  }
}

TEST(Lda, RandomSplitUsesSeed) {
  const auto t = random_table(100, 6, 5);
  const auto a = qbench::fit_lda_split(t, 1, qbench::FeatureSplit::kRandom);
  const auto b = qbench::fit_lda_split(t, 1, qbench::FeatureSplit::kRandom);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.metadata.at("random_split"), 1.0);
}
