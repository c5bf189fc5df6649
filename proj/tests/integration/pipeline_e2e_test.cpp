#include <gtest/gtest.h>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "qbench/errors.hpp"
#include "qbench/pipeline.hpp"
#include "synthetic.hpp"

namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("qbench_e2e_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

qbench::RunConfig small_config(const fs::path& csv) {
  qbench::RunConfig c;
  c.paths["uci_credit"] = csv;
  c.n_train = 60;
  c.n_test = 30;
  c.folds = 3;
  c.vqc_epochs = 15;
  c.skpp_restarts = 2;
  c.seed = 5;
  return c;
}

}  // namespace

TEST(Pipeline, SmokeTwentyRows) {
  const auto dir = scratch("smoke");
  synthetic::write_credit_csv(dir / "d.csv", 20, 6, 1, 2.0, 0.5);
  qbench::RunConfig c;
  c.paths["uci_credit"] = dir / "d.csv";
  c.n_train = 14;
  c.n_test = 6;
  c.folds = 2;
  c.vqc_epochs = 10;
  const auto t0 = std::chrono::steady_clock::now();
  const auto run = qbench::run_benchmark(c);
  EXPECT_LT(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(), 5.0);
  EXPECT_EQ(run.dataset.rows, 20u);
  EXPECT_EQ(run.dataset.columns, 6u);
  ASSERT_EQ(run.reports.size(), 7u);
  for (const auto& r : run.reports) {
    if (r.failed()) {
      ADD_FAILURE() << r.model << ": " << r.failure;
      continue;
    }
    EXPECT_EQ(r.folds.size(), r.model == "vqc" ? 1u : 2u);
    for (const auto& s : r.summary) EXPECT_TRUE(std::isfinite(s.mean));
  }
}

TEST(Pipeline, FitsOnlySeeTrainingRows) {
  const auto dir = scratch("leak");
  synthetic::write_credit_csv(dir / "d.csv", 200, 8, 2);
  const auto c = small_config(dir / "d.csv");
  const auto run = qbench::run_benchmark(c);
  const auto table = qbench::load_csv(dir / "d.csv", "default.payment.next.month", std::vector<std::string>{"ID"}).table;
  const auto split = qbench::subsample(table.labels, c.n_train, c.n_test, c.seed);
  const auto plan = qbench::kfold(c.n_train, c.folds, c.seed);
  ASSERT_EQ(run.fits.size(), c.folds + 1);
  for (std::size_t f = 0; f < c.folds; ++f) {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
    for (auto i : plan.folds[f].train_indices) train.push_back(split.train_indices[i]);
    for (auto i : plan.folds[f].test_indices) test.push_back(split.train_indices[i]);
    EXPECT_EQ(run.fits[f].fit_hash, qbench::index_fingerprint(train));
    EXPECT_EQ(run.fits[f].eval_hash, qbench::index_fingerprint(test));
  }
  EXPECT_EQ(run.fits.back().fit_hash, qbench::index_fingerprint(split.train_indices));
  EXPECT_EQ(run.fits.back().eval_hash, qbench::index_fingerprint(split.test_indices));
}

TEST(Pipeline, DeterministicOutputs) {
  const auto dir = scratch("det");
  synthetic::write_credit_csv(dir / "d.csv", 150, 6, 3);
  auto c = small_config(dir / "d.csv");
  const auto configs = qbench::sweep_configs(c, {"uci_credit"});
  qbench::write_outputs(qbench::run_matrix(configs), dir / "a");
  qbench::write_outputs(qbench::run_matrix(configs), dir / "b");
  for (const char* f : {"results.csv", "manifest.txt", "tables/uci_credit_pca.txt", "tables/uci_credit_lda_split.txt"}) {
    EXPECT_TRUE(fs::exists(dir / "a" / f)) << f;
    EXPECT_EQ(slurp(dir / "a" / f), slurp(dir / "b" / f)) << f;
  }
  const std::string csv = slurp(dir / "a" / "results.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + 4 * 7 * 5);
}

TEST(Pipeline, FailureIsolation) {
  const auto dir = scratch("fail");
  synthetic::write_credit_csv(dir / "d.csv", 40, 4, 4, 2.0, 0.5);
  auto c = small_config(dir / "d.csv");
  c.n_train = 10;
  c.n_test = 5;
  c.folds = 2;
  c.reducer = qbench::ReductionMethod::kPca;
  c.models = {qbench::ModelKind::kKnn, qbench::ModelKind::kNaiveBayes};
  const auto run = qbench::run_benchmark(c);
  ASSERT_EQ(run.reports.size(), 2u);
  EXPECT_TRUE(run.reports[0].failed());
  EXPECT_EQ(run.reports[0].failure.rfind("train: ", 0), 0u) << run.reports[0].failure;
  EXPECT_FALSE(run.reports[1].failed()) << run.reports[1].failure;

  auto broken = c;
  broken.paths["uci_credit"] = dir / "missing.csv";
  const auto runs = qbench::run_matrix({broken, c});
  ASSERT_EQ(runs.size(), 2u);
  EXPECT_TRUE(runs[0].failed());
  EXPECT_FALSE(runs[1].failed());
  EXPECT_THROW(qbench::run_benchmark(broken), qbench::DataError);
}

TEST(Pipeline, IdentityReducerDimensionCheck) {
  const auto dir = scratch("dims");
  synthetic::write_credit_csv(dir / "d.csv", 120, 5, 6);
  auto c = small_config(dir / "d.csv");
  c.reducer = qbench::ReductionMethod::kIdentity;
  EXPECT_THROW(qbench::run_benchmark(c), qbench::ConfigError);
  c.models = {qbench::ModelKind::kLogistic, qbench::ModelKind::kCart};
  const auto run = qbench::run_benchmark(c);
  EXPECT_FALSE(run.reports[0].failed());
}

TEST(Pipeline, CvAllAndFullData) {
  const auto dir = scratch("cv");
  synthetic::write_credit_csv(dir / "d.csv", 120, 4, 7);
  auto c = small_config(dir / "d.csv");
  c.models = {qbench::ModelKind::kVqc, qbench::ModelKind::kNaiveBayes};
  c.cv_all = true;
  c.full_data = true;
  const auto run = qbench::run_benchmark(c);
  EXPECT_EQ(run.reports[0].folds.size(), 3u);
  EXPECT_FALSE(run.reports[0].single_split);
  EXPECT_EQ(run.fits.size(), 6u);
  EXPECT_EQ(run.fits[3].train_rows, 80u);
}
