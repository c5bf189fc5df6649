#include <gtest/gtest.h>

#include <sstream>

#include "qbench/errors.hpp"
#include "qbench/pipeline.hpp"

using qbench::ConfigError;
using qbench::RunConfig;

TEST(Config, ParsesKeysAndComments) {
  std::istringstream in(
      "# run\n"
      "dataset = bank_fraud\n"
      "path = /data/fraud.csv   # trailing comment\n"
      "path.uci_credit = /data/uci.csv\n"
      "reducer = pca\n"
      "models = lr, qsvc ,vqa\n"
      "seed = 42\n"
      "folds=5\n"
      "cv_all = yes\n"
      "featuremap = angle\n"
      "vqc_lr = 0.25\n");
  const RunConfig c = qbench::parse_config(in);
  EXPECT_EQ(c.dataset, "bank_fraud");
  EXPECT_EQ(c.paths.at("bank_fraud"), "/data/fraud.csv");
  EXPECT_EQ(c.paths.at("uci_credit"), "/data/uci.csv");
  EXPECT_EQ(c.reducer, qbench::ReductionMethod::kPca);
  EXPECT_EQ(c.models, (std::vector<qbench::ModelKind>{qbench::ModelKind::kLogistic, qbench::ModelKind::kQsvc,
                                                       qbench::ModelKind::kVqc}));
  EXPECT_EQ(c.seed, 42u);
  EXPECT_EQ(c.folds, 5u);
  EXPECT_TRUE(c.cv_all);
  EXPECT_EQ(c.featuremap, qbench::FeatureMapKind::kAngle);
  EXPECT_EQ(c.vqc_lr, 0.25);
}

TEST(Config, RoundTripsThroughText) {
  RunConfig c;
  c.dataset = "custom";
  c.paths["custom"] = "/tmp/x.csv";
  c.target = "label";
  c.drop = {"a", "b"};
  c.reducer = qbench::ReductionMethod::kSkpp;
  c.seed = 7;
  c.vqc_lr = 0.1;
  std::stringstream ss;
  qbench::write_config(c, ss);
  const RunConfig back = qbench::parse_config(ss);
  std::stringstream again;
  qbench::write_config(back, again);
  EXPECT_EQ(ss.str(), again.str());
  EXPECT_EQ(back.drop, c.drop);
  EXPECT_EQ(back.vqc_lr, 0.1);
}

TEST(Config, RejectsBadValues) {
  RunConfig c;
  EXPECT_THROW(qbench::set_config_value(c, "colour", "red"), ConfigError);
  EXPECT_THROW(qbench::set_config_value(c, "seed", "-1"), ConfigError);
  EXPECT_THROW(qbench::set_config_value(c, "seed", "12x"), ConfigError);
  EXPECT_THROW(qbench::set_config_value(c, "reducer", "tsne"), ConfigError);
  EXPECT_THROW(qbench::set_config_value(c, "models", "lr,rf"), ConfigError);
  EXPECT_THROW(qbench::set_config_value(c, "cv_all", "maybe"), ConfigError);
  std::istringstream in("seed 4\n");
  EXPECT_THROW(qbench::parse_config(in), ConfigError);
  EXPECT_THROW(qbench::load_config("/nonexistent.cfg"), ConfigError);
}

TEST(Config, QuantumDimensionInvariant) {
  RunConfig c;
  c.reducer = qbench::ReductionMethod::kLdaSplit;
  EXPECT_NO_THROW(qbench::validate_config(c));
  c.n_qubits = 3;
  EXPECT_THROW(qbench::validate_config(c), ConfigError);
  c.models = {qbench::ModelKind::kLogistic};
  EXPECT_NO_THROW(qbench::validate_config(c));
  c.models = {qbench::ModelKind::kQsvc};
  c.reducer = qbench::ReductionMethod::kPca;
  EXPECT_NO_THROW(qbench::validate_config(c));
  c.reducer = qbench::ReductionMethod::kLda;
  EXPECT_THROW(qbench::validate_config(c), ConfigError);
}

TEST(Config, OtherChecks) {
  RunConfig c;
  c.folds = 1;
  EXPECT_THROW(qbench::validate_config(c), ConfigError);
  c = RunConfig{};
  c.models.clear();
  EXPECT_THROW(qbench::validate_config(c), ConfigError);
  c = RunConfig{};
  c.dataset = "mine";
  EXPECT_THROW(qbench::validate_config(c), ConfigError);
  c.target = "y";
  EXPECT_NO_THROW(qbench::validate_config(c));
  c = RunConfig{};
  c.n_test = 0;
  EXPECT_THROW(qbench::validate_config(c), ConfigError);
  c.cv_all = true;
  EXPECT_NO_THROW(qbench::validate_config(c));
}

TEST(Config, MissingPathIsConfigError) {
  RunConfig c;
  EXPECT_THROW(qbench::run_benchmark(c), ConfigError);
}

TEST(Schema, BuiltIns) {
  qbench::DatasetSchema s;
  ASSERT_TRUE(qbench::builtin_schema("uci_credit", s));
  EXPECT_EQ(s.target, "default.payment.next.month");
  EXPECT_EQ(s.drop, std::vector<std::string>{"ID"});
  ASSERT_TRUE(qbench::builtin_schema("bank_fraud", s));
  EXPECT_EQ(s.target, "targets");
  EXPECT_FALSE(qbench::builtin_schema("other", s));
}

TEST(Sweep, CartesianShape) {
  RunConfig base;
  base.models = {qbench::ModelKind::kLogistic};
  const auto configs = qbench::sweep_configs(base, {"uci_credit", "bank_fraud"});
  ASSERT_EQ(configs.size(), 8u);
  for (const auto& c : configs) EXPECT_EQ(c.models.size(), 7u);
  EXPECT_TRUE(qbench::run_matrix({}).empty());
}
