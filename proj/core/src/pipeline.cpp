#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "qbench/errors.hpp"
#include "qbench/pipeline.hpp"

namespace qbench {

bool builtin_schema(const std::string& dataset, DatasetSchema& out) {
  if (dataset == "uci_credit") {
    out = {"default.payment.next.month", {"ID"}};
    return true;
  }
  if (dataset == "bank_fraud") {
    out = {"targets", {"Unnamed: 0"}};
    return true;
  }
  return false;
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(value);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::uint64_t parse_count(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    if (!value.empty() && value[0] == '-') throw std::invalid_argument("negative");
    v = std::stoull(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != value.size()) throw ConfigError(key + ": expected a non-negative integer, got '" + value + "'");
  return v;
}

double parse_real(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != value.size()) throw ConfigError(key + ": expected a number, got '" + value + "'");
  return v;
}

bool parse_flag(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  throw ConfigError(key + ": expected true or false, got '" + value + "'");
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) out += (out.empty() ? "" : ",") + s;
  return out;
}

std::string exact(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void set_config_value(RunConfig& c, const std::string& key, const std::string& raw) {
  const std::string value = trim(raw);
  try {
    if (key == "dataset") {
      if (value.empty()) throw ConfigError("dataset: empty name");
      c.dataset = value;
    } else if (key == "path") {
      c.paths[c.dataset] = value;
    } else if (key.rfind("path.", 0) == 0) {
      c.paths[key.substr(5)] = value;
    } else if (key == "target") {
      c.target = value;
    } else if (key == "drop") {
      c.drop = split_list(value);
    } else if (key == "reducer") {
      c.reducer = parse_reduction_method(value);
    } else if (key == "models") {
      c.models.clear();
      for (const auto& m : split_list(value)) c.models.push_back(parse_model_kind(m));
    } else if (key == "n_train") {
      c.n_train = parse_count(key, value);
    } else if (key == "n_test") {
      c.n_test = parse_count(key, value);
    } else if (key == "n_qubits") {
      c.n_qubits = parse_count(key, value);
    } else if (key == "folds") {
      c.folds = parse_count(key, value);
    } else if (key == "seed") {
      c.seed = parse_count(key, value);
    } else if (key == "stratified") {
      c.stratified = parse_flag(key, value);
    } else if (key == "standardize") {
      c.standardize = parse_flag(key, value);
    } else if (key == "cv_all") {
      c.cv_all = parse_flag(key, value);
    } else if (key == "full_data") {
      c.full_data = parse_flag(key, value);
    } else if (key == "featuremap") {
      c.featuremap = parse_feature_map_kind(value);
    } else if (key == "reps") {
      c.reps = parse_count(key, value);
    } else if (key == "vqc_layers") {
      c.vqc_layers = parse_count(key, value);
    } else if (key == "vqc_epochs") {
      c.vqc_epochs = parse_count(key, value);
    } else if (key == "vqc_lr") {
      c.vqc_lr = parse_real(key, value);
    } else if (key == "skpp_restarts") {
      c.skpp_restarts = parse_count(key, value);
    } else if (key == "svm_c") {
      c.svm_c = parse_real(key, value);
    } else if (key == "out_dir") {
      c.out_dir = value;
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(key + ": " + e.what());
  }
}

RunConfig parse_config(std::istream& in, RunConfig base) {
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    set_config_value(base, trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  return base;
}

RunConfig load_config(const std::filesystem::path& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  return parse_config(in, std::move(base));
}

void write_config(const RunConfig& c, std::ostream& out) {
  std::vector<std::string> models;
  for (auto m : c.models) models.emplace_back(to_string(m));
  out << "dataset = " << c.dataset << '\n';
  for (const auto& [name, p] : c.paths) out << "path." << name << " = " << p.string() << '\n';
  if (!c.target.empty()) out << "target = " << c.target << '\n';
  if (!c.drop.empty()) out << "drop = " << join(c.drop) << '\n';
  out << "reducer = " << to_string(c.reducer) << '\n'
      << "models = " << join(models) << '\n'
      << "n_train = " << c.n_train << '\n'
      << "n_test = " << c.n_test << '\n'
      << "n_qubits = " << c.n_qubits << '\n'
      << "folds = " << c.folds << '\n'
      << "seed = " << c.seed << '\n'
      << "stratified = " << (c.stratified ? "true" : "false") << '\n'
      << "standardize = " << (c.standardize ? "true" : "false") << '\n'
      << "cv_all = " << (c.cv_all ? "true" : "false") << '\n'
      << "full_data = " << (c.full_data ? "true" : "false") << '\n'
      << "featuremap = " << to_string(c.featuremap) << '\n'
      << "reps = " << c.reps << '\n'
      << "vqc_layers = " << c.vqc_layers << '\n'
      << "vqc_epochs = " << c.vqc_epochs << '\n'
      << "vqc_lr = " << exact(c.vqc_lr) << '\n'
      << "skpp_restarts = " << c.skpp_restarts << '\n'
      << "svm_c = " << exact(c.svm_c) << '\n'
      << "out_dir = " << c.out_dir.string() << '\n';
}

std::size_t reducer_output_dimension(const RunConfig& c) {
  switch (c.reducer) {
    case ReductionMethod::kLda: return 1;
    case ReductionMethod::kLdaSplit: return 2;
    case ReductionMethod::kIdentity: return 0;
    case ReductionMethod::kSvd:
    case ReductionMethod::kPca:
    case ReductionMethod::kSkpp: return c.n_qubits;
  }
  return 0;
}

void validate_config(const RunConfig& c) {
  if (c.models.empty()) throw ConfigError("no models selected");
  if (c.n_train == 0) throw ConfigError("n_train must be positive");
  if (c.folds < 2) throw ConfigError("folds must be at least 2");
  if (c.n_qubits == 0 || c.n_qubits > 20) throw ConfigError("n_qubits must be in [1, 20]");
  if (c.reps == 0) throw ConfigError("reps must be at least 1");
  if (c.vqc_layers == 0) throw ConfigError("vqc_layers must be at least 1");
  if (!(c.vqc_lr > 0.0)) throw ConfigError("vqc_lr must be positive");
  if (!(c.svm_c > 0.0)) throw ConfigError("svm_c must be positive");
  if (c.reducer == ReductionMethod::kSkpp && c.skpp_restarts == 0) throw ConfigError("skpp_restarts must be positive");
  DatasetSchema schema;
  if (c.target.empty() && !builtin_schema(c.dataset, schema))
    throw ConfigError("dataset '" + c.dataset + "' has no built-in schema; set target");
  const bool quantum = std::any_of(c.models.begin(), c.models.end(), is_quantum);
  const bool vqc_holdout =
      !c.cv_all && std::find(c.models.begin(), c.models.end(), ModelKind::kVqc) != c.models.end();
  if (vqc_holdout && c.n_test == 0) throw ConfigError("the VQC is scored on the held-out part; n_test must be positive");
  const std::size_t dim = reducer_output_dimension(c);
  if (quantum && dim != 0 && dim != c.n_qubits)
    throw ConfigError("reducer " + std::string(to_string(c.reducer)) + " yields " + std::to_string(dim) +
                      " dimensions but quantum models need n_qubits = " + std::to_string(c.n_qubits));
}

namespace {

struct Prepared {
  DataTable train;
  DataTable test;
  DataTable quantum_train;
  DataTable quantum_test;
  std::string error;
};

Reducer fit_reducer(const RunConfig& c, const DataTable& train, std::uint64_t seed) {
  switch (c.reducer) {
    case ReductionMethod::kSvd: return fit_svd(train, c.n_qubits);
    case ReductionMethod::kPca: return fit_pca(train, c.n_qubits);
    case ReductionMethod::kSkpp: {
      SkppOptions o;
      o.restarts = c.skpp_restarts;
      o.seed = seed;
      return fit_skpp(train, c.n_qubits, o);
    }
    case ReductionMethod::kLda: return fit_lda(train);
    case ReductionMethod::kLdaSplit: return fit_lda_split(train, seed);
    case ReductionMethod::kIdentity: return identity_reducer(train.n_features());
  }
  throw std::logic_error("unhandled reducer");
}

Prepared prepare(const DataTable& table, std::span<const std::size_t> train_idx,
                 std::span<const std::size_t> test_idx, const RunConfig& c, bool quantum, std::uint64_t seed) {
  Prepared p;
  std::string stage = "scale";
  try {
    p.train = table.subset(train_idx);
    p.test = table.subset(test_idx);
    if (c.standardize) {
      auto [scaled, scaler] = standardize(p.train);
      p.train = std::move(scaled);
      p.test = scaler.apply(p.test);
    }
    stage = "reduce";
    const Reducer r = fit_reducer(c, p.train, seed);
    p.train = transform(r, p.train);
    p.test = transform(r, p.test);
    if (quantum) {
      stage = "encode";
      const AngleScaler a = AngleScaler::fit(p.train.features);
      p.quantum_train = a.apply(p.train);
      p.quantum_test = a.apply(p.test);
    }
  } catch (const std::exception& e) {
    p.error = stage + ": " + e.what();
  }
  return p;
}

std::unique_ptr<Model> fit_model(ModelKind kind, const DataTable& train, const RunConfig& c) {
  switch (kind) {
    case ModelKind::kLogistic: return train_logistic(train);
    case ModelKind::kKnn: return train_knn(train, 7);
    case ModelKind::kCart: return train_cart(train);
    case ModelKind::kNaiveBayes: return train_nb(train);
    case ModelKind::kSvm: {
      SvmOptions o;
      o.c = c.svm_c;
      return train_svm(train, o);
    }
    case ModelKind::kQsvc:
      return train_qsvc(train, FeatureMapSpec{c.featuremap, c.n_qubits, c.reps, RotationAxis::kY}, c.svm_c);
    case ModelKind::kVqc: {
      VqcTrainOptions o;
      o.n_layers = c.vqc_layers;
      o.epochs = c.vqc_epochs;
      o.learning_rate = c.vqc_lr;
      o.seed = c.seed;
      return std::make_unique<VqcClassifier>(train_vqc(train, o).model);
    }
  }
  throw std::logic_error("unhandled model");
}

MetricSet score(ModelKind kind, const Prepared& p, const RunConfig& c) {
  const bool q = is_quantum(kind);
  const DataTable& train = q ? p.quantum_train : p.train;
  const DataTable& test = q ? p.quantum_test : p.test;
  std::unique_ptr<Model> model;
  try {
    model = fit_model(kind, train, c);
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string("train: ") + e.what());
  }
  try {
    return metrics(confusion(test.labels, model->predict(test.features)));
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string("evaluate: ") + e.what());
  }
}

}  // namespace

RunManifest run_benchmark(const RunConfig& config) {
  validate_config(config);
  RunManifest run;
  run.config = config;

  DatasetSchema schema;
  builtin_schema(config.dataset, schema);
  if (!config.target.empty()) schema.target = config.target;
  if (!config.drop.empty()) schema.drop = config.drop;
  const auto path_it = config.paths.find(config.dataset);
  if (path_it == config.paths.end()) throw ConfigError("no path given for dataset '" + config.dataset + "'");

  LoadReport load;
  try {
    load = load_csv(path_it->second, schema.target, schema.drop);
  } catch (const DataError& e) {
    throw DataError(std::string("load: ") + e.what());
  }
  const DataTable& table = load.table;
  run.dataset = {table.n_samples(), table.n_features(), load.rows_dropped, table.positive_fraction()};

  const bool any_quantum = std::any_of(config.models.begin(), config.models.end(), is_quantum);
  if (any_quantum && config.reducer == ReductionMethod::kIdentity && table.n_features() != config.n_qubits)
    throw ConfigError("reducer none keeps " + std::to_string(table.n_features()) +
                      " features but quantum models need n_qubits = " + std::to_string(config.n_qubits));

  const SplitPlan split = subsample(table.labels, config.n_train, config.n_test, config.seed, config.stratified);

  auto uses_cv = [&](ModelKind m) { return m != ModelKind::kVqc || config.cv_all; };
  const bool any_cv = std::any_of(config.models.begin(), config.models.end(), uses_cv);
  const bool any_holdout = !std::all_of(config.models.begin(), config.models.end(), uses_cv);

  // Classical models cross-validate over the whole table with full_data;
  // quantum models always stay on the subsample.
  auto cv_plan = [&](const std::vector<std::size_t>& pool, std::vector<Prepared>& out,
                     std::vector<FitRecord>& fits, bool quantum) {
    if (config.folds > pool.size())
      throw DataError("kfold: " + std::to_string(config.folds) + " folds for " + std::to_string(pool.size()) + " rows");
    const FoldPlan plan = kfold(pool.size(), config.folds, config.seed);
    for (std::size_t f = 0; f < plan.folds.size(); ++f) {
      std::vector<std::size_t> tr;
      std::vector<std::size_t> te;
      for (auto i : plan.folds[f].train_indices) tr.push_back(pool[i]);
      for (auto i : plan.folds[f].test_indices) te.push_back(pool[i]);
      out.push_back(prepare(table, tr, te, config, quantum, config.seed + f));
      fits.push_back({"fold " + std::to_string(f + 1), tr.size(), index_fingerprint(tr), index_fingerprint(te)});
    }
  };

  std::vector<Prepared> folds;
  std::vector<Prepared> full_folds;
  std::vector<FitRecord> full_fits;
  if (any_cv) cv_plan(split.train_indices, folds, run.fits, any_quantum);
  const bool classical_full = config.full_data && std::any_of(config.models.begin(), config.models.end(),
                                                              [](ModelKind m) { return !is_quantum(m); });
  if (classical_full) {
    std::vector<std::size_t> all(table.n_samples());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    cv_plan(all, full_folds, full_fits, false);
    for (auto& f : full_fits) f.split = "full " + f.split;
    run.fits.insert(run.fits.end(), full_fits.begin(), full_fits.end());
  }
  Prepared holdout;
  if (any_holdout) {
    holdout = prepare(table, split.train_indices, split.test_indices, config, true, config.seed);
    run.fits.push_back({"holdout", split.train_indices.size(), index_fingerprint(split.train_indices),
                        index_fingerprint(split.test_indices)});
  }

  for (ModelKind kind : config.models) {
    EvalReport report;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      std::vector<MetricSet> sets;
      if (!uses_cv(kind)) {
        if (!holdout.error.empty()) throw std::runtime_error(holdout.error);
        sets.push_back(score(kind, holdout, config));
      } else {
        const auto& plan = (classical_full && !is_quantum(kind)) ? full_folds : folds;
        for (std::size_t f = 0; f < plan.size(); ++f) {
          if (!plan[f].error.empty()) throw std::runtime_error(plan[f].error + " (fold " + std::to_string(f + 1) + ")");
          try {
            sets.push_back(score(kind, plan[f], config));
          } catch (const std::exception& e) {
            throw std::runtime_error(std::string(e.what()) + " (fold " + std::to_string(f + 1) + ")");
          }
        }
      }
      report = aggregate(sets);
      report.single_split = !uses_cv(kind);
    } catch (const std::exception& e) {
      report = EvalReport{};
      report.failure = e.what();
    }
    run.seconds[std::string(to_string(kind))] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report.dataset = config.dataset;
    report.reducer = std::string(to_string(config.reducer));
    report.model = std::string(to_string(kind));
    report.seed = config.seed;
    run.reports.push_back(std::move(report));
  }
  return run;
}

std::vector<RunManifest> run_matrix(const std::vector<RunConfig>& configs) {
  std::vector<RunManifest> runs;
  runs.reserve(configs.size());
  for (const auto& c : configs) {
    try {
      runs.push_back(run_benchmark(c));
    } catch (const std::exception& e) {
      RunManifest failed;
      failed.config = c;
      failed.failure = e.what();
      runs.push_back(std::move(failed));
    }
  }
  std::stable_sort(runs.begin(), runs.end(), [](const RunManifest& a, const RunManifest& b) {
    const std::string ra(to_string(a.config.reducer));
    const std::string rb(to_string(b.config.reducer));
    return std::tie(a.config.dataset, ra) < std::tie(b.config.dataset, rb);
  });
  return runs;
}

std::vector<RunConfig> sweep_configs(const RunConfig& base, const std::vector<std::string>& datasets) {
  std::vector<RunConfig> out;
  for (const auto& d : datasets) {
    for (auto r : {ReductionMethod::kSvd, ReductionMethod::kPca, ReductionMethod::kSkpp, ReductionMethod::kLdaSplit}) {
      RunConfig c = base;
      c.dataset = d;
      c.reducer = r;
      c.models = RunConfig{}.models;
      out.push_back(std::move(c));
    }
  }
  return out;
}

std::vector<EvalReport> collect_reports(const std::vector<RunManifest>& runs) {
  std::vector<EvalReport> out;
  for (const auto& r : runs) out.insert(out.end(), r.reports.begin(), r.reports.end());
  return out;
}

void write_manifest(const RunManifest& run, std::ostream& out) {
  out << "[run " << run.config.dataset << ' ' << to_string(run.config.reducer) << " seed " << run.config.seed
      << "]\n";
  write_config(run.config, out);
  if (run.failed()) {
    out << "status = failed: " << run.failure << '\n';
    return;
  }
  out << "data.rows = " << run.dataset.rows << '\n'
      << "data.columns = " << run.dataset.columns << '\n'
      << "data.rows_dropped = " << run.dataset.rows_dropped << '\n'
      << "data.positive_fraction = " << exact(run.dataset.positive_fraction) << '\n';
  for (const auto& f : run.fits)
    out << "fit " << f.split << ": train_rows " << f.train_rows << ", fit_hash " << f.fit_hash << ", eval_hash "
        << f.eval_hash << '\n';
  for (const auto& r : run.reports) {
    out << "report " << r.model << ": ";
    if (r.failed()) {
      out << "failed: " << r.failure << '\n';
    } else {
      out << r.folds.size() << (r.single_split ? " split" : " folds") << '\n';
    }
  }
}

void write_outputs(const std::vector<RunManifest>& runs, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir / "tables");
  auto open = [](const std::filesystem::path& p) {
    std::ofstream out(p);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    return out;
  };
  {
    auto out = open(dir / "results.csv");
    const auto reports = collect_reports(runs);
    write_results_csv(reports, out);
  }
  std::map<std::string, std::vector<const RunManifest*>> by_table;
  for (const auto& r : runs)
    by_table[r.config.dataset + "_" + std::string(to_string(r.config.reducer))].push_back(&r);
  for (const auto& [name, group] : by_table) {
    auto out = open(dir / "tables" / (name + ".txt"));
    for (const RunManifest* r : group) {
      const std::string title =
          r->config.dataset + " / " + std::string(to_string(r->config.reducer)) + " / seed " + std::to_string(r->config.seed);
      if (r->failed()) {
        out << title << "\n# run failed: " << r->failure << "\n\n";
        continue;
      }
      write_table(r->reports, title, out);
      out << '\n';
    }
  }
  {
    auto out = open(dir / "manifest.txt");
    out << "qbench " << kVersion << '\n';
    for (const auto& r : runs) {
      out << '\n';
      write_manifest(r, out);
    }
  }
  {
    auto out = open(dir / "timings.txt");
    for (const auto& r : runs)
      for (const auto& [model, s] : r.seconds)
        out << r.config.dataset << ' ' << to_string(r.config.reducer) << ' ' << model << ' ' << s << '\n';
  }
}

}  // namespace qbench
