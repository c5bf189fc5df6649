// bench: run the reduction + classifier benchmark from the command line.
//
//   bench run --config run.cfg --dataset uci_credit --reducer lda_split --models vqc,qsvc
//   bench sweep --config sweep.cfg --datasets uci_credit,bank_fraud --out results/
//   bench plotdata --results results/results.csv --dataset uci_credit --out fig.txt
//
// Exit codes: 0 success, 1 configuration error, 2 data error, 3 runtime
// failure (including any model that failed inside a run).

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "qbench/errors.hpp"
#include "qbench/pipeline.hpp"

namespace {

struct Overrides {
  std::string config;
  std::string dataset;
  std::string path;
  std::string reducer;
  std::string models;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::vector<std::string> sets;

  void add_to(CLI::App* app) {
    app->add_option("--config", config, "key = value config file")->check(CLI::ExistingFile);
    app->add_option("--seed", seed, "random seed");
    app->add_option("--out", out, "output directory");
    app->add_option("--set", sets, "extra key=value override, repeatable");
  }

  qbench::RunConfig resolve() const {
    qbench::RunConfig c = config.empty() ? qbench::RunConfig{} : qbench::load_config(config);
    if (!dataset.empty()) qbench::set_config_value(c, "dataset", dataset);
    if (!path.empty()) qbench::set_config_value(c, "path", path);
    if (!reducer.empty()) qbench::set_config_value(c, "reducer", reducer);
    if (!models.empty()) qbench::set_config_value(c, "models", models);
    if (seed) c.seed = *seed;
    if (!out.empty()) c.out_dir = out;
    for (const auto& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw qbench::ConfigError("--set expects key=value, got '" + s + "'");
      qbench::set_config_value(c, s.substr(0, eq), s.substr(eq + 1));
    }
    return c;
  }
};

int finish(const std::vector<qbench::RunManifest>& runs, const std::filesystem::path& out) {
  qbench::write_outputs(runs, out);
  int failures = 0;
  for (const auto& run : runs) {
    if (run.failed()) {
      std::cerr << "run " << run.config.dataset << '/' << qbench::to_string(run.config.reducer)
                << " failed: " << run.failure << '\n';
      ++failures;
    }
    for (const auto& r : run.reports) {
      if (r.failed()) {
        std::cerr << r.dataset << '/' << r.reducer << '/' << r.model << " failed: " << r.failure << '\n';
        ++failures;
      }
    }
    if (!run.failed()) {
      qbench::write_table(run.reports,
                          run.config.dataset + " / " + std::string(qbench::to_string(run.config.reducer)), std::cout);
      std::cout << '\n';
    }
  }
  std::cout << "wrote " << (out / "results.csv").string() << '\n';
  return failures == 0 ? 0 : 3;
}

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dimensionality reduction + quantum/classical classifier benchmark"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(qbench::kVersion));

  Overrides run_opts;
  auto* run = app.add_subcommand("run", "Run one dataset/reducer configuration");
  run_opts.add_to(run);
  run->add_option("--dataset", run_opts.dataset, "uci_credit, bank_fraud or a custom name");
  run->add_option("--path", run_opts.path, "CSV file for the selected dataset");
  run->add_option("--reducer", run_opts.reducer, "svd, pca, skpp, lda_split or none");
  run->add_option("--models", run_opts.models, "comma list of lr,knn,cart,nb,svm,qsvc,vqc");

  Overrides sweep_opts;
  std::string datasets;
  auto* sweep = app.add_subcommand("sweep", "Every reducer x every model for each dataset");
  sweep_opts.add_to(sweep);
  sweep->add_option("--datasets", datasets, "comma list; defaults to every dataset with a path");

  std::string results_path = "results/results.csv";
  std::string plot_out = "plotdata.txt";
  std::string plot_dataset;
  std::string plot_models;
  std::string plot_reducers;
  auto* plot = app.add_subcommand("plotdata", "Grouped-bar data (model x reducer) from results.csv");
  plot->add_option("--results", results_path, "results.csv to read")->check(CLI::ExistingFile);
  plot->add_option("--out", plot_out, "file to write");
  plot->add_option("--dataset", plot_dataset, "keep one dataset");
  plot->add_option("--models", plot_models, "comma list of models to keep");
  plot->add_option("--reducers", plot_reducers, "comma list of reducers to keep");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (*run) {
      const auto c = run_opts.resolve();
      return finish({qbench::run_benchmark(c)}, c.out_dir);
    }
    if (*sweep) {
      const auto base = sweep_opts.resolve();
      std::vector<std::string> names = split_commas(datasets);
      if (names.empty())
        for (const auto& [name, p] : base.paths) names.push_back(name);
      if (names.empty()) throw qbench::ConfigError("sweep: no datasets; give --datasets or path.<name> keys");
      auto configs = qbench::sweep_configs(base, names);
      for (const auto& c : configs) qbench::validate_config(c);
      return finish(qbench::run_matrix(configs), base.out_dir);
    }
    if (*plot) {
      std::ifstream in(results_path);
      if (!in) throw qbench::DataError("cannot open " + results_path);
      const auto keep_models = split_commas(plot_models);
      const auto keep_reducers = split_commas(plot_reducers);
      auto wanted = [](const std::vector<std::string>& keep, const std::string& v) {
        return keep.empty() || std::find(keep.begin(), keep.end(), v) != keep.end();
      };
      std::vector<qbench::EvalReport> reports;
      for (auto& r : qbench::read_results_csv(in))
        if ((plot_dataset.empty() || r.dataset == plot_dataset) && wanted(keep_models, r.model) &&
            wanted(keep_reducers, r.reducer))
          reports.push_back(std::move(r));
      if (reports.empty()) throw qbench::ConfigError("plotdata: no rows match the filters");
      qbench::emit_plotdata(reports, plot_out);
      std::cout << "wrote " << plot_out << " (" << reports.size() << " groups)\n";
      return 0;
    }
  } catch (const qbench::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const qbench::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
