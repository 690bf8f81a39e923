// Copyright 2026 The BAX Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// Command-line entry point: experiments, theory checks, runtime benchmarks,
// result aggregation and synthetic data generation.

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bax/experiment.hpp"
#include "bax/problems.hpp"
#include "bax/report.hpp"
#include "bax/theory.hpp"

namespace {

int run_command(const std::string& config_path, std::string out_dir) {
  bax::ExperimentConfig cfg = bax::load_config(config_path);
  if (out_dir.empty()) out_dir = cfg.output;
  if (out_dir.empty()) throw bax::ConfigError("no output directory: pass --out or set output");
  cfg.output = out_dir;
  const bax::ResultsTable table = bax::run_experiment(cfg);
  bax::write_results(table, out_dir);
  int failures = 0;
  for (const auto& rep : table.replications) {
    if (rep.failed) {
      ++failures;
      std::cerr << "replication " << rep.replication << " failed: " << rep.failure << '\n';
    }
  }
  std::cout << "wrote " << table.records.size() << " rows to " << out_dir << '\n';
  return failures == static_cast<int>(table.replications.size()) ? 1 : 0;
}

int theory_command(const std::string& which, int n, int mc, std::uint64_t seed) {
  std::cout << std::setprecision(6);
  if (which == "consistency") {
    bax::ConsistencyOptions opts;
    if (n >= 0) opts.iterations = n;
    if (mc > 0) opts.mode_samples = mc;
    opts.seed = seed;
    const auto report = bax::theory_check_consistency(opts);
    std::cout << "domain_size," << opts.domain_size << "\niterations," << opts.iterations
              << "\nreplications," << opts.replications
              << "\nrecovery_fraction," << report.recovery_fraction
              << "\nmode_recovery_fraction," << report.mode_recovery_fraction
              << "\nmode_agreement_fraction," << report.mode_agreement_fraction << '\n';
    return 0;
  }
  if (which == "counterexample") {
    bax::CounterexampleOptions opts;
    if (n >= 0) opts.iterations = n;
    if (mc > 0) opts.mc_samples = mc;
    opts.seed = seed;
    const auto report = bax::theory_check_counterexample(opts);
    std::cout << "n,p_one,selected_x\n";
    for (std::size_t i = 0; i < report.probability_one.size(); ++i) {
      std::cout << i << ',' << report.probability_one[i] << ',';
      if (i > 0) std::cout << report.selected_x[i - 1];
      std::cout << '\n';
    }
    std::cout << "# min " << report.min_probability << " max " << report.max_probability
              << " zero_selected " << (report.zero_selected ? "yes" : "no") << '\n';
    return 0;
  }
  throw bax::ConfigError("theory-check expects consistency or counterexample");
}

int bench_command(const std::string& problem, std::vector<int> paths, int iterations,
                  std::uint64_t seed) {
  bax::ExperimentConfig cfg;
  cfg.problem = problem;
  cfg.iterations = iterations;
  cfg.seed = seed;
  const bax::ProblemSpec spec = bax::make_problem(problem, cfg.problem_options);
  const auto report = bax::benchmark_runtime(spec, cfg, paths);
  std::cout << std::setprecision(6) << "method,L,seconds_per_iteration\n"
            << "psbax,," << report.psbax_seconds << '\n';
  for (std::size_t i = 0; i < report.path_counts.size(); ++i) {
    std::cout << "infobax," << report.path_counts[i] << ',' << report.infobax_seconds[i] << '\n';
  }
  std::cout << "# ratio " << report.ratio;
  if (report.scaling > 0.0) std::cout << " scaling_30_over_15 " << report.scaling;
  std::cout << '\n';
  return 0;
}

int report_command(const std::vector<std::string>& files, const std::string& out_path) {
  std::vector<bax::LabeledRecord> records;
  for (const auto& f : files) {
    auto part = bax::read_results(f);
    records.insert(records.end(), part.begin(), part.end());
  }
  const auto rows = bax::summarize(records);
  if (out_path.empty()) {
    bax::write_summary(rows, std::cout);
  } else {
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot write " + out_path);
    bax::write_summary(rows, out);
  }
  return 0;
}

int gen_data_command(const std::string& dir, std::uint64_t seed) {
  std::filesystem::create_directories(dir);
  const auto volcano = (std::filesystem::path(dir) / "volcano.csv").string();
  const auto screen = (std::filesystem::path(dir) / "screen.csv").string();
  bax::save_grid(bax::synthetic_volcano(seed), volcano);
  bax::save_tabular(bax::synthetic_screen(1000, 64, seed), screen);
  std::cout << "wrote " << volcano << " and " << screen << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian algorithm execution experiments"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run an experiment from a config file");
  std::string config_path, out_dir;
  run->add_option("--config", config_path, "key = value config file")->required();
  run->add_option("--out", out_dir, "Output directory");

  auto* theory = app.add_subcommand("theory-check", "Empirical posterior-behavior checks");
  std::string which;
  int theory_n = -1, theory_mc = 0;
  std::uint64_t theory_seed = 0;
  theory->add_option("check", which, "consistency or counterexample")
      ->required()
      ->check(CLI::IsMember({"consistency", "counterexample"}));
  theory->add_option("--n", theory_n, "Number of acquisitions");
  theory->add_option("--mc", theory_mc, "Posterior samples per estimate");
  theory->add_option("--seed", theory_seed, "Random seed");

  auto* bench = app.add_subcommand("bench", "Per-iteration acquisition timing");
  std::string bench_problem = "himmelblau";
  std::vector<int> bench_paths{5, 15, 30};
  int bench_iterations = 10;
  std::uint64_t bench_seed = 0;
  bench->add_option("--problem", bench_problem, "Problem name")->required();
  bench->add_option("--L", bench_paths, "Path counts for INFO-BAX");
  bench->add_option("--iterations", bench_iterations, "Iterations per method");
  bench->add_option("--seed", bench_seed, "Random seed");

  auto* report = app.add_subcommand("report", "Aggregate results.csv files");
  std::vector<std::string> report_files;
  std::string report_out;
  report->add_option("files", report_files, "results.csv files")->required()->check(CLI::ExistingFile);
  report->add_option("--out", report_out, "Summary CSV (default: stdout)");

  auto* gen = app.add_subcommand("gen-data", "Write the synthetic volcano grid and screen table");
  std::string gen_dir = "data";
  std::uint64_t gen_seed = 1;
  gen->add_option("--out", gen_dir, "Output directory");
  gen->add_option("--seed", gen_seed, "Generator seed");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run) return run_command(config_path, out_dir);
    if (*theory) return theory_command(which, theory_n, theory_mc, theory_seed);
    if (*bench) return bench_command(bench_problem, bench_paths, bench_iterations, bench_seed);
    if (*report) return report_command(report_files, report_out);
    if (*gen) return gen_data_command(gen_dir, gen_seed);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
