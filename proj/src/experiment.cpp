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


#include "bax/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>
#include <thread>

#include "bax/acquisition.hpp"
#include "bax/path_sampler.hpp"

namespace bax {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

long parse_int(const std::string& value, std::size_t line) {
  std::size_t used = 0;
  long v = 0;
  try {
    v = std::stol(value, &used);
  } catch (const std::exception&) {
    throw ParseError("expected an integer, got '" + value + "'", line);
  }
  if (used != value.size()) throw ParseError("expected an integer, got '" + value + "'", line);
  return v;
}

std::uint64_t parse_seed(const std::string& value, std::size_t line) {
  std::size_t used = 0;
  std::uint64_t v = 0;
  if (!value.empty() && value[0] == '-') throw ParseError("seed must be non-negative", line);
  try {
    v = std::stoull(value, &used);
  } catch (const std::exception&) {
    throw ParseError("expected a seed, got '" + value + "'", line);
  }
  if (used != value.size()) throw ParseError("expected a seed, got '" + value + "'", line);
  return v;
}

double parse_real(const std::string& value, std::size_t line) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &used);
  } catch (const std::exception&) {
    throw ParseError("expected a number, got '" + value + "'", line);
  }
  if (used != value.size()) throw ParseError("expected a number, got '" + value + "'", line);
  return v;
}

int as_int(long v, std::size_t line) {
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
    throw ParseError("integer out of range", line);
  }
  return static_cast<int>(v);
}

// Streams of one replication. The design and noise streams do not depend on
// the acquisition, so methods sharing a seed see the same initial data.
enum Stream : std::uint64_t { kDesign = 0, kNoise = 1, kAcquire = 2, kAlgo = 1000, kFit = 1000000 };

Matrix rows_of(const Matrix& m, const std::vector<int>& rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = m.row(rows[i]);
  return out;
}

Matrix initial_design(const Domain& domain, int count, Rng& rng) {
  if (const auto* finite = std::get_if<FiniteDomain>(&domain)) {
    const int n = finite->size();
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    const int take = std::min(count, n);
    // Partial Fisher-Yates: distinct indices, uniformly at random.
    for (int i = 0; i < take; ++i) {
      std::uniform_int_distribution<int> pick(i, n - 1);
      std::swap(order[i], order[pick(rng)]);
    }
    order.resize(take);
    return rows_of(finite->points, order);
  }
  const auto& box = std::get<BoxDomain>(domain);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Matrix out(count, box.dim());
  for (int i = 0; i < count; ++i) {
    for (int j = 0; j < box.dim(); ++j) out(i, j) = box.lo[j] + (box.hi[j] - box.lo[j]) * unit(rng);
  }
  return out;
}

double observe(const ProblemSpec& problem, const Vector& x, Rng& noise_rng) {
  double y = problem.objective(x);
  if (problem.noise_std > 0.0) {
    std::normal_distribution<double> normal(0.0, problem.noise_std);
    y += normal(noise_rng);
  }
  return y;
}

AcquisitionDecision acquire(const ExperimentConfig& cfg, const GPPosterior& post,
                            const BaseAlgorithm& algo, const FourierSampler& sampler,
                            const Domain& domain, Rng& rng) {
  switch (cfg.acquisition) {
    case AcquisitionKind::kPsBax: return psbax_step(post, sampler, algo, cfg.q, rng);
    case AcquisitionKind::kInfoBax:
      return infobax_step(post, sampler, algo, cfg.num_paths, cfg.q, rng);
    case AcquisitionKind::kEi: return ei_step(post, domain, cfg.q, rng);
    case AcquisitionKind::kRandom: return random_step(domain, cfg.q, rng);
  }
  throw std::logic_error("unknown acquisition kind");
}

}  // namespace

std::string to_string(AcquisitionKind kind) {
  switch (kind) {
    case AcquisitionKind::kPsBax: return "psbax";
    case AcquisitionKind::kInfoBax: return "infobax";
    case AcquisitionKind::kEi: return "ei";
    case AcquisitionKind::kRandom: return "random";
  }
  return "unknown";
}

AcquisitionKind acquisition_kind_from_string(const std::string& name) {
  if (name == "psbax") return AcquisitionKind::kPsBax;
  if (name == "infobax") return AcquisitionKind::kInfoBax;
  if (name == "ei") return AcquisitionKind::kEi;
  if (name == "random") return AcquisitionKind::kRandom;
  throw ConfigError("unknown acquisition: " + name);
}

void ExperimentConfig::validate() const {
  const auto names = problem_names();
  if (std::find(names.begin(), names.end(), problem) == names.end()) {
    throw ConfigError("unknown problem: " + problem);
  }
  if (q < 1) throw ConfigError("q must be >= 1");
  if (iterations < 0) throw ConfigError("iterations must be >= 0");
  if (replications < 1) throw ConfigError("replications must be >= 1");
  if (acquisition == AcquisitionKind::kInfoBax && num_paths < 1) {
    throw ConfigError("L must be >= 1 for infobax");
  }
  if (feature_count < 1) throw ConfigError("D must be >= 1");
  if (fit_restarts < 0) throw ConfigError("fit_restarts must be >= 0");
  const ProblemOptions& p = problem_options;
  if (p.grid_per_axis < 2) throw ConfigError("grid_per_axis must be >= 2");
  if (!(p.tau_quantile >= 0.0 && p.tau_quantile <= 1.0)) {
    throw ConfigError("tau_quantile must lie in [0, 1]");
  }
  if (p.k < 0) throw ConfigError("k must be >= 0");
  if (p.eta_draws < 1) throw ConfigError("eta_draws must be >= 1");
  if (p.pca_components < 1) throw ConfigError("pca_components must be >= 1");
  if (p.records < 1) throw ConfigError("records must be >= 1");
  if (p.ackley_dim < 1) throw ConfigError("ackley_dim must be >= 1");
  if (p.noise_std && !(*p.noise_std >= 0.0)) throw ConfigError("noise_std must be >= 0");
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string content = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (content.empty()) continue;
    const auto eq = content.find('=');
    if (eq == std::string::npos) throw ParseError("expected 'key = value'", line);
    const std::string key = trim(content.substr(0, eq));
    const std::string value = trim(content.substr(eq + 1));
    ProblemOptions& p = cfg.problem_options;
    if (key == "problem") {
      cfg.problem = value;
    } else if (key == "acquisition") {
      try {
        cfg.acquisition = acquisition_kind_from_string(value);
      } catch (const ConfigError& e) {
        throw ParseError(e.what(), line);
      }
    } else if (key == "q") {
      cfg.q = as_int(parse_int(value, line), line);
    } else if (key == "L") {
      cfg.num_paths = as_int(parse_int(value, line), line);
    } else if (key == "D") {
      cfg.feature_count = as_int(parse_int(value, line), line);
    } else if (key == "iterations") {
      cfg.iterations = as_int(parse_int(value, line), line);
    } else if (key == "replications") {
      cfg.replications = as_int(parse_int(value, line), line);
    } else if (key == "seed") {
      cfg.seed = parse_seed(value, line);
    } else if (key == "output") {
      cfg.output = value;
    } else if (key == "kernel") {
      try {
        cfg.kernel = kernel_kind_from_string(value);
      } catch (const std::exception& e) {
        throw ParseError(e.what(), line);
      }
    } else if (key == "fit_restarts") {
      cfg.fit_restarts = as_int(parse_int(value, line), line);
    } else if (key == "grid_per_axis") {
      p.grid_per_axis = as_int(parse_int(value, line), line);
    } else if (key == "tau_quantile") {
      p.tau_quantile = parse_real(value, line);
    } else if (key == "k") {
      p.k = as_int(parse_int(value, line), line);
    } else if (key == "eta_draws") {
      p.eta_draws = as_int(parse_int(value, line), line);
    } else if (key == "pca_components") {
      p.pca_components = as_int(parse_int(value, line), line);
    } else if (key == "records") {
      p.records = as_int(parse_int(value, line), line);
    } else if (key == "ackley_dim") {
      p.ackley_dim = as_int(parse_int(value, line), line);
    } else if (key == "data_file") {
      p.data_file = value;
    } else if (key == "noise_std") {
      p.noise_std = parse_real(value, line);
    } else if (key == "data_seed") {
      p.seed = parse_seed(value, line);
    } else {
      throw ParseError("unknown key '" + key + "'", line);
    }
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::string format_config(const ExperimentConfig& cfg) {
  const ProblemOptions& p = cfg.problem_options;
  std::ostringstream out;
  out << std::setprecision(17);
  out << "problem = " << cfg.problem << '\n'
      << "acquisition = " << to_string(cfg.acquisition) << '\n'
      << "q = " << cfg.q << '\n'
      << "L = " << cfg.num_paths << '\n'
      << "D = " << cfg.feature_count << '\n'
      << "iterations = " << cfg.iterations << '\n'
      << "replications = " << cfg.replications << '\n'
      << "seed = " << cfg.seed << '\n';
  if (!cfg.output.empty()) out << "output = " << cfg.output << '\n';
  out << "kernel = " << to_string(cfg.kernel) << '\n'
      << "fit_restarts = " << cfg.fit_restarts << '\n'
      << "grid_per_axis = " << p.grid_per_axis << '\n'
      << "tau_quantile = " << p.tau_quantile << '\n'
      << "k = " << p.k << '\n'
      << "eta_draws = " << p.eta_draws << '\n'
      << "pca_components = " << p.pca_components << '\n'
      << "records = " << p.records << '\n'
      << "ackley_dim = " << p.ackley_dim << '\n';
  if (!p.data_file.empty()) out << "data_file = " << p.data_file << '\n';
  if (p.noise_std) out << "noise_std = " << *p.noise_std << '\n';
  out << "data_seed = " << p.seed << '\n';
  return out.str();
}

GPPosterior fit_posterior(const Dataset& data, const Domain& domain, KernelKind kind,
                          const KernelSpec* previous, int restarts, Rng& rng) {
  const Vector extent = domain_extent(domain);
  const double var = output_variance_scale(data.values);
  KernelSpec initial;
  initial.kind = kind;
  initial.lengthscales = 0.3 * extent;
  initial.outputscale = var;
  initial.noise_variance = 1e-4 * var;
  if (data.size() < 2) {
    const double mean = data.empty() ? 0.0 : data.values.mean();
    return GPPosterior(data, initial, mean);
  }
  const HyperparameterBounds bounds = HyperparameterBounds::for_data(data, extent);
  if (previous) {
    initial = *previous;
    initial.kind = kind;
    initial.lengthscales =
        previous->lengthscales.cwiseMax(bounds.lengthscale_lo).cwiseMin(bounds.lengthscale_hi);
    initial.outputscale = std::clamp(previous->outputscale, bounds.outputscale_lo, bounds.outputscale_hi);
    initial.noise_variance = std::clamp(previous->noise_variance, bounds.noise_lo, bounds.noise_hi);
  }
  const FitResult fit = fit_hyperparameters(data, initial, restarts, bounds, rng);
  return GPPosterior(data, fit.spec, fit.mean_constant);
}

TargetSet estimate_target(const ProblemSpec& problem, const GPPosterior& post,
                          std::uint64_t algorithm_seed) {
  const auto algo = problem.make_algorithm(algorithm_seed);
  if (const auto* finite = std::get_if<FiniteDomain>(&problem.domain)) {
    return algo->run(FunctionView::from_table(*finite, post.mean(finite->points)));
  }
  FunctionView view;
  view.value = [&post](const Vector& x) { return post.mean_at(x); };
  view.gradient = [&post](const Vector& x) { return post.mean_gradient(x); };
  view.batch = [&post](const Matrix& m) { return post.mean(m); };
  return algo->run(view);
}

double score_estimate(const ProblemSpec& problem, const TargetSet& estimate) {
  switch (problem.metric) {
    case MetricKind::kF1: return f1_score(estimate, problem.truth);
    case MetricKind::kJaccard: return jaccard_distance(estimate, problem.truth);
    case MetricKind::kLogRegret: {
      if (estimate.empty()) throw std::logic_error("local optimization returned no point");
      return inference_regret_log10(problem.f_star,
                                    problem.objective(estimate.points.row(0).transpose()));
    }
    case MetricKind::kDiscoBaxRegret:
      return discobax_regret(*problem.table_values, *problem.eta, problem.truth, estimate);
  }
  throw std::logic_error("unknown metric kind");
}

ReplicationResult run_replication(const ProblemSpec& problem, const ExperimentConfig& cfg,
                                  int replication) {
  ReplicationResult result;
  result.replication = replication;
  const std::uint64_t rep_seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(replication));
  Rng design_rng(derive_seed(rep_seed, kDesign));
  Rng noise_rng(derive_seed(rep_seed, kNoise));
  Rng acq_rng(derive_seed(rep_seed, kAcquire));
  const std::string metric = metric_name(problem.metric);
  const FourierSampler sampler(cfg.feature_count);
  const int d = problem.dim();

  Dataset data;
  data.points.resize(0, d);
  std::vector<int> obs_iteration;
  auto record_observation = [&](const Vector& x, double y, int iteration) {
    data.append(x, y);
    obs_iteration.push_back(iteration);
  };

  int iteration = 0;
  try {
    const Matrix design = initial_design(problem.domain, problem.initial_design_size(), design_rng);
    for (Eigen::Index i = 0; i < design.rows(); ++i) {
      const Vector x = design.row(i).transpose();
      record_observation(x, observe(problem, x, noise_rng), 0);
    }
    // The posterior fitted after iteration n is reused for the acquisition
    // of iteration n + 1.
    std::optional<GPPosterior> post;
    for (iteration = 0; iteration <= cfg.iterations; ++iteration) {
      double seconds = 0.0;
      if (iteration > 0) {
        const auto algo = problem.make_algorithm(derive_seed(rep_seed, kAlgo + iteration));
        const auto start = std::chrono::steady_clock::now();
        const AcquisitionDecision decision =
            acquire(cfg, *post, *algo, sampler, problem.domain, acq_rng);
        seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        for (Eigen::Index i = 0; i < decision.chosen.rows(); ++i) {
          const Vector x = decision.chosen.row(i).transpose();
          record_observation(x, observe(problem, x, noise_rng), iteration);
        }
      }
      const KernelSpec* previous = post ? &post->kernel() : nullptr;
      Rng fit_rng(derive_seed(rep_seed, kFit + iteration));
      post.emplace(fit_posterior(data, problem.domain, cfg.kernel, previous, cfg.fit_restarts,
                                 fit_rng));
      result.final_estimate =
          estimate_target(problem, *post, derive_seed(rep_seed, kAlgo + iteration));
      result.records.push_back(
          {replication, iteration, metric, score_estimate(problem, result.final_estimate), seconds});
    }
  } catch (const std::exception& e) {
    result.failed = true;
    result.failure = e.what();
    result.records.push_back({replication, iteration, "failure",
                              std::numeric_limits<double>::quiet_NaN(), 0.0});
  }
  result.observations.iteration = std::move(obs_iteration);
  result.observations.points = data.points;
  result.observations.values = data.values;
  return result;
}

std::vector<double> replay_metrics(const ProblemSpec& problem, const ExperimentConfig& cfg,
                                   const ReplicationResult& result) {
  const std::uint64_t rep_seed =
      derive_seed(cfg.seed, static_cast<std::uint64_t>(result.replication));
  const ObservationLog& log = result.observations;
  std::vector<double> out;
  std::optional<GPPosterior> post;
  int last = 0;
  for (int it : log.iteration) last = std::max(last, it);
  for (int iteration = 0; iteration <= last; ++iteration) {
    Dataset prefix;
    prefix.points.resize(0, log.points.cols());
    for (Eigen::Index i = 0; i < log.values.size(); ++i) {
      if (log.iteration[i] <= iteration) prefix.append(log.points.row(i).transpose(), log.values[i]);
    }
    const KernelSpec* previous = post ? &post->kernel() : nullptr;
    Rng fit_rng(derive_seed(rep_seed, kFit + iteration));
    post.emplace(fit_posterior(prefix, problem.domain, cfg.kernel, previous, cfg.fit_restarts,
                               fit_rng));
    out.push_back(score_estimate(
        problem, estimate_target(problem, *post, derive_seed(rep_seed, kAlgo + iteration))));
  }
  return out;
}

int replication_threads(int replications) {
  int threads = static_cast<int>(std::thread::hardware_concurrency());
  if (const char* env = std::getenv("BAX_THREADS")) {
    try {
      threads = std::stoi(env);
    } catch (const std::exception&) {
      throw ConfigError(std::string("BAX_THREADS is not an integer: ") + env);
    }
  }
  return std::clamp(threads, 1, std::max(replications, 1));
}

ResultsTable run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  return run_experiment(make_problem(cfg.problem, cfg.problem_options), cfg);
}

ResultsTable run_experiment(const ProblemSpec& problem, const ExperimentConfig& cfg) {
  cfg.validate();
  ResultsTable table;
  table.config = cfg;
  table.replications.resize(cfg.replications);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int r = next++; r < cfg.replications; r = next++) {
      table.replications[r] = run_replication(problem, cfg, r);
    }
  };
  const int threads = replication_threads(cfg.replications);
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& rep : table.replications) {
    table.records.insert(table.records.end(), rep.records.begin(), rep.records.end());
  }
  return table;
}

void write_results(const ResultsTable& table, const std::string& dir) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path base(dir);
  {
    std::ofstream out(base / "results.csv");
    if (!out) throw std::runtime_error("cannot write results in " + dir);
    out << "replication,iteration,metric,value,acq_seconds\n";
    for (const MetricRecord& r : table.records) {
      out << r.replication << ',' << r.iteration << ',' << r.metric << ','
          << std::setprecision(17) << r.value << ',' << std::setprecision(6) << r.acq_seconds
          << '\n';
    }
  }
  {
    std::ofstream out(base / "observations.csv");
    if (!out) throw std::runtime_error("cannot write observations in " + dir);
    out << "replication,iteration";
    int d = 0;
    for (const auto& rep : table.replications) d = std::max<int>(d, rep.observations.points.cols());
    for (int j = 0; j < d; ++j) out << ",x" << (j + 1);
    out << ",y\n" << std::setprecision(17);
    for (const auto& rep : table.replications) {
      const ObservationLog& log = rep.observations;
      for (Eigen::Index i = 0; i < log.values.size(); ++i) {
        out << rep.replication << ',' << log.iteration[i];
        for (Eigen::Index j = 0; j < log.points.cols(); ++j) out << ',' << log.points(i, j);
        out << ',' << log.values[i] << '\n';
      }
    }
  }
  {
    std::ofstream out(base / "config.txt");
    if (!out) throw std::runtime_error("cannot write config in " + dir);
    out << format_config(table.config);
  }
}

RuntimeReport benchmark_runtime(const ProblemSpec& problem, const ExperimentConfig& base,
                                const std::vector<int>& path_counts) {
  if (path_counts.empty()) throw ConfigError("benchmark needs at least one L");
  auto mean_seconds = [&](const ExperimentConfig& cfg) {
    const ReplicationResult rep = run_replication(problem, cfg, 0);
    if (rep.failed) throw std::runtime_error("benchmark replication failed: " + rep.failure);
    double total = 0.0;
    int count = 0;
    for (const MetricRecord& r : rep.records) {
      if (r.iteration > 0) {
        total += r.acq_seconds;
        ++count;
      }
    }
    return count ? total / count : 0.0;
  };
  RuntimeReport report;
  report.problem = problem.name;
  ExperimentConfig cfg = base;
  cfg.replications = 1;
  cfg.acquisition = AcquisitionKind::kPsBax;
  report.psbax_seconds = mean_seconds(cfg);
  cfg.acquisition = AcquisitionKind::kInfoBax;
  std::map<int, double> by_l;
  for (int l : path_counts) {
    cfg.num_paths = l;
    const double s = mean_seconds(cfg);
    report.path_counts.push_back(l);
    report.infobax_seconds.push_back(s);
    by_l[l] = s;
  }
  const int largest = *std::max_element(path_counts.begin(), path_counts.end());
  report.ratio = report.psbax_seconds > 0.0 ? by_l[largest] / report.psbax_seconds
                                            : std::numeric_limits<double>::infinity();
  if (by_l.count(30) && by_l.count(15) && by_l[15] > 0.0) report.scaling = by_l[30] / by_l[15];
  return report;
}

}  // namespace bax
