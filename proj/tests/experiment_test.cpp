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

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "bax/report.hpp"

namespace bax {
namespace {

namespace fs = std::filesystem;

// Sets BAX_THREADS for the lifetime of the object.
class ScopedThreads {
 public:
  explicit ScopedThreads(const char* value) {
    if (const char* old = std::getenv("BAX_THREADS")) old_ = old;
    setenv("BAX_THREADS", value, 1);
  }
  ~ScopedThreads() {
    if (old_.empty()) {
      unsetenv("BAX_THREADS");
    } else {
      setenv("BAX_THREADS", old_.c_str(), 1);
    }
  }

 private:
  std::string old_;
};

ExperimentConfig small_config(AcquisitionKind kind = AcquisitionKind::kPsBax) {
  ExperimentConfig cfg;
  cfg.problem = "himmelblau";
  cfg.problem_options.grid_per_axis = 10;
  cfg.acquisition = kind;
  cfg.iterations = 3;
  cfg.replications = 2;
  cfg.num_paths = 4;
  cfg.feature_count = 200;
  cfg.fit_restarts = 1;
  cfg.seed = 42;
  return cfg;
}

std::string temp_dir(const std::string& name) {
  const fs::path p = fs::path(::testing::TempDir()) / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p.string();
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

TEST(Config, ParsesAllKeys) {
  const ExperimentConfig cfg = parse_config(
      "# comment line\n"
      "problem = rosenbrock\n"
      "acquisition = infobax  # trailing comment\n"
      "q = 3\nL = 7\nD = 128\niterations = 12\nreplications = 4\nseed = 99\n"
      "output = out/dir\nkernel = rbf\nfit_restarts = 0\ngrid_per_axis = 9\n"
      "tau_quantile = 0.4\nk = 6\neta_draws = 8\npca_components = 3\nrecords = 50\n"
      "ackley_dim = 4\ndata_file = x.csv\nnoise_std = 0.5\ndata_seed = 7\n");
  EXPECT_EQ(cfg.problem, "rosenbrock");
  EXPECT_EQ(cfg.acquisition, AcquisitionKind::kInfoBax);
  EXPECT_EQ(cfg.q, 3);
  EXPECT_EQ(cfg.num_paths, 7);
  EXPECT_EQ(cfg.feature_count, 128);
  EXPECT_EQ(cfg.iterations, 12);
  EXPECT_EQ(cfg.replications, 4);
  EXPECT_EQ(cfg.seed, 99u);
  EXPECT_EQ(cfg.output, "out/dir");
  EXPECT_EQ(cfg.kernel, KernelKind::kRbf);
  EXPECT_EQ(cfg.fit_restarts, 0);
  EXPECT_EQ(cfg.problem_options.grid_per_axis, 9);
  EXPECT_DOUBLE_EQ(cfg.problem_options.tau_quantile, 0.4);
  EXPECT_EQ(cfg.problem_options.k, 6);
  EXPECT_EQ(cfg.problem_options.eta_draws, 8);
  EXPECT_EQ(cfg.problem_options.pca_components, 3);
  EXPECT_EQ(cfg.problem_options.records, 50);
  EXPECT_EQ(cfg.problem_options.ackley_dim, 4);
  EXPECT_EQ(cfg.problem_options.data_file, "x.csv");
  EXPECT_DOUBLE_EQ(*cfg.problem_options.noise_std, 0.5);
  EXPECT_EQ(cfg.problem_options.seed, 7u);
  EXPECT_NO_THROW(cfg.validate());
}

TEST(Config, FormatRoundTrips) {
  ExperimentConfig cfg = small_config(AcquisitionKind::kEi);
  cfg.problem_options.tau_quantile = 1.0 / 3.0;
  cfg.problem_options.noise_std = 0.1;
  cfg.output = "results";
  const std::string text = format_config(cfg);
  EXPECT_EQ(format_config(parse_config(text)), text);
  EXPECT_EQ(parse_config(text).problem_options.tau_quantile, 1.0 / 3.0);
}

TEST(Config, ErrorsCarryLineNumbers) {
  auto line_of = [](const std::string& text) -> std::size_t {
    try {
      parse_config(text);
    } catch (const ParseError& e) {
      return e.line();
    }
    return 0;
  };
  EXPECT_EQ(line_of("q = 1\nbogus = 3\n"), 2u);
  EXPECT_EQ(line_of("\n\nq = two\n"), 3u);
  EXPECT_EQ(line_of("acquisition = magic\n"), 1u);
  EXPECT_EQ(line_of("just text\n"), 1u);
  EXPECT_EQ(line_of("kernel = linear\n"), 1u);
  EXPECT_THROW(load_config("/nonexistent/config.txt"), ConfigError);
}

TEST(Config, ValidationRejectsOutOfRange) {
  auto bad = [](auto mutate) {
    ExperimentConfig cfg = small_config();
    mutate(cfg);
    return cfg;
  };
  EXPECT_THROW(bad([](auto& c) { c.q = 0; }).validate(), ConfigError);
  EXPECT_THROW(bad([](auto& c) { c.iterations = -1; }).validate(), ConfigError);
  EXPECT_THROW(bad([](auto& c) { c.replications = 0; }).validate(), ConfigError);
  EXPECT_THROW(bad([](auto& c) {
                 c.acquisition = AcquisitionKind::kInfoBax;
                 c.num_paths = 0;
               }).validate(),
               ConfigError);
  EXPECT_THROW(bad([](auto& c) { c.problem = "gb1"; }).validate(), ConfigError);
  EXPECT_NO_THROW(bad([](auto& c) { c.num_paths = 0; }).validate());
}

TEST(AcquisitionKindNames, RoundTrip) {
  for (auto k : {AcquisitionKind::kPsBax, AcquisitionKind::kInfoBax, AcquisitionKind::kEi,
                 AcquisitionKind::kRandom}) {
    EXPECT_EQ(acquisition_kind_from_string(to_string(k)), k);
  }
  EXPECT_EQ(to_string(AcquisitionKind::kPsBax), "psbax");
  EXPECT_THROW(acquisition_kind_from_string("ucb"), ConfigError);
}

TEST(RunExperiment, ZeroIterationsGiveOnlyInitialRows) {
  ExperimentConfig cfg = small_config();
  cfg.iterations = 0;
  cfg.replications = 1;
  const ResultsTable t = run_experiment(cfg);
  ASSERT_EQ(t.records.size(), 1u);
  EXPECT_EQ(t.records[0].iteration, 0);
  EXPECT_EQ(t.records[0].metric, "f1");
  EXPECT_EQ(t.replications[0].observations.values.size(), 6);
}

TEST(RunExperiment, RowCountsAndOrdering) {
  ExperimentConfig cfg = small_config();
  cfg.q = 2;
  const ResultsTable t = run_experiment(cfg);
  ASSERT_EQ(t.records.size(), 8u);
  for (std::size_t i = 0; i < t.records.size(); ++i) {
    EXPECT_EQ(t.records[i].replication, static_cast<int>(i / 4));
    EXPECT_EQ(t.records[i].iteration, static_cast<int>(i % 4));
    EXPECT_GE(t.records[i].acq_seconds, 0.0);
    EXPECT_GE(t.records[i].value, 0.0);
    EXPECT_LE(t.records[i].value, 1.0);
  }
  for (const auto& rep : t.replications) {
    EXPECT_FALSE(rep.failed);
    EXPECT_EQ(rep.observations.values.size(), 6 + 3 * 2);
  }
}

TEST(RunExperiment, DeterministicGivenSeed) {
  const ExperimentConfig cfg = small_config();
  const ResultsTable a = run_experiment(cfg);
  const ResultsTable b = run_experiment(cfg);
  for (int r = 0; r < cfg.replications; ++r) {
    EXPECT_EQ(a.replications[r].observations.points, b.replications[r].observations.points);
    EXPECT_EQ(a.replications[r].observations.values, b.replications[r].observations.values);
  }
  ASSERT_EQ(a.records.size(), b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    EXPECT_EQ(a.records[i].value, b.records[i].value);
  }
}

TEST(RunExperiment, InitialDesignSharedAcrossMethods) {
  const ResultsTable ps = run_experiment(small_config(AcquisitionKind::kPsBax));
  const ResultsTable rnd = run_experiment(small_config(AcquisitionKind::kRandom));
  for (int r = 0; r < 2; ++r) {
    EXPECT_EQ(ps.replications[r].observations.points.topRows(6),
              rnd.replications[r].observations.points.topRows(6));
    EXPECT_EQ(ps.records[r * 4].value, rnd.records[r * 4].value);
  }
  EXPECT_NE(ps.replications[0].observations.points.topRows(6),
            ps.replications[1].observations.points.topRows(6));
}

TEST(RunExperiment, MetricsReplayFromObservations) {
  const ExperimentConfig cfg = small_config();
  const ProblemSpec problem = make_problem(cfg.problem, cfg.problem_options);
  const ResultsTable t = run_experiment(problem, cfg);
  for (const auto& rep : t.replications) {
    const std::vector<double> replay = replay_metrics(problem, cfg, rep);
    ASSERT_EQ(replay.size(), rep.records.size());
    for (std::size_t i = 0; i < replay.size(); ++i) EXPECT_EQ(replay[i], rep.records[i].value);
  }
}

TEST(RunExperiment, ThreadCountDoesNotChangeResults) {
  ExperimentConfig cfg = small_config();
  cfg.replications = 3;
  ResultsTable one, three;
  {
    ScopedThreads env("1");
    one = run_experiment(cfg);
  }
  {
    ScopedThreads env("3");
    three = run_experiment(cfg);
  }
  ASSERT_EQ(one.records.size(), three.records.size());
  for (std::size_t i = 0; i < one.records.size(); ++i) {
    EXPECT_EQ(one.records[i].replication, three.records[i].replication);
    EXPECT_EQ(one.records[i].value, three.records[i].value);
  }
}

TEST(RunExperiment, ReplicationThreadsHonoursEnvironment) {
  {
    ScopedThreads env("2");
    EXPECT_EQ(replication_threads(10), 2);
    EXPECT_EQ(replication_threads(1), 1);
  }
  {
    ScopedThreads env("0");
    EXPECT_EQ(replication_threads(5), 1);
  }
  {
    ScopedThreads env("many");
    EXPECT_THROW(replication_threads(5), ConfigError);
  }
}

TEST(RunExperiment, NumericalFailureIsRecordedPerReplication) {
  ExperimentConfig cfg = small_config();
  ProblemSpec problem = make_problem(cfg.problem, cfg.problem_options);
  auto calls = std::make_shared<std::atomic<int>>(0);
  const FunctionView inner = problem.objective;
  problem.objective.value = [inner, calls](const Vector& x) {
    if (++*calls > 6) throw FactorizationError("simulated failure");
    return inner(x);
  };
  const ReplicationResult rep = run_replication(problem, cfg, 0);
  EXPECT_TRUE(rep.failed);
  EXPECT_NE(rep.failure.find("simulated"), std::string::npos);
  ASSERT_EQ(rep.records.size(), 2u);
  EXPECT_EQ(rep.records[0].metric, "f1");
  EXPECT_EQ(rep.records[1].metric, "failure");
  EXPECT_EQ(rep.records[1].iteration, 1);
  EXPECT_TRUE(std::isnan(rep.records[1].value));

  problem.objective.value = [](const Vector&) -> double { throw std::runtime_error("boom"); };
  const ResultsTable t = run_experiment(problem, cfg);
  ASSERT_EQ(t.records.size(), 2u);
  for (const auto& r : t.records) EXPECT_EQ(r.metric, "failure");
}

TEST(RunExperiment, AllAcquisitionsRunOnFiniteAndBoxProblems) {
  for (auto kind : {AcquisitionKind::kPsBax, AcquisitionKind::kInfoBax, AcquisitionKind::kEi,
                    AcquisitionKind::kRandom}) {
    ExperimentConfig cfg = small_config(kind);
    cfg.iterations = 2;
    cfg.replications = 1;
    cfg.q = 2;
    ResultsTable t = run_experiment(cfg);
    EXPECT_FALSE(t.replications[0].failed) << to_string(kind) << ": " << t.replications[0].failure;

    cfg.problem = "ackley";
    cfg.problem_options.ackley_dim = 2;
    cfg.num_paths = 2;
    cfg.iterations = 1;
    t = run_experiment(cfg);
    EXPECT_FALSE(t.replications[0].failed) << to_string(kind) << ": " << t.replications[0].failure;
    EXPECT_EQ(t.records.back().metric, "log10_regret");
  }
}

TEST(RunExperiment, EstimateOnBoxUsesMeanGradient) {
  const ProblemSpec problem = make_problem("hartmann6");
  Dataset data;
  data.points.resize(0, 6);
  Rng rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 14; ++i) {
    Vector x(6);
    for (auto& v : x) v = u(rng);
    data.append(x, problem.objective(x));
  }
  const GPPosterior post = fit_posterior(data, problem.domain, KernelKind::kMatern52, nullptr, 1, rng);
  const TargetSet est = estimate_target(problem, post, 5);
  ASSERT_EQ(est.size(), 1);
  const Vector x = est.points.row(0).transpose();
  EXPECT_TRUE(std::get<BoxDomain>(problem.domain).contains(x));
  // The estimate is at least as good, under the mean, as every observed input.
  EXPECT_GE(post.mean_at(x), post.mean(data.points).maxCoeff() - 1e-6);
  EXPECT_TRUE(std::isfinite(score_estimate(problem, est)));
}

TEST(WriteResults, FilesAndHeaders) {
  const ExperimentConfig cfg = small_config();
  const ResultsTable t = run_experiment(cfg);
  const std::string dir = temp_dir("write_results");
  write_results(t, dir);
  const std::string results = read_file(fs::path(dir) / "results.csv");
  EXPECT_EQ(results.rfind("replication,iteration,metric,value,acq_seconds\n", 0), 0u);
  EXPECT_EQ(std::count(results.begin(), results.end(), '\n'), 1 + 8);
  const std::string obs = read_file(fs::path(dir) / "observations.csv");
  EXPECT_EQ(obs.rfind("replication,iteration,x1,x2,y\n", 0), 0u);
  EXPECT_EQ(format_config(load_config((fs::path(dir) / "config.txt").string())),
            format_config(cfg));

  const std::vector<LabeledRecord> back = read_results((fs::path(dir) / "results.csv").string());
  ASSERT_EQ(back.size(), 8u);
  EXPECT_EQ(back[0].problem, "himmelblau");
  EXPECT_EQ(back[0].method, "psbax");
  EXPECT_EQ(back[5].record.value, t.records[5].value);
}

TEST(BenchmarkRuntime, ReportsEveryPathCount) {
  ExperimentConfig cfg = small_config();
  cfg.iterations = 2;
  const ProblemSpec problem = make_problem(cfg.problem, cfg.problem_options);
  const RuntimeReport rep = benchmark_runtime(problem, cfg, {2, 4});
  ASSERT_EQ(rep.infobax_seconds.size(), 2u);
  EXPECT_GT(rep.psbax_seconds, 0.0);
  EXPECT_GT(rep.infobax_seconds[1], 0.0);
  EXPECT_DOUBLE_EQ(rep.ratio, rep.infobax_seconds[1] / rep.psbax_seconds);
  EXPECT_EQ(rep.scaling, 0.0);
}

LabeledRecord labeled(const std::string& method, int iteration, double value,
                      const std::string& metric = "f1") {
  return {"p", method, {0, iteration, metric, value, 0.0}};
}

TEST(Report, SingleTableHasZeroStandardError) {
  const auto rows = summarize({labeled("a", 0, 0.25), labeled("a", 1, 0.75)});
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_DOUBLE_EQ(rows[1].mean, 0.75);
  EXPECT_DOUBLE_EQ(rows[1].stderr_, 0.0);
  EXPECT_EQ(rows[1].count, 1);
}

TEST(Report, OppositeValuesAverageToZero) {
  const auto rows = summarize({labeled("a", 3, 1.7), labeled("a", 3, -1.7)});
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_DOUBLE_EQ(rows[0].mean, 0.0);
}

TEST(Report, StandardErrorMatchesDirectFormula) {
  Rng rng(4);
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<LabeledRecord> recs;
  std::vector<double> vals;
  for (int r = 0; r < 10; ++r) {
    vals.push_back(n(rng));
    recs.push_back(labeled("m", 5, vals.back()));
  }
  recs.push_back(labeled("m", 5, std::nan(""), "failure"));
  double mean = 0.0;
  for (double v : vals) mean += v / 10.0;
  double ss = 0.0;
  for (double v : vals) ss += (v - mean) * (v - mean);
  const auto rows = summarize(recs);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].count, 10);
  EXPECT_NEAR(rows[0].mean, mean, 1e-14);
  EXPECT_NEAR(rows[0].stderr_, std::sqrt(ss / 9.0) / std::sqrt(10.0), 1e-14);
}

TEST(Report, SortedGroupsAndHeader) {
  const auto rows = summarize({labeled("z", 1, 1.0), labeled("a", 2, 0.0), labeled("a", 1, 0.5)});
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0].method, "a");
  EXPECT_EQ(rows[0].iteration, 1);
  EXPECT_EQ(rows[2].method, "z");
  std::ostringstream out;
  write_summary(rows, out);
  const std::string text = out.str();
  EXPECT_EQ(text.rfind("problem,method,iteration,mean,stderr\n", 0), 0u);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 4);
}

TEST(Report, BatchMethodsAreLabelled) {
  ExperimentConfig cfg = small_config();
  cfg.q = 4;
  cfg.iterations = 0;
  const std::string dir = temp_dir("batch_label");
  write_results(run_experiment(cfg), dir);
  EXPECT_EQ(read_results((fs::path(dir) / "results.csv").string())[0].method, "psbax-q4");
}

}  // namespace
}  // namespace bax
