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


// The BAX loop: initial design, refitting, acquisition, estimation and
// metric recording, repeated over independent replications.

#ifndef BAX_EXPERIMENT_HPP
#define BAX_EXPERIMENT_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "bax/common.hpp"
#include "bax/gp_model.hpp"
#include "bax/metrics.hpp"
#include "bax/path_sampler.hpp"
#include "bax/problems.hpp"

namespace bax {

enum class AcquisitionKind { kPsBax, kInfoBax, kEi, kRandom };

std::string to_string(AcquisitionKind kind);
AcquisitionKind acquisition_kind_from_string(const std::string& name);

struct ExperimentConfig {
  std::string problem = "himmelblau";
  ProblemOptions problem_options;
  AcquisitionKind acquisition = AcquisitionKind::kPsBax;
  int q = 1;
  int num_paths = 30;  // L
  int feature_count = kDefaultFeatureCount;  // D
  int iterations = 50;  // N
  int replications = 10;  // R
  std::uint64_t seed = 0;
  std::string output;
  KernelKind kernel = KernelKind::kMatern52;
  int fit_restarts = 2;

  // Throws ConfigError for out-of-range values.
  void validate() const;
};

// Parses the flat "key = value" format; '#' starts a comment. Unknown keys
// and malformed values raise ParseError with the offending line.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
// Inverse of parse_config; the result parses back to an equal config.
std::string format_config(const ExperimentConfig& cfg);

// Every evaluation made in one replication, in order. Iteration 0 holds the
// initial design.
struct ObservationLog {
  std::vector<int> iteration;
  Matrix points;
  Vector values;
};

struct ReplicationResult {
  int replication = 0;
  std::vector<MetricRecord> records;
  ObservationLog observations;
  TargetSet final_estimate;
  bool failed = false;
  std::string failure;
};

struct ResultsTable {
  ExperimentConfig config;
  std::vector<MetricRecord> records;  // ordered by (replication, iteration)
  std::vector<ReplicationResult> replications;
};

// Posterior used at one point of the loop: hyperparameters refit to the
// data, warm-started from `previous` when given.
GPPosterior fit_posterior(const Dataset& data, const Domain& domain, KernelKind kind,
                          const KernelSpec* previous, int restarts, Rng& rng);

// Estimate O_A(mu) from the posterior mean and its metric against the truth.
TargetSet estimate_target(const ProblemSpec& problem, const GPPosterior& post,
                          std::uint64_t algorithm_seed);
double score_estimate(const ProblemSpec& problem, const TargetSet& estimate);

ReplicationResult run_replication(const ProblemSpec& problem, const ExperimentConfig& cfg,
                                  int replication);

// Recomputes the metric of every iteration from the logged observations
// alone, using only D_n for iteration n.
std::vector<double> replay_metrics(const ProblemSpec& problem, const ExperimentConfig& cfg,
                                   const ReplicationResult& result);

// Replications run on up to BAX_THREADS threads (default: hardware
// concurrency); the merged table does not depend on the thread count.
ResultsTable run_experiment(const ExperimentConfig& cfg);
ResultsTable run_experiment(const ProblemSpec& problem, const ExperimentConfig& cfg);

int replication_threads(int replications);

// Writes results.csv, observations.csv and config.txt into `dir`.
void write_results(const ResultsTable& table, const std::string& dir);

struct RuntimeReport {
  std::string problem;
  double psbax_seconds = 0.0;  // mean per-iteration acquisition time
  std::vector<int> path_counts;
  std::vector<double> infobax_seconds;  // one per path count
  double ratio = 0.0;    // infobax at the largest L over psbax
  double scaling = 0.0;  // infobax time at L=30 over L=15, when both are run
};

// Single-replication timing of PS-BAX against INFO-BAX at each L.
RuntimeReport benchmark_runtime(const ProblemSpec& problem, const ExperimentConfig& base,
                                const std::vector<int>& path_counts);

}  // namespace bax

#endif  // BAX_EXPERIMENT_HPP
