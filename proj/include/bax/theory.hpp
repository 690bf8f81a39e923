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


// Desk-scale empirical checks of the posterior-sampling rule on exact
// finite Gaussian models: concentration on a well-specified level-set
// problem, and a three-point instance where the posterior never learns.

#ifndef BAX_THEORY_HPP
#define BAX_THEORY_HPP

#include <cstdint>
#include <vector>

#include "bax/base_algorithms.hpp"
#include "bax/common.hpp"
#include "bax/domain.hpp"

namespace bax {

// Joint Gaussian belief over the points of a finite domain, updated in
// closed form by noisy observations of single points.
struct DenseGaussianModel {
  Vector mean;
  Matrix cov;

  void observe(int index, double y, double noise_variance);
  Matrix sample(int count, Rng& rng) const;
};

// One posterior-sampling pick on a dense model: one draw, its target set,
// then the point of largest variance in it (the whole domain if empty).
int dense_psbax_pick(const DenseGaussianModel& model, const FiniteDomain& domain,
                     const BaseAlgorithm& algo, Rng& rng);

// Most frequent target set over `samples` posterior draws.
std::vector<int> mode_target_set(const DenseGaussianModel& model, const FiniteDomain& domain,
                                 const BaseAlgorithm& algo, int samples, Rng& rng);

struct ConsistencyOptions {
  int domain_size = 40;
  double noise_variance = 1e-4;
  int iterations = 30;
  int replications = 20;
  int mode_samples = 256;
  double lengthscale = 0.1;  // RBF on [0, 1], unit outputscale
  double threshold = 0.0;
  std::uint64_t seed = 0;
};

struct ConsistencyReplication {
  bool recovered = false;       // O_A(posterior mean) equals the truth
  bool mode_recovered = false;  // the sampled mode equals the truth
  bool mode_agrees = false;     // sampled mode equals O_A(posterior mean)
  int truth_size = 0;
};

struct ConsistencyReport {
  ConsistencyOptions options;
  std::vector<ConsistencyReplication> replications;
  double recovery_fraction = 0.0;
  double mode_recovery_fraction = 0.0;
  // Among recovered replications; 1 when none recovered.
  double mode_agreement_fraction = 1.0;
};

ConsistencyReport theory_check_consistency(const ConsistencyOptions& options);

struct CounterexampleOptions {
  int iterations = 50;
  int mc_samples = 1000;
  double noise_variance = 0.01;
  std::uint64_t seed = 0;
};

struct CounterexampleReport {
  CounterexampleOptions options;
  double f_at_zero = 0.0;
  // Monte Carlo estimate of P(target = {1} | data) after n observations,
  // n = 0..iterations.
  std::vector<double> probability_one;
  std::vector<double> selected_x;
  bool zero_selected = false;
  double min_probability = 0.0;
  double max_probability = 0.0;
};

CounterexampleReport theory_check_counterexample(const CounterexampleOptions& options);

}  // namespace bax

#endif  // BAX_THEORY_HPP
