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

// Point selection strategies: posterior-sampling BAX, execution-path
// information gain, expected improvement and uniform random.

#ifndef BAX_ACQUISITION_HPP
#define BAX_ACQUISITION_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "bax/base_algorithms.hpp"
#include "bax/common.hpp"
#include "bax/domain.hpp"
#include "bax/gp_model.hpp"
#include "bax/path_sampler.hpp"

namespace bax {

inline constexpr int kDefaultInfoPaths = 30;
inline constexpr int kBoxCandidatesPerDim = 512;

struct AcquisitionDecision {
  Matrix chosen;                  // q rows
  std::vector<int> chosen_indices;  // finite domains only
  std::vector<TargetSet> sampled_target_sets;
  std::optional<Vector> acq_values;  // score per candidate for the first pick
  std::uint64_t seed = 0;
  // Set when every sampled target set was empty and the pick fell back to
  // the whole domain.
  bool fallback = false;
};

// Greedy batch of maximal conditional variance. `cov` is the posterior
// covariance among the candidates; after each pick the remaining covariance
// is conditioned on that pick without noise. Ties go to the lower index.
std::vector<int> select_max_variance_batch(const Matrix& cov, int q, double jitter);

// Posterior-sampling step: q paths, union of their target sets, then the
// q points of highest (conditional) posterior entropy in that union.
AcquisitionDecision psbax_step(const GPPosterior& post, const PosteriorSampler& sampler,
                               const BaseAlgorithm& algo, int q, Rng& rng);

// Fantasy observations {(x', f(x'))} collected by running the base
// algorithm on one posterior draw.
struct ExecutionPath {
  Matrix points;
  Vector values;
};
using ExecutionPathSet = std::vector<ExecutionPath>;

ExecutionPathSet collect_execution_paths(const std::vector<FunctionView>& draws,
                                         const BaseAlgorithm& algo,
                                         std::vector<TargetSet>* target_sets = nullptr);

// Monte Carlo execution-path information gain at one point:
// H[y_x | D] - mean over paths of H[y_x | D, path].
double eig_v(const GPPosterior& post, const Vector& x, const ExecutionPathSet& paths);

// Same quantity for every row of `candidates`, sharing the per-path work.
Vector eig_v_batch(const GPPosterior& post, const Matrix& candidates,
                   const ExecutionPathSet& paths);

// Greedy batch information gain over an explicit candidate list.
AcquisitionDecision infobax_step(const GPPosterior& post, const PosteriorSampler& sampler,
                                 const BaseAlgorithm& algo, const Matrix& candidates,
                                 int num_paths, int q, Rng& rng);

// Dispatches on the algorithm's domain: finite tables are scored
// exhaustively, boxes through optimize_acq_over_box with 512 d candidates.
AcquisitionDecision infobax_step(const GPPosterior& post, const PosteriorSampler& sampler,
                                 const BaseAlgorithm& algo, int num_paths, int q, Rng& rng);

// Closed-form expected improvement of the latent f over `incumbent`.
double expected_improvement(const GPPosterior& post, const Vector& x, double incumbent);
double expected_improvement(double mean, double stddev, double incumbent);
// Largest posterior mean over the observed inputs.
double ei_incumbent(const GPPosterior& post);

AcquisitionDecision ei_step(const GPPosterior& post, const Domain& domain, int q, Rng& rng);

AcquisitionDecision random_step(const Domain& domain, int q, Rng& rng);

// Scrambled Halton points in the unit cube, one per row.
Matrix scrambled_halton(int count, int dim, Rng& rng);

using PointScore = std::function<double(const Vector&)>;

// Scores `n_candidates` low-discrepancy points, refines the best five by
// coordinate-wise golden-section ascent and returns the best point found.
Vector optimize_acq_over_box(const PointScore& score, const BoxDomain& box,
                             int n_candidates, Rng& rng);

}  // namespace bax

#endif  // BAX_ACQUISITION_HPP
