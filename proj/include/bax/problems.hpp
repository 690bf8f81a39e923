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

// Test problems and dataset ingestion. The engine always maximizes, so
// minimization benchmarks are negated inside a ProblemSpec.

#ifndef BAX_PROBLEMS_HPP
#define BAX_PROBLEMS_HPP

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "bax/base_algorithms.hpp"
#include "bax/common.hpp"
#include "bax/domain.hpp"

namespace bax {

// Standard test functions in their usual minimization form on their native
// domains.
double hartmann6(const Vector& x);   // [0,1]^6, minimum -3.32237
double ackley(const Vector& x);      // [-32.768, 32.768]^d
double himmelblau(const Vector& x);  // [-6, 6]^2
double rosenbrock(const Vector& x);  // [-2, 2]^d

// Maximum of -hartmann6 on [0,1]^6, used for regret.
inline constexpr double kHartmann6Max = 3.32237;
inline constexpr double kAckleyBound = 32.768;

struct GridDataset {
  int rows = 0;
  int cols = 0;
  Vector heights;  // row-major, rows * cols
  // Provenance note carried through to reports ("file:<path>" or
  // "synthetic:<generator>").
  std::string source;

  double at(int r, int c) const { return heights[r * cols + c]; }
};

GridDataset load_grid(const std::string& path);
void save_grid(const GridDataset& grid, const std::string& path);

struct GridDomain {
  FiniteDomain domain;  // (row, col) normalized to [0,1]^2
  Vector values;
};
GridDomain grid_to_finite_domain(const GridDataset& grid);

// Volcano-shaped 87 x 61 height field used when the real survey file is
// not available. Deterministic in `seed`.
GridDataset synthetic_volcano(std::uint64_t seed = 1);

// Nearest-rank p-quantile: the ceil(p N)-th smallest value (1-based),
// clamped to [1, N].
double quantile_threshold(const Vector& values, double p);

struct TabularDataset {
  std::vector<std::string> ids;
  Matrix embeddings;  // N x d
  Vector values;
  std::string source;
  // Fraction of total variance kept, set by pca_reduce.
  double explained_variance_ratio = 1.0;

  int size() const { return static_cast<int>(values.size()); }
};

TabularDataset load_tabular(const std::string& path);
void save_tabular(const TabularDataset& table, const std::string& path);

// Projects centered embeddings onto the leading eigenvectors of their
// covariance. Zero-eigenvalue directions are dropped, so the output can be
// narrower than `n_components` for degenerate data.
TabularDataset pca_reduce(const TabularDataset& table, int n_components);

// Keeps the `count` records with the highest values, in descending order.
TabularDataset truncate_top(const TabularDataset& table, int count);

// Gene-screen-like table with low-rank embeddings and a smooth response.
TabularDataset synthetic_screen(int records, int width, std::uint64_t seed = 1);

FiniteDomain make_uniform_grid(const BoxDomain& box, int per_axis);
FiniteDomain make_rosenbrock_grid();

enum class MetricKind { kF1, kJaccard, kLogRegret, kDiscoBaxRegret };
enum class AlgorithmKind { kLevelSet, kTopK, kDiscoBax, kLocalOpt };

std::string to_string(MetricKind kind);
std::string metric_name(MetricKind kind);

struct ProblemOptions {
  int grid_per_axis = 25;  // Himmelblau grid resolution
  double tau_quantile = 0.55;
  int k = 0;  // 0 selects the problem default
  int eta_draws = kDefaultEtaDraws;
  int pca_components = 20;
  int records = 1000;  // DiscoBAX pool size after truncation
  int ackley_dim = 10;
  std::string data_file;  // empty selects the synthetic generator
  std::optional<double> noise_std;
  std::uint64_t seed = 1;  // synthetic data and eta draws
};

struct ProblemSpec {
  std::string name;
  Domain domain;
  FunctionView objective;
  std::optional<Vector> table_values;  // true values on a finite domain
  AlgorithmKind algorithm = AlgorithmKind::kLevelSet;
  MetricKind metric = MetricKind::kF1;
  double threshold = 0.0;
  int k = 0;
  std::shared_ptr<const Matrix> eta;
  LocalOptOptions local_opt;
  TargetSet truth;
  double f_star = 0.0;
  double noise_std = 0.0;
  std::string source;

  int dim() const { return domain_dim(domain); }
  int initial_design_size() const { return 2 * (dim() + 1); }
  std::unique_ptr<BaseAlgorithm> make_algorithm(std::uint64_t seed = 0) const;
  // Re-runs the base algorithm on the true objective and compares with the
  // stored ground truth. Throws std::logic_error on mismatch.
  void check_consistency() const;
};

// Known names: hartmann6, ackley, himmelblau, volcano, rosenbrock, discobax.
ProblemSpec make_problem(const std::string& name, const ProblemOptions& options = {});
std::vector<std::string> problem_names();

}  // namespace bax

#endif  // BAX_PROBLEMS_HPP
