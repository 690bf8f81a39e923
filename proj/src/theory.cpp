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


#include "bax/theory.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "bax/acquisition.hpp"
#include "bax/gp_model.hpp"
#include "bax/path_sampler.hpp"

namespace bax {

namespace {

// Returns {-1} when f(0) < 0 and {1} otherwise, on the domain {-1, 0, 1}.
class SignOfCenterAlgorithm : public BaseAlgorithm {
 public:
  explicit SignOfCenterAlgorithm(FiniteDomain domain) : domain_(std::move(domain)) {}
  TargetSet run(const FunctionView& fn) const override {
    const auto& finite = std::get<FiniteDomain>(domain_);
    const Vector values = fn.values_on(finite);
    return TargetSet::from_indices(finite, {values[1] < 0.0 ? 0 : 2});
  }
  const Domain& domain() const override { return domain_; }

 private:
  Domain domain_;
};

}  // namespace

void DenseGaussianModel::observe(int index, double y, double noise_variance) {
  if (index < 0 || index >= mean.size()) throw std::out_of_range("observation index");
  const double denom = cov(index, index) + noise_variance;
  if (!(denom > 0.0)) throw FactorizationError("observation with zero total variance");
  const Vector gain = cov.col(index) / denom;
  mean += gain * (y - mean[index]);
  cov -= gain * cov.row(index);
  cov = 0.5 * (cov + cov.transpose());
}

Matrix DenseGaussianModel::sample(int count, Rng& rng) const {
  return sample_gaussian_rows(mean, cov, count, rng);
}

int dense_psbax_pick(const DenseGaussianModel& model, const FiniteDomain& domain,
                     const BaseAlgorithm& algo, Rng& rng) {
  const Vector draw = model.sample(1, rng).row(0).transpose();
  std::vector<int> candidates = algo.run(FunctionView::from_table(domain, draw)).indices;
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  if (candidates.empty()) {
    candidates.resize(domain.size());
    std::iota(candidates.begin(), candidates.end(), 0);
  }
  Matrix sub(candidates.size(), candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    for (std::size_t j = 0; j < candidates.size(); ++j) sub(i, j) = model.cov(candidates[i], candidates[j]);
  }
  return candidates[select_max_variance_batch(sub, 1, 0.0)[0]];
}

std::vector<int> mode_target_set(const DenseGaussianModel& model, const FiniteDomain& domain,
                                 const BaseAlgorithm& algo, int samples, Rng& rng) {
  const Matrix draws = model.sample(samples, rng);
  std::map<std::vector<int>, int> counts;
  for (int s = 0; s < samples; ++s) {
    std::vector<int> idx = algo.run(FunctionView::from_table(domain, draws.row(s).transpose())).indices;
    std::sort(idx.begin(), idx.end());
    ++counts[idx];
  }
  // Ties resolve to the lexicographically smallest set.
  auto best = counts.begin();
  for (auto it = counts.begin(); it != counts.end(); ++it) {
    if (it->second > best->second) best = it;
  }
  return best->first;
}

ConsistencyReport theory_check_consistency(const ConsistencyOptions& options) {
  if (options.domain_size < 2) throw std::invalid_argument("domain needs at least two points");
  if (options.replications < 1) throw std::invalid_argument("replications must be >= 1");
  ConsistencyReport report;
  report.options = options;

  FiniteDomain domain;
  domain.points.resize(options.domain_size, 1);
  for (int i = 0; i < options.domain_size; ++i) {
    domain.points(i, 0) = static_cast<double>(i) / (options.domain_size - 1);
  }
  const KernelSpec kernel = KernelSpec::isotropic(KernelKind::kRbf, 1, options.lengthscale, 1.0,
                                                  options.noise_variance);
  DenseGaussianModel prior;
  prior.mean = Vector::Zero(options.domain_size);
  prior.cov = kernel_matrix(kernel, domain.points, domain.points);
  const LevelSetAlgorithm algo(domain, options.threshold);

  int recovered = 0, mode_recovered = 0, agree = 0;
  for (int r = 0; r < options.replications; ++r) {
    Rng rng(derive_seed(options.seed, static_cast<std::uint64_t>(r)));
    const Vector f = prior.sample(1, rng).row(0).transpose();
    std::vector<int> truth = algo.run(FunctionView::from_table(domain, f)).indices;
    std::normal_distribution<double> noise(0.0, std::sqrt(options.noise_variance));

    DenseGaussianModel model = prior;
    for (int n = 0; n < options.iterations; ++n) {
      const int pick = dense_psbax_pick(model, domain, algo, rng);
      model.observe(pick, f[pick] + noise(rng), options.noise_variance);
    }
    std::vector<int> estimate = algo.run(FunctionView::from_table(domain, model.mean)).indices;
    const std::vector<int> mode = mode_target_set(model, domain, algo, options.mode_samples, rng);
    std::sort(truth.begin(), truth.end());
    std::sort(estimate.begin(), estimate.end());

    ConsistencyReplication rep;
    rep.truth_size = static_cast<int>(truth.size());
    rep.recovered = estimate == truth;
    rep.mode_recovered = mode == truth;
    rep.mode_agrees = mode == estimate;
    recovered += rep.recovered;
    mode_recovered += rep.mode_recovered;
    agree += rep.recovered && rep.mode_agrees;
    report.replications.push_back(rep);
  }
  const double total = options.replications;
  report.recovery_fraction = recovered / total;
  report.mode_recovery_fraction = mode_recovered / total;
  report.mode_agreement_fraction = recovered ? static_cast<double>(agree) / recovered : 1.0;
  return report;
}

CounterexampleReport theory_check_counterexample(const CounterexampleOptions& options) {
  if (options.mc_samples < 1) throw std::invalid_argument("mc_samples must be >= 1");
  CounterexampleReport report;
  report.options = options;
  FiniteDomain domain;
  domain.points.resize(3, 1);
  domain.points << -1.0, 0.0, 1.0;
  const SignOfCenterAlgorithm algo(domain);

  // f(-1) = f(1) = 0 exactly; f(0) is standard normal and independent.
  DenseGaussianModel model;
  model.mean = Vector::Zero(3);
  model.cov = Matrix::Zero(3, 3);
  model.cov(1, 1) = 1.0;

  Rng rng(options.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const Vector f = (Vector(3) << 0.0, normal(rng), 0.0).finished();
  report.f_at_zero = f[1];
  std::normal_distribution<double> noise(0.0, std::sqrt(options.noise_variance));

  auto estimate = [&] {
    const Matrix draws = model.sample(options.mc_samples, rng);
    int ones = 0;
    for (int s = 0; s < options.mc_samples; ++s) {
      ones += algo.run(FunctionView::from_table(domain, draws.row(s).transpose())).indices[0] == 2;
    }
    return static_cast<double>(ones) / options.mc_samples;
  };
  report.probability_one.push_back(estimate());
  for (int n = 1; n <= options.iterations; ++n) {
    const int pick = dense_psbax_pick(model, domain, algo, rng);
    report.selected_x.push_back(domain.points(pick, 0));
    report.zero_selected = report.zero_selected || pick == 1;
    model.observe(pick, f[pick] + noise(rng), options.noise_variance);
    report.probability_one.push_back(estimate());
  }
  const auto [lo, hi] =
      std::minmax_element(report.probability_one.begin(), report.probability_one.end());
  report.min_probability = *lo;
  report.max_probability = *hi;
  return report;
}

}  // namespace bax
