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

#include "bax/base_algorithms.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "bax/path_sampler.hpp"

namespace bax {

TargetSet levelset_algorithm(const FunctionView& fn, const FiniteDomain& domain,
                             double threshold) {
  const Vector values = fn.values_on(domain);
  std::vector<int> members;
  for (int i = 0; i < domain.size(); ++i) {
    if (values[i] > threshold) members.push_back(i);
  }
  return TargetSet::from_indices(domain, std::move(members));
}

TargetSet topk_algorithm(const FunctionView& fn, const FiniteDomain& domain, int k) {
  if (k < 1 || k > domain.size()) {
    throw std::invalid_argument("top-k needs 1 <= k <= N, got k=" + std::to_string(k));
  }
  const Vector values = fn.values_on(domain);
  std::vector<int> order(domain.size());
  std::iota(order.begin(), order.end(), 0);
  std::partial_sort(order.begin(), order.begin() + k, order.end(), [&](int a, int b) {
    return values[a] > values[b] || (values[a] == values[b] && a < b);
  });
  order.resize(k);
  return TargetSet::from_indices(domain, std::move(order));
}

double discobax_value(const Vector& values, const Matrix& eta_samples,
                      const std::vector<int>& members) {
  if (eta_samples.rows() == 0) throw std::invalid_argument("no eta draws");
  if (eta_samples.cols() != values.size()) {
    throw DimensionError("eta draws do not match the domain size");
  }
  if (members.empty()) return -std::numeric_limits<double>::infinity();
  double total = 0.0;
  for (Eigen::Index e = 0; e < eta_samples.rows(); ++e) {
    double best = -std::numeric_limits<double>::infinity();
    for (int i : members) best = std::max(best, values[i] + eta_samples(e, i));
    total += best;
  }
  return total / static_cast<double>(eta_samples.rows());
}

std::vector<int> discobax_greedy_indices(const Vector& values,
                                         const Matrix& eta_samples, int k) {
  const auto n = values.size();
  if (eta_samples.rows() == 0) throw std::invalid_argument("no eta draws");
  if (eta_samples.cols() != n) throw DimensionError("eta draws do not match the domain size");
  if (k < 1 || k > n) throw std::invalid_argument("greedy needs 1 <= k <= N");

  const Eigen::Index draws = eta_samples.rows();
  Vector current = Vector::Constant(draws, -std::numeric_limits<double>::infinity());
  std::vector<bool> taken(n, false);
  std::vector<int> selected;
  for (int step = 0; step < k; ++step) {
    int best_index = -1;
    double best_value = -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < n; ++i) {
      if (taken[i]) continue;
      double total = 0.0;
      for (Eigen::Index e = 0; e < draws; ++e) {
        total += std::max(current[e], values[i] + eta_samples(e, i));
      }
      if (best_index < 0 || total > best_value) {
        best_value = total;
        best_index = static_cast<int>(i);
      }
    }
    taken[best_index] = true;
    selected.push_back(best_index);
    for (Eigen::Index e = 0; e < draws; ++e) {
      current[e] = std::max(current[e], values[best_index] + eta_samples(e, best_index));
    }
  }
  return selected;
}

TargetSet discobax_greedy(const FunctionView& fn, const FiniteDomain& domain, int k,
                          const Matrix& eta_samples) {
  return TargetSet::from_indices(
      domain, discobax_greedy_indices(fn.values_on(domain), eta_samples, k));
}

Matrix sample_eta(const FiniteDomain& domain, const KernelSpec& spec, int draws, Rng& rng) {
  if (draws < 1) throw std::invalid_argument("need at least one eta draw");
  if (spec.outputscale == 0.0) return Matrix::Zero(draws, domain.size());
  const Matrix cov = kernel_matrix(spec, domain.points, domain.points);
  return sample_gaussian_rows(Vector::Zero(domain.size()), cov, draws, rng);
}

TargetSet local_opt_algorithm(const FunctionView& fn, const BoxDomain& box,
                              const LocalOptOptions& options) {
  box.validate();
  if (!fn.has_gradient()) throw std::invalid_argument("local optimization needs a gradient");
  const int d = box.dim();
  const double max_step = options.initial_step_fraction * box.diameter();
  Rng rng(options.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  Vector best_x = box.lo;
  double best_f = -std::numeric_limits<double>::infinity();
  for (int r = 0; r < std::max(1, options.restarts); ++r) {
    Vector x(d);
    for (int j = 0; j < d; ++j) x[j] = box.lo[j] + unit(rng) * (box.hi[j] - box.lo[j]);
    double fx = fn(x);
    double step = max_step;
    for (int it = 0; it < options.max_steps; ++it) {
      const Vector g = fn.gradient(x);
      const double norm = g.norm();
      if (!(norm > 0.0) || !std::isfinite(norm)) break;
      const Vector direction = g / norm;
      step = std::min(2.0 * step, max_step);
      bool moved = false;
      for (int b = 0; b < options.max_backtracks; ++b, step *= 0.5) {
        const Vector candidate = box.clamp(x + step * direction);
        const double fc = fn(candidate);
        if (fc > fx) {
          x = candidate;
          fx = fc;
          moved = true;
          break;
        }
      }
      if (!moved) break;
    }
    if (fx > best_f) {
      best_f = fx;
      best_x = x;
    }
  }
  return TargetSet::from_point(best_x);
}

TargetSet LevelSetAlgorithm::run(const FunctionView& fn) const {
  return levelset_algorithm(fn, std::get<FiniteDomain>(domain_), threshold_);
}

TopKAlgorithm::TopKAlgorithm(FiniteDomain domain, int k) : domain_(std::move(domain)), k_(k) {
  if (k < 1 || k > std::get<FiniteDomain>(domain_).size()) {
    throw std::invalid_argument("top-k needs 1 <= k <= N");
  }
}

TargetSet TopKAlgorithm::run(const FunctionView& fn) const {
  return topk_algorithm(fn, std::get<FiniteDomain>(domain_), k_);
}

DiscoBaxAlgorithm::DiscoBaxAlgorithm(FiniteDomain domain, int k,
                                     std::shared_ptr<const Matrix> eta)
    : domain_(std::move(domain)), k_(k), eta_(std::move(eta)) {
  if (!eta_ || eta_->rows() == 0) throw std::invalid_argument("no eta draws");
}

TargetSet DiscoBaxAlgorithm::run(const FunctionView& fn) const {
  return discobax_greedy(fn, std::get<FiniteDomain>(domain_), k_, *eta_);
}

TargetSet LocalOptAlgorithm::run(const FunctionView& fn) const {
  return local_opt_algorithm(fn, std::get<BoxDomain>(domain_), options_);
}

}  // namespace bax
