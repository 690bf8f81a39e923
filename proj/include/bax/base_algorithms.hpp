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

// Base algorithms: procedures that, given unrestricted access to a function,
// compute the target set we want to infer.

#ifndef BAX_BASE_ALGORITHMS_HPP
#define BAX_BASE_ALGORITHMS_HPP

#include <cstdint>
#include <memory>
#include <vector>

#include "bax/common.hpp"
#include "bax/domain.hpp"
#include "bax/gp_model.hpp"

namespace bax {

inline constexpr int kDefaultEtaDraws = 64;

// Indices with value strictly above `threshold`, in domain order.
TargetSet levelset_algorithm(const FunctionView& fn, const FiniteDomain& domain,
                             double threshold);

// The k largest values; ties go to the lower index. Returned in descending
// value order.
TargetSet topk_algorithm(const FunctionView& fn, const FiniteDomain& domain, int k);

// Monte Carlo estimate of E_eta[max_{x in S} f(x) + eta(x)] with one eta draw
// per row of `eta_samples`.
double discobax_value(const Vector& values, const Matrix& eta_samples,
                      const std::vector<int>& members);

// Greedy maximization of discobax_value over sets of size k. Indices are
// returned in selection order.
TargetSet discobax_greedy(const FunctionView& fn, const FiniteDomain& domain, int k,
                          const Matrix& eta_samples);
std::vector<int> discobax_greedy_indices(const Vector& values,
                                         const Matrix& eta_samples, int k);

// E i.i.d. draws of a zero-mean GP over the domain rows, one per row of the
// result. A zero outputscale yields an all-zero matrix.
Matrix sample_eta(const FiniteDomain& domain, const KernelSpec& spec, int draws, Rng& rng);

struct LocalOptOptions {
  int restarts = 10;
  int max_steps = 200;
  int max_backtracks = 20;
  double initial_step_fraction = 0.1;  // of the box diagonal
  std::uint64_t seed = 0;              // for the uniform starting points
};

// Projected gradient ascent from uniform starts; returns the best terminal
// point as a singleton.
TargetSet local_opt_algorithm(const FunctionView& fn, const BoxDomain& box,
                              const LocalOptOptions& options = {});

// Runtime-polymorphic wrapper used by the acquisition strategies.
class BaseAlgorithm {
 public:
  virtual ~BaseAlgorithm() = default;
  virtual TargetSet run(const FunctionView& fn) const = 0;
  virtual const Domain& domain() const = 0;
  virtual bool needs_gradient() const { return false; }
};

class LevelSetAlgorithm : public BaseAlgorithm {
 public:
  LevelSetAlgorithm(FiniteDomain domain, double threshold)
      : domain_(std::move(domain)), threshold_(threshold) {}
  TargetSet run(const FunctionView& fn) const override;
  const Domain& domain() const override { return domain_; }
  double threshold() const { return threshold_; }

 private:
  Domain domain_;
  double threshold_;
};

class TopKAlgorithm : public BaseAlgorithm {
 public:
  TopKAlgorithm(FiniteDomain domain, int k);
  TargetSet run(const FunctionView& fn) const override;
  const Domain& domain() const override { return domain_; }

 private:
  Domain domain_;
  int k_;
};

class DiscoBaxAlgorithm : public BaseAlgorithm {
 public:
  DiscoBaxAlgorithm(FiniteDomain domain, int k, std::shared_ptr<const Matrix> eta);
  TargetSet run(const FunctionView& fn) const override;
  const Domain& domain() const override { return domain_; }

 private:
  Domain domain_;
  int k_;
  std::shared_ptr<const Matrix> eta_;
};

class LocalOptAlgorithm : public BaseAlgorithm {
 public:
  LocalOptAlgorithm(BoxDomain box, LocalOptOptions options)
      : domain_(std::move(box)), options_(options) {}
  TargetSet run(const FunctionView& fn) const override;
  const Domain& domain() const override { return domain_; }
  bool needs_gradient() const override { return true; }

 private:
  Domain domain_;
  LocalOptOptions options_;
};

}  // namespace bax

#endif  // BAX_BASE_ALGORITHMS_HPP
