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

// Approximate posterior function draws from random Fourier features. A
// SamplePath is a fixed cosine expansion, so it can be evaluated (with its
// gradient) anywhere, any number of times.

#ifndef BAX_PATH_SAMPLER_HPP
#define BAX_PATH_SAMPLER_HPP

#include <memory>
#include <vector>

#include "bax/common.hpp"
#include "bax/domain.hpp"
#include "bax/gp_model.hpp"

namespace bax {

inline constexpr int kDefaultFeatureCount = 1000;

struct FeatureMap {
  Matrix frequencies;  // D x d
  Vector phases;       // D, in [0, 2 pi)
  double amplitude = 1.0;

  int feature_count() const { return static_cast<int>(phases.size()); }
  int dim() const { return static_cast<int>(frequencies.cols()); }
  // amplitude * cos(X W^T + b), one row per input row.
  Matrix features(const Matrix& inputs) const;
};

FeatureMap draw_feature_map(const KernelSpec& spec, int feature_count, Rng& rng);

struct SamplePath {
  std::shared_ptr<const FeatureMap> features;
  Vector weights;
  // Constant prior mean of the posterior the path was drawn from.
  double offset = 0.0;
  std::uint64_t seed = 0;

  double operator()(const Vector& x) const;
  Vector values(const Matrix& inputs) const;
  Vector gradient(const Vector& x) const;
  FunctionView view() const;
};

double eval_path(const SamplePath& path, const Vector& x);
Vector eval_path_grad(const SamplePath& path, const Vector& x);

// Draws `count` independent weight vectors from the Bayesian linear model
// posterior over the features given the posterior's data, sharing one map.
std::vector<SamplePath> sample_paths(const GPPosterior& post,
                                     std::shared_ptr<const FeatureMap> features,
                                     int count, Rng& rng);

// Source of posterior function draws used by the acquisition strategies.
class PosteriorSampler {
 public:
  virtual ~PosteriorSampler() = default;
  virtual std::vector<FunctionView> draw(const GPPosterior& post, int count,
                                         Rng& rng) const = 0;
};

// Fresh feature map per call, shared by the `count` paths of that call.
class FourierSampler : public PosteriorSampler {
 public:
  explicit FourierSampler(int feature_count = kDefaultFeatureCount)
      : feature_count_(feature_count) {}
  std::vector<FunctionView> draw(const GPPosterior& post, int count,
                                 Rng& rng) const override;
  std::vector<SamplePath> draw_paths(const GPPosterior& post, int count,
                                     Rng& rng) const;
  int feature_count() const { return feature_count_; }

 private:
  int feature_count_;
};

// Exact joint Gaussian draws restricted to a finite table of points.
class ExactFiniteSampler : public PosteriorSampler {
 public:
  explicit ExactFiniteSampler(FiniteDomain domain) : domain_(std::move(domain)) {}
  std::vector<FunctionView> draw(const GPPosterior& post, int count,
                                 Rng& rng) const override;

 private:
  FiniteDomain domain_;
};

// Rows are independent draws from N(mean, cov) using a jittered Cholesky
// factor of cov.
Matrix sample_gaussian_rows(const Vector& mean, const Matrix& cov, int count,
                            Rng& rng);

}  // namespace bax

#endif  // BAX_PATH_SAMPLER_HPP
