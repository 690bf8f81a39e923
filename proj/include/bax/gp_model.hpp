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

// Exact Gaussian process regression: stationary kernels, marginal
// likelihood fitting, posterior prediction and noiseless fantasy
// conditioning.

#ifndef BAX_GP_MODEL_HPP
#define BAX_GP_MODEL_HPP

#include <limits>
#include <vector>
#include <string>

#include "bax/common.hpp"

namespace bax {

enum class KernelKind { kRbf, kMatern52 };

std::string to_string(KernelKind kind);
KernelKind kernel_kind_from_string(const std::string& name);

struct KernelSpec {
  KernelKind kind = KernelKind::kMatern52;
  Vector lengthscales;  // one per input dimension
  double outputscale = 1.0;
  double noise_variance = 0.0;

  int dim() const { return static_cast<int>(lengthscales.size()); }
  void validate() const;

  static KernelSpec isotropic(KernelKind kind, int dim, double lengthscale,
                              double outputscale, double noise_variance);
};

// Observation history. Rows of `points` are inputs.
struct Dataset {
  Matrix points;
  Vector values;

  Dataset() = default;
  Dataset(Matrix p, Vector v);

  int size() const { return static_cast<int>(values.size()); }
  int dim() const { return static_cast<int>(points.cols()); }
  bool empty() const { return values.size() == 0; }
  void validate() const;
  void append(const Eigen::Ref<const Vector>& x, double y);
};

double kernel_eval(const KernelSpec& spec, const Eigen::Ref<const Vector>& a,
                   const Eigen::Ref<const Vector>& b);

// Gram matrix between the rows of `a` and the rows of `b`.
Matrix kernel_matrix(const KernelSpec& spec, const Matrix& a, const Matrix& b);

// Gradient of k(x, other) with respect to x.
Vector kernel_grad_x(const KernelSpec& spec, const Eigen::Ref<const Vector>& x,
                     const Eigen::Ref<const Vector>& other);

// Cholesky factor of `a` with diagonal jitter `jitter`, doubling the jitter
// up to three times before giving up.
Matrix jittered_cholesky(const Matrix& a, double jitter);

// Packing order used by the gradient and the fitter:
// [log l_1, ..., log l_d, log outputscale, log noise_variance].
Vector pack_log_params(const KernelSpec& spec);
KernelSpec unpack_log_params(KernelKind kind, const Vector& log_params);

double log_marginal_likelihood(const Dataset& data, const KernelSpec& spec,
                               double mean_constant = 0.0);

struct LikelihoodGradient {
  double value = 0.0;
  Vector gradient;  // with respect to pack_log_params(spec)
};

LikelihoodGradient log_marginal_likelihood_gradient(const Dataset& data,
                                                    const KernelSpec& spec,
                                                    double mean_constant = 0.0);

struct HyperparameterBounds {
  Vector lengthscale_lo;
  Vector lengthscale_hi;
  double outputscale_lo = 1e-4;
  double outputscale_hi = 1e4;
  double noise_lo = 1e-6;
  double noise_hi = 1.0;

  // Bounds scaled to the data: lengthscales in [1e-3, 1e3] times the
  // per-dimension extent, outputscale in [1e-4, 1e4] times var(y), noise in
  // [1e-6, 1] times var(y).
  static HyperparameterBounds for_data(const Dataset& data,
                                       const Vector& input_extent);

  Vector log_lower() const;
  Vector log_upper() const;
};

struct FitResult {
  KernelSpec spec;
  double mean_constant = 0.0;
  double log_likelihood = -std::numeric_limits<double>::infinity();
  // False when no restart improved on the initial spec; `spec` is then the
  // initial spec unchanged.
  bool improved = false;
};

// Maximizes the marginal likelihood over log-parameters with a projected
// quasi-Newton ascent from `initial` and from `restarts` random starts.
// The constant mean is fixed to the sample mean of the values.
FitResult fit_hyperparameters(const Dataset& data, const KernelSpec& initial,
                              int restarts, const HyperparameterBounds& bounds,
                              Rng& rng, int max_iterations = 100);

// Scale factor used for output standardization: var(y), or 1 when the values
// are (numerically) constant.
double output_variance_scale(const Vector& values);

struct Prediction {
  Vector mean;
  Matrix cov;  // latent f, excludes observation noise
};

// Posterior of a GP with constant prior mean given a dataset. Immutable.
class GPPosterior {
 public:
  GPPosterior(Dataset data, KernelSpec spec, double mean_constant = 0.0);

  const Dataset& dataset() const { return data_; }
  const KernelSpec& kernel() const { return spec_; }
  double mean_constant() const { return mean_constant_; }
  const Matrix& chol() const { return chol_; }
  const Vector& alpha() const { return alpha_; }
  // Per-observation noise variance on the diagonal (fantasies carry jitter).
  const Vector& observation_noise() const { return noise_; }
  int dim() const { return spec_.dim(); }

  Prediction predict(const Matrix& queries) const;
  Vector mean(const Matrix& queries) const;
  double mean_at(const Eigen::Ref<const Vector>& x) const;
  Vector mean_gradient(const Eigen::Ref<const Vector>& x) const;
  // Latent variances only (diagonal of predict().cov).
  Vector variance(const Matrix& queries) const;
  // Posterior covariance between two query sets.
  Matrix covariance(const Matrix& a, const Matrix& b) const;

  // Conditions on exact values at `points` (zero noise plus fantasy_jitter()).
  // Exact duplicate rows are collapsed to their first occurrence.
  GPPosterior condition_noiseless(const Matrix& points,
                                  const Vector& values) const;

  double fantasy_jitter() const { return 1e-8 * spec_.outputscale; }

  // L^{-1} K(train, queries), where L L^T = K + noise.
  Matrix whitened_cross(const Matrix& queries) const;

 private:
  GPPosterior(Dataset data, KernelSpec spec, double mean_constant,
              Vector noise, Matrix chol);
  void solve_alpha();
  void check_query_dim(const Matrix& queries) const;

  Dataset data_;
  KernelSpec spec_;
  double mean_constant_ = 0.0;
  Vector noise_;
  Matrix chol_;
  Vector alpha_;
};

// Differential entropy of a Gaussian. Returns -infinity for zero variance.
double gaussian_entropy(double variance);

// Removes exact duplicate rows, keeping first occurrences. Returns the kept
// row indices.
std::vector<int> unique_rows(const Matrix& points);

}  // namespace bax

#endif  // BAX_GP_MODEL_HPP
