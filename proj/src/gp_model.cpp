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

#include "bax/gp_model.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

namespace bax {

namespace {

constexpr double kSqrt5 = 2.23606797749978969640917366873128;
constexpr double kBaseJitter = 1e-8;

double scaled_sq_dist(const KernelSpec& spec, const Eigen::Ref<const Vector>& a,
                      const Eigen::Ref<const Vector>& b) {
  double r2 = 0.0;
  for (int j = 0; j < spec.dim(); ++j) {
    const double t = (a[j] - b[j]) / spec.lengthscales[j];
    r2 += t * t;
  }
  return r2;
}

// Kernel value as a function of the squared scaled distance.
double profile(const KernelSpec& spec, double r2) {
  if (spec.kind == KernelKind::kRbf) {
    return spec.outputscale * std::exp(-0.5 * r2);
  }
  const double r = std::sqrt(r2);
  return spec.outputscale * (1.0 + kSqrt5 * r + 5.0 / 3.0 * r2) *
         std::exp(-kSqrt5 * r);
}

// d k / d (r^2 / 2) up to sign, i.e. the factor g such that
// d k / d log l_j = g * r_j^2 and d k / d x_j = -g * (x_j - x'_j) / l_j^2.
double radial_factor(const KernelSpec& spec, double r2) {
  if (spec.kind == KernelKind::kRbf) {
    return spec.outputscale * std::exp(-0.5 * r2);
  }
  const double r = std::sqrt(r2);
  return spec.outputscale * 5.0 / 3.0 * (1.0 + kSqrt5 * r) *
         std::exp(-kSqrt5 * r);
}

void check_dim(const KernelSpec& spec, Eigen::Index n, const char* what) {
  if (n != spec.dim()) {
    throw DimensionError(std::string(what) + ": expected dimension " +
                         std::to_string(spec.dim()) + ", got " +
                         std::to_string(n));
  }
}

}  // namespace

std::string to_string(KernelKind kind) {
  return kind == KernelKind::kRbf ? "rbf" : "matern52";
}

KernelKind kernel_kind_from_string(const std::string& name) {
  if (name == "rbf" || name == "RBF") return KernelKind::kRbf;
  if (name == "matern52" || name == "Matern52") return KernelKind::kMatern52;
  throw ConfigError("unknown kernel kind: " + name);
}

void KernelSpec::validate() const {
  if (lengthscales.size() == 0) {
    throw DimensionError("kernel spec has no lengthscales");
  }
  if ((lengthscales.array() <= 0.0).any()) {
    throw std::invalid_argument("lengthscales must be positive");
  }
  if (!(outputscale > 0.0)) {
    throw std::invalid_argument("outputscale must be positive");
  }
  if (!(noise_variance >= 0.0)) {
    throw std::invalid_argument("noise variance must be non-negative");
  }
}

KernelSpec KernelSpec::isotropic(KernelKind kind, int dim, double lengthscale,
                                 double outputscale, double noise_variance) {
  KernelSpec spec;
  spec.kind = kind;
  spec.lengthscales = Vector::Constant(dim, lengthscale);
  spec.outputscale = outputscale;
  spec.noise_variance = noise_variance;
  spec.validate();
  return spec;
}

Dataset::Dataset(Matrix p, Vector v) : points(std::move(p)), values(std::move(v)) {
  validate();
}

void Dataset::validate() const {
  if (points.rows() != values.size()) {
    throw DimensionError("dataset has " + std::to_string(points.rows()) +
                         " points but " + std::to_string(values.size()) +
                         " values");
  }
}

void Dataset::append(const Eigen::Ref<const Vector>& x, double y) {
  if (points.rows() > 0 && x.size() != points.cols()) {
    throw DimensionError("appended point has the wrong dimension");
  }
  const Eigen::Index n = points.rows();
  Matrix grown(n + 1, x.size());
  if (n > 0) grown.topRows(n) = points;
  grown.row(n) = x.transpose();
  points = std::move(grown);
  values.conservativeResize(n + 1);
  values[n] = y;
}

double kernel_eval(const KernelSpec& spec, const Eigen::Ref<const Vector>& a,
                   const Eigen::Ref<const Vector>& b) {
  check_dim(spec, a.size(), "kernel_eval");
  check_dim(spec, b.size(), "kernel_eval");
  return profile(spec, scaled_sq_dist(spec, a, b));
}

Matrix kernel_matrix(const KernelSpec& spec, const Matrix& a, const Matrix& b) {
  if (a.rows() > 0) check_dim(spec, a.cols(), "kernel_matrix");
  if (b.rows() > 0) check_dim(spec, b.cols(), "kernel_matrix");
  if (a.rows() == 0 || b.rows() == 0) return Matrix(a.rows(), b.rows());
  const Vector inv_l = spec.lengthscales.cwiseInverse();
  const Matrix sa = a * inv_l.asDiagonal();
  const Matrix sb = b * inv_l.asDiagonal();
  Matrix out(a.rows(), b.rows());
  for (Eigen::Index j = 0; j < b.rows(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      out(i, j) = profile(spec, (sa.row(i) - sb.row(j)).squaredNorm());
    }
  }
  return out;
}

Vector kernel_grad_x(const KernelSpec& spec, const Eigen::Ref<const Vector>& x,
                     const Eigen::Ref<const Vector>& other) {
  check_dim(spec, x.size(), "kernel_grad_x");
  check_dim(spec, other.size(), "kernel_grad_x");
  const double g = radial_factor(spec, scaled_sq_dist(spec, x, other));
  return -g * ((x - other).array() / spec.lengthscales.array().square()).matrix();
}

Matrix jittered_cholesky(const Matrix& a, double jitter) {
  if (a.rows() == 0) return Matrix(0, 0);
  double current = jitter;
  for (int attempt = 0; attempt < 4; ++attempt) {
    Matrix shifted = a;
    shifted.diagonal().array() += current;
    Eigen::LLT<Matrix> llt(shifted);
    if (llt.info() == Eigen::Success) {
      Matrix l = llt.matrixL();
      if (l.diagonal().allFinite()) return l;
    }
    current *= 2.0;
  }
  throw FactorizationError("covariance matrix is not positive definite after jitter " +
                           std::to_string(current / 2.0));
}

Vector pack_log_params(const KernelSpec& spec) {
  const int d = spec.dim();
  Vector p(d + 2);
  p.head(d) = spec.lengthscales.array().log().matrix();
  p[d] = std::log(spec.outputscale);
  p[d + 1] = std::log(spec.noise_variance);
  return p;
}

KernelSpec unpack_log_params(KernelKind kind, const Vector& log_params) {
  const int d = static_cast<int>(log_params.size()) - 2;
  KernelSpec spec;
  spec.kind = kind;
  spec.lengthscales = log_params.head(d).array().exp().matrix();
  spec.outputscale = std::exp(log_params[d]);
  spec.noise_variance = std::exp(log_params[d + 1]);
  return spec;
}

double log_marginal_likelihood(const Dataset& data, const KernelSpec& spec,
                               double mean_constant) {
  data.validate();
  spec.validate();
  if (data.empty()) return 0.0;
  check_dim(spec, data.dim(), "log_marginal_likelihood");
  const int n = data.size();
  Matrix k = kernel_matrix(spec, data.points, data.points);
  k.diagonal().array() += spec.noise_variance;
  const Matrix l = jittered_cholesky(k, kBaseJitter * spec.outputscale);
  const Vector centered = data.values.array() - mean_constant;
  const Vector w = l.triangularView<Eigen::Lower>().solve(centered);
  const double log_det = 2.0 * l.diagonal().array().log().sum();
  return -0.5 * w.squaredNorm() - 0.5 * log_det -
         0.5 * n * std::log(2.0 * std::numbers::pi);
}

LikelihoodGradient log_marginal_likelihood_gradient(const Dataset& data,
                                                    const KernelSpec& spec,
                                                    double mean_constant) {
  data.validate();
  spec.validate();
  check_dim(spec, data.dim(), "log_marginal_likelihood_gradient");
  const int n = data.size();
  const int d = spec.dim();
  LikelihoodGradient out;
  out.gradient = Vector::Zero(d + 2);
  if (n == 0) return out;

  const Matrix kf = kernel_matrix(spec, data.points, data.points);
  Matrix k = kf;
  k.diagonal().array() += spec.noise_variance;
  const double jitter = kBaseJitter * spec.outputscale;
  const Matrix l = jittered_cholesky(k, jitter);
  const Vector centered = data.values.array() - mean_constant;
  const auto tri = l.triangularView<Eigen::Lower>();
  const Vector w = tri.solve(centered);
  const Vector alpha = l.transpose().triangularView<Eigen::Upper>().solve(w);
  const double log_det = 2.0 * l.diagonal().array().log().sum();
  out.value = -0.5 * w.squaredNorm() - 0.5 * log_det -
              0.5 * n * std::log(2.0 * std::numbers::pi);

  Matrix k_inv = tri.solve(Matrix::Identity(n, n));
  k_inv = k_inv.transpose() * k_inv;
  // dL/dtheta = 0.5 tr(W dK/dtheta) with W = alpha alpha^T - K^{-1}.
  const Matrix weight = alpha * alpha.transpose() - k_inv;

  Matrix weighted_radial(n, n);
  for (int b = 0; b < n; ++b) {
    for (int a = 0; a < n; ++a) {
      const double r2 = scaled_sq_dist(spec, data.points.row(a).transpose(),
                                       data.points.row(b).transpose());
      weighted_radial(a, b) = weight(a, b) * radial_factor(spec, r2);
    }
  }
  for (int j = 0; j < d; ++j) {
    double acc = 0.0;
    for (int b = 0; b < n; ++b) {
      for (int a = 0; a < n; ++a) {
        const double diff = (data.points(a, j) - data.points(b, j)) / spec.lengthscales[j];
        acc += weighted_radial(a, b) * diff * diff;
      }
    }
    out.gradient[j] = 0.5 * acc;
  }
  // The jitter scales with the outputscale, so it contributes here as well.
  out.gradient[d] = 0.5 * ((weight.array() * kf.array()).sum() + jitter * weight.trace());
  out.gradient[d + 1] = 0.5 * spec.noise_variance * weight.trace();
  return out;
}

double output_variance_scale(const Vector& values) {
  if (values.size() < 2) return 1.0;
  const double mean = values.mean();
  const double var = (values.array() - mean).square().sum() / (values.size() - 1);
  const double scale = std::max(1.0, values.cwiseAbs().maxCoeff());
  if (!(var > 1e-12 * scale * scale)) return 1.0;
  return var;
}

HyperparameterBounds HyperparameterBounds::for_data(const Dataset& data,
                                                    const Vector& input_extent) {
  HyperparameterBounds b;
  const double var = output_variance_scale(data.values);
  b.lengthscale_lo = 1e-3 * input_extent;
  b.lengthscale_hi = 1e3 * input_extent;
  b.outputscale_lo = 1e-4 * var;
  b.outputscale_hi = 1e4 * var;
  b.noise_lo = 1e-6 * var;
  b.noise_hi = 1.0 * var;
  return b;
}

Vector HyperparameterBounds::log_lower() const {
  const auto d = lengthscale_lo.size();
  Vector out(d + 2);
  out.head(d) = lengthscale_lo.array().log().matrix();
  out[d] = std::log(outputscale_lo);
  out[d + 1] = std::log(noise_lo);
  return out;
}

Vector HyperparameterBounds::log_upper() const {
  const auto d = lengthscale_hi.size();
  Vector out(d + 2);
  out.head(d) = lengthscale_hi.array().log().matrix();
  out[d] = std::log(outputscale_hi);
  out[d + 1] = std::log(noise_hi);
  return out;
}

namespace {

struct AscentResult {
  Vector x;
  double value = -std::numeric_limits<double>::infinity();
};

// Projected BFGS ascent on a box. The inverse-Hessian estimate is reset to
// the identity whenever a step fails to make progress.
AscentResult projected_bfgs_ascent(const Dataset& data, KernelKind kind,
                                   double mean_constant, Vector x,
                                   const Vector& lo, const Vector& hi,
                                   int max_iterations) {
  const auto p = x.size();
  auto evaluate = [&](const Vector& at, Vector* grad) -> double {
    try {
      const KernelSpec spec = unpack_log_params(kind, at);
      if (grad == nullptr) return log_marginal_likelihood(data, spec, mean_constant);
      LikelihoodGradient lg = log_marginal_likelihood_gradient(data, spec, mean_constant);
      *grad = lg.gradient;
      return lg.value;
    } catch (const FactorizationError&) {
      if (grad) *grad = Vector::Zero(at.size());
      return -std::numeric_limits<double>::infinity();
    }
  };
  auto project = [&](Vector v) { return v.cwiseMax(lo).cwiseMin(hi); };

  x = project(x);
  Vector grad;
  double value = evaluate(x, &grad);
  if (!std::isfinite(value)) return {x, value};
  Matrix h = Matrix::Identity(p, p);

  for (int it = 0; it < max_iterations; ++it) {
    // Freeze coordinates sitting on a bound with the gradient pointing out.
    Vector free_grad = grad;
    for (Eigen::Index i = 0; i < p; ++i) {
      if ((x[i] <= lo[i] && grad[i] < 0.0) || (x[i] >= hi[i] && grad[i] > 0.0)) {
        free_grad[i] = 0.0;
      }
    }
    if (free_grad.lpNorm<Eigen::Infinity>() < 1e-7) break;

    bool accepted = false;
    Vector x_new, grad_new;
    double value_new = value;
    for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
      Vector direction = h * free_grad;
      if (direction.dot(free_grad) <= 0.0) {
        h.setIdentity();
        direction = free_grad;
      }
      const double max_step = direction.lpNorm<Eigen::Infinity>();
      double t = max_step > 2.0 ? 2.0 / max_step : 1.0;
      for (int back = 0; back < 30; ++back, t *= 0.5) {
        x_new = project(x + t * direction);
        const double candidate = evaluate(x_new, &grad_new);
        if (std::isfinite(candidate) &&
            candidate >= value + 1e-4 * grad.dot(x_new - x) &&
            candidate >= value) {
          value_new = candidate;
          accepted = true;
          break;
        }
      }
      if (!accepted) h.setIdentity();
    }
    if (!accepted) break;

    const Vector s = x_new - x;
    const Vector y = grad - grad_new;  // gradient change of the negated objective
    const double sy = s.dot(y);
    if (sy > 1e-12) {
      const double rho = 1.0 / sy;
      const Matrix ident = Matrix::Identity(p, p);
      h = (ident - rho * s * y.transpose()) * h * (ident - rho * y * s.transpose()) +
          rho * s * s.transpose();
    }
    const double change = value_new - value;
    x = x_new;
    grad = grad_new;
    value = value_new;
    if (change < 1e-10 * (1.0 + std::abs(value)) && s.lpNorm<Eigen::Infinity>() < 1e-8) break;
  }
  return {x, value};
}

}  // namespace

FitResult fit_hyperparameters(const Dataset& data, const KernelSpec& initial,
                              int restarts, const HyperparameterBounds& bounds,
                              Rng& rng, int max_iterations) {
  data.validate();
  initial.validate();
  if (data.size() < 2) {
    throw std::invalid_argument("fit_hyperparameters needs at least two observations");
  }
  check_dim(initial, data.dim(), "fit_hyperparameters");
  if (bounds.lengthscale_lo.size() != initial.dim() ||
      bounds.lengthscale_hi.size() != initial.dim()) {
    throw DimensionError("hyperparameter bounds have the wrong dimension");
  }

  const double mean_constant = data.values.mean();
  const Vector lo = bounds.log_lower();
  const Vector hi = bounds.log_upper();

  FitResult result;
  result.spec = initial;
  result.mean_constant = mean_constant;
  // The initial spec may be degenerate (e.g. zero noise); score it as given.
  try {
    result.log_likelihood = log_marginal_likelihood(data, initial, mean_constant);
  } catch (const FactorizationError&) {
  }
  const double initial_value = result.log_likelihood;

  KernelSpec start = initial;
  start.noise_variance = std::max(start.noise_variance, bounds.noise_lo);
  std::vector<Vector> starts{pack_log_params(start)};
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int r = 0; r < restarts; ++r) {
    Vector s(lo.size());
    for (Eigen::Index i = 0; i < s.size(); ++i) {
      // Sample away from the extreme ends of each log-range.
      const double a = lo[i] + 0.35 * (hi[i] - lo[i]);
      const double b = hi[i] - 0.35 * (hi[i] - lo[i]);
      s[i] = a + (b - a) * unit(rng);
    }
    starts.push_back(s);
  }

  for (const Vector& s : starts) {
    const AscentResult ascent = projected_bfgs_ascent(
        data, initial.kind, mean_constant, s, lo, hi, max_iterations);
    if (std::isfinite(ascent.value) && ascent.value > result.log_likelihood) {
      result.log_likelihood = ascent.value;
      result.spec = unpack_log_params(initial.kind, ascent.x);
    }
  }
  result.improved = result.log_likelihood > initial_value;
  if (!result.improved) {
    result.spec = initial;
    result.log_likelihood = initial_value;
  }
  return result;
}

GPPosterior::GPPosterior(Dataset data, KernelSpec spec, double mean_constant)
    : data_(std::move(data)), spec_(std::move(spec)), mean_constant_(mean_constant) {
  data_.validate();
  spec_.validate();
  if (!data_.empty()) check_dim(spec_, data_.dim(), "GPPosterior");
  noise_ = Vector::Constant(data_.size(), spec_.noise_variance);
  Matrix k = kernel_matrix(spec_, data_.points, data_.points);
  k.diagonal() += noise_;
  chol_ = jittered_cholesky(k, kBaseJitter * spec_.outputscale);
  solve_alpha();
}

GPPosterior::GPPosterior(Dataset data, KernelSpec spec, double mean_constant,
                         Vector noise, Matrix chol)
    : data_(std::move(data)),
      spec_(std::move(spec)),
      mean_constant_(mean_constant),
      noise_(std::move(noise)),
      chol_(std::move(chol)) {
  solve_alpha();
}

void GPPosterior::solve_alpha() {
  if (data_.empty()) {
    alpha_ = Vector(0);
    return;
  }
  const Vector centered = data_.values.array() - mean_constant_;
  const auto tri = chol_.triangularView<Eigen::Lower>();
  alpha_ = chol_.transpose().triangularView<Eigen::Upper>().solve(tri.solve(centered));
}

void GPPosterior::check_query_dim(const Matrix& queries) const {
  if (queries.rows() > 0) check_dim(spec_, queries.cols(), "query");
}

Matrix GPPosterior::whitened_cross(const Matrix& queries) const {
  if (data_.empty()) return Matrix(0, queries.rows());
  const Matrix cross = kernel_matrix(spec_, data_.points, queries);
  return chol_.triangularView<Eigen::Lower>().solve(cross);
}

Prediction GPPosterior::predict(const Matrix& queries) const {
  check_query_dim(queries);
  Prediction out;
  const Matrix prior = kernel_matrix(spec_, queries, queries);
  if (data_.empty()) {
    out.mean = Vector::Constant(queries.rows(), mean_constant_);
    out.cov = prior;
    return out;
  }
  const Matrix cross = kernel_matrix(spec_, data_.points, queries);
  out.mean = (cross.transpose() * alpha_).array() + mean_constant_;
  const Matrix v = chol_.triangularView<Eigen::Lower>().solve(cross);
  out.cov = prior - v.transpose() * v;
  out.cov = 0.5 * (out.cov + out.cov.transpose()).eval();
  return out;
}

Vector GPPosterior::mean(const Matrix& queries) const {
  check_query_dim(queries);
  if (data_.empty()) return Vector::Constant(queries.rows(), mean_constant_);
  const Matrix cross = kernel_matrix(spec_, data_.points, queries);
  return (cross.transpose() * alpha_).array() + mean_constant_;
}

double GPPosterior::mean_at(const Eigen::Ref<const Vector>& x) const {
  check_dim(spec_, x.size(), "query");
  double acc = mean_constant_;
  for (int i = 0; i < data_.size(); ++i) {
    acc += alpha_[i] * profile(spec_, scaled_sq_dist(spec_, x, data_.points.row(i).transpose()));
  }
  return acc;
}

Vector GPPosterior::mean_gradient(const Eigen::Ref<const Vector>& x) const {
  check_dim(spec_, x.size(), "query");
  Vector g = Vector::Zero(x.size());
  for (int i = 0; i < data_.size(); ++i) {
    g += alpha_[i] * kernel_grad_x(spec_, x, data_.points.row(i).transpose());
  }
  return g;
}

Vector GPPosterior::variance(const Matrix& queries) const {
  check_query_dim(queries);
  Vector out = Vector::Constant(queries.rows(), spec_.outputscale);
  if (data_.empty()) return out;
  const Matrix v = whitened_cross(queries);
  out -= v.colwise().squaredNorm().transpose();
  return out;
}

Matrix GPPosterior::covariance(const Matrix& a, const Matrix& b) const {
  check_query_dim(a);
  check_query_dim(b);
  Matrix out = kernel_matrix(spec_, a, b);
  if (data_.empty()) return out;
  out -= whitened_cross(a).transpose() * whitened_cross(b);
  return out;
}

GPPosterior GPPosterior::condition_noiseless(const Matrix& points,
                                             const Vector& values) const {
  if (points.rows() != values.size()) {
    throw DimensionError("fantasy points and values differ in length");
  }
  if (points.rows() == 0) return *this;
  check_query_dim(points);

  const std::vector<int> keep = unique_rows(points);
  const int n = data_.size();
  const int m = static_cast<int>(keep.size());
  Dataset augmented;
  augmented.points.resize(n + m, spec_.dim());
  augmented.values.resize(n + m);
  if (n > 0) {
    augmented.points.topRows(n) = data_.points;
    augmented.values.head(n) = data_.values;
  }
  for (int i = 0; i < m; ++i) {
    augmented.points.row(n + i) = points.row(keep[i]);
    augmented.values[n + i] = values[keep[i]];
  }
  Vector noise(n + m);
  noise.head(n) = noise_;
  noise.tail(m).setConstant(fantasy_jitter());

  // Block Cholesky update: the leading factor is reused as is.
  const Matrix new_pts = augmented.points.bottomRows(m);
  Matrix k22 = kernel_matrix(spec_, new_pts, new_pts);
  k22.diagonal() += noise.tail(m);
  Matrix chol = Matrix::Zero(n + m, n + m);
  if (n > 0) {
    const Matrix b = whitened_cross(new_pts);  // n x m
    chol.topLeftCorner(n, n) = chol_;
    chol.bottomLeftCorner(m, n) = b.transpose();
    k22 -= b.transpose() * b;
  }
  try {
    chol.bottomRightCorner(m, m) = jittered_cholesky(k22, kBaseJitter * spec_.outputscale);
  } catch (const FactorizationError&) {
    throw FactorizationError("singular fantasy system in condition_noiseless");
  }
  return GPPosterior(std::move(augmented), spec_, mean_constant_, std::move(noise),
                     std::move(chol));
}

double gaussian_entropy(double variance) {
  if (variance < 0.0 || std::isnan(variance)) {
    throw std::invalid_argument("entropy of a negative variance");
  }
  if (variance == 0.0) return -std::numeric_limits<double>::infinity();
  return 0.5 * std::log(2.0 * std::numbers::pi * std::numbers::e * variance);
}

std::vector<int> unique_rows(const Matrix& points) {
  std::vector<int> keep;
  std::map<std::vector<double>, int> seen;
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    std::vector<double> key(points.cols());
    for (Eigen::Index j = 0; j < points.cols(); ++j) key[j] = points(i, j);
    if (seen.emplace(std::move(key), static_cast<int>(i)).second) {
      keep.push_back(static_cast<int>(i));
    }
  }
  return keep;
}

}  // namespace bax
