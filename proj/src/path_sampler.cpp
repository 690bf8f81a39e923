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

#include "bax/path_sampler.hpp"

#include <cmath>
#include <numbers>

namespace bax {

Matrix FeatureMap::features(const Matrix& inputs) const {
  if (inputs.rows() > 0 && inputs.cols() != dim()) {
    throw DimensionError("feature map input has the wrong dimension");
  }
  Matrix z = inputs * frequencies.transpose();
  z.rowwise() += phases.transpose();
  return amplitude * z.array().cos().matrix();
}

FeatureMap draw_feature_map(const KernelSpec& spec, int feature_count, Rng& rng) {
  spec.validate();
  if (feature_count < 1) throw std::invalid_argument("feature count must be >= 1");
  const int d = spec.dim();
  std::normal_distribution<double> normal(0.0, 1.0);
  std::chi_squared_distribution<double> chi2(5.0);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);

  FeatureMap fm;
  fm.frequencies.resize(feature_count, d);
  fm.phases.resize(feature_count);
  for (int i = 0; i < feature_count; ++i) {
    // Matern-5/2 has a multivariate Student-t spectral density with 5
    // degrees of freedom; the RBF density is Gaussian.
    double scale = 1.0;
    if (spec.kind == KernelKind::kMatern52) scale = std::sqrt(5.0 / chi2(rng));
    for (int j = 0; j < d; ++j) {
      fm.frequencies(i, j) = scale * normal(rng) / spec.lengthscales[j];
    }
    double b = phase(rng);
    if (b >= 2.0 * std::numbers::pi) b = 0.0;
    fm.phases[i] = b;
  }
  fm.amplitude = std::sqrt(2.0 * spec.outputscale / feature_count);
  return fm;
}

double SamplePath::operator()(const Vector& x) const {
  if (x.size() != features->dim()) throw DimensionError("path input has the wrong dimension");
  const Vector z = features->frequencies * x + features->phases;
  return offset + features->amplitude * weights.dot(z.array().cos().matrix());
}

Vector SamplePath::values(const Matrix& inputs) const {
  return (features->features(inputs) * weights).array() + offset;
}

Vector SamplePath::gradient(const Vector& x) const {
  if (x.size() != features->dim()) throw DimensionError("path input has the wrong dimension");
  const Vector z = features->frequencies * x + features->phases;
  const Vector s = weights.array() * z.array().sin();
  return -features->amplitude * (features->frequencies.transpose() * s);
}

FunctionView SamplePath::view() const {
  auto self = std::make_shared<const SamplePath>(*this);
  FunctionView v;
  v.value = [self](const Vector& x) { return (*self)(x); };
  v.gradient = [self](const Vector& x) { return self->gradient(x); };
  v.batch = [self](const Matrix& m) { return self->values(m); };
  return v;
}

double eval_path(const SamplePath& path, const Vector& x) { return path(x); }

Vector eval_path_grad(const SamplePath& path, const Vector& x) {
  return path.gradient(x);
}

std::vector<SamplePath> sample_paths(const GPPosterior& post,
                                     std::shared_ptr<const FeatureMap> features,
                                     int count, Rng& rng) {
  if (!features) throw std::invalid_argument("feature map is null");
  if (features->dim() != post.dim()) {
    throw DimensionError("feature map and posterior dimensions differ");
  }
  const int big_d = features->feature_count();
  const Dataset& data = post.dataset();
  const int n = data.size();

  // Weight-space posterior via its dual form: with theta0 ~ N(0, I) and
  // eps ~ N(0, Sigma), theta0 + Phi^T (Phi Phi^T + Sigma)^{-1} (y - Phi theta0 - eps)
  // is an exact draw from N(theta | y) of the linear model y = Phi theta + eps.
  Matrix phi;
  Matrix chol;
  Vector centered;
  Vector noise;
  if (n > 0) {
    phi = features->features(data.points);
    noise = post.observation_noise().array() + 1e-8 * post.kernel().outputscale;
    Matrix gram = phi * phi.transpose();
    gram.diagonal() += noise;
    try {
      chol = jittered_cholesky(gram, 1e-8 * post.kernel().outputscale);
    } catch (const FactorizationError&) {
      throw FactorizationError("singular weight-posterior system");
    }
    centered = data.values.array() - post.mean_constant();
  }

  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<SamplePath> out;
  out.reserve(count);
  for (int p = 0; p < count; ++p) {
    SamplePath path;
    path.features = features;
    path.offset = post.mean_constant();
    path.seed = rng();
    Rng local(path.seed);
    Vector theta(big_d);
    for (int i = 0; i < big_d; ++i) theta[i] = normal(local);
    if (n > 0) {
      Vector residual = centered - phi * theta;
      for (int i = 0; i < n; ++i) residual[i] -= std::sqrt(noise[i]) * normal(local);
      const auto tri = chol.triangularView<Eigen::Lower>();
      const Vector solved = chol.transpose().triangularView<Eigen::Upper>().solve(tri.solve(residual));
      theta += phi.transpose() * solved;
    }
    path.weights = std::move(theta);
    out.push_back(std::move(path));
  }
  return out;
}

std::vector<SamplePath> FourierSampler::draw_paths(const GPPosterior& post, int count,
                                                   Rng& rng) const {
  auto fm = std::make_shared<const FeatureMap>(
      draw_feature_map(post.kernel(), feature_count_, rng));
  return sample_paths(post, fm, count, rng);
}

std::vector<FunctionView> FourierSampler::draw(const GPPosterior& post, int count,
                                               Rng& rng) const {
  std::vector<FunctionView> out;
  for (const SamplePath& p : draw_paths(post, count, rng)) out.push_back(p.view());
  return out;
}

Matrix sample_gaussian_rows(const Vector& mean, const Matrix& cov, int count, Rng& rng) {
  const Eigen::Index n = mean.size();
  const double scale = n > 0 ? std::max(cov.diagonal().maxCoeff(), 1e-300) : 1.0;
  const Matrix l = jittered_cholesky(cov, 1e-10 * scale);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix out(count, n);
  Vector z(n);
  for (int r = 0; r < count; ++r) {
    for (Eigen::Index i = 0; i < n; ++i) z[i] = normal(rng);
    out.row(r) = (mean + l * z).transpose();
  }
  return out;
}

std::vector<FunctionView> ExactFiniteSampler::draw(const GPPosterior& post, int count,
                                                   Rng& rng) const {
  const Prediction pred = post.predict(domain_.points);
  const Matrix draws = sample_gaussian_rows(pred.mean, pred.cov, count, rng);
  std::vector<FunctionView> out;
  for (int r = 0; r < count; ++r) {
    out.push_back(FunctionView::from_table(domain_, draws.row(r).transpose()));
  }
  return out;
}

}  // namespace bax
