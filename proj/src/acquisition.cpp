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

#include "bax/acquisition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <set>

namespace bax {

namespace {

// Index of the largest entry; NaN never wins and ties go to the lower index.
int argmax_lowest(const Vector& v) {
  int best = -1;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::isnan(v[i])) continue;
    if (best < 0 || v[i] > v[best]) best = static_cast<int>(i);
  }
  return best < 0 ? 0 : best;
}

Matrix rows_of(const Matrix& m, const std::vector<int>& rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = m.row(rows[i]);
  }
  return out;
}

Matrix uniform_box_points(const BoxDomain& box, int count, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Matrix out(count, box.dim());
  for (int r = 0; r < count; ++r) {
    for (int j = 0; j < box.dim(); ++j) {
      out(r, j) = box.lo[j] + unit(rng) * (box.hi[j] - box.lo[j]);
    }
  }
  return out;
}

// Candidate rows from the union of sampled target sets. Finite domains are
// merged by index in ascending order; continuous sets by exact coordinates.
Matrix union_of_targets(const std::vector<TargetSet>& sets, const Domain& domain,
                        std::vector<int>* indices) {
  if (const auto* finite = std::get_if<FiniteDomain>(&domain)) {
    std::set<int> merged;
    for (const TargetSet& ts : sets) merged.insert(ts.indices.begin(), ts.indices.end());
    indices->assign(merged.begin(), merged.end());
    return rows_of(finite->points, *indices);
  }
  Eigen::Index total = 0;
  for (const TargetSet& ts : sets) total += ts.points.rows();
  Matrix stacked(total, domain_dim(domain));
  Eigen::Index at = 0;
  for (const TargetSet& ts : sets) {
    if (ts.points.rows() == 0) continue;
    stacked.middleRows(at, ts.points.rows()) = ts.points;
    at += ts.points.rows();
  }
  return rows_of(stacked, unique_rows(stacked));
}

std::vector<int> max_variance_picks(const GPPosterior& post, const Matrix& candidates, int q) {
  if (q == 1) return {argmax_lowest(post.variance(candidates))};
  return select_max_variance_batch(post.covariance(candidates, candidates), q,
                                   post.fantasy_jitter());
}

}  // namespace

std::vector<int> select_max_variance_batch(const Matrix& cov, int q, double jitter) {
  const Eigen::Index m = cov.rows();
  if (m == 0) throw std::invalid_argument("no candidates to select from");
  if (q < 1) throw std::invalid_argument("batch size must be >= 1");
  Matrix c = cov;
  std::vector<bool> taken(m, false);
  std::vector<int> picks;
  for (int s = 0; s < q; ++s) {
    const bool exhausted = static_cast<Eigen::Index>(picks.size()) >= m;
    int best = -1;
    for (Eigen::Index i = 0; i < m; ++i) {
      if (taken[i] && !exhausted) continue;
      if (best < 0 || c(i, i) > c(best, best)) best = static_cast<int>(i);
    }
    picks.push_back(best);
    taken[best] = true;
    const double pivot = std::max(c(best, best), 0.0) + jitter;
    const Vector col = c.col(best);
    c.noalias() -= col * col.transpose() / pivot;
  }
  return picks;
}

AcquisitionDecision psbax_step(const GPPosterior& post, const PosteriorSampler& sampler,
                               const BaseAlgorithm& algo, int q, Rng& rng) {
  if (q < 1) throw std::invalid_argument("batch size must be >= 1");
  AcquisitionDecision decision;
  decision.seed = rng();
  Rng local(decision.seed);

  for (const FunctionView& draw : sampler.draw(post, q, local)) {
    decision.sampled_target_sets.push_back(algo.run(draw));
  }

  const Domain& domain = algo.domain();
  std::vector<int> union_indices;
  Matrix candidates = union_of_targets(decision.sampled_target_sets, domain, &union_indices);

  if (candidates.rows() == 0) {
    decision.fallback = true;
    if (const auto* finite = std::get_if<FiniteDomain>(&domain)) {
      candidates = finite->points;
      union_indices.resize(finite->size());
      std::iota(union_indices.begin(), union_indices.end(), 0);
    } else {
      decision.chosen = uniform_box_points(std::get<BoxDomain>(domain), q, local);
      return decision;
    }
  }

  const std::vector<int> picks = max_variance_picks(post, candidates, q);
  decision.chosen = rows_of(candidates, picks);
  if (std::holds_alternative<FiniteDomain>(domain)) {
    for (int p : picks) decision.chosen_indices.push_back(union_indices[p]);
  }
  return decision;
}

ExecutionPathSet collect_execution_paths(const std::vector<FunctionView>& draws,
                                         const BaseAlgorithm& algo,
                                         std::vector<TargetSet>* target_sets) {
  ExecutionPathSet paths;
  paths.reserve(draws.size());
  for (const FunctionView& draw : draws) {
    TargetSet ts = algo.run(draw);
    ExecutionPath path;
    path.points = ts.points;
    if (const auto* finite = std::get_if<FiniteDomain>(&algo.domain());
        finite && draw.tabulated) {
      path.values.resize(ts.size());
      for (int i = 0; i < ts.size(); ++i) path.values[i] = (*draw.tabulated)[ts.indices[i]];
    } else {
      path.values = draw.values_at(ts.points);
    }
    paths.push_back(std::move(path));
    if (target_sets) target_sets->push_back(std::move(ts));
  }
  return paths;
}

Vector eig_v_batch(const GPPosterior& post, const Matrix& candidates,
                   const ExecutionPathSet& paths) {
  if (paths.empty()) throw std::invalid_argument("need at least one execution path");
  const KernelSpec& spec = post.kernel();
  const double noise = spec.noise_variance;
  const Eigen::Index n_cand = candidates.rows();

  const Matrix vx = post.whitened_cross(candidates);
  Vector base_var = Vector::Constant(n_cand, spec.outputscale);
  if (vx.rows() > 0) base_var -= vx.colwise().squaredNorm().transpose();
  base_var = base_var.cwiseMax(0.0);

  Vector base_entropy(n_cand);
  for (Eigen::Index i = 0; i < n_cand; ++i) base_entropy[i] = gaussian_entropy(base_var[i] + noise);

  Vector total = Vector::Zero(n_cand);
  int used = 0;
  for (const ExecutionPath& path : paths) {
    if (path.points.rows() == 0) {
      total += base_entropy;
      ++used;
      continue;
    }
    const Matrix fantasy = rows_of(path.points, unique_rows(path.points));
    const Matrix ve = post.whitened_cross(fantasy);
    Matrix cee = kernel_matrix(spec, fantasy, fantasy);
    Matrix cex = kernel_matrix(spec, fantasy, candidates);
    if (ve.rows() > 0) {
      cee.noalias() -= ve.transpose() * ve;
      cex.noalias() -= ve.transpose() * vx;
    }
    Matrix l;
    try {
      l = jittered_cholesky(cee, post.fantasy_jitter());
    } catch (const FactorizationError&) {
      continue;
    }
    const Matrix w = l.triangularView<Eigen::Lower>().solve(cex);
    const Vector cond = (base_var - w.colwise().squaredNorm().transpose()).cwiseMax(0.0);
    for (Eigen::Index i = 0; i < n_cand; ++i) total[i] += gaussian_entropy(cond[i] + noise);
    ++used;
  }
  if (used == 0) throw FactorizationError("fantasy conditioning failed for every path");
  return base_entropy - total / static_cast<double>(used);
}

double eig_v(const GPPosterior& post, const Vector& x, const ExecutionPathSet& paths) {
  return eig_v_batch(post, x.transpose(), paths)[0];
}

AcquisitionDecision infobax_step(const GPPosterior& post, const PosteriorSampler& sampler,
                                 const BaseAlgorithm& algo, const Matrix& candidates,
                                 int num_paths, int q, Rng& rng) {
  if (candidates.rows() == 0) throw std::invalid_argument("no candidates");
  if (num_paths < 1) throw std::invalid_argument("need at least one path");
  if (q < 1) throw std::invalid_argument("batch size must be >= 1");
  AcquisitionDecision decision;
  decision.seed = rng();
  Rng local(decision.seed);

  const ExecutionPathSet paths = collect_execution_paths(
      sampler.draw(post, num_paths, local), algo, &decision.sampled_target_sets);

  std::vector<int> picks;
  GPPosterior current = post;
  for (int s = 0; s < q; ++s) {
    const Vector scores = eig_v_batch(current, candidates, paths);
    if (s == 0) decision.acq_values = scores;
    picks.push_back(argmax_lowest(scores));
    if (s + 1 < q) {
      const Matrix chosen = rows_of(candidates, picks);
      current = post.condition_noiseless(chosen, post.mean(chosen));
    }
  }
  decision.chosen = rows_of(candidates, picks);
  decision.chosen_indices = picks;
  return decision;
}

AcquisitionDecision infobax_step(const GPPosterior& post, const PosteriorSampler& sampler,
                                 const BaseAlgorithm& algo, int num_paths, int q, Rng& rng) {
  const Domain& domain = algo.domain();
  if (const auto* finite = std::get_if<FiniteDomain>(&domain)) {
    return infobax_step(post, sampler, algo, finite->points, num_paths, q, rng);
  }
  const BoxDomain& box = std::get<BoxDomain>(domain);
  if (num_paths < 1) throw std::invalid_argument("need at least one path");
  if (q < 1) throw std::invalid_argument("batch size must be >= 1");
  AcquisitionDecision decision;
  decision.seed = rng();
  Rng local(decision.seed);

  const ExecutionPathSet paths = collect_execution_paths(
      sampler.draw(post, num_paths, local), algo, &decision.sampled_target_sets);
  const double noise = post.kernel().noise_variance;

  decision.chosen.resize(q, box.dim());
  GPPosterior current = post;
  for (int s = 0; s < q; ++s) {
    // Conditioning once per path turns each score into a few predictions.
    std::vector<GPPosterior> conditioned;
    int empty_paths = 0;
    for (const ExecutionPath& path : paths) {
      if (path.points.rows() == 0) {
        ++empty_paths;
        continue;
      }
      try {
        conditioned.push_back(current.condition_noiseless(path.points, path.values));
      } catch (const FactorizationError&) {
      }
    }
    if (conditioned.empty() && empty_paths == 0) {
      throw FactorizationError("fantasy conditioning failed for every path");
    }
    const double used = static_cast<double>(conditioned.size() + empty_paths);
    auto score = [&](const Vector& x) {
      const Matrix q_pt = x.transpose();
      const double base = gaussian_entropy(std::max(current.variance(q_pt)[0], 0.0) + noise);
      double total = empty_paths * base;
      for (const GPPosterior& c : conditioned) {
        total += gaussian_entropy(std::max(c.variance(q_pt)[0], 0.0) + noise);
      }
      return base - total / used;
    };
    decision.chosen.row(s) =
        optimize_acq_over_box(score, box, kBoxCandidatesPerDim * box.dim(), local).transpose();
    if (s + 1 < q) {
      const Matrix chosen = decision.chosen.topRows(s + 1);
      current = post.condition_noiseless(chosen, post.mean(chosen));
    }
  }
  return decision;
}

double expected_improvement(double mean, double stddev, double incumbent) {
  const double gap = mean - incumbent;
  if (!(stddev > 0.0)) return std::max(gap, 0.0);
  const double z = gap / stddev;
  const double pdf = std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
  const double cdf = 0.5 * std::erfc(-z / std::numbers::sqrt2);
  return stddev * (z * cdf + pdf);
}

double expected_improvement(const GPPosterior& post, const Vector& x, double incumbent) {
  const Matrix q = x.transpose();
  const double var = std::max(post.variance(q)[0], 0.0);
  return expected_improvement(post.mean(q)[0], std::sqrt(var), incumbent);
}

double ei_incumbent(const GPPosterior& post) {
  if (post.dataset().empty()) return post.mean_constant();
  return post.mean(post.dataset().points).maxCoeff();
}

AcquisitionDecision ei_step(const GPPosterior& post, const Domain& domain, int q, Rng& rng) {
  if (q < 1) throw std::invalid_argument("batch size must be >= 1");
  AcquisitionDecision decision;
  decision.seed = rng();
  Rng local(decision.seed);
  const double incumbent = ei_incumbent(post);
  decision.chosen.resize(q, domain_dim(domain));

  // Later batch members see earlier ones as fantasies at the posterior mean.
  GPPosterior current = post;
  for (int s = 0; s < q; ++s) {
    if (const auto* finite = std::get_if<FiniteDomain>(&domain)) {
      const Vector mean = current.mean(finite->points);
      const Vector var = current.variance(finite->points).cwiseMax(0.0);
      Vector scores(finite->size());
      for (int i = 0; i < finite->size(); ++i) {
        scores[i] = expected_improvement(mean[i], std::sqrt(var[i]), incumbent);
      }
      if (s == 0) decision.acq_values = scores;
      const int best = argmax_lowest(scores);
      decision.chosen_indices.push_back(best);
      decision.chosen.row(s) = finite->points.row(best);
    } else {
      const BoxDomain& box = std::get<BoxDomain>(domain);
      auto score = [&](const Vector& x) { return expected_improvement(current, x, incumbent); };
      decision.chosen.row(s) =
          optimize_acq_over_box(score, box, kBoxCandidatesPerDim * box.dim(), local).transpose();
    }
    if (s + 1 < q) {
      const Matrix chosen = decision.chosen.topRows(s + 1);
      current = post.condition_noiseless(chosen, post.mean(chosen));
    }
  }
  return decision;
}

AcquisitionDecision random_step(const Domain& domain, int q, Rng& rng) {
  if (q < 1) throw std::invalid_argument("batch size must be >= 1");
  AcquisitionDecision decision;
  decision.seed = rng();
  Rng local(decision.seed);
  if (const auto* finite = std::get_if<FiniteDomain>(&domain)) {
    std::uniform_int_distribution<int> pick(0, finite->size() - 1);
    for (int s = 0; s < q; ++s) decision.chosen_indices.push_back(pick(local));
    decision.chosen = rows_of(finite->points, decision.chosen_indices);
  } else {
    decision.chosen = uniform_box_points(std::get<BoxDomain>(domain), q, local);
  }
  return decision;
}

Matrix scrambled_halton(int count, int dim, Rng& rng) {
  std::vector<int> primes;
  for (int c = 2; static_cast<int>(primes.size()) < dim; ++c) {
    bool prime = true;
    for (int p : primes) {
      if (p * p > c) break;
      if (c % p == 0) {
        prime = false;
        break;
      }
    }
    if (prime) primes.push_back(c);
  }
  Matrix out(count, dim);
  for (int j = 0; j < dim; ++j) {
    const int base = primes[j];
    // Random digit permutation that keeps zero fixed.
    std::vector<int> perm(base);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin() + 1, perm.end(), rng);
    for (int i = 0; i < count; ++i) {
      double value = 0.0;
      double inv = 1.0 / base;
      for (long k = i + 1; k > 0; k /= base, inv /= base) {
        value += perm[k % base] * inv;
      }
      out(i, j) = value;
    }
  }
  return out;
}

Vector optimize_acq_over_box(const PointScore& score, const BoxDomain& box,
                             int n_candidates, Rng& rng) {
  box.validate();
  if (n_candidates < 1) throw std::invalid_argument("need at least one candidate");
  const int d = box.dim();
  const Vector extent = box.extent();
  Matrix candidates = scrambled_halton(n_candidates, d, rng);
  for (int i = 0; i < n_candidates; ++i) {
    candidates.row(i) = (box.lo.array() + candidates.row(i).transpose().array() * extent.array())
                            .transpose();
  }
  Vector scores(n_candidates);
  for (int i = 0; i < n_candidates; ++i) scores[i] = score(candidates.row(i).transpose());

  std::vector<int> order(n_candidates);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    const double sa = std::isnan(scores[a]) ? -std::numeric_limits<double>::infinity() : scores[a];
    const double sb = std::isnan(scores[b]) ? -std::numeric_limits<double>::infinity() : scores[b];
    return sa > sb;
  });

  Vector best_x = candidates.row(order[0]).transpose();
  double best_f = scores[order[0]];
  const double spacing = std::pow(static_cast<double>(n_candidates), -1.0 / d);
  constexpr double kInvPhi = 0.6180339887498949;

  const int refine = std::min(5, n_candidates);
  for (int r = 0; r < refine; ++r) {
    Vector x = candidates.row(order[r]).transpose();
    double fx = scores[order[r]];
    for (int sweep = 0; sweep < 3; ++sweep) {
      for (int j = 0; j < d; ++j) {
        const double half = std::min(0.5, 2.0 * spacing / (1 << sweep)) * extent[j];
        double a = std::max(box.lo[j], x[j] - half);
        double b = std::min(box.hi[j], x[j] + half);
        auto along = [&](double t) {
          Vector y = x;
          y[j] = t;
          return score(y);
        };
        double c = b - kInvPhi * (b - a);
        double e = a + kInvPhi * (b - a);
        double fc = along(c);
        double fe = along(e);
        for (int it = 0; it < 20; ++it) {
          if (fc >= fe) {
            b = e;
            e = c;
            fe = fc;
            c = b - kInvPhi * (b - a);
            fc = along(c);
          } else {
            a = c;
            c = e;
            fc = fe;
            e = a + kInvPhi * (b - a);
            fe = along(e);
          }
        }
        const double t = fc >= fe ? c : e;
        const double ft = std::max(fc, fe);
        if (ft > fx) {
          x[j] = t;
          fx = ft;
        }
      }
    }
    if (fx > best_f) {
      best_f = fx;
      best_x = x;
    }
  }
  return best_x;
}

}  // namespace bax
