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

#include <gtest/gtest.h>

#include "bax/gp_model.hpp"
#include "oracles.hpp"

namespace bax {
namespace {

FiniteDomain line_domain(int n) { return FiniteDomain{Vector::LinSpaced(n, 0.0, 1.0)}; }

TEST(DenseGaussianModel, ObserveMatchesGpPosterior) {
  Rng rng(1);
  for (int t = 0; t < 10; ++t) {
    const FiniteDomain d = line_domain(8);
    KernelSpec spec = testing::random_kernel(1, rng);
    DenseGaussianModel model{Vector::Zero(8), testing::gram_oracle(spec, d.points, d.points)};
    Dataset data;
    data.points.resize(0, 1);
    std::uniform_int_distribution<int> pick(0, 7);
    std::normal_distribution<double> n(0.0, 1.0);
    for (int s = 0; s < 4; ++s) {
      const int i = pick(rng);
      const double y = n(rng);
      model.observe(i, y, spec.noise_variance);
      data.append(d.points.row(i).transpose(), y);
    }
    const Prediction p = GPPosterior(data, spec).predict(d.points);
    EXPECT_LT((model.mean - p.mean).cwiseAbs().maxCoeff(), 1e-6);
    EXPECT_LT((model.cov - p.cov).cwiseAbs().maxCoeff(), 1e-6);
  }
}

TEST(DenseGaussianModel, SampleMoments) {
  DenseGaussianModel model{(Vector(2) << 1.0, -2.0).finished(),
                           (Matrix(2, 2) << 2.0, 0.5, 0.5, 1.0).finished()};
  Rng rng(2);
  const Matrix s = model.sample(20000, rng);
  EXPECT_NEAR(s.col(0).mean(), 1.0, 0.05);
  EXPECT_NEAR(s.col(1).mean(), -2.0, 0.05);
  const Matrix c = s.rowwise() - s.colwise().mean();
  const Matrix cov = c.transpose() * c / 19999.0;
  EXPECT_NEAR(cov(0, 0), 2.0, 0.1);
  EXPECT_NEAR(cov(0, 1), 0.5, 0.05);
}

TEST(DensePsBaxPick, LowestIndexAmongTargetsWhenCertain) {
  const FiniteDomain d = line_domain(4);
  const LevelSetAlgorithm algo(d, 0.0);
  DenseGaussianModel model{(Vector(4) << 0.0, 1.0, -1.0, 2.0).finished(), Matrix::Zero(4, 4)};
  Rng rng(3);
  EXPECT_EQ(dense_psbax_pick(model, d, algo, rng), 1);
  Rng rng2(4);
  EXPECT_EQ(mode_target_set(model, d, algo, 16, rng2), (std::vector<int>{1, 3}));
}

TEST(DensePsBaxPick, EmptyTargetFallsBackToMaxVariance) {
  const FiniteDomain d = line_domain(3);
  const LevelSetAlgorithm algo(d, 0.0);
  DenseGaussianModel model{Vector::Constant(3, -100.0), Matrix((Vector(3) << 1.0, 3.0, 2.0).finished().asDiagonal())};
  Rng rng(5);
  EXPECT_EQ(dense_psbax_pick(model, d, algo, rng), 1);
}

TEST(Counterexample, PosteriorNeverLearnsTheTarget) {
  const CounterexampleReport rep = theory_check_counterexample({});
  ASSERT_EQ(rep.probability_one.size(), 51u);
  EXPECT_EQ(rep.selected_x.size(), 50u);
  EXPECT_FALSE(rep.zero_selected);
  for (double x : rep.selected_x) EXPECT_TRUE(x == -1.0 || x == 1.0);
  EXPECT_GE(rep.min_probability, 0.45);
  EXPECT_LE(rep.max_probability, 0.55);
  EXPECT_EQ(rep.min_probability,
            *std::min_element(rep.probability_one.begin(), rep.probability_one.end()));
}

TEST(Counterexample, DeterministicInSeed) {
  CounterexampleOptions opts;
  opts.iterations = 10;
  opts.seed = 9;
  EXPECT_EQ(theory_check_counterexample(opts).probability_one,
            theory_check_counterexample(opts).probability_one);
}

TEST(Consistency, RecoversWithData) {
  const ConsistencyReport rep = theory_check_consistency({});
  ASSERT_EQ(rep.replications.size(), 20u);
  EXPECT_GE(rep.recovery_fraction, 0.9);
  EXPECT_GE(rep.mode_agreement_fraction, 0.8);
}

TEST(Consistency, NoDataMeansNoRecovery) {
  ConsistencyOptions opts;
  opts.iterations = 0;
  const ConsistencyReport rep = theory_check_consistency(opts);
  EXPECT_LE(rep.recovery_fraction, 0.2);
}

}  // namespace
}  // namespace bax
