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


#include "bax/problems.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "oracles.hpp"

namespace bax {
namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::path(::testing::TempDir()) / name).string();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream(path) << text;
}

TEST(TestFunctions, KnownMinima) {
  EXPECT_NEAR(ackley(Vector::Zero(5)), 0.0, 1e-12);
  EXPECT_DOUBLE_EQ(rosenbrock(Vector::Ones(3)), 0.0);
  EXPECT_DOUBLE_EQ(himmelblau((Vector(2) << 3.0, 2.0).finished()), 0.0);
  const Vector xstar =
      (Vector(6) << 0.20169, 0.150011, 0.476874, 0.275332, 0.311652, 0.6573).finished();
  EXPECT_NEAR(hartmann6(xstar), -3.32237, 1e-5);
  EXPECT_THROW(hartmann6(Vector::Zero(5)), DimensionError);
  EXPECT_THROW(himmelblau(Vector::Zero(3)), DimensionError);
}

TEST(TestFunctions, StandardFormulaSpotValues) {
  // Independent evaluations of the textbook formulas.
  const Vector r = (Vector(3) << 0.0, 0.0, 0.0).finished();
  EXPECT_DOUBLE_EQ(rosenbrock(r), 2.0);
  EXPECT_DOUBLE_EQ(himmelblau(Vector::Zero(2)), 170.0);
  const double a1 = -20.0 * std::exp(-0.2) - std::exp(std::cos(2.0 * std::numbers::pi)) + 20.0 +
                    std::numbers::e;
  EXPECT_NEAR(ackley(Vector::Ones(1)), a1, 1e-12);
}

// Multistart projected ascent on the negated formula with central-difference
// gradients.
TEST(TestFunctions, HartmannMaximumOfNegation) {
  FunctionView neg;
  neg.value = [](const Vector& x) { return -hartmann6(x); };
  neg.gradient = [](const Vector& x) {
    Vector g(6);
    for (int j = 0; j < 6; ++j) {
      Vector a = x, b = x;
      a[j] += 1e-6;
      b[j] -= 1e-6;
      g[j] = (hartmann6(b) - hartmann6(a)) / 2e-6;
    }
    return g;
  };
  LocalOptOptions opts;
  opts.restarts = 50;
  opts.max_steps = 500;
  const TargetSet ts = local_opt_algorithm(neg, BoxDomain::unit(6), opts);
  EXPECT_NEAR(neg(ts.points.row(0).transpose()), kHartmann6Max, 1e-4);
}

TEST(GridIo, TwoByTwoAndRoundTrip) {
  const std::string path = temp_path("grid2.csv");
  write_file(path, "1.5,2\n3,-4.25\n");
  const GridDataset g = load_grid(path);
  EXPECT_EQ(g.rows, 2);
  EXPECT_EQ(g.cols, 2);
  EXPECT_DOUBLE_EQ(g.at(1, 1), -4.25);
  const GridDomain gd = grid_to_finite_domain(g);
  EXPECT_EQ(gd.domain.size(), 4);
  EXPECT_GE(gd.domain.points.minCoeff(), 0.0);
  EXPECT_LE(gd.domain.points.maxCoeff(), 1.0);

  GridDataset r;
  r.rows = 3;
  r.cols = 2;
  r.heights = (Vector(6) << 0.1, 1.0 / 3.0, -2e-17, 123456.789, std::nextafter(1.0, 2.0), 7).finished();
  const std::string out = temp_path("grid_rt.csv");
  save_grid(r, out);
  const GridDataset back = load_grid(out);
  EXPECT_EQ(back.rows, 3);
  EXPECT_EQ(back.cols, 2);
  EXPECT_EQ(back.heights, r.heights);
}

TEST(GridIo, MalformedFilesReportLine) {
  const std::string ragged = temp_path("ragged.csv");
  write_file(ragged, "1,2,3\n4,5\n");
  try {
    load_grid(ragged);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  const std::string bad = temp_path("bad.csv");
  write_file(bad, "1,2\n3,x\n");
  try {
    load_grid(bad);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  EXPECT_ANY_THROW(load_grid(temp_path("does_not_exist.csv")));
}

TEST(Volcano, SyntheticShapeAndThreshold) {
  const GridDataset g = synthetic_volcano();
  EXPECT_EQ(g.rows, 87);
  EXPECT_EQ(g.cols, 61);
  EXPECT_EQ(grid_to_finite_domain(g).domain.size(), 5307);
  EXPECT_EQ(g.source.rfind("synthetic:", 0), 0u);
  const ProblemSpec p = make_problem("volcano");
  const Vector& v = *p.table_values;
  const double above = static_cast<double>((v.array() > p.threshold).count());
  EXPECT_LE(above / v.size(), 0.45 + 1.0 / v.size());
  EXPECT_EQ(p.threshold, quantile_threshold(v, 0.55));
}

TEST(QuantileThreshold, NearestRank) {
  const Vector v = Vector::LinSpaced(100, 1.0, 100.0);
  EXPECT_DOUBLE_EQ(quantile_threshold(v, 0.55), 55.0);
  EXPECT_DOUBLE_EQ(quantile_threshold(v, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(quantile_threshold(v, 1.0), 100.0);
  Vector shuffled = v.reverse();
  EXPECT_DOUBLE_EQ(quantile_threshold(shuffled, 0.3), 30.0);
  EXPECT_THROW(quantile_threshold(Vector(0), 0.5), std::invalid_argument);
}

TEST(TabularIo, RoundTripAndErrors) {
  TabularDataset t;
  t.ids = {"a", "b"};
  t.embeddings = (Matrix(2, 3) << 1, 2, 3, 4.5, -5, 1.0 / 7.0).finished();
  t.values = (Vector(2) << 0.25, -1.5).finished();
  const std::string path = temp_path("tab.csv");
  save_tabular(t, path);
  const TabularDataset back = load_tabular(path);
  EXPECT_EQ(back.ids, t.ids);
  EXPECT_EQ(back.embeddings, t.embeddings);
  EXPECT_EQ(back.values, t.values);

  const std::string bad = temp_path("tab_bad.csv");
  write_file(bad, "id,e1,value\nx,1,2\ny,1\n");
  try {
    load_tabular(bad);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  const std::string header = temp_path("tab_header.csv");
  write_file(header, "name,e1,score\nx,1,2\n");
  EXPECT_THROW(load_tabular(header), ParseError);
}

TabularDataset table_of(const Matrix& e) {
  TabularDataset t;
  t.embeddings = e;
  t.values = Vector::Zero(e.rows());
  for (Eigen::Index i = 0; i < e.rows(); ++i) t.ids.push_back(std::to_string(i));
  return t;
}

TEST(Pca, FullRankIsRotation) {
  Rng rng(1);
  const Matrix e = testing::uniform_matrix(50, 4, -1, 1, rng);
  const TabularDataset r = pca_reduce(table_of(e), 4);
  ASSERT_EQ(r.embeddings.cols(), 4);
  const Matrix centered = e.rowwise() - e.colwise().mean();
  // Pairwise Gram matrices agree up to rotation.
  EXPECT_LT(testing::rel_err(r.embeddings * r.embeddings.transpose(),
                             centered * centered.transpose()),
            1e-8);
  EXPECT_NEAR(r.explained_variance_ratio, 1.0, 1e-12);
}

TEST(Pca, LineDataIsRankOne) {
  Rng rng(2);
  Matrix e(40, 2);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int i = 0; i < 40; ++i) {
    const double t = n(rng);
    e(i, 0) = 2.0 * t + 1.0;
    e(i, 1) = -t;
  }
  const TabularDataset one = pca_reduce(table_of(e), 1);
  EXPECT_EQ(one.embeddings.cols(), 1);
  EXPECT_GE(one.explained_variance_ratio, 1.0 - 1e-8);
  EXPECT_LE(pca_reduce(table_of(e), 2).embeddings.cols(), 2);
}

TEST(Pca, TopEigenvaluesMatchDenseOracle) {
  Rng rng(3);
  const Matrix e = testing::uniform_matrix(100, 20, -1, 1, rng);
  const Matrix centered = e.rowwise() - e.colwise().mean();
  const Matrix cov = centered.transpose() * centered / 99.0;
  // Power iteration with deflation, independent of the library solver.
  Vector want(5);
  Matrix deflated = cov;
  for (int k = 0; k < 5; ++k) {
    Vector v = Vector::Ones(20).normalized();
    for (int it = 0; it < 5000; ++it) v = (deflated * v).normalized();
    want[k] = v.dot(deflated * v);
    deflated -= want[k] * v * v.transpose();
  }
  const TabularDataset r = pca_reduce(table_of(e), 5);
  const Matrix proj = r.embeddings.rowwise() - r.embeddings.colwise().mean();
  const Matrix pcov = proj.transpose() * proj / 99.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(pcov);
  Vector got = es.eigenvalues().reverse();
  EXPECT_LT(testing::rel_err(got, want), 1e-8);
  EXPECT_LT(testing::rel_err(pcov, Matrix(pcov.diagonal().asDiagonal())), 1e-8);
}

TEST(Tabular, TruncateTopAndSynthetic) {
  const TabularDataset s = synthetic_screen(200, 16, 4);
  EXPECT_EQ(s.size(), 200);
  EXPECT_EQ(s.embeddings.cols(), 16);
  const TabularDataset top = truncate_top(s, 50);
  EXPECT_EQ(top.size(), 50);
  for (int i = 1; i < 50; ++i) EXPECT_GE(top.values[i - 1], top.values[i]);
  Vector sorted = s.values;
  std::sort(sorted.data(), sorted.data() + sorted.size(), std::greater<>());
  EXPECT_DOUBLE_EQ(top.values[49], sorted[49]);
  EXPECT_EQ(synthetic_screen(20, 4, 9).values, synthetic_screen(20, 4, 9).values);
}

TEST(Grids, RosenbrockGrid) {
  const FiniteDomain g = make_rosenbrock_grid();
  EXPECT_EQ(g.size(), 1000);
  EXPECT_EQ(g.dim(), 3);
  bool corner = false;
  for (int i = 0; i < g.size(); ++i) corner = corner || g.points.row(i) == Eigen::RowVector3d(-2, -2, -2);
  EXPECT_TRUE(corner);
  for (int j = 0; j < 3; ++j) {
    std::vector<double> vals(g.points.col(j).data(), g.points.col(j).data() + 1000);
    std::sort(vals.begin(), vals.end());
    vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
    ASSERT_EQ(vals.size(), 10u);
    for (int k = 1; k < 10; ++k) EXPECT_NEAR(vals[k] - vals[k - 1], 4.0 / 9.0, 1e-12);
  }
}

TEST(Problems, GroundTruthIsSelfConsistent) {
  for (const std::string& name : {"himmelblau", "rosenbrock", "volcano", "discobax"}) {
    ProblemOptions opts;
    opts.records = 200;
    opts.eta_draws = 16;
    const ProblemSpec p = make_problem(name, opts);
    EXPECT_NO_THROW(p.check_consistency()) << name;
    EXPECT_EQ(p.make_algorithm()->run(p.objective).indices, p.truth.indices) << name;
    EXPECT_FALSE(p.truth.empty()) << name;
  }
}

TEST(Problems, NegationConventionAndDefaults) {
  const ProblemSpec h = make_problem("himmelblau");
  EXPECT_EQ(h.dim(), 2);
  EXPECT_EQ(h.initial_design_size(), 6);
  EXPECT_EQ(std::get<FiniteDomain>(h.domain).size(), 625);
  const Vector x = std::get<FiniteDomain>(h.domain).points.row(7).transpose();
  EXPECT_DOUBLE_EQ(h.objective(x), -himmelblau(x));
  EXPECT_EQ(h.metric, MetricKind::kF1);

  const ProblemSpec r = make_problem("rosenbrock");
  EXPECT_EQ(r.k, 4);
  EXPECT_EQ(r.truth.size(), 4);
  EXPECT_EQ(r.metric, MetricKind::kJaccard);

  const ProblemSpec hm = make_problem("hartmann6");
  EXPECT_DOUBLE_EQ(hm.f_star, 3.32237);
  EXPECT_DOUBLE_EQ(hm.objective(Vector::Constant(6, 0.3)), -hartmann6(Vector::Constant(6, 0.3)));
  EXPECT_GT(hm.noise_std, 0.0);

  const ProblemSpec a = make_problem("ackley");
  EXPECT_DOUBLE_EQ(a.f_star, 0.0);
  EXPECT_NEAR(a.objective(Vector::Constant(10, 0.5)), 0.0, 1e-12);

  ProblemOptions noisy;
  noisy.noise_std = 0.25;
  EXPECT_DOUBLE_EQ(make_problem("himmelblau", noisy).noise_std, 0.25);
  EXPECT_THROW(make_problem("gb1"), ConfigError);
}

TEST(Problems, MetricNames) {
  EXPECT_EQ(to_string(MetricKind::kF1), "f1");
  EXPECT_EQ(to_string(MetricKind::kJaccard), "jaccard");
  EXPECT_EQ(to_string(MetricKind::kLogRegret), "log10_regret");
  EXPECT_EQ(to_string(MetricKind::kDiscoBaxRegret), "discobax_regret");
}

TEST(Problems, VolcanoFromFile) {
  GridDataset g;
  g.rows = 3;
  g.cols = 4;
  g.heights = Vector::LinSpaced(12, 0.0, 11.0);
  const std::string path = temp_path("volcano.csv");
  save_grid(g, path);
  ProblemOptions opts;
  opts.data_file = path;
  const ProblemSpec p = make_problem("volcano", opts);
  EXPECT_EQ(p.source, "file:" + path);
  EXPECT_EQ(p.truth.size(), 5);  // values 7..11 exceed the 0.55 quantile 6
}

}  // namespace
}  // namespace bax
