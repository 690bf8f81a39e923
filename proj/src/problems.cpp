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
#include <fstream>
#include <iomanip>
#include <numbers>
#include <numeric>
#include <sstream>

#include "bax/acquisition.hpp"
#include "bax/gp_model.hpp"

namespace bax {

namespace {

void require_dim(const Vector& x, int d, const char* name) {
  if (x.size() != d) {
    throw DimensionError(std::string(name) + " expects dimension " + std::to_string(d) +
                         ", got " + std::to_string(x.size()));
  }
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_number(const std::string& cell, std::size_t line) {
  const std::string t = trim(cell);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &used);
  } catch (const std::exception&) {
    throw ParseError("not a number: '" + t + "'", line);
  }
  if (used != t.size()) throw ParseError("not a number: '" + t + "'", line);
  return v;
}

FunctionView box_function(std::function<double(const Vector&)> f) {
  FunctionView view;
  view.value = f;
  view.batch = [f](const Matrix& m) {
    Vector out(m.rows());
    for (Eigen::Index i = 0; i < m.rows(); ++i) out[i] = f(m.row(i).transpose());
    return out;
  };
  return view;
}

// Noise standard deviation of 1e-6 in standardized units of the objective
// over the domain.
double standardized_noise(const Vector& reference_values) {
  const double mean = reference_values.mean();
  const double var = (reference_values.array() - mean).square().mean();
  return 1e-6 * std::sqrt(var);
}

ProblemSpec finite_problem(std::string name, FiniteDomain domain, Vector values) {
  ProblemSpec spec;
  spec.name = std::move(name);
  spec.objective = FunctionView::from_table(domain, values);
  spec.table_values = std::move(values);
  spec.domain = std::move(domain);
  return spec;
}

}  // namespace

double hartmann6(const Vector& x) {
  require_dim(x, 6, "hartmann6");
  static const double alpha[4] = {1.0, 1.2, 3.0, 3.2};
  static const double a[4][6] = {{10, 3, 17, 3.5, 1.7, 8},
                                 {0.05, 10, 17, 0.1, 8, 14},
                                 {3, 3.5, 1.7, 10, 17, 8},
                                 {17, 8, 0.05, 10, 0.1, 14}};
  static const double p[4][6] = {{0.1312, 0.1696, 0.5569, 0.0124, 0.8283, 0.5886},
                                 {0.2329, 0.4135, 0.8307, 0.3736, 0.1004, 0.9991},
                                 {0.2348, 0.1451, 0.3522, 0.2883, 0.3047, 0.6650},
                                 {0.4047, 0.8828, 0.8732, 0.5743, 0.1091, 0.0381}};
  double total = 0.0;
  for (int i = 0; i < 4; ++i) {
    double inner = 0.0;
    for (int j = 0; j < 6; ++j) inner += a[i][j] * (x[j] - p[i][j]) * (x[j] - p[i][j]);
    total += alpha[i] * std::exp(-inner);
  }
  return -total;
}

double ackley(const Vector& x) {
  if (x.size() == 0) throw DimensionError("ackley expects a non-empty input");
  const double d = static_cast<double>(x.size());
  const double sq = x.squaredNorm() / d;
  const double cosine = (2.0 * std::numbers::pi * x.array()).cos().sum() / d;
  return -20.0 * std::exp(-0.2 * std::sqrt(sq)) - std::exp(cosine) + 20.0 + std::numbers::e;
}

double himmelblau(const Vector& x) {
  require_dim(x, 2, "himmelblau");
  const double a = x[0] * x[0] + x[1] - 11.0;
  const double b = x[0] + x[1] * x[1] - 7.0;
  return a * a + b * b;
}

double rosenbrock(const Vector& x) {
  if (x.size() < 2) throw DimensionError("rosenbrock expects dimension >= 2");
  double total = 0.0;
  for (Eigen::Index i = 0; i + 1 < x.size(); ++i) {
    const double a = x[i + 1] - x[i] * x[i];
    const double b = 1.0 - x[i];
    total += 100.0 * a * a + b * b;
  }
  return total;
}

GridDataset load_grid(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open grid file: " + path);
  GridDataset grid;
  grid.source = "file:" + path;
  std::vector<double> values;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_csv(line);
    if (grid.rows == 0) {
      grid.cols = static_cast<int>(cells.size());
    } else if (static_cast<int>(cells.size()) != grid.cols) {
      throw ParseError("expected " + std::to_string(grid.cols) + " columns, got " +
                           std::to_string(cells.size()),
                       line_no);
    }
    for (const auto& c : cells) values.push_back(parse_number(c, line_no));
    ++grid.rows;
  }
  if (grid.rows == 0) throw ParseError("grid file is empty", line_no);
  grid.heights = Eigen::Map<Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
  return grid;
}

void save_grid(const GridDataset& grid, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write grid file: " + path);
  out << std::setprecision(17);
  for (int r = 0; r < grid.rows; ++r) {
    for (int c = 0; c < grid.cols; ++c) {
      if (c) out << ',';
      out << grid.at(r, c);
    }
    out << '\n';
  }
}

GridDomain grid_to_finite_domain(const GridDataset& grid) {
  if (grid.rows < 1 || grid.cols < 1 ||
      grid.heights.size() != static_cast<Eigen::Index>(grid.rows) * grid.cols) {
    throw DimensionError("grid is not rectangular");
  }
  GridDomain out;
  out.domain.points.resize(grid.rows * grid.cols, 2);
  for (int r = 0; r < grid.rows; ++r) {
    for (int c = 0; c < grid.cols; ++c) {
      const int i = r * grid.cols + c;
      out.domain.points(i, 0) = grid.rows > 1 ? static_cast<double>(r) / (grid.rows - 1) : 0.0;
      out.domain.points(i, 1) = grid.cols > 1 ? static_cast<double>(c) / (grid.cols - 1) : 0.0;
    }
  }
  out.values = grid.heights;
  return out;
}

GridDataset synthetic_volcano(std::uint64_t seed) {
  GridDataset grid;
  grid.rows = 87;
  grid.cols = 61;
  grid.source = "synthetic:volcano(seed=" + std::to_string(seed) + ")";
  grid.heights.resize(grid.rows * grid.cols);

  // A cone with a summit crater and a shoulder, plus a few random hills.
  Rng rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  struct Bump {
    double r, c, height, width;
  };
  std::vector<Bump> hills;
  for (int i = 0; i < 6; ++i) {
    hills.push_back({u(rng) * 86.0, u(rng) * 60.0, 4.0 + 10.0 * u(rng), 4.0 + 8.0 * u(rng)});
  }
  for (int r = 0; r < grid.rows; ++r) {
    for (int c = 0; c < grid.cols; ++c) {
      auto g = [&](double r0, double c0, double sr, double sc) {
        const double a = (r - r0) / sr;
        const double b = (c - c0) / sc;
        return std::exp(-0.5 * (a * a + b * b));
      };
      double h = 95.0 + 0.15 * c;
      h += 85.0 * g(40.0, 30.0, 15.0, 11.0);
      h -= 18.0 * g(38.0, 31.0, 3.5, 3.0);
      h += 25.0 * g(58.0, 22.0, 9.0, 7.0);
      for (const Bump& b : hills) h += b.height * g(b.r, b.c, b.width, b.width);
      grid.heights[r * grid.cols + c] = std::round(h * 10.0) / 10.0;
    }
  }
  return grid;
}

double quantile_threshold(const Vector& values, double p) {
  if (values.size() == 0) throw std::invalid_argument("quantile of an empty set");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("quantile level outside [0, 1]");
  std::vector<double> sorted(values.data(), values.data() + values.size());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  // The small slack keeps p * N = integer from rounding up (0.55 * 100).
  long rank = static_cast<long>(std::ceil(p * n - 1e-9));
  rank = std::clamp(rank, 1L, static_cast<long>(sorted.size()));
  return sorted[rank - 1];
}

TabularDataset load_tabular(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open tabular file: " + path);
  TabularDataset table;
  table.source = "file:" + path;
  std::string line;
  std::size_t line_no = 0;
  int width = -1;
  std::vector<std::vector<double>> rows;
  std::vector<double> values;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_csv(line);
    if (width < 0) {
      if (cells.size() < 2 || trim(cells.front()) != "id" || trim(cells.back()) != "value") {
        throw ParseError("header must be id,<e1..ed>,value", line_no);
      }
      width = static_cast<int>(cells.size()) - 2;
      continue;
    }
    if (static_cast<int>(cells.size()) != width + 2) {
      throw ParseError("expected " + std::to_string(width + 2) + " fields, got " +
                           std::to_string(cells.size()),
                       line_no);
    }
    table.ids.push_back(trim(cells.front()));
    std::vector<double> emb(width);
    for (int j = 0; j < width; ++j) emb[j] = parse_number(cells[j + 1], line_no);
    rows.push_back(std::move(emb));
    values.push_back(parse_number(cells.back(), line_no));
  }
  if (width < 0) throw ParseError("tabular file is empty", line_no);
  table.embeddings.resize(static_cast<Eigen::Index>(rows.size()), width);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (int j = 0; j < width; ++j) table.embeddings(static_cast<Eigen::Index>(i), j) = rows[i][j];
  }
  table.values = Eigen::Map<Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
  return table;
}

void save_tabular(const TabularDataset& table, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write tabular file: " + path);
  out << std::setprecision(17) << "id";
  for (Eigen::Index j = 0; j < table.embeddings.cols(); ++j) out << ",e" << (j + 1);
  out << ",value\n";
  for (int i = 0; i < table.size(); ++i) {
    out << table.ids[i];
    for (Eigen::Index j = 0; j < table.embeddings.cols(); ++j) out << ',' << table.embeddings(i, j);
    out << ',' << table.values[i] << '\n';
  }
}

TabularDataset pca_reduce(const TabularDataset& table, int n_components) {
  const Eigen::Index n = table.embeddings.rows();
  const Eigen::Index width = table.embeddings.cols();
  if (n_components < 1 || n_components > std::min<Eigen::Index>(n, width)) {
    throw std::invalid_argument("PCA needs 1 <= components <= min(N, d)");
  }
  const Vector mean = table.embeddings.colwise().mean();
  const Matrix centered = table.embeddings.rowwise() - mean.transpose();
  const Matrix cov = centered.transpose() * centered / static_cast<double>(std::max<Eigen::Index>(n - 1, 1));
  Eigen::SelfAdjointEigenSolver<Matrix> eig(cov);
  if (eig.info() != Eigen::Success) throw std::runtime_error("PCA eigendecomposition failed");
  // Eigen returns ascending eigenvalues.
  const Vector evals = eig.eigenvalues().reverse();
  const Matrix evecs = eig.eigenvectors().rowwise().reverse();
  const double total = std::max(evals.sum(), 0.0);
  const double floor = 1e-12 * std::max(evals[0], 0.0);
  int kept = 0;
  while (kept < n_components && evals[kept] > floor) ++kept;
  kept = std::max(kept, 1);

  TabularDataset out;
  out.ids = table.ids;
  out.values = table.values;
  out.source = table.source + "|pca" + std::to_string(kept);
  out.embeddings = centered * evecs.leftCols(kept);
  out.explained_variance_ratio = total > 0.0 ? evals.head(kept).sum() / total : 1.0;
  return out;
}

TabularDataset truncate_top(const TabularDataset& table, int count) {
  std::vector<int> order(table.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return table.values[a] > table.values[b]; });
  order.resize(std::min<std::size_t>(order.size(), static_cast<std::size_t>(std::max(count, 0))));
  TabularDataset out;
  out.source = table.source;
  out.embeddings.resize(static_cast<Eigen::Index>(order.size()), table.embeddings.cols());
  out.values.resize(static_cast<Eigen::Index>(order.size()));
  for (std::size_t i = 0; i < order.size(); ++i) {
    out.ids.push_back(table.ids[order[i]]);
    out.embeddings.row(static_cast<Eigen::Index>(i)) = table.embeddings.row(order[i]);
    out.values[static_cast<Eigen::Index>(i)] = table.values[order[i]];
  }
  return out;
}

TabularDataset synthetic_screen(int records, int width, std::uint64_t seed) {
  if (records < 1 || width < 1) throw std::invalid_argument("synthetic screen needs records, width >= 1");
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const int latent = std::min(5, width);
  Matrix mixing(latent, width);
  for (Eigen::Index i = 0; i < mixing.size(); ++i) mixing.data()[i] = normal(rng);
  TabularDataset table;
  table.source = "synthetic:screen(seed=" + std::to_string(seed) + ")";
  table.embeddings.resize(records, width);
  table.values.resize(records);
  for (int i = 0; i < records; ++i) {
    Vector z(latent);
    for (int j = 0; j < latent; ++j) z[j] = normal(rng);
    table.embeddings.row(i) = (z.transpose() * mixing).array() + 0.05 * normal(rng);
    double v = std::sin(1.5 * z[0]) + 0.5 * z[std::min(1, latent - 1)] -
               0.3 * z[std::min(2, latent - 1)] * z[std::min(2, latent - 1)];
    table.values[i] = v + 0.05 * normal(rng);
    table.ids.push_back("g" + std::to_string(i));
  }
  return table;
}

FiniteDomain make_uniform_grid(const BoxDomain& box, int per_axis) {
  box.validate();
  if (per_axis < 2) throw std::invalid_argument("grid needs at least 2 points per axis");
  const int d = box.dim();
  long total = 1;
  for (int j = 0; j < d; ++j) total *= per_axis;
  FiniteDomain grid;
  grid.points.resize(total, d);
  for (long i = 0; i < total; ++i) {
    long rest = i;
    // Last coordinate varies fastest.
    for (int j = d - 1; j >= 0; --j) {
      const long idx = rest % per_axis;
      rest /= per_axis;
      grid.points(i, j) = box.lo[j] + (box.hi[j] - box.lo[j]) * static_cast<double>(idx) / (per_axis - 1);
    }
  }
  return grid;
}

FiniteDomain make_rosenbrock_grid() {
  return make_uniform_grid(BoxDomain{Vector::Constant(3, -2.0), Vector::Constant(3, 2.0)}, 10);
}

std::string to_string(MetricKind kind) {
  switch (kind) {
    case MetricKind::kF1: return "f1";
    case MetricKind::kJaccard: return "jaccard";
    case MetricKind::kLogRegret: return "log10_regret";
    case MetricKind::kDiscoBaxRegret: return "discobax_regret";
  }
  return "unknown";
}

std::string metric_name(MetricKind kind) { return to_string(kind); }

std::unique_ptr<BaseAlgorithm> ProblemSpec::make_algorithm(std::uint64_t seed) const {
  switch (algorithm) {
    case AlgorithmKind::kLevelSet:
      return std::make_unique<LevelSetAlgorithm>(std::get<FiniteDomain>(domain), threshold);
    case AlgorithmKind::kTopK:
      return std::make_unique<TopKAlgorithm>(std::get<FiniteDomain>(domain), k);
    case AlgorithmKind::kDiscoBax:
      return std::make_unique<DiscoBaxAlgorithm>(std::get<FiniteDomain>(domain), k, eta);
    case AlgorithmKind::kLocalOpt: {
      LocalOptOptions opts = local_opt;
      opts.seed = seed;
      return std::make_unique<LocalOptAlgorithm>(std::get<BoxDomain>(domain), opts);
    }
  }
  throw std::logic_error("unknown algorithm kind");
}

void ProblemSpec::check_consistency() const {
  if (algorithm == AlgorithmKind::kLocalOpt) return;
  const TargetSet rerun = make_algorithm()->run(objective);
  if (rerun.indices != truth.indices) {
    throw std::logic_error("stored ground truth for " + name +
                           " differs from the base algorithm on the objective");
  }
}

std::vector<std::string> problem_names() {
  return {"hartmann6", "ackley", "himmelblau", "volcano", "rosenbrock", "discobax"};
}

ProblemSpec make_problem(const std::string& name, const ProblemOptions& options) {
  ProblemSpec spec;
  if (name == "hartmann6" || name == "ackley") {
    BoxDomain box;
    if (name == "hartmann6") {
      box = BoxDomain::unit(6);
      spec.objective = box_function([](const Vector& x) { return -hartmann6(x); });
      spec.f_star = kHartmann6Max;
    } else {
      box = BoxDomain::unit(options.ackley_dim);
      spec.objective = box_function([](const Vector& x) {
        return -ackley(((2.0 * x.array() - 1.0) * kAckleyBound).matrix());
      });
      spec.f_star = 0.0;
    }
    spec.name = name;
    spec.domain = box;
    spec.algorithm = AlgorithmKind::kLocalOpt;
    spec.metric = MetricKind::kLogRegret;
    spec.source = "analytic";
    Rng ref_rng(derive_seed(options.seed, 7));
    Matrix reference = scrambled_halton(2048, box.dim(), ref_rng);
    spec.noise_std = options.noise_std.value_or(
        standardized_noise(spec.objective.values_at(reference)));
    return spec;
  }

  if (name == "himmelblau" || name == "rosenbrock") {
    FiniteDomain grid;
    std::function<double(const Vector&)> f;
    if (name == "himmelblau") {
      grid = make_uniform_grid(BoxDomain{Vector::Constant(2, -6.0), Vector::Constant(2, 6.0)},
                               options.grid_per_axis);
      f = [](const Vector& x) { return -himmelblau(x); };
    } else {
      grid = make_rosenbrock_grid();
      f = [](const Vector& x) { return -rosenbrock(x); };
    }
    Vector values(grid.size());
    for (int i = 0; i < grid.size(); ++i) values[i] = f(grid.points.row(i).transpose());
    spec = finite_problem(name, grid, values);
    spec.source = "analytic";
    spec.noise_std = options.noise_std.value_or(standardized_noise(values));
    if (name == "himmelblau") {
      spec.algorithm = AlgorithmKind::kLevelSet;
      spec.metric = MetricKind::kF1;
      spec.threshold = quantile_threshold(values, options.tau_quantile);
    } else {
      spec.algorithm = AlgorithmKind::kTopK;
      spec.metric = MetricKind::kJaccard;
      spec.k = options.k > 0 ? options.k : 4;
    }
    spec.truth = spec.make_algorithm()->run(spec.objective);
    spec.check_consistency();
    return spec;
  }

  if (name == "volcano") {
    const GridDataset grid = options.data_file.empty() ? synthetic_volcano(options.seed)
                                                       : load_grid(options.data_file);
    GridDomain gd = grid_to_finite_domain(grid);
    spec = finite_problem(name, std::move(gd.domain), gd.values);
    spec.source = grid.source;
    spec.noise_std = options.noise_std.value_or(0.0);
    spec.algorithm = AlgorithmKind::kLevelSet;
    spec.metric = MetricKind::kF1;
    spec.threshold = quantile_threshold(gd.values, options.tau_quantile);
    spec.truth = spec.make_algorithm()->run(spec.objective);
    spec.check_consistency();
    return spec;
  }

  if (name == "discobax") {
    TabularDataset raw = options.data_file.empty()
                             ? synthetic_screen(options.records, 64, options.seed)
                             : load_tabular(options.data_file);
    raw = truncate_top(raw, options.records);
    const int width = static_cast<int>(raw.embeddings.cols());
    const int comps = std::min({options.pca_components, raw.size(), width});
    const TabularDataset reduced = pca_reduce(raw, comps);
    FiniteDomain domain{reduced.embeddings};
    spec = finite_problem(name, domain, reduced.values);
    spec.source = reduced.source;
    spec.noise_std = options.noise_std.value_or(0.0);
    spec.algorithm = AlgorithmKind::kDiscoBax;
    spec.metric = MetricKind::kDiscoBaxRegret;
    spec.k = options.k > 0 ? options.k : 5;

    // Exogenous noise: RBF GP with lengthscale equal to the median pairwise
    // distance of the embeddings and variance equal to var(f).
    std::vector<double> dists;
    Rng pick(derive_seed(options.seed, 11));
    std::uniform_int_distribution<int> any(0, domain.size() - 1);
    for (int s = 0; s < 2000; ++s) {
      const int a = any(pick), b = any(pick);
      if (a != b) dists.push_back((domain.points.row(a) - domain.points.row(b)).norm());
    }
    std::nth_element(dists.begin(), dists.begin() + dists.size() / 2, dists.end());
    const double median = dists.empty() ? 1.0 : dists[dists.size() / 2];
    const double var = (reduced.values.array() - reduced.values.mean()).square().mean();
    const KernelSpec eta_spec =
        KernelSpec::isotropic(KernelKind::kRbf, domain.dim(), median, var, 0.0);
    Rng eta_rng(derive_seed(options.seed, 13));
    spec.eta = std::make_shared<const Matrix>(sample_eta(domain, eta_spec, options.eta_draws, eta_rng));
    spec.truth = spec.make_algorithm()->run(spec.objective);
    spec.check_consistency();
    return spec;
  }

  throw ConfigError("unknown problem: " + name);
}

}  // namespace bax
