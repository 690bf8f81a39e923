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


#include "bax/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <vector>

#include "bax/base_algorithms.hpp"

namespace bax {

namespace {

std::vector<int> sorted_unique(std::vector<int> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

struct Overlap {
  long inter = 0;
  long pred_only = 0;
  long truth_only = 0;
};

Overlap overlap(const TargetSet& pred, const TargetSet& truth) {
  const auto a = sorted_unique(pred.indices);
  const auto b = sorted_unique(truth.indices);
  std::vector<int> both;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(both));
  Overlap o;
  o.inter = static_cast<long>(both.size());
  o.pred_only = static_cast<long>(a.size()) - o.inter;
  o.truth_only = static_cast<long>(b.size()) - o.inter;
  return o;
}

}  // namespace

double f1_score(const TargetSet& pred, const TargetSet& truth) {
  const Overlap o = overlap(pred, truth);
  const double denom = 2.0 * o.inter + o.pred_only + o.truth_only;
  if (denom == 0.0) return 1.0;
  return 2.0 * o.inter / denom;
}

double jaccard_distance(const TargetSet& pred, const TargetSet& truth) {
  const Overlap o = overlap(pred, truth);
  const double uni = static_cast<double>(o.inter + o.pred_only + o.truth_only);
  if (uni == 0.0) return 0.0;
  return 1.0 - o.inter / uni;
}

double inference_regret_log10(double f_star, double f_at_estimate) {
  return std::log10(std::max(f_star - f_at_estimate, 1e-12));
}

double discobax_regret(const Vector& true_values, const Matrix& eta_samples,
                       const TargetSet& s_opt, const TargetSet& s_est) {
  return discobax_value(true_values, eta_samples, s_opt.indices) -
         discobax_value(true_values, eta_samples, s_est.indices);
}

}  // namespace bax
