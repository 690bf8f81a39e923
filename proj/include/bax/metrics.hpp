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


// Scores comparing an estimated target set with the true one.

#ifndef BAX_METRICS_HPP
#define BAX_METRICS_HPP

#include <string>

#include "bax/common.hpp"
#include "bax/domain.hpp"

namespace bax {

struct MetricRecord {
  int replication = 0;
  int iteration = 0;
  std::string metric;
  double value = 0.0;
  double acq_seconds = 0.0;
};

// 2 TP / (2 TP + FP + FN) over domain indices. Two empty sets score 1.
double f1_score(const TargetSet& pred, const TargetSet& truth);

// 1 - |intersection| / |union| over domain indices. Two empty sets score 0.
double jaccard_distance(const TargetSet& pred, const TargetSet& truth);

// log10(f_star - f_at_estimate), with the gap clamped below at 1e-12.
double inference_regret_log10(double f_star, double f_at_estimate);

// value(S_opt) - value(S_est), both scored on the true values with the
// shared eta draws.
double discobax_regret(const Vector& true_values, const Matrix& eta_samples,
                       const TargetSet& s_opt, const TargetSet& s_est);

}  // namespace bax

#endif  // BAX_METRICS_HPP
