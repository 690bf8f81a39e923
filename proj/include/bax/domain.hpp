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

#ifndef BAX_DOMAIN_HPP
#define BAX_DOMAIN_HPP

#include <functional>
#include <optional>
#include <variant>
#include <vector>

#include "bax/common.hpp"

namespace bax {

// A finite table of candidate inputs, one per row.
struct FiniteDomain {
  Matrix points;

  int size() const { return static_cast<int>(points.rows()); }
  int dim() const { return static_cast<int>(points.cols()); }
  void validate() const;
  // Per-dimension max - min of the table (1 for flat dimensions).
  Vector extent() const;
};

struct BoxDomain {
  Vector lo;
  Vector hi;

  int dim() const { return static_cast<int>(lo.size()); }
  void validate() const;
  Vector extent() const { return hi - lo; }
  double diameter() const { return extent().norm(); }
  Vector clamp(const Vector& x) const { return x.cwiseMax(lo).cwiseMin(hi); }
  bool contains(const Vector& x) const;

  static BoxDomain unit(int dim);
};

using Domain = std::variant<FiniteDomain, BoxDomain>;

int domain_dim(const Domain& domain);
Vector domain_extent(const Domain& domain);

// A real function over the domain: the true objective, a posterior sample
// or the posterior mean.
struct FunctionView {
  std::function<double(const Vector&)> value;
  // Empty when no analytic gradient is available.
  std::function<Vector(const Vector&)> gradient;
  // Optional vectorized evaluation over the rows of a matrix.
  std::function<Vector(const Matrix&)> batch;
  // Values on the rows of a finite domain, when known up front.
  std::optional<Vector> tabulated;

  double operator()(const Vector& x) const { return value(x); }
  bool has_gradient() const { return static_cast<bool>(gradient); }
  Vector values_on(const FiniteDomain& domain) const;
  Vector values_at(const Matrix& points) const;

  static FunctionView from_table(const FiniteDomain& domain, Vector values);
};

// Output of a base algorithm. For finite domains `indices` holds the member
// row indices; `points` always holds the member coordinates, one per row.
struct TargetSet {
  std::vector<int> indices;
  Matrix points;

  int size() const { return static_cast<int>(points.rows()); }
  bool empty() const { return points.rows() == 0; }

  static TargetSet from_indices(const FiniteDomain& domain, std::vector<int> indices);
  static TargetSet from_point(const Vector& x);
};

}  // namespace bax

#endif  // BAX_DOMAIN_HPP
