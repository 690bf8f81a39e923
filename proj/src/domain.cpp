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

#include "bax/domain.hpp"

#include <memory>

namespace bax {

void FiniteDomain::validate() const {
  if (points.rows() < 1) throw std::invalid_argument("finite domain is empty");
  if (points.cols() < 1) throw DimensionError("finite domain has zero dimension");
}

Vector FiniteDomain::extent() const {
  Vector e = points.colwise().maxCoeff() - points.colwise().minCoeff();
  for (Eigen::Index j = 0; j < e.size(); ++j) {
    if (!(e[j] > 0.0)) e[j] = 1.0;
  }
  return e;
}

void BoxDomain::validate() const {
  if (lo.size() == 0 || lo.size() != hi.size()) {
    throw DimensionError("box bounds have mismatched dimensions");
  }
  if (!(lo.array() < hi.array()).all()) {
    throw std::invalid_argument("box requires lo < hi in every dimension");
  }
}

bool BoxDomain::contains(const Vector& x) const {
  return x.size() == lo.size() && (x.array() >= lo.array()).all() &&
         (x.array() <= hi.array()).all();
}

BoxDomain BoxDomain::unit(int dim) {
  return BoxDomain{Vector::Zero(dim), Vector::Ones(dim)};
}

int domain_dim(const Domain& domain) {
  return std::visit([](const auto& d) { return d.dim(); }, domain);
}

Vector domain_extent(const Domain& domain) {
  return std::visit([](const auto& d) { return d.extent(); }, domain);
}

Vector FunctionView::values_at(const Matrix& points) const {
  if (batch) return batch(points);
  Vector out(points.rows());
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    out[i] = value(points.row(i).transpose());
  }
  return out;
}

Vector FunctionView::values_on(const FiniteDomain& domain) const {
  if (tabulated && tabulated->size() == domain.size()) return *tabulated;
  return values_at(domain.points);
}

FunctionView FunctionView::from_table(const FiniteDomain& domain, Vector values) {
  if (values.size() != domain.size()) {
    throw DimensionError("table values do not match the domain size");
  }
  auto points = std::make_shared<const Matrix>(domain.points);
  auto table = std::make_shared<const Vector>(values);
  FunctionView view;
  view.value = [points, table](const Vector& x) {
    for (Eigen::Index i = 0; i < points->rows(); ++i) {
      if (points->row(i).transpose() == x) return (*table)[i];
    }
    throw std::out_of_range("point is not a member of the finite domain");
  };
  view.tabulated = std::move(values);
  return view;
}

TargetSet TargetSet::from_indices(const FiniteDomain& domain, std::vector<int> indices) {
  TargetSet out;
  out.points.resize(static_cast<Eigen::Index>(indices.size()), domain.dim());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    out.points.row(static_cast<Eigen::Index>(i)) = domain.points.row(indices[i]);
  }
  out.indices = std::move(indices);
  return out;
}

TargetSet TargetSet::from_point(const Vector& x) {
  TargetSet out;
  out.points = x.transpose();
  return out;
}

}  // namespace bax
