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


// Aggregation of results tables into mean and standard-error curves.

#ifndef BAX_REPORT_HPP
#define BAX_REPORT_HPP

#include <ostream>
#include <string>
#include <vector>

#include "bax/metrics.hpp"

namespace bax {

struct LabeledRecord {
  std::string problem;
  std::string method;
  MetricRecord record;
};

struct SummaryRow {
  std::string problem;
  std::string method;
  int iteration = 0;
  double mean = 0.0;
  double stderr_ = 0.0;  // sample std / sqrt(n); 0 when n = 1
  int count = 0;
};

// Groups by (problem, method, iteration) in sorted order. Failure rows are
// skipped.
std::vector<SummaryRow> summarize(const std::vector<LabeledRecord>& records);

// Reads one results.csv. Problem and method come from config.txt next to it
// when present, otherwise "unknown" and the parent directory name.
std::vector<LabeledRecord> read_results(const std::string& path);

void write_summary(const std::vector<SummaryRow>& rows, std::ostream& out);

}  // namespace bax

#endif  // BAX_REPORT_HPP
