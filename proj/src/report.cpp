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


#include "bax/report.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <tuple>

#include "bax/common.hpp"
#include "bax/experiment.hpp"

namespace bax {

std::vector<SummaryRow> summarize(const std::vector<LabeledRecord>& records) {
  std::map<std::tuple<std::string, std::string, int>, std::vector<double>> groups;
  for (const LabeledRecord& r : records) {
    if (r.record.metric == "failure") continue;
    groups[{r.problem, r.method, r.record.iteration}].push_back(r.record.value);
  }
  std::vector<SummaryRow> rows;
  for (const auto& [key, values] : groups) {
    SummaryRow row;
    std::tie(row.problem, row.method, row.iteration) = key;
    row.count = static_cast<int>(values.size());
    double sum = 0.0;
    for (double v : values) sum += v;
    row.mean = sum / row.count;
    if (row.count > 1) {
      double ss = 0.0;
      for (double v : values) ss += (v - row.mean) * (v - row.mean);
      row.stderr_ = std::sqrt(ss / (row.count - 1)) / std::sqrt(static_cast<double>(row.count));
    }
    rows.push_back(row);
  }
  return rows;
}

std::vector<LabeledRecord> read_results(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open results file: " + path);
  const std::filesystem::path file(path);
  std::string problem = "unknown";
  std::string method = file.parent_path().filename().string();
  const auto config_path = file.parent_path() / "config.txt";
  if (std::filesystem::exists(config_path)) {
    const ExperimentConfig cfg = load_config(config_path.string());
    problem = cfg.problem;
    method = to_string(cfg.acquisition);
    if (cfg.q > 1) method += "-q" + std::to_string(cfg.q);
  }

  std::vector<LabeledRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1) {
      if (line.rfind("replication,iteration,metric,value,acq_seconds", 0) != 0) {
        throw ParseError("unexpected results header", line_no);
      }
      continue;
    }
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string rep, iter, metric, value, seconds;
    if (!std::getline(ss, rep, ',') || !std::getline(ss, iter, ',') ||
        !std::getline(ss, metric, ',') || !std::getline(ss, value, ',') ||
        !std::getline(ss, seconds)) {
      throw ParseError("expected 5 fields", line_no);
    }
    LabeledRecord r{problem, method, {}};
    try {
      r.record.replication = std::stoi(rep);
      r.record.iteration = std::stoi(iter);
      r.record.metric = metric;
      r.record.value = std::stod(value);
      r.record.acq_seconds = std::stod(seconds);
    } catch (const std::exception&) {
      throw ParseError("malformed results row", line_no);
    }
    out.push_back(std::move(r));
  }
  return out;
}

void write_summary(const std::vector<SummaryRow>& rows, std::ostream& out) {
  out << "problem,method,iteration,mean,stderr\n" << std::setprecision(10);
  for (const SummaryRow& r : rows) {
    out << r.problem << ',' << r.method << ',' << r.iteration << ',' << r.mean << ','
        << r.stderr_ << '\n';
  }
}

}  // namespace bax
