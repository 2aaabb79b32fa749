#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "infotrack/errors.hpp"

namespace infotrack {

struct SummaryStats {
  double mean = 0.0;
  double stddev = 0.0;  // population standard deviation
  double min = 0.0;
  double max = 0.0;
  int n = 0;
};

inline SummaryStats summarize(const std::vector<double>& xs) {
  SummaryStats s;
  s.n = static_cast<int>(xs.size());
  if (xs.empty()) return s;
  s.min = std::numeric_limits<double>::infinity();
  s.max = -std::numeric_limits<double>::infinity();
  for (double x : xs) {
    s.mean += x;
    s.min = std::min(s.min, x);
    s.max = std::max(s.max, x);
  }
  s.mean /= s.n;
  double var = 0.0;
  for (double x : xs) var += (x - s.mean) * (x - s.mean);
  s.stddev = std::sqrt(var / s.n);
  return s;
}

/// Moving average with a prefix-truncated window: out[i] is the mean of
/// in[max(0, i-window+1) .. i].
inline std::vector<double> moving_average(const std::vector<double>& xs, int window) {
  std::vector<double> out(xs.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    acc += xs[i];
    if (i >= static_cast<std::size_t>(window)) acc -= xs[i - static_cast<std::size_t>(window)];
    const std::size_t len = std::min<std::size_t>(i + 1, static_cast<std::size_t>(window));
    out[i] = acc / static_cast<double>(len);
  }
  return out;
}

/// One evaluation point of a training run: statistics over eval episodes of
/// the per-episode cumulative -sum_i log det Sigma_i. Wall time is recorded
/// for bookkeeping and excluded from determinism comparisons.
struct RunRecord {
  int trajectory = 0;
  double eval_mean = 0.0;
  double eval_std = 0.0;
  double wall_time_s = 0.0;

  nlohmann::json to_json() const {
    return {{"trajectory", trajectory},
            {"eval_mean", eval_mean},
            {"eval_std", eval_std},
            {"wall_time_s", wall_time_s}};
  }

  static RunRecord from_json(const nlohmann::json& j) {
    RunRecord r;
    r.trajectory = j.at("trajectory").get<int>();
    r.eval_mean = j.at("eval_mean").get<double>();
    r.eval_std = j.at("eval_std").get<double>();
    r.wall_time_s = j.value("wall_time_s", 0.0);
    return r;
  }
};

inline std::vector<RunRecord> read_run_records(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open records file: " + path);
  std::vector<RunRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    out.push_back(RunRecord::from_json(nlohmann::json::parse(line)));
  }
  return out;
}

}  // namespace infotrack
