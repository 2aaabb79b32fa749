#pragma once

#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "infotrack/env.hpp"
#include "infotrack/errors.hpp"

namespace infotrack {

inline constexpr const char* kEpisodeLogSchema = "episode-log/1";

/// Snapshot of one world state as it appears in the log.
struct LogState {
  Pose robot;
  std::vector<Eigen::Vector4d> targets;
  std::vector<Eigen::Vector4d> means;
  std::vector<Eigen::Matrix2d> cov_pos;  // position block of each covariance
  std::vector<double> logdet;
  std::vector<int> observed;
  ObstacleReading obstacle;
};

/// One post-step record: state after applying `action`, with its reward.
struct LogStep {
  int t = 0;
  LogState state;
  int action = -1;
  double reward = 0.0;
};

struct EpisodeLog {
  std::string schema = kEpisodeLogSchema;
  std::string map_name;
  WorldMap map;
  int n_targets = 0;
  double tau = 0.0;
  int horizon = 0;
  std::uint64_t seed = 0;
  std::string config_hash;
  std::string policy;
  std::optional<LogState> initial;
  std::vector<LogStep> steps;
};

namespace log_detail {

inline nlohmann::json state_to_json(const LogState& s) {
  nlohmann::json j;
  j["robot"] = {s.robot.x, s.robot.y, s.robot.theta};
  auto targets = nlohmann::json::array();
  for (const auto& t : s.targets) targets.push_back({t(0), t(1), t(2), t(3)});
  j["targets"] = targets;
  auto means = nlohmann::json::array();
  for (const auto& m : s.means) means.push_back({m(0), m(1), m(2), m(3)});
  j["means"] = means;
  auto covs = nlohmann::json::array();
  for (const auto& c : s.cov_pos) covs.push_back({c(0, 0), c(0, 1), c(1, 1)});
  j["cov_pos"] = covs;
  j["logdet"] = s.logdet;
  j["observed"] = s.observed;
  j["obstacle"] = {s.obstacle.range, s.obstacle.bearing, s.obstacle.found ? 1 : 0};
  return j;
}

inline LogState state_from_json(const nlohmann::json& j) {
  LogState s;
  const auto& r = j.at("robot");
  s.robot = {r[0].get<double>(), r[1].get<double>(), r[2].get<double>()};
  for (const auto& t : j.at("targets")) {
    Eigen::Vector4d v;
    v << t[0].get<double>(), t[1].get<double>(), t[2].get<double>(), t[3].get<double>();
    s.targets.push_back(v);
  }
  for (const auto& m : j.at("means")) {
    Eigen::Vector4d v;
    v << m[0].get<double>(), m[1].get<double>(), m[2].get<double>(), m[3].get<double>();
    s.means.push_back(v);
  }
  for (const auto& c : j.at("cov_pos")) {
    Eigen::Matrix2d m;
    m << c[0].get<double>(), c[1].get<double>(), c[1].get<double>(), c[2].get<double>();
    s.cov_pos.push_back(m);
  }
  s.logdet = j.at("logdet").get<std::vector<double>>();
  s.observed = j.at("observed").get<std::vector<int>>();
  const auto& o = j.at("obstacle");
  s.obstacle = {o[0].get<double>(), o[1].get<double>(), o[2].get<int>() != 0};
  return s;
}

inline LogState capture(const TrackingEnv& env) {
  LogState s;
  s.robot = env.pose();
  for (const auto& t : env.targets()) s.targets.push_back(t.v);
  for (const auto& b : env.beliefs()) {
    s.means.push_back(b.mean);
    s.cov_pos.push_back(b.cov.topLeftCorner<2, 2>());
  }
  s.logdet = env.last_logdets();
  for (bool o : env.observed()) s.observed.push_back(o ? 1 : 0);
  s.obstacle = env.obstacle();
  return s;
}

}  // namespace log_detail

/// Streams an episode as JSON lines: one header line, then one line per step.
class EpisodeLogWriter {
 public:
  EpisodeLogWriter(const std::string& path, const TrackingEnv& env, std::uint64_t seed,
                   const std::string& config_hash, const std::string& policy)
      : out_(path, std::ios::trunc) {
    if (!out_) throw ConfigError("cannot open episode log for writing: " + path);
    nlohmann::json h;
    h["schema"] = kEpisodeLogSchema;
    h["map_name"] = env.config().map_name;
    h["map"] = env.config().map.to_json();
    h["n_targets"] = env.config().n_targets;
    h["tau"] = env.config().tau;
    h["horizon"] = env.config().horizon;
    h["seed"] = seed;
    h["config_hash"] = config_hash;
    h["policy"] = policy;
    h["initial"] = log_detail::state_to_json(log_detail::capture(env));
    out_ << h.dump() << "\n";
  }

  void record_step(const TrackingEnv& env) {
    nlohmann::json j = log_detail::state_to_json(log_detail::capture(env));
    j["t"] = env.t();
    j["action"] = env.last_action();
    j["reward"] = env.last_reward();
    out_ << j.dump() << "\n";
  }

  void flush() { out_.flush(); }

 private:
  std::ofstream out_;
};

inline EpisodeLog read_episode_log(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open episode log: " + path);
  std::string line;
  if (!std::getline(in, line)) throw SchemaVersionMismatch("episode log is empty: " + path);

  nlohmann::json h;
  try {
    h = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaVersionMismatch(std::string("episode log header is not JSON: ") + e.what());
  }
  if (!h.contains("schema") || h.at("schema").get<std::string>() != kEpisodeLogSchema) {
    throw SchemaVersionMismatch("unsupported episode log schema in " + path);
  }

  EpisodeLog log;
  log.map_name = h.value("map_name", "");
  if (h.contains("map")) log.map = WorldMap::from_json(h.at("map"));
  log.n_targets = h.value("n_targets", 0);
  log.tau = h.value("tau", 0.0);
  log.horizon = h.value("horizon", 0);
  log.seed = h.value("seed", std::uint64_t{0});
  log.config_hash = h.value("config_hash", "");
  log.policy = h.value("policy", "");
  if (h.contains("initial")) log.initial = log_detail::state_from_json(h.at("initial"));

  while (std::getline(in, line)) {
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw SchemaVersionMismatch(std::string("bad episode log line: ") + e.what());
    }
    LogStep step;
    step.t = j.at("t").get<int>();
    step.action = j.at("action").get<int>();
    step.reward = j.at("reward").get<double>();
    step.state = log_detail::state_from_json(j);
    log.steps.push_back(std::move(step));
  }
  return log;
}

}  // namespace infotrack
