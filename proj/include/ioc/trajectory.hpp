#pragma once

#include <Eigen/Dense>
#include <cstdio>
#include <istream>
#include <nlohmann/json.hpp>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "ioc/errors.hpp"
#include "ioc/geometry.hpp"

namespace ioc {

// One record of a simulated closed loop: state, applied control, stage cost
// Q(x) + u^T R(x) u, value x^T P x, and the discounted cost accumulated from
// the start of the trajectory.
struct TrajectorySample {
  double t = 0.0;
  Eigen::VectorXd x;
  Eigen::VectorXd u;
  double stage_cost = 0.0;
  double value = 0.0;
  double discounted_running_cost = 0.0;
};

struct Trajectory {
  TimeRegime regime = TimeRegime::kDiscrete;
  double step = 1.0;  // dt for continuous loops, 1 for discrete ones
  std::vector<TrajectorySample> samples;

  const TrajectorySample& front() const { return samples.front(); }
  const TrajectorySample& back() const { return samples.back(); }
  std::size_t size() const { return samples.size(); }
};

namespace detail {

inline std::string csv_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace detail

// Columns: t,x1..xn,u1..um,stage_cost,value,discounted_running_cost.
// Numbers carry 17 significant digits so a read-back is bit-exact.
inline void write_trajectory_csv(const Trajectory& traj, std::ostream& out) {
  if (traj.samples.empty()) {
    throw Error("cannot write an empty trajectory");
  }
  const auto n = traj.samples.front().x.size();
  const auto m = traj.samples.front().u.size();
  out << "t";
  for (Eigen::Index i = 1; i <= n; ++i) out << ",x" << i;
  for (Eigen::Index i = 1; i <= m; ++i) out << ",u" << i;
  out << ",stage_cost,value,discounted_running_cost\n";
  for (const TrajectorySample& s : traj.samples) {
    out << detail::csv_number(s.t);
    for (Eigen::Index i = 0; i < n; ++i) out << ',' << detail::csv_number(s.x[i]);
    for (Eigen::Index i = 0; i < m; ++i) out << ',' << detail::csv_number(s.u[i]);
    out << ',' << detail::csv_number(s.stage_cost) << ','
        << detail::csv_number(s.value) << ','
        << detail::csv_number(s.discounted_running_cost) << '\n';
  }
}

inline Trajectory read_trajectory_csv(std::istream& in, TimeRegime regime) {
  std::string line;
  if (!std::getline(in, line)) {
    throw Error("trajectory CSV is empty");
  }
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  int n = 0, m = 0;
  for (const std::string& h : header) {
    if (h.size() > 1 && h[0] == 'x') ++n;
    if (h.size() > 1 && h[0] == 'u') ++m;
  }
  const std::size_t expected_cols = 4 + static_cast<std::size_t>(n + m);
  if (header.size() != expected_cols || header.front() != "t") {
    throw Error("unrecognized trajectory CSV header: " + line);
  }

  Trajectory traj;
  traj.regime = regime;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw Error("malformed trajectory CSV cell: " + cell);
      }
    }
    if (row.size() != expected_cols) {
      throw Error("trajectory CSV row has " + std::to_string(row.size()) +
                  " cells, expected " + std::to_string(expected_cols));
    }
    TrajectorySample s;
    s.t = row[0];
    s.x = Eigen::Map<Eigen::VectorXd>(row.data() + 1, n);
    s.u = Eigen::Map<Eigen::VectorXd>(row.data() + 1 + n, m);
    s.stage_cost = row[1 + n + m];
    s.value = row[2 + n + m];
    s.discounted_running_cost = row[3 + n + m];
    traj.samples.push_back(std::move(s));
  }
  if (traj.samples.size() >= 2) {
    traj.step = traj.samples[1].t - traj.samples[0].t;
  }
  return traj;
}

inline nlohmann::json trajectory_to_json(const Trajectory& traj) {
  nlohmann::json samples = nlohmann::json::array();
  for (const TrajectorySample& s : traj.samples) {
    samples.push_back(
        {{"t", s.t},
         {"x", std::vector<double>(s.x.data(), s.x.data() + s.x.size())},
         {"u", std::vector<double>(s.u.data(), s.u.data() + s.u.size())},
         {"stage_cost", s.stage_cost},
         {"value", s.value},
         {"discounted_running_cost", s.discounted_running_cost}});
  }
  return nlohmann::json{{"regime", to_string(traj.regime)},
                        {"step", traj.step},
                        {"samples", std::move(samples)}};
}

}  // namespace ioc
