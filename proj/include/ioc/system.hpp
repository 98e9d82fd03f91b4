#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <memory>
#include <nlohmann/json.hpp>
#include <string>
#include <utility>
#include <vector>

#include "ioc/errors.hpp"
#include "ioc/expression.hpp"
#include "ioc/geometry.hpp"

namespace ioc {

// JSON-facing description of a system: expressions kept as text.
// Schema (all keys required):
//   { "name": string, "regime": "discrete"|"continuous", "n": int, "m": int,
//     "f": [string x n], "g": [[string x m] x n], "R": [[string x m] x m],
//     "P": [[number x n] x n], "gamma": number }
struct SystemConfig {
  std::string name;
  std::string regime;
  int n = 0;
  int m = 0;
  std::vector<std::string> f;
  std::vector<std::vector<std::string>> g;
  std::vector<std::vector<std::string>> r;
  std::vector<std::vector<double>> p;
  double gamma = 1.0;

  static SystemConfig from_json(const nlohmann::json& j);
  static SystemConfig from_string(const std::string& text);
  static SystemConfig from_file(const std::string& path);
  nlohmann::json to_json() const;
};

inline SystemConfig SystemConfig::from_json(const nlohmann::json& j) {
  SystemConfig c;
  try {
    c.name = j.at("name").get<std::string>();
    c.regime = j.at("regime").get<std::string>();
    c.n = j.at("n").get<int>();
    c.m = j.at("m").get<int>();
    c.f = j.at("f").get<std::vector<std::string>>();
    c.g = j.at("g").get<std::vector<std::vector<std::string>>>();
    c.r = j.at("R").get<std::vector<std::vector<std::string>>>();
    c.p = j.at("P").get<std::vector<std::vector<double>>>();
    c.gamma = j.at("gamma").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed system config: ") + e.what());
  }
  return c;
}

inline SystemConfig SystemConfig::from_string(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded()) {
    throw ConfigError("system config is not valid JSON");
  }
  return from_json(j);
}

inline SystemConfig SystemConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open system config file: " + path);
  }
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return from_string(text);
}

inline nlohmann::json SystemConfig::to_json() const {
  return nlohmann::json{{"name", name}, {"regime", regime}, {"n", n},
                        {"m", m},       {"f", f},           {"g", g},
                        {"R", r},       {"P", p},           {"gamma", gamma}};
}

// A validated control-affine plant
//     x+ (or dx/dt) = f(x) + g(x) u
// together with the value-function weight P, the state-dependent control
// weight R(x) and the discount factor for its time regime.
//
// Load-time checks: dimension consistency, f(0) = 0 (tolerance 1e-12),
// P symmetric positive definite, gamma admissible for the regime.
// Per-evaluation checks: R(x) symmetric positive definite at the queried
// state (ModelAssumptionError otherwise). g(x) rank is sampled evidence,
// exposed through min_g_singular_value() and the verification suite.
class SystemModel {
 public:
  const std::string& name() const { return name_; }
  TimeRegime regime() const { return regime_; }
  int state_dim() const { return n_; }
  int input_dim() const { return m_; }
  double gamma() const { return gamma_.value; }
  const WeightMatrix& weight() const { return value_.weight(); }
  const QuadraticValueFunction& value_function() const { return value_; }

  Eigen::VectorXd drift(const StateVector& x) const {
    require_state(x);
    Eigen::VectorXd out(n_);
    for (int i = 0; i < n_; ++i) {
      out[i] = f_[i].eval(x);
    }
    return out;
  }

  Eigen::MatrixXd input_map(const StateVector& x) const {
    require_state(x);
    Eigen::MatrixXd out(n_, m_);
    for (int i = 0; i < n_; ++i) {
      for (int j = 0; j < m_; ++j) {
        out(i, j) = g_[static_cast<std::size_t>(i) * m_ + j].eval(x);
      }
    }
    return out;
  }

  Eigen::MatrixXd control_weight(const StateVector& x) const {
    require_state(x);
    Eigen::MatrixXd out(m_, m_);
    for (int i = 0; i < m_; ++i) {
      for (int j = 0; j < m_; ++j) {
        out(i, j) = r_[static_cast<std::size_t>(i) * m_ + j].eval(x);
      }
    }
    const double scale = std::max(1.0, out.cwiseAbs().maxCoeff());
    if ((out - out.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
      throw ModelAssumptionError("R(x) is not symmetric at state " +
                                 format_state(x));
    }
    Eigen::LLT<Eigen::MatrixXd> llt(out);
    if (llt.info() != Eigen::Success) {
      throw ModelAssumptionError("R(x) is not positive definite at state " +
                                 format_state(x));
    }
    return out;
  }

  // Smallest singular value of g(x); evidence for the max-rank assumption.
  double min_g_singular_value(const StateVector& x) const {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(input_map(x));
    return svd.singularValues().minCoeff();
  }

  void require_state(const StateVector& x) const {
    detail::require_length(x, n_, "state");
  }

  void require_discrete(const char* op) const {
    if (regime_ != TimeRegime::kDiscrete) {
      throw RegimeError(std::string(op) + " requires a discrete-time system");
    }
  }

  void require_continuous(const char* op) const {
    if (regime_ != TimeRegime::kContinuous) {
      throw RegimeError(std::string(op) + " requires a continuous-time system");
    }
  }

  void require_single_input(const char* op) const {
    if (m_ != 1) {
      throw DimensionError(std::string(op) + " requires a single-input system, m = " +
                           std::to_string(m_));
    }
  }

  SystemConfig to_config() const { return config_; }

  static SystemModel load(const SystemConfig& config);

 private:
  SystemModel(SystemConfig config, TimeRegime regime,
              std::vector<Expression> f, std::vector<Expression> g,
              std::vector<Expression> r, QuadraticValueFunction value,
              DiscountFactor gamma)
      : config_(std::move(config)),
        name_(config_.name),
        regime_(regime),
        n_(config_.n),
        m_(config_.m),
        f_(std::move(f)),
        g_(std::move(g)),
        r_(std::move(r)),
        value_(std::move(value)),
        gamma_(gamma) {}

  static std::string format_state(const StateVector& x) {
    std::string s = "(";
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.6g", x[i]);
      s += buf;
      if (i + 1 < x.size()) s += ", ";
    }
    return s + ")";
  }

  SystemConfig config_;
  std::string name_;
  TimeRegime regime_;
  int n_;
  int m_;
  std::vector<Expression> f_;  // n entries
  std::vector<Expression> g_;  // n*m entries, row-major
  std::vector<Expression> r_;  // m*m entries, row-major
  QuadraticValueFunction value_;
  DiscountFactor gamma_;
};

inline SystemModel SystemModel::load(const SystemConfig& config) {
  if (config.n < 1 || config.m < 1) {
    throw ConfigError("system dimensions must satisfy n >= 1 and m >= 1");
  }
  TimeRegime regime;
  if (config.regime == "discrete") {
    regime = TimeRegime::kDiscrete;
  } else if (config.regime == "continuous") {
    regime = TimeRegime::kContinuous;
  } else {
    throw ConfigError("regime must be \"discrete\" or \"continuous\", got \"" +
                      config.regime + "\"");
  }

  if (static_cast<int>(config.f.size()) != config.n) {
    throw ConfigError("f must have n = " + std::to_string(config.n) +
                      " entries, got " + std::to_string(config.f.size()));
  }
  auto parse_grid = [&](const std::vector<std::vector<std::string>>& grid,
                        int rows, int cols, const char* what) {
    if (static_cast<int>(grid.size()) != rows) {
      throw ConfigError(std::string(what) + " must have " +
                        std::to_string(rows) + " rows, got " +
                        std::to_string(grid.size()));
    }
    std::vector<Expression> out;
    out.reserve(static_cast<std::size_t>(rows) * cols);
    for (int i = 0; i < rows; ++i) {
      if (static_cast<int>(grid[i].size()) != cols) {
        throw ConfigError(std::string(what) + " row " + std::to_string(i + 1) +
                          " must have " + std::to_string(cols) +
                          " entries, got " + std::to_string(grid[i].size()));
      }
      for (int j = 0; j < cols; ++j) {
        try {
          out.push_back(parse_expression(grid[i][j], config.n));
        } catch (const ParseError& e) {
          throw ConfigError(std::string(what) + "[" + std::to_string(i + 1) +
                            "][" + std::to_string(j + 1) + "]: " + e.what());
        }
      }
    }
    return out;
  };

  std::vector<Expression> f;
  f.reserve(config.f.size());
  for (int i = 0; i < config.n; ++i) {
    try {
      f.push_back(parse_expression(config.f[i], config.n));
    } catch (const ParseError& e) {
      throw ConfigError("f[" + std::to_string(i + 1) + "]: " + e.what());
    }
  }
  std::vector<Expression> g = parse_grid(config.g, config.n, config.m, "g");
  std::vector<Expression> r = parse_grid(config.r, config.m, config.m, "R");

  if (static_cast<int>(config.p.size()) != config.n) {
    throw ConfigError("P must be " + std::to_string(config.n) + "x" +
                      std::to_string(config.n));
  }
  Eigen::MatrixXd p(config.n, config.n);
  for (int i = 0; i < config.n; ++i) {
    if (static_cast<int>(config.p[i].size()) != config.n) {
      throw ConfigError("P must be " + std::to_string(config.n) + "x" +
                        std::to_string(config.n));
    }
    for (int j = 0; j < config.n; ++j) {
      p(i, j) = config.p[i][j];
    }
  }

  QuadraticValueFunction value{validate_weight(p)};
  DiscountFactor gamma = DiscountFactor::checked(config.gamma, regime);

  // f(0) = 0 is a standing model assumption; checked numerically here.
  Eigen::VectorXd origin = Eigen::VectorXd::Zero(config.n);
  for (int i = 0; i < config.n; ++i) {
    const double fi0 = f[i].eval(origin);
    if (std::abs(fi0) > 1e-12) {
      throw ConfigError("f(0) must be 0: component " + std::to_string(i + 1) +
                        " evaluates to " + std::to_string(fi0) +
                        " at the origin");
    }
  }

  return SystemModel(config, regime, std::move(f), std::move(g), std::move(r),
                     std::move(value), gamma);
}

inline SystemModel load_system(const SystemConfig& config) {
  return SystemModel::load(config);
}

namespace detail {

inline std::string format_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace detail

// Built-in systems. example1-discrete and example2-continuous are the two
// second-order benchmark plants; the scalar pair has closed-form trajectories
// and exact discounted costs, which makes them the reference oracles.
inline const std::vector<std::pair<std::string, std::string>>& builtin_system_configs() {
  static const std::vector<std::pair<std::string, std::string>> configs = {
      {"example1-discrete", R"json({
        "name": "example1-discrete", "regime": "discrete", "n": 2, "m": 1,
        "f": ["-x2*sin(x2)", "-x1*cos(x2)*sin(x1)"],
        "g": [["0"], ["1"]],
        "R": [["1"]],
        "P": [[1, 0], [0, 1]],
        "gamma": 1
      })json"},
      {"example2-continuous", R"json({
        "name": "example2-continuous", "regime": "continuous", "n": 2, "m": 1,
        "f": ["x2^3 - x1", "-x1*x2^2"],
        "g": [["0"], ["1"]],
        "R": [["1"]],
        "P": [[1, 0], [0, 1]],
        "gamma": 0
      })json"},
      {"scalar-discrete-half", R"json({
        "name": "scalar-discrete-half", "regime": "discrete", "n": 1, "m": 1,
        "f": ["0.5*x1"],
        "g": [["1"]],
        "R": [["1"]],
        "P": [[1]],
        "gamma": 1
      })json"},
      {"scalar-continuous-neg", R"json({
        "name": "scalar-continuous-neg", "regime": "continuous", "n": 1, "m": 1,
        "f": ["-x1"],
        "g": [["1"]],
        "R": [["1"]],
        "P": [[1]],
        "gamma": 0
      })json"},
  };
  return configs;
}

inline std::vector<std::string> builtin_system_names() {
  std::vector<std::string> names;
  for (const auto& [name, text] : builtin_system_configs()) {
    names.push_back(name);
  }
  return names;
}

inline SystemModel builtin_system(const std::string& name) {
  for (const auto& [key, text] : builtin_system_configs()) {
    if (key == name) {
      return load_system(SystemConfig::from_string(text));
    }
  }
  throw UnknownSystemError("unknown builtin system \"" + name +
                           "\"; run list-systems for the registry");
}

// Copy of a system with R(x) replaced by the constant matrix r * I.
inline SystemModel with_control_weight(const SystemModel& sys, double r) {
  if (!(r > 0.0)) {
    throw ConfigError("control weight must be positive, got " +
                      std::to_string(r));
  }
  SystemConfig config = sys.to_config();
  const std::string rtext = detail::format_full(r);
  for (int i = 0; i < config.m; ++i) {
    for (int j = 0; j < config.m; ++j) {
      config.r[i][j] = (i == j) ? rtext : "0";
    }
  }
  return load_system(config);
}

}  // namespace ioc
