#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "ioc/continuous.hpp"
#include "ioc/discrete.hpp"
#include "ioc/errors.hpp"
#include "ioc/geometry.hpp"
#include "ioc/report.hpp"
#include "ioc/sampling.hpp"
#include "ioc/synthesis.hpp"
#include "ioc/system.hpp"

namespace ioc {

namespace detail {

template <typename F>
double golden_minimize(F&& f, double a, double b, double tol) {
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

// One-step cost being minimized over u at a fixed state:
//   discrete:   u^T R u + gamma (f + g u)^T P (f + g u)
//   continuous: u^T R u + grad V*(x)^T (f + g u)
inline std::function<double(const ControlVector&)> pointwise_objective(
    const SystemModel& sys, const StateVector& x) {
  const Eigen::VectorXd f = sys.drift(x);
  const Eigen::MatrixXd g = sys.input_map(x);
  const Eigen::MatrixXd r = sys.control_weight(x);
  const Eigen::MatrixXd p = sys.weight().matrix();
  if (sys.regime() == TimeRegime::kDiscrete) {
    const double gamma = sys.gamma();
    return [f, g, r, p, gamma](const ControlVector& u) {
      const Eigen::VectorXd next = f + g * u;
      return u.dot(r * u) + gamma * next.dot(p * next);
    };
  }
  const Eigen::VectorXd grad = sys.value_function().gradient(x);
  return [f, g, r, grad](const ControlVector& u) {
    return u.dot(r * u) + grad.dot(f + g * u);
  };
}

}  // namespace detail

// Gradient of the pointwise objective at the analytic law; zero at the true
// minimizer (infinity norm reported). This is the oracle used when the input
// dimension is too large for the grid search.
inline double first_order_condition_residual(const SystemModel& sys,
                                             const StateVector& x) {
  const Eigen::MatrixXd g = sys.input_map(x);
  const Eigen::MatrixXd r = sys.control_weight(x);
  if (sys.regime() == TimeRegime::kDiscrete) {
    const ControlVector u = discrete::optimal_control(sys, x);
    const StateVector x_next = sys.drift(x) + g * u;
    const Eigen::VectorXd grad_next = sys.value_function().gradient(x_next);
    return (2.0 * r * u + sys.gamma() * g.transpose() * grad_next)
        .cwiseAbs()
        .maxCoeff();
  }
  const ControlVector u = continuous::optimal_control(sys, x);
  const Eigen::VectorXd grad = sys.value_function().gradient(x);
  return (2.0 * r * u + g.transpose() * grad).cwiseAbs().maxCoeff();
}

// Grid search over [-u_max, u_max] per input axis (u_max = 10 (1 + ||x||),
// 2001 points per axis) followed by golden-section refinement to 1e-9.
// The box is widened and the search retried if the minimizer lands on the
// boundary; supports m <= 2.
inline ControlVector brute_force_control(const SystemModel& sys,
                                         const StateVector& x) {
  const int m = sys.input_dim();
  if (m > 2) {
    throw DimensionError(
        "grid oracle supports m <= 2; use first_order_condition_residual for "
        "wider inputs");
  }
  const auto objective = detail::pointwise_objective(sys, x);
  constexpr int kGridPoints = 2001;
  constexpr double kGoldenTol = 1e-9;

  double u_max = 10.0 * (1.0 + x.norm());
  for (int attempt = 0; attempt < 4; ++attempt, u_max *= 4.0) {
    const double spacing = 2.0 * u_max / (kGridPoints - 1);
    auto grid_point = [&](int i) { return -u_max + spacing * i; };

    if (m == 1) {
      int best = 0;
      double best_val = std::numeric_limits<double>::infinity();
      ControlVector u(1);
      for (int i = 0; i < kGridPoints; ++i) {
        u[0] = grid_point(i);
        const double val = objective(u);
        if (val < best_val) {
          best_val = val;
          best = i;
        }
      }
      if (best == 0 || best == kGridPoints - 1) {
        continue;  // boundary hit; widen and retry
      }
      const double center = grid_point(best);
      ControlVector result(1);
      result[0] = detail::golden_minimize(
          [&](double v) {
            ControlVector uu(1);
            uu[0] = v;
            return objective(uu);
          },
          center - spacing, center + spacing, kGoldenTol);
      if (std::abs(result[0]) >= u_max - spacing) {
        continue;
      }
      return result;
    }

    // m == 2: product grid, then cyclic per-axis golden refinement.
    int best_i = 0;
    int best_j = 0;
    double best_val = std::numeric_limits<double>::infinity();
    ControlVector u(2);
    for (int i = 0; i < kGridPoints; ++i) {
      u[0] = grid_point(i);
      for (int j = 0; j < kGridPoints; ++j) {
        u[1] = grid_point(j);
        const double val = objective(u);
        if (val < best_val) {
          best_val = val;
          best_i = i;
          best_j = j;
        }
      }
    }
    if (best_i == 0 || best_i == kGridPoints - 1 || best_j == 0 ||
        best_j == kGridPoints - 1) {
      continue;
    }
    ControlVector result(2);
    result[0] = grid_point(best_i);
    result[1] = grid_point(best_j);
    for (int sweep = 0; sweep < 200; ++sweep) {
      double moved = 0.0;
      for (int axis = 0; axis < 2; ++axis) {
        const double old = result[axis];
        result[axis] = detail::golden_minimize(
            [&](double v) {
              ControlVector uu = result;
              uu[axis] = v;
              return objective(uu);
            },
            old - spacing, old + spacing, kGoldenTol);
        moved = std::max(moved, std::abs(result[axis] - old));
      }
      if (moved < 1e-10) {
        break;
      }
    }
    if (result.cwiseAbs().maxCoeff() >= u_max - spacing) {
      continue;
    }
    return result;
  }
  throw Error(
      "brute-force minimizer stayed on the search box boundary after "
      "widening retries");
}

// l_hat = max over sampled x != 0 of ||f(x)||_P^2 / ||x||_P^2, the sampled
// lower bound on the squared-norm growth constant L. Deterministic given the
// spec's seed.
inline LipschitzEstimate estimate_lipschitz(const SystemModel& sys,
                                            const SamplingSpec& spec) {
  spec.validate();
  if (spec.dim() != sys.state_dim()) {
    throw DimensionError("sampling box dimension does not match the system");
  }
  const CounterRng rng(spec.seed);
  const WeightMatrix& p = sys.weight();

  LipschitzEstimate est;
  est.samples = spec.count;
  est.box = spec.box;
  est.worst_state = Eigen::VectorXd::Zero(sys.state_dim());
  for (long i = 0; i < spec.count; ++i) {
    const Eigen::VectorXd x =
        rng.sample_box(spec.box, static_cast<std::uint64_t>(i));
    const double xn2 = p_inner(x, x, p);
    if (xn2 < 1e-24) {
      continue;
    }
    const Eigen::VectorXd f = sys.drift(x);
    const double ratio = p_inner(f, f, p) / xn2;
    if (ratio > est.l_hat) {
      est.l_hat = ratio;
      est.worst_state = x;
    }
  }
  return est;
}

// Minimum of the synthesized Q over the sampled box. Pass criterion is the
// scaled floor Q(x) >= -1e-12 (1 + ||x||_P^2) at every sample.
inline VerificationReport check_q_nonnegativity(const SystemModel& sys,
                                                const SamplingSpec& spec) {
  spec.validate();
  if (spec.dim() != sys.state_dim()) {
    throw DimensionError("sampling box dimension does not match the system");
  }
  const CounterRng rng(spec.seed);
  const SynthesizedQ q(sys);
  const WeightMatrix& p = sys.weight();

  VerificationReport report;
  report.system = sys.name();
  report.check = "q-nonnegativity";
  report.samples = spec.count;
  report.tolerance = 1e-12;
  report.worst_state = Eigen::VectorXd::Zero(sys.state_dim());

  double min_q = std::numeric_limits<double>::infinity();
  double min_margin = std::numeric_limits<double>::infinity();
  for (long i = 0; i < spec.count; ++i) {
    const Eigen::VectorXd x =
        rng.sample_box(spec.box, static_cast<std::uint64_t>(i));
    const double qx = q(x);
    const double margin = qx + 1e-12 * (1.0 + p_inner(x, x, p));
    if (qx < min_q) {
      min_q = qx;
      report.worst_state = x;
    }
    min_margin = std::min(min_margin, margin);
  }
  report.worst_value = min_q;
  report.pass = min_margin >= 0.0;
  report.extras["scale"] = "tolerance applies as -1e-12 * (1 + |x|_P^2)";
  return report;
}

// Analytic law vs. the grid/golden minimizer (or the first-order residual
// when m > 2) at sampled states.
inline VerificationReport check_oracle_agreement(const SystemModel& sys,
                                                 const SamplingSpec& spec) {
  spec.validate();
  if (spec.dim() != sys.state_dim()) {
    throw DimensionError("sampling box dimension does not match the system");
  }
  const CounterRng rng(spec.seed);
  const bool grid_feasible = sys.input_dim() <= 2;

  VerificationReport report;
  report.system = sys.name();
  report.check = "oracle-agreement";
  report.samples = spec.count;
  report.tolerance = grid_feasible ? 1e-6 : 1e-9;
  report.worst_state = Eigen::VectorXd::Zero(sys.state_dim());
  report.extras["method"] =
      grid_feasible ? "grid+golden-section" : "first-order-condition";

  double worst = 0.0;
  for (long i = 0; i < spec.count; ++i) {
    const Eigen::VectorXd x =
        rng.sample_box(spec.box, static_cast<std::uint64_t>(i));
    double deviation = 0.0;
    if (grid_feasible) {
      const ControlVector analytic = ioc::optimal_control(sys, x);
      const ControlVector oracle = brute_force_control(sys, x);
      deviation = (analytic - oracle).cwiseAbs().maxCoeff();
    } else {
      deviation = first_order_condition_residual(sys, x) /
                  (1.0 + sys.value_function()(x));
    }
    if (deviation > worst) {
      worst = deviation;
      report.worst_state = x;
    }
  }
  report.worst_value = worst;
  report.pass = worst <= report.tolerance;
  return report;
}

// Bellman (discrete) or HJB (continuous) residual, normalized by 1 + V*(x).
inline VerificationReport check_residual(const SystemModel& sys,
                                         const SamplingSpec& spec) {
  spec.validate();
  if (spec.dim() != sys.state_dim()) {
    throw DimensionError("sampling box dimension does not match the system");
  }
  const CounterRng rng(spec.seed);
  const bool is_discrete = sys.regime() == TimeRegime::kDiscrete;

  VerificationReport report;
  report.system = sys.name();
  report.check = is_discrete ? "bellman-residual" : "hjb-residual";
  report.samples = spec.count;
  report.tolerance = 1e-9;
  report.worst_state = Eigen::VectorXd::Zero(sys.state_dim());

  double worst = 0.0;
  for (long i = 0; i < spec.count; ++i) {
    const Eigen::VectorXd x =
        rng.sample_box(spec.box, static_cast<std::uint64_t>(i));
    const double res = is_discrete ? discrete::bellman_residual(sys, x)
                                   : continuous::hjb_residual(sys, x);
    const double scaled = std::abs(res) / (1.0 + sys.value_function()(x));
    if (scaled > worst) {
      worst = scaled;
      report.worst_state = x;
    }
  }
  report.worst_value = worst;
  report.pass = worst <= report.tolerance;
  return report;
}

// Smallest singular value of g(x) over sampled x != 0; evidence for the
// maximum-rank assumption. Reported, never repaired.
inline VerificationReport check_g_rank(const SystemModel& sys,
                                       const SamplingSpec& spec) {
  spec.validate();
  if (spec.dim() != sys.state_dim()) {
    throw DimensionError("sampling box dimension does not match the system");
  }
  const CounterRng rng(spec.seed);

  VerificationReport report;
  report.system = sys.name();
  report.check = "g-max-rank";
  report.samples = spec.count;
  report.tolerance = 1e-10;
  report.worst_state = Eigen::VectorXd::Zero(sys.state_dim());

  double worst = std::numeric_limits<double>::infinity();
  for (long i = 0; i < spec.count; ++i) {
    const Eigen::VectorXd x =
        rng.sample_box(spec.box, static_cast<std::uint64_t>(i));
    if (x.norm() == 0.0) {
      continue;
    }
    const double sigma = sys.min_g_singular_value(x);
    if (sigma < worst) {
      worst = sigma;
      report.worst_state = x;
    }
  }
  report.worst_value = worst;
  report.pass = worst > report.tolerance;
  return report;
}

// Samples the set S_gperp = { x : <g(x), x>_P = 0 } by drawing points on
// spheres of log-spaced radii and root-finding <g(x), x>_P = 0 along great
// circles; reports min/max of <f(x), x>_P over the members found. Passes iff
// the maximum drift inner product is <= tol for the gamma = 0 stability route.
inline VerificationReport gperp_drift_check(const SystemModel& sys,
                                            const SamplingSpec& spec,
                                            double tol = 1e-10) {
  sys.require_continuous("gperp_drift_check");
  sys.require_single_input("gperp_drift_check");
  if (sys.gamma() != 0.0) {
    throw RegimeError("gperp_drift_check applies to gamma = 0 problems");
  }
  spec.validate();
  const int n = sys.state_dim();
  if (spec.dim() != n) {
    throw DimensionError("sampling box dimension does not match the system");
  }
  const CounterRng rng(spec.seed);
  const WeightMatrix& p = sys.weight();
  auto phi = [&](const StateVector& x) {
    return p_inner(sys.input_map(x).col(0), x, p);
  };

  double rho_max = 0.0;
  for (const Interval& iv : spec.box) {
    rho_max = std::max(rho_max, std::max(std::abs(iv.lo), std::abs(iv.hi)));
  }
  constexpr int kRadii = 12;
  constexpr int kScanSteps = 64;

  VerificationReport report;
  report.system = sys.name();
  report.check = "gperp-drift";
  report.tolerance = tol;
  report.worst_state = Eigen::VectorXd::Zero(n);

  long members = 0;
  double min_drift = std::numeric_limits<double>::infinity();
  double max_drift = -std::numeric_limits<double>::infinity();
  for (long i = 0; i < spec.count; ++i) {
    const double rho =
        rho_max * std::pow(10.0, -3.0 * static_cast<double>(i % kRadii) /
                                     (kRadii - 1));
    StateVector member(n);
    bool found = false;

    if (n == 1) {
      for (double s : {rho, -rho}) {
        StateVector x(1);
        x[0] = s;
        if (std::abs(phi(x)) <= tol) {
          member = x;
          found = true;
          break;
        }
      }
    } else {
      const Eigen::VectorXd v =
          rng.unit_direction(n, static_cast<std::uint64_t>(2 * i));
      Eigen::VectorXd w =
          rng.unit_direction(n, static_cast<std::uint64_t>(2 * i + 1));
      w -= w.dot(v) * v;
      if (w.norm() < 1e-8) {
        continue;
      }
      w.normalize();
      auto point = [&](double theta) -> StateVector {
        return rho * (std::cos(theta) * v + std::sin(theta) * w);
      };
      const double dtheta = 2.0 * std::numbers::pi / kScanSteps;
      double prev_phi = phi(point(0.0));
      for (int s = 1; s <= kScanSteps && !found; ++s) {
        const double theta = s * dtheta;
        const double cur_phi = phi(point(theta));
        if (std::abs(cur_phi) <= tol) {
          member = point(theta);
          found = true;
          break;
        }
        if (prev_phi * cur_phi < 0.0) {
          double lo = theta - dtheta;
          double hi = theta;
          double phi_lo = prev_phi;
          for (int iter = 0; iter < 200; ++iter) {
            const double mid = 0.5 * (lo + hi);
            const double phi_mid = phi(point(mid));
            if (std::abs(phi_mid) <= tol) {
              member = point(mid);
              found = true;
              break;
            }
            if (phi_lo * phi_mid < 0.0) {
              hi = mid;
            } else {
              lo = mid;
              phi_lo = phi_mid;
            }
          }
        }
        prev_phi = cur_phi;
      }
    }

    if (!found) {
      continue;
    }
    ++members;
    const double drift = p_inner(sys.drift(member), member, p);
    min_drift = std::min(min_drift, drift);
    if (drift > max_drift) {
      max_drift = drift;
      report.worst_state = member;
    }
  }

  report.samples = members;
  if (members == 0) {
    // S_gperp has no reachable nonzero members; the hypothesis only needs to
    // hold at the origin, where <f(0), 0>_P = 0.
    report.worst_value = 0.0;
    report.pass = true;
    report.extras["note"] =
        "no nonzero members of S_gperp found; set appears trivial";
    return report;
  }
  report.worst_value = max_drift;
  report.pass = max_drift <= tol;
  report.extras["min_drift"] = min_drift;
  report.extras["max_drift"] = max_drift;
  return report;
}

// Sweep of z(x) = d||x||_P^2/dt along the closed loop; the gamma = 0 decrease
// argument requires z < 0 away from the origin. The extras record how often
// the literal printed R-selection inequality b(x) = <f,x>_P/|<g,x>_P|^2 - R(x) > 0
// holds next to how often z < 0 holds, since their sign conventions disagree
// for stable drifts.
inline VerificationReport check_norm_decrease(const SystemModel& sys,
                                              const SamplingSpec& spec) {
  sys.require_continuous("check_norm_decrease");
  sys.require_single_input("check_norm_decrease");
  spec.validate();
  if (spec.dim() != sys.state_dim()) {
    throw DimensionError("sampling box dimension does not match the system");
  }
  const CounterRng rng(spec.seed);
  const WeightMatrix& p = sys.weight();

  VerificationReport report;
  report.system = sys.name();
  report.check = "norm-decrease";
  report.tolerance = 0.0;
  report.worst_state = Eigen::VectorXd::Zero(sys.state_dim());

  long used = 0;
  long literal_holds = 0;
  long literal_defined = 0;
  long z_negative = 0;
  double worst = -std::numeric_limits<double>::infinity();
  for (long i = 0; i < spec.count; ++i) {
    const Eigen::VectorXd x =
        rng.sample_box(spec.box, static_cast<std::uint64_t>(i));
    if (p_inner(x, x, p) < 1e-12) {
      continue;
    }
    ++used;
    const double z = continuous::norm_rate(sys, x).z;
    if (z < 0.0) {
      ++z_negative;
    }
    if (z > worst) {
      worst = z;
      report.worst_state = x;
    }
    if (const auto bound = continuous::r_upper_bound(sys, x)) {
      ++literal_defined;
      if (*bound - sys.control_weight(x)(0, 0) > 0.0) {
        ++literal_holds;
      }
    }
  }
  report.samples = used;
  report.worst_value = used > 0 ? worst : 0.0;
  report.pass = used > 0 && worst < 0.0;
  report.extras["z_negative_fraction"] =
      used > 0 ? static_cast<double>(z_negative) / used : 0.0;
  report.extras["r_rule_literal_fraction"] =
      literal_defined > 0 ? static_cast<double>(literal_holds) / literal_defined
                          : 0.0;
  report.extras["r_rule_samples"] = literal_defined;
  return report;
}

namespace detail {

inline void fill_rollout_extras(VerificationReport& report, double rollout,
                                double value, double gap, double tail,
                                const char* verdict) {
  report.extras["rollout"] = rollout;
  report.extras["value"] = value;
  report.extras["gap"] = gap;
  report.extras["tail_bound"] = tail;
  report.extras["verdict"] = verdict;
}

}  // namespace detail

// Truncated discounted cost along the optimal closed loop vs. V*(x0).
// Discrete-time overload; the tail of the truncation is bounded with the
// measured per-step contraction ratio of the stage costs.
inline VerificationReport rollout_vs_value(const SystemModel& sys,
                                           const StateVector& x0, long steps) {
  sys.require_discrete("rollout_vs_value");
  const Trajectory traj = discrete::simulate(sys, x0, steps);
  const double value = sys.value_function()(x0);
  const double rollout = traj.back().discounted_running_cost;
  const double gap = std::abs(value - rollout);

  VerificationReport report;
  report.system = sys.name();
  report.check = "rollout-vs-value";
  report.samples = static_cast<long>(traj.size());
  report.tolerance = 1e-4;
  report.worst_state = x0;
  report.worst_value = gap;

  const bool converged =
      traj.back().value <= 1e-3 * std::max(1.0, traj.front().value);
  if (!converged) {
    report.pass = false;
    detail::fill_rollout_extras(report, rollout, value, gap, 0.0,
                                "inconclusive");
    report.extras["note"] = "trajectory did not converge within the horizon";
    return report;
  }

  // Contraction ratio of stage costs over the last recorded steps.
  double ratio = 0.0;
  const std::size_t count = traj.size();
  const std::size_t window = std::min<std::size_t>(10, count - 1);
  for (std::size_t k = count - window; k < count; ++k) {
    const double prev = traj.samples[k - 1].stage_cost;
    const double cur = traj.samples[k].stage_cost;
    if (prev > 1e-300) {
      ratio = std::max(ratio, cur / prev);
    }
  }
  const double gamma = sys.gamma();
  double tail = 0.0;
  if (gamma * ratio < 1.0) {
    const double last_stage = traj.back().stage_cost;
    tail = std::pow(gamma, static_cast<double>(steps) + 1.0) * last_stage *
           ratio / (1.0 - gamma * ratio);
  } else {
    report.pass = false;
    detail::fill_rollout_extras(report, rollout, value, gap, 0.0,
                                "inconclusive");
    report.extras["note"] = "stage costs show no contraction";
    return report;
  }

  report.pass = gap <= 1e-4 * std::max(1.0, value) + tail;
  detail::fill_rollout_extras(report, rollout, value, gap, tail,
                              report.pass ? "pass" : "fail");
  return report;
}

// Continuous-time overload: integrates for `duration` at step `dt`; the tail
// is bounded with the measured exponential decay rate of the stage cost.
inline VerificationReport rollout_vs_value(const SystemModel& sys,
                                           const StateVector& x0,
                                           double duration, double dt) {
  sys.require_continuous("rollout_vs_value");
  if (!(duration > 0.0) || !(dt > 0.0)) {
    throw ConfigError("rollout duration and dt must be positive");
  }
  const long steps = std::lround(duration / dt);
  const Trajectory traj = continuous::integrate_closed_loop(sys, x0, dt, steps);
  const double value = sys.value_function()(x0);
  const double rollout = traj.back().discounted_running_cost;
  const double gap = std::abs(value - rollout);

  VerificationReport report;
  report.system = sys.name();
  report.check = "rollout-vs-value";
  report.samples = static_cast<long>(traj.size());
  report.tolerance = 1e-4;
  report.worst_state = x0;
  report.worst_value = gap;

  const bool converged =
      traj.back().value <= 1e-3 * std::max(1.0, traj.front().value);
  if (!converged) {
    report.pass = false;
    detail::fill_rollout_extras(report, rollout, value, gap, 0.0,
                                "inconclusive");
    report.extras["note"] = "trajectory did not converge within the horizon";
    return report;
  }

  const double t_end = traj.back().t;
  const std::size_t probe =
      traj.size() - 1 - std::min<std::size_t>(traj.size() / 5, traj.size() - 1);
  const double j_probe = traj.samples[probe].stage_cost;
  const double j_end = traj.back().stage_cost;
  const double span = t_end - traj.samples[probe].t;
  double tail = 0.0;
  const double gamma = sys.gamma();
  if (j_end > 1e-300 && j_probe > j_end && span > 0.0) {
    const double decay = std::log(j_probe / j_end) / span;
    if (decay + gamma > 0.0) {
      tail = std::exp(-gamma * t_end) * j_end / (decay + gamma);
    }
  }

  report.pass = gap <= 1e-4 * std::max(1.0, value) + tail;
  detail::fill_rollout_extras(report, rollout, value, gap, tail,
                              report.pass ? "pass" : "fail");
  return report;
}

// Exponential reward mapping r = e^{-cost} in (0, 1] for non-negative costs;
// strictly decreasing, so argmax of reward = argmin of cost on any candidate
// set.
inline double rl_reward(double cost) {
  if (!(cost >= 0.0)) {
    throw Error("rl_reward requires a non-negative cost, got " +
                std::to_string(cost));
  }
  return std::exp(-cost);
}

// Informational report with the Lipschitz evidence and the regime's discount
// bound (gamma <= 1/l_hat for discrete time, gamma >= 2 l_hat for continuous
// time). The sampled l_hat is a lower bound on L, so the discrete bound is
// necessary-only evidence.
inline VerificationReport discount_bound_report(const SystemModel& sys,
                                                const SamplingSpec& spec) {
  const LipschitzEstimate est = estimate_lipschitz(sys, spec);
  VerificationReport report;
  report.system = sys.name();
  report.check = "lipschitz-discount-bound";
  report.samples = est.samples;
  report.worst_value = est.l_hat;
  report.worst_state = est.worst_state;
  report.tolerance = 0.0;
  report.pass = true;  // informational; gamma admissibility is in the extras
  const bool is_discrete = sys.regime() == TimeRegime::kDiscrete;
  const double bound = is_discrete ? discrete::max_discount(est)
                                   : continuous::min_discount(est);
  report.extras["l_hat"] = est.l_hat;
  report.extras["gamma"] = sys.gamma();
  report.extras["discount_bound"] = bound;
  report.extras["bound_kind"] =
      is_discrete ? "gamma <= 1/l_hat (sampled, necessary-only evidence)"
                  : "gamma >= 2*l_hat (sampled, necessary-only evidence)";
  report.extras["gamma_within_bound"] =
      is_discrete ? sys.gamma() <= bound : sys.gamma() >= bound;
  return report;
}

struct SuiteOptions {
  long samples = 1000;
  std::uint64_t seed = 0;
  std::optional<std::vector<Interval>> box_override;
  long oracle_samples = 100;
  long lipschitz_samples = 100000;
  long rollout_steps = 400;      // discrete rollout horizon
  double rollout_duration = 10;  // continuous rollout horizon
  double rollout_dt = 1e-3;
};

// The full verification suite run by the CLI `verify` command.
inline std::vector<VerificationReport> run_full_suite(
    const SystemModel& sys, const SuiteOptions& options = {}) {
  const int n = sys.state_dim();
  const CounterRng root(options.seed);
  auto cube = [&](double lo, double hi, long count,
                  std::uint64_t stream) {
    SamplingSpec spec = SamplingSpec::cube(n, lo, hi, count,
                                           root.fork(stream).seed());
    if (options.box_override) {
      if (static_cast<int>(options.box_override->size()) != n) {
        throw DimensionError("box override dimension does not match the system");
      }
      spec.box = *options.box_override;
      spec.validate();
    }
    return spec;
  };
  const bool is_discrete = sys.regime() == TimeRegime::kDiscrete;

  std::vector<VerificationReport> reports;
  reports.push_back(check_g_rank(sys, cube(-5, 5, options.samples, 1)));
  reports.push_back(
      check_oracle_agreement(sys, cube(-5, 5, options.oracle_samples, 2)));
  reports.push_back(check_residual(
      sys, cube(is_discrete ? -5 : -3, is_discrete ? 5 : 3, options.samples, 3)));
  reports.push_back(
      check_q_nonnegativity(sys, cube(-10, 10, options.samples, 4)));
  if (!is_discrete && sys.input_dim() == 1 && sys.gamma() == 0.0) {
    reports.push_back(
        gperp_drift_check(sys, cube(-5, 5, options.samples, 5)));
    reports.push_back(check_norm_decrease(sys, cube(-5, 5, options.samples, 6)));
  }
  const StateVector x0 = Eigen::VectorXd::Ones(n);
  if (is_discrete) {
    reports.push_back(rollout_vs_value(sys, x0, options.rollout_steps));
  } else {
    reports.push_back(rollout_vs_value(sys, x0, options.rollout_duration,
                                       options.rollout_dt));
  }
  reports.push_back(discount_bound_report(
      sys, cube(-10, 10, options.lipschitz_samples, 7)));
  return reports;
}

}  // namespace ioc
