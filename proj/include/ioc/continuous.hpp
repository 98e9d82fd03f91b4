#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "ioc/errors.hpp"
#include "ioc/geometry.hpp"
#include "ioc/sampling.hpp"
#include "ioc/system.hpp"
#include "ioc/trajectory.hpp"

namespace ioc::continuous {

// HJB law for a quadratic value function: u = -R(x)^{-1} g^T(x) P x.
inline ControlVector optimal_control(const SystemModel& sys,
                                     const StateVector& x) {
  sys.require_continuous("optimal_control");
  const Eigen::MatrixXd r = sys.control_weight(x);
  Eigen::LLT<Eigen::MatrixXd> llt(r);
  if (llt.info() != Eigen::Success) {
    throw ModelAssumptionError("R(x) is not invertible");
  }
  return -llt.solve(sys.input_map(x).transpose() *
                    (sys.weight().matrix() * x));
}

// Single-input rewrite u = -R^{-1} <g(x), x>_P.
inline double control_single_input_form(const SystemModel& sys,
                                        const StateVector& x) {
  sys.require_continuous("control_single_input_form");
  sys.require_single_input("control_single_input_form");
  const double r = sys.control_weight(x)(0, 0);
  return -p_inner(sys.input_map(x).col(0), x, sys.weight()) / r;
}

// State weighting synthesized so that V*(x) = x^T P x solves the HJB
// equation:
//   Q(x) = gamma x^T P x - 2 x^T P f(x) + x^T P g R^{-1} g^T P x.
inline double synthesize_q(const SystemModel& sys, const StateVector& x) {
  sys.require_continuous("synthesize_q");
  const Eigen::MatrixXd p = sys.weight().matrix();
  const Eigen::VectorXd px = p * x;
  const Eigen::MatrixXd g = sys.input_map(x);
  Eigen::LLT<Eigen::MatrixXd> llt(sys.control_weight(x));
  if (llt.info() != Eigen::Success) {
    throw ModelAssumptionError("R(x) is not invertible");
  }
  const Eigen::VectorXd gpx = g.transpose() * px;
  return sys.gamma() * x.dot(px) - 2.0 * px.dot(sys.drift(x)) +
         gpx.dot(llt.solve(gpx));
}

// HJB residual gamma V*(x) - [Q(x) + u^T R u + grad V*(x)^T (f + g u)] with
// the synthesized Q and the analytic u; identically zero up to roundoff.
inline double hjb_residual(const SystemModel& sys, const StateVector& x) {
  sys.require_continuous("hjb_residual");
  const ControlVector u = optimal_control(sys, x);
  const QuadraticValueFunction& v = sys.value_function();
  const StateVector xdot = sys.drift(x) + sys.input_map(x) * u;
  return sys.gamma() * v(x) - (synthesize_q(sys, x) +
                               u.dot(sys.control_weight(x) * u) +
                               v.gradient(x).dot(xdot));
}

// Closed-loop vector field dx/dt = f(x) - g(x) R^{-1}(x) g^T(x) P x.
inline StateVector closed_loop_field(const SystemModel& sys,
                                     const StateVector& x) {
  sys.require_continuous("closed_loop_field");
  return sys.drift(x) + sys.input_map(x) * optimal_control(sys, x);
}

// Membership in S_gperp = { x : <g(x), x>_P = 0 }, the set where the control
// direction is P-orthogonal to the state.
inline bool gperp_membership(const SystemModel& sys, const StateVector& x,
                             double tol = 1e-10) {
  sys.require_continuous("gperp_membership");
  sys.require_single_input("gperp_membership");
  return std::abs(p_inner(sys.input_map(x).col(0), x, sys.weight())) <= tol;
}

// Literal ratio of the R-selection rule, <f(x), x>_P / |<g(x), x>_P|^2.
// Empty when x lies in S_gperp (the ratio is undefined there). The sign
// semantics of the published inequality are reported by the verification
// suite next to the direct z(x) < 0 test; this function only evaluates the
// ratio.
inline std::optional<double> r_upper_bound(const SystemModel& sys,
                                           const StateVector& x,
                                           double membership_tol = 1e-10) {
  sys.require_continuous("r_upper_bound");
  sys.require_single_input("r_upper_bound");
  const Eigen::VectorXd g = sys.input_map(x).col(0);
  const double gx = p_inner(g, x, sys.weight());
  if (std::abs(gx) <= membership_tol) {
    return std::nullopt;
  }
  return p_inner(sys.drift(x), x, sys.weight()) / (gx * gx);
}

struct NormRateSample {
  StateVector x;
  double z = 0.0;  // d ||x||_P^2 / dt along the closed loop
};

// z = 2 <x, xdot>_P; for m = 1 this equals
// 2 [ <f(x), x>_P - R^{-1} |<g(x), x>_P|^2 ].
inline NormRateSample norm_rate(const SystemModel& sys, const StateVector& x) {
  sys.require_continuous("norm_rate");
  NormRateSample out;
  out.x = x;
  out.z = 2.0 * p_inner(x, closed_loop_field(sys, x), sys.weight());
  return out;
}

// Classical fixed-step 4th-order integration of the closed loop. Stage cost
// J = Q(x) + u^T R u is recorded per sample; the discounted running cost is
// the trapezoidal accumulation of e^{-gamma (t - t0)} J(t).
inline Trajectory integrate_closed_loop(const SystemModel& sys,
                                        const StateVector& x0, double dt,
                                        long steps) {
  sys.require_continuous("integrate_closed_loop");
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw ConfigError("integration step dt must be positive");
  }
  if (steps < 0) {
    throw ConfigError("step count must be >= 0");
  }

  Trajectory traj;
  traj.regime = TimeRegime::kContinuous;
  traj.step = dt;
  traj.samples.reserve(static_cast<std::size_t>(steps) + 1);

  const QuadraticValueFunction& v = sys.value_function();
  auto field = [&sys](const StateVector& x) {
    return closed_loop_field(sys, x);
  };

  StateVector x = x0;
  double running = 0.0;
  double prev_weighted_stage = 0.0;
  for (long k = 0; k <= steps; ++k) {
    if (!x.allFinite()) {
      throw DivergenceError("state diverged at step " + std::to_string(k));
    }
    const double t = static_cast<double>(k) * dt;
    const ControlVector u = optimal_control(sys, x);
    const double stage =
        synthesize_q(sys, x) + u.dot(sys.control_weight(x) * u);
    const double weighted_stage = std::exp(-sys.gamma() * t) * stage;
    if (k > 0) {
      running += 0.5 * dt * (prev_weighted_stage + weighted_stage);
    }
    prev_weighted_stage = weighted_stage;

    TrajectorySample s;
    s.t = t;
    s.x = x;
    s.u = u;
    s.stage_cost = stage;
    s.value = v(x);
    s.discounted_running_cost = running;
    traj.samples.push_back(std::move(s));

    if (k < steps) {
      const StateVector k1 = field(x);
      const StateVector k2 = field(x + 0.5 * dt * k1);
      const StateVector k3 = field(x + 0.5 * dt * k2);
      const StateVector k4 = field(x + dt * k3);
      x = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
  }
  return traj;
}

// Smallest discount factor for which the sampled growth bound certifies
// Q >= 0 in continuous time: gamma >= 2 l_hat.
inline double min_discount(const LipschitzEstimate& estimate) {
  if (estimate.l_hat < 0.0) {
    throw ConfigError("Lipschitz estimate must be non-negative");
  }
  return 2.0 * estimate.l_hat;
}

}  // namespace ioc::continuous
