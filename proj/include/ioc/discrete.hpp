#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>

#include "ioc/errors.hpp"
#include "ioc/geometry.hpp"
#include "ioc/sampling.hpp"
#include "ioc/system.hpp"
#include "ioc/trajectory.hpp"

namespace ioc::discrete {

namespace detail {

// Shared per-state terms of the one-step law: f(x), g(x) and the factorized
// gain M(x) = R(x) + gamma g^T P g.
struct LawTerms {
  Eigen::VectorXd f;
  Eigen::MatrixXd g;
  Eigen::LLT<Eigen::MatrixXd> m_llt;
};

inline LawTerms law_terms(const SystemModel& sys, const StateVector& x) {
  LawTerms t;
  t.f = sys.drift(x);
  t.g = sys.input_map(x);
  t.m_llt.compute(sys.control_weight(x) +
                  sys.gamma() * t.g.transpose() * sys.weight().matrix() * t.g);
  if (t.m_llt.info() != Eigen::Success) {
    throw ModelAssumptionError(
        "gain matrix M(x) lost positive definiteness; R(x) or P is invalid");
  }
  return t;
}

}  // namespace detail

// M(x) = R(x) + gamma g^T(x) P g(x); symmetric positive definite whenever
// R(x) > 0 and P > 0.
inline Eigen::MatrixXd gain_m(const SystemModel& sys, const StateVector& x) {
  sys.require_discrete("gain_m");
  const Eigen::MatrixXd g = sys.input_map(x);
  return sys.control_weight(x) +
         sys.gamma() * g.transpose() * sys.weight().matrix() * g;
}

// Analytic one-step law u = -gamma M(x)^{-1} g^T(x) P f(x).
inline ControlVector optimal_control(const SystemModel& sys,
                                     const StateVector& x) {
  sys.require_discrete("optimal_control");
  const detail::LawTerms t = detail::law_terms(sys, x);
  return -sys.gamma() *
         t.m_llt.solve(t.g.transpose() * (sys.weight().matrix() * t.f));
}

// Single-input law written with the P-inner product:
//   u = -[1 + R/(gamma ||g||_P^2)]^{-1} <f, g/||g||_P^2>_P,
// algebraically the same point as optimal_control but a distinct
// floating-point route, useful as a cross-check.
inline double control_single_input_form(const SystemModel& sys,
                                        const StateVector& x) {
  sys.require_discrete("control_single_input_form");
  sys.require_single_input("control_single_input_form");
  const Eigen::VectorXd g = sys.input_map(x).col(0);
  const Eigen::VectorXd f = sys.drift(x);
  const double r = sys.control_weight(x)(0, 0);
  const double g_norm_sq = p_inner(g, g, sys.weight());
  if (g_norm_sq <= 0.0) {
    return 0.0;  // control direction vanished; f(x) is P-orthogonal to it too
  }
  const double gamma = sys.gamma();
  const double shrink = 1.0 / (1.0 + r / (gamma * g_norm_sq));
  return -shrink * p_inner(f, g / g_norm_sq, sys.weight());
}

// State weighting synthesized so that V*(x) = x^T P x solves the Bellman
// equation:
//   Q(x) = x^T P x - gamma f^T P f + gamma^2 f^T P g M^{-1} g^T P f.
inline double synthesize_q(const SystemModel& sys, const StateVector& x) {
  sys.require_discrete("synthesize_q");
  const Eigen::MatrixXd& p = sys.weight().matrix();
  const detail::LawTerms t = detail::law_terms(sys, x);
  const Eigen::VectorXd gpf = t.g.transpose() * (p * t.f);
  const double gamma = sys.gamma();
  return x.dot(p * x) - gamma * t.f.dot(p * t.f) +
         gamma * gamma * gpf.dot(t.m_llt.solve(gpf));
}

// Single-input rewrite Q(x) = ||x||_P^2 - gamma Q2(x) with
//   Q2(x) = ||f||_P^2 - [1 + R/(gamma ||g||_P^2)]^{-1} |<f, g/||g||_P>_P|^2.
// Must agree with synthesize_q to roundoff.
inline double q_single_input_form(const SystemModel& sys,
                                  const StateVector& x) {
  sys.require_discrete("q_single_input_form");
  sys.require_single_input("q_single_input_form");
  const Eigen::VectorXd g = sys.input_map(x).col(0);
  const Eigen::VectorXd f = sys.drift(x);
  const double r = sys.control_weight(x)(0, 0);
  const WeightMatrix& p = sys.weight();
  const double gamma = sys.gamma();
  const double x_norm_sq = p_inner(x, x, p);
  const double f_norm_sq = p_inner(f, f, p);
  const double g_norm = p_norm(g, p);
  if (g_norm <= 0.0) {
    return x_norm_sq - gamma * f_norm_sq;
  }
  const double shrink = 1.0 / (1.0 + r / (gamma * g_norm * g_norm));
  const double proj = p_inner(f, g / g_norm, p);
  const double q2 = f_norm_sq - shrink * proj * proj;
  return x_norm_sq - gamma * q2;
}

// Closed loop x+ = f(x) + g(x) u with the analytic law.
inline StateVector step_closed_loop(const SystemModel& sys,
                                    const StateVector& x) {
  sys.require_discrete("step_closed_loop");
  return sys.drift(x) + sys.input_map(x) * optimal_control(sys, x);
}

// One-step value drop V*(x) - gamma V*(x+); approximates Q(x) when
// R(x) << gamma ||g(x)||_P^2.
inline double deadbeat_q_approx(const SystemModel& sys, const StateVector& x) {
  sys.require_discrete("deadbeat_q_approx");
  sys.require_single_input("deadbeat_q_approx");
  const QuadraticValueFunction& v = sys.value_function();
  return v(x) - sys.gamma() * v(step_closed_loop(sys, x));
}

// Bellman residual V*(x) - [Q(x) + u^T R u + gamma V*(x+)] with the
// synthesized Q and the analytic u; identically zero up to roundoff.
inline double bellman_residual(const SystemModel& sys, const StateVector& x) {
  sys.require_discrete("bellman_residual");
  const ControlVector u = optimal_control(sys, x);
  const StateVector x_next = sys.drift(x) + sys.input_map(x) * u;
  const QuadraticValueFunction& v = sys.value_function();
  return v(x) - (synthesize_q(sys, x) + u.dot(sys.control_weight(x) * u) +
                 sys.gamma() * v(x_next));
}

// Iterates the closed loop, recording state, control, stage cost
// Q(x_k) + u_k^T R u_k, value, and the inclusive discounted running sum
// sum_{i<=k} gamma^i J_i.
inline Trajectory simulate(const SystemModel& sys, const StateVector& x0,
                           long steps) {
  sys.require_discrete("simulate");
  if (steps < 0) {
    throw ConfigError("step count must be >= 0");
  }
  Trajectory traj;
  traj.regime = TimeRegime::kDiscrete;
  traj.step = 1.0;
  traj.samples.reserve(static_cast<std::size_t>(steps) + 1);

  const QuadraticValueFunction& v = sys.value_function();
  StateVector x = x0;
  double running = 0.0;
  double discount = 1.0;
  for (long k = 0; k <= steps; ++k) {
    if (!x.allFinite()) {
      throw DivergenceError("state diverged at step " + std::to_string(k));
    }
    const ControlVector u = optimal_control(sys, x);
    TrajectorySample s;
    s.t = static_cast<double>(k);
    s.x = x;
    s.u = u;
    s.stage_cost = synthesize_q(sys, x) + u.dot(sys.control_weight(x) * u);
    s.value = v(x);
    running += discount * s.stage_cost;
    s.discounted_running_cost = running;
    traj.samples.push_back(std::move(s));

    if (k < steps) {
      x = sys.drift(x) + sys.input_map(x) * u;
      discount *= sys.gamma();
    }
  }
  return traj;
}

// Largest discount factor for which the sampled growth bound certifies
// Q >= 0: 1/l_hat, capped at the regime bound gamma <= 1.
inline double max_discount(const LipschitzEstimate& estimate) {
  if (estimate.l_hat < 0.0) {
    throw ConfigError("Lipschitz estimate must be non-negative");
  }
  if (estimate.l_hat == 0.0) {
    return 1.0;
  }
  return std::min(1.0, 1.0 / estimate.l_hat);
}

}  // namespace ioc::discrete
