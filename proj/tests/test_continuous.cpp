#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "ioc/continuous.hpp"
#include "ioc/sampling.hpp"
#include "ioc/system.hpp"
#include "ioc/verification.hpp"

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

Eigen::VectorXd scalar_state(double v) {
  Eigen::VectorXd x(1);
  x << v;
  return x;
}

ioc::SystemModel two_input_continuous() {
  return ioc::load_system(ioc::SystemConfig::from_string(R"json({
    "name": "two-input-continuous", "regime": "continuous", "n": 2, "m": 2,
    "f": ["-x1 + x2^3", "-x2"],
    "g": [["1", "0"], ["0", "1"]],
    "R": [["1", "0"], ["0", "2"]],
    "P": [[1, 0], [0, 1]],
    "gamma": 0
  })json"));
}

// g depends on the state; R is pinned to 0.5 ||g(x)||_P^2 so the control
// field is exactly minus the projection of the value gradient onto g.
ioc::SystemModel projection_system() {
  return ioc::load_system(ioc::SystemConfig::from_string(R"json({
    "name": "projection", "regime": "continuous", "n": 2, "m": 1,
    "f": ["-x1", "-x2"],
    "g": [["0"], ["1 + x1^2"]],
    "R": [["0.5*(1 + x1^2)^2"]],
    "P": [[1, 0], [0, 1]],
    "gamma": 0
  })json"));
}

}  // namespace

TEST_CASE("analytic continuous control law") {
  const ioc::SystemModel scn = ioc::builtin_system("scalar-continuous-neg");
  CHECK(ioc::continuous::optimal_control(scn, scalar_state(0.0))[0] == 0.0);
  CHECK_THAT(ioc::continuous::optimal_control(scn, scalar_state(3.0))[0],
             WithinAbs(-3.0, 1e-15));

  const ioc::SystemModel e2 = ioc::builtin_system("example2-continuous");
  CHECK_THAT(ioc::continuous::optimal_control(e2, Eigen::Vector2d(1.0, 2.0))[0],
             WithinAbs(-2.0, 1e-15));

  CHECK_THROWS_AS(
      ioc::continuous::optimal_control(
          ioc::builtin_system("example1-discrete"), Eigen::Vector2d(1.0, 1.0)),
      ioc::RegimeError);
}

TEST_CASE("single-input inner-product form agrees with the matrix form") {
  const ioc::CounterRng rng(3);
  const std::vector<ioc::Interval> box(2, ioc::Interval{-3.0, 3.0});
  for (const double r : {0.1, 1.0, 10.0}) {
    const ioc::SystemModel sys = ioc::with_control_weight(
        ioc::builtin_system("example2-continuous"), r);
    for (int i = 0; i < 200; ++i) {
      const Eigen::VectorXd x = rng.sample_box(box, static_cast<std::uint64_t>(i));
      const double matrix_form = ioc::continuous::optimal_control(sys, x)[0];
      const double inner_form =
          ioc::continuous::control_single_input_form(sys, x);
      CHECK_THAT(inner_form,
                 WithinAbs(matrix_form, 1e-12 * (1.0 + std::abs(matrix_form))));
    }
  }
}

TEST_CASE("synthesized Q matches the worked examples") {
  const ioc::SystemModel scn = ioc::builtin_system("scalar-continuous-neg");
  CHECK(ioc::continuous::synthesize_q(scn, scalar_state(0.0)) == 0.0);
  CHECK_THAT(ioc::continuous::synthesize_q(scn, scalar_state(3.0)),
             WithinAbs(27.0, 1e-13));

  const ioc::SystemModel e2 = ioc::builtin_system("example2-continuous");
  CHECK_THAT(ioc::continuous::synthesize_q(e2, Eigen::Vector2d(1.0, 2.0)),
             WithinAbs(6.0, 1e-14));
}

TEST_CASE("HJB residual vanishes with the synthesized Q") {
  const ioc::SystemModel scn = ioc::builtin_system("scalar-continuous-neg");
  CHECK(ioc::continuous::hjb_residual(scn, scalar_state(0.0)) == 0.0);
  CHECK_THAT(ioc::continuous::hjb_residual(scn, scalar_state(3.0)),
             WithinAbs(0.0, 1e-12));

  const ioc::SystemModel e2 = ioc::builtin_system("example2-continuous");
  const ioc::CounterRng rng(13);
  const std::vector<ioc::Interval> box(2, ioc::Interval{-3.0, 3.0});
  for (int i = 0; i < 1000; ++i) {
    const Eigen::VectorXd x = rng.sample_box(box, static_cast<std::uint64_t>(i));
    const double res = ioc::continuous::hjb_residual(e2, x);
    CHECK(std::abs(res) <= 1e-9 * (1.0 + e2.value_function()(x)));
  }
}

TEST_CASE("closed-loop vector field") {
  const ioc::SystemModel scn = ioc::builtin_system("scalar-continuous-neg");
  CHECK(ioc::continuous::closed_loop_field(scn, scalar_state(0.0))[0] == 0.0);
  CHECK_THAT(ioc::continuous::closed_loop_field(scn, scalar_state(3.0))[0],
             WithinAbs(-6.0, 1e-14));

  const ioc::SystemModel e2 = ioc::builtin_system("example2-continuous");
  const Eigen::VectorXd field =
      ioc::continuous::closed_loop_field(e2, Eigen::Vector2d(1.0, 2.0));
  CHECK_THAT(field[0], WithinAbs(7.0, 1e-14));
  CHECK_THAT(field[1], WithinAbs(-6.0, 1e-14));
}

TEST_CASE("fixed-step integration against the exact linear solution") {
  const ioc::SystemModel scn = ioc::builtin_system("scalar-continuous-neg");

  const ioc::Trajectory single =
      ioc::continuous::integrate_closed_loop(scn, scalar_state(3.0), 1e-3, 0);
  CHECK(single.size() == 1);
  CHECK(single.front().x[0] == 3.0);

  // Closed loop is xdot = -2x, so x(5) = 3 e^{-10}.
  const ioc::Trajectory traj =
      ioc::continuous::integrate_closed_loop(scn, scalar_state(3.0), 1e-3, 5000);
  REQUIRE(traj.size() == 5001);
  CHECK_THAT(traj.back().t, WithinAbs(5.0, 1e-9));
  CHECK_THAT(traj.back().x[0], WithinRel(3.0 * std::exp(-10.0), 1e-6));

  CHECK_THROWS_AS(
      ioc::continuous::integrate_closed_loop(scn, scalar_state(1.0), 0.0, 10),
      ioc::ConfigError);
}

TEST_CASE("P-norm decreases monotonically along the benchmark closed loop") {
  const ioc::SystemModel e2 = ioc::builtin_system("example2-continuous");
  const ioc::Trajectory traj = ioc::continuous::integrate_closed_loop(
      e2, Eigen::Vector2d(1.0, 2.0), 1e-3, 10000);
  for (std::size_t k = 1; k < traj.size(); ++k) {
    CHECK(traj.samples[k].value < traj.samples[k - 1].value);
  }
}

TEST_CASE("membership in S_gperp") {
  const ioc::SystemModel e2 = ioc::builtin_system("example2-continuous");
  CHECK(ioc::continuous::gperp_membership(e2, Eigen::Vector2d(5.0, 0.0)));
  CHECK_FALSE(ioc::continuous::gperp_membership(e2, Eigen::Vector2d(0.0, 1.0)));
  CHECK(ioc::continuous::gperp_membership(e2, Eigen::Vector2d(0.0, 0.0)));
  CHECK_THROWS_AS(ioc::continuous::gperp_membership(two_input_continuous(),
                                                    Eigen::Vector2d(1.0, 0.0)),
                  ioc::DimensionError);
}

TEST_CASE("drift condition on S_gperp for the gamma = 0 route") {
  const auto spec = ioc::SamplingSpec::cube(2, -5.0, 5.0, 200, 101);
  const ioc::SystemModel e2 = ioc::builtin_system("example2-continuous");
  const ioc::VerificationReport good = ioc::gperp_drift_check(e2, spec);
  CHECK(good.pass);
  CHECK(good.samples > 0);
  CHECK(good.worst_value <= 0.0);

  const ioc::SystemModel scn = ioc::builtin_system("scalar-continuous-neg");
  const ioc::VerificationReport trivial = ioc::gperp_drift_check(
      scn, ioc::SamplingSpec::cube(1, -5.0, 5.0, 50, 3));
  CHECK(trivial.pass);  // S_gperp = {0}

  const ioc::SystemModel unstable =
      ioc::load_system(ioc::SystemConfig::from_string(R"json({
        "name": "unstable-drift", "regime": "continuous", "n": 2, "m": 1,
        "f": ["x1", "x2"], "g": [["0"], ["1"]],
        "R": [["1"]], "P": [[1, 0], [0, 1]], "gamma": 0
      })json"));
  const ioc::VerificationReport bad = ioc::gperp_drift_check(unstable, spec);
  CHECK_FALSE(bad.pass);
  CHECK(bad.worst_value > 0.0);
  // the witness really does violate the drift condition
  CHECK(ioc::p_inner(unstable.drift(bad.worst_state), bad.worst_state,
                     unstable.weight()) > 0.0);
}

TEST_CASE("R-selection ratio") {
  const ioc::SystemModel scn = ioc::builtin_system("scalar-continuous-neg");
  const auto bound = ioc::continuous::r_upper_bound(scn, scalar_state(3.0));
  REQUIRE(bound.has_value());
  CHECK_THAT(*bound, WithinAbs(-1.0, 1e-14));

  const ioc::SystemModel e2 = ioc::builtin_system("example2-continuous");
  const auto bound2 = ioc::continuous::r_upper_bound(e2, Eigen::Vector2d(1.0, 1.0));
  REQUIRE(bound2.has_value());
  CHECK_THAT(*bound2, WithinAbs(-1.0, 1e-14));

  // members of S_gperp have no ratio
  CHECK_FALSE(
      ioc::continuous::r_upper_bound(e2, Eigen::Vector2d(5.0, 0.0)).has_value());
  CHECK_THROWS_AS(ioc::continuous::r_upper_bound(two_input_continuous(),
                                                 Eigen::Vector2d(1.0, 1.0)),
                  ioc::DimensionError);
}

TEST_CASE("norm rate z = 2 <x, xdot>_P and its single-input expansion") {
  const ioc::SystemModel scn = ioc::builtin_system("scalar-continuous-neg");
  CHECK(ioc::continuous::norm_rate(scn, scalar_state(0.0)).z == 0.0);
  CHECK_THAT(ioc::continuous::norm_rate(scn, scalar_state(3.0)).z,
             WithinAbs(-36.0, 1e-12));

  const ioc::SystemModel e2 = ioc::builtin_system("example2-continuous");
  CHECK_THAT(ioc::continuous::norm_rate(e2, Eigen::Vector2d(1.0, 2.0)).z,
             WithinAbs(-10.0, 1e-12));

  const ioc::CounterRng rng(19);
  const std::vector<ioc::Interval> box(2, ioc::Interval{-3.0, 3.0});
  const ioc::WeightMatrix& p = e2.weight();
  for (int i = 0; i < 200; ++i) {
    const Eigen::VectorXd x = rng.sample_box(box, static_cast<std::uint64_t>(i));
    const double z = ioc::continuous::norm_rate(e2, x).z;
    const Eigen::VectorXd g = e2.input_map(x).col(0);
    const double expansion =
        2.0 * (ioc::p_inner(e2.drift(x), x, p) -
               std::pow(ioc::p_inner(g, x, p), 2) / e2.control_weight(x)(0, 0));
    CHECK_THAT(z, WithinAbs(expansion, 1e-10 * (1.0 + std::abs(z))));
  }
}

TEST_CASE("control is linear when R and g are constant") {
  const ioc::CounterRng rng(37);
  const std::vector<ioc::SystemModel> systems = {
      ioc::builtin_system("example2-continuous"),
      ioc::builtin_system("scalar-continuous-neg"), two_input_continuous()};
  for (const ioc::SystemModel& sys : systems) {
    const int n = sys.state_dim();
    const std::vector<ioc::Interval> box(static_cast<std::size_t>(n),
                                         ioc::Interval{-3.0, 3.0});
    for (int i = 0; i < 100; ++i) {
      const Eigen::VectorXd x = rng.sample_box(box, static_cast<std::uint64_t>(2 * i));
      const Eigen::VectorXd y =
          rng.sample_box(box, static_cast<std::uint64_t>(2 * i + 1));
      const double alpha = rng.uniform(90000 + i, -2.0, 2.0);
      const double beta = rng.uniform(95000 + i, -2.0, 2.0);
      const Eigen::VectorXd lhs =
          ioc::continuous::optimal_control(sys, alpha * x + beta * y);
      const Eigen::VectorXd rhs =
          alpha * ioc::continuous::optimal_control(sys, x) +
          beta * ioc::continuous::optimal_control(sys, y);
      CHECK((lhs - rhs).cwiseAbs().maxCoeff() <=
            1e-12 * (1.0 + rhs.cwiseAbs().maxCoeff()));
    }
  }
}

TEST_CASE("control field is minus the projected value gradient when "
          "R = ||g||_P^2 / 2") {
  const ioc::SystemModel sys = projection_system();
  const ioc::CounterRng rng(53);
  const std::vector<ioc::Interval> box(2, ioc::Interval{-3.0, 3.0});
  const ioc::WeightMatrix& p = sys.weight();
  for (int i = 0; i < 200; ++i) {
    const Eigen::VectorXd x = rng.sample_box(box, static_cast<std::uint64_t>(i));
    const Eigen::VectorXd g = sys.input_map(x).col(0);
    const double u = ioc::continuous::optimal_control(sys, x)[0];
    const double g_norm_sq = ioc::p_inner(g, g, p);
    const Eigen::VectorXd field = u * g;
    const Eigen::VectorXd projection =
        -ioc::p_inner(sys.value_function().gradient(x), g / g_norm_sq, p) * g;
    CHECK((field - projection).cwiseAbs().maxCoeff() <=
          1e-12 * (1.0 + projection.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("minimum discount from the growth estimate") {
  auto make = [](double l_hat) {
    ioc::LipschitzEstimate est;
    est.l_hat = l_hat;
    est.samples = 1;
    return est;
  };
  CHECK(ioc::continuous::min_discount(make(1.0)) == 2.0);
  CHECK(ioc::continuous::min_discount(make(0.5)) == 1.0);
  CHECK(ioc::continuous::min_discount(make(0.0)) == 0.0);
}

TEST_CASE("Q goes non-negative once gamma >= 2 l_hat") {
  // scalar drift -x has l_hat = 1; pick gamma = 2.
  auto cfg = ioc::builtin_system("scalar-continuous-neg").to_config();
  cfg.gamma = 2.0;
  const ioc::SystemModel sys = ioc::load_system(cfg);
  const ioc::VerificationReport report = ioc::check_q_nonnegativity(
      sys, ioc::SamplingSpec::cube(1, -10.0, 10.0, 10000, 77));
  CHECK(report.pass);
  CHECK(report.worst_value >= -1e-12);
}
