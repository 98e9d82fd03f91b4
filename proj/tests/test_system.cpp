#include <catch2/catch_amalgamated.hpp>

#include <numbers>
#include <string>

#include "ioc/sampling.hpp"
#include "ioc/system.hpp"

using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;

namespace {

ioc::SystemConfig scalar_config() {
  return ioc::SystemConfig::from_string(R"json({
    "name": "demo", "regime": "discrete", "n": 1, "m": 1,
    "f": ["0.5*x1"], "g": [["1"]], "R": [["1"]], "P": [[1]], "gamma": 1
  })json");
}

}  // namespace

TEST_CASE("builtin registry") {
  const auto names = ioc::builtin_system_names();
  REQUIRE(names.size() == 4);

  const ioc::SystemModel e1 = ioc::builtin_system("example1-discrete");
  CHECK(e1.regime() == ioc::TimeRegime::kDiscrete);
  CHECK(e1.state_dim() == 2);
  CHECK(e1.input_dim() == 1);
  CHECK(e1.gamma() == 1.0);
  const Eigen::Vector2d x(std::numbers::pi / 2, 0.0);
  const Eigen::VectorXd f = e1.drift(x);
  CHECK_THAT(f[0], WithinAbs(0.0, 1e-15));
  CHECK_THAT(f[1], WithinAbs(-std::numbers::pi / 2, 1e-15));

  const ioc::SystemModel e2 = ioc::builtin_system("example2-continuous");
  CHECK(e2.regime() == ioc::TimeRegime::kContinuous);
  CHECK(e2.gamma() == 0.0);
  const Eigen::VectorXd f2 = e2.drift(Eigen::Vector2d(1.0, 2.0));
  CHECK(f2[0] == 7.0);
  CHECK(f2[1] == -4.0);

  CHECK_THROWS_AS(ioc::builtin_system("nosuch"), ioc::UnknownSystemError);
}

TEST_CASE("load_system validates the configuration") {
  SECTION("well-formed config loads") {
    const ioc::SystemModel sys = ioc::load_system(scalar_config());
    CHECK(sys.state_dim() == 1);
    CHECK(sys.input_dim() == 1);
  }

  SECTION("bad JSON") {
    CHECK_THROWS_AS(ioc::SystemConfig::from_string("{ not json"),
                    ioc::ConfigError);
    CHECK_THROWS_AS(ioc::SystemConfig::from_string("{\"name\": \"x\"}"),
                    ioc::ConfigError);
  }

  SECTION("discount factor out of range for the regime") {
    auto c = scalar_config();
    c.gamma = 1.5;
    CHECK_THROWS_AS(ioc::load_system(c), ioc::ConfigError);
    c.gamma = 0.0;
    CHECK_THROWS_AS(ioc::load_system(c), ioc::ConfigError);
    c.regime = "continuous";
    CHECK_NOTHROW(ioc::load_system(c));
  }

  SECTION("f(0) != 0 is rejected") {
    auto c = scalar_config();
    c.f = {"x1+1"};
    CHECK_THROWS_WITH(ioc::load_system(c), ContainsSubstring("f(0) must be 0"));
  }

  SECTION("dimension mismatches are rejected") {
    auto c = scalar_config();
    c.f = {"0.5*x1", "x1"};
    CHECK_THROWS_AS(ioc::load_system(c), ioc::ConfigError);

    c = scalar_config();
    c.g = {{"1", "0"}};
    CHECK_THROWS_AS(ioc::load_system(c), ioc::ConfigError);

    c = scalar_config();
    c.p = {{1.0, 0.0}};
    CHECK_THROWS_AS(ioc::load_system(c), ioc::ConfigError);
  }

  SECTION("invalid P is rejected with the definiteness error") {
    auto c = scalar_config();
    c.p = {{-1.0}};
    CHECK_THROWS_AS(ioc::load_system(c), ioc::NotPositiveDefiniteError);
  }

  SECTION("expressions referencing out-of-range variables are rejected") {
    auto c = scalar_config();
    c.f = {"0.5*x2"};
    CHECK_THROWS_AS(ioc::load_system(c), ioc::ConfigError);
  }

  SECTION("unknown regime") {
    auto c = scalar_config();
    c.regime = "sampled";
    CHECK_THROWS_AS(ioc::load_system(c), ioc::ConfigError);
  }
}

TEST_CASE("R(x) positivity is checked at the queried state") {
  auto c = scalar_config();
  c.r = {{"x1"}};  // positive only for x1 > 0
  const ioc::SystemModel sys = ioc::load_system(c);

  Eigen::VectorXd good(1);
  good << 2.0;
  CHECK(sys.control_weight(good)(0, 0) == 2.0);

  Eigen::VectorXd bad(1);
  bad << -1.0;
  CHECK_THROWS_MATCHES(sys.control_weight(bad), ioc::ModelAssumptionError,
                       Catch::Matchers::MessageMatches(
                           ContainsSubstring("not positive definite")));
}

TEST_CASE("R(x) symmetry is checked at the queried state") {
  const ioc::SystemModel sys =
      ioc::load_system(ioc::SystemConfig::from_string(R"json({
        "name": "asym-r", "regime": "discrete", "n": 2, "m": 2,
        "f": ["0", "0"],
        "g": [["1", "0"], ["0", "1"]],
        "R": [["1", "x1"], ["0", "1"]],
        "P": [[1, 0], [0, 1]],
        "gamma": 1
      })json"));
  CHECK_NOTHROW(sys.control_weight(Eigen::Vector2d(0.0, 3.0)));
  CHECK_THROWS_MATCHES(
      sys.control_weight(Eigen::Vector2d(0.5, 0.0)), ioc::ModelAssumptionError,
      Catch::Matchers::MessageMatches(ContainsSubstring("not symmetric")));
}

TEST_CASE("g(x) rank evidence via the smallest singular value") {
  const ioc::SystemModel e1 = ioc::builtin_system("example1-discrete");
  CHECK_THAT(e1.min_g_singular_value(Eigen::Vector2d(1.0, 2.0)),
             WithinAbs(1.0, 1e-15));

  auto c = scalar_config();
  c.g = {{"x1"}};  // rank drops at the origin only
  const ioc::SystemModel sys = ioc::load_system(c);
  Eigen::VectorXd x(1);
  x << 0.5;
  CHECK_THAT(sys.min_g_singular_value(x), WithinAbs(0.5, 1e-15));
}

TEST_CASE("config round-trip reproduces evaluations exactly") {
  const ioc::CounterRng rng(11);
  for (const std::string& name : ioc::builtin_system_names()) {
    const ioc::SystemModel original = ioc::builtin_system(name);
    const std::string text = original.to_config().to_json().dump();
    const ioc::SystemModel reloaded =
        ioc::load_system(ioc::SystemConfig::from_string(text));

    const int n = original.state_dim();
    std::vector<ioc::Interval> box(static_cast<std::size_t>(n),
                                   ioc::Interval{-5.0, 5.0});
    for (int i = 0; i < 1000; ++i) {
      const Eigen::VectorXd x = rng.sample_box(box, static_cast<std::uint64_t>(i));
      CHECK((original.drift(x) - reloaded.drift(x)).cwiseAbs().maxCoeff() <=
            1e-15);
      CHECK((original.input_map(x) - reloaded.input_map(x))
                .cwiseAbs()
                .maxCoeff() <= 1e-15);
      CHECK((original.control_weight(x) - reloaded.control_weight(x))
                .cwiseAbs()
                .maxCoeff() <= 1e-15);
    }
  }
}

TEST_CASE("with_control_weight replaces R by a constant") {
  const ioc::SystemModel e1 = ioc::builtin_system("example1-discrete");
  const ioc::SystemModel tiny = ioc::with_control_weight(e1, 1e-8);
  CHECK(tiny.control_weight(Eigen::Vector2d(1.0, 1.0))(0, 0) == 1e-8);
  CHECK_THROWS_AS(ioc::with_control_weight(e1, 0.0), ioc::ConfigError);
  CHECK_THROWS_AS(ioc::with_control_weight(e1, -1.0), ioc::ConfigError);
}
