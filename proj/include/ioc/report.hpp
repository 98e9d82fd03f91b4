#pragma once

#include <Eigen/Dense>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

namespace ioc {

// Sampled evidence for one verification check. worst_value is the extremal
// quantity the check tracks (minimum margin, maximum residual, ...);
// worst_state is where it occurred; pass is worst_value vs. tolerance.
struct VerificationReport {
  std::string system;
  std::string check;
  long samples = 0;
  double worst_value = 0.0;
  Eigen::VectorXd worst_state;
  bool pass = false;
  double tolerance = 0.0;
  nlohmann::json extras = nlohmann::json::object();

  nlohmann::json to_json() const {
    return nlohmann::json{
        {"system", system},
        {"check", check},
        {"samples", samples},
        {"worst_value", worst_value},
        {"worst_state", std::vector<double>(worst_state.data(),
                                            worst_state.data() +
                                                worst_state.size())},
        {"pass", pass},
        {"tolerance", tolerance},
        {"extras", extras}};
  }
};

}  // namespace ioc
