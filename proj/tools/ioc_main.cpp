// Command-line front end: select or load a system, evaluate the analytic
// control law and the synthesized state weighting, simulate closed loops,
// run the verification suite, and estimate the admissible discount factor.
//
// Exit status: 0 success / all checks pass, 1 verification failure or
// diverging simulation, 2 usage error, 3 model-assumption violation.

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ioc/ioc.hpp"

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string short_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

struct CommonArgs {
  std::string builtin;
  std::string config_path;
  std::string x_text;
  std::string x0_text;
  std::string box_text;
  std::string out_path;
  std::string format = "csv";
  long steps = -1;
  double dt = 0.0;
  long samples = 1000;
  std::uint64_t seed = 0;
};

void add_system_flags(CLI::App* cmd, CommonArgs& args) {
  auto* system = cmd->add_option("--system", args.builtin,
                                 "Name of a builtin system (see list-systems)");
  auto* config = cmd->add_option("--config", args.config_path,
                                 "Path to a system config JSON file");
  system->excludes(config);
  config->excludes(system);
}

ioc::SystemModel resolve_system(const CommonArgs& args) {
  if (!args.builtin.empty()) {
    return ioc::builtin_system(args.builtin);
  }
  if (!args.config_path.empty()) {
    return ioc::load_system(ioc::SystemConfig::from_file(args.config_path));
  }
  throw UsageError("exactly one of --system or --config is required");
}

Eigen::VectorXd parse_vector(const std::string& text, const char* flag) {
  if (text.empty()) {
    throw UsageError(std::string(flag) + " is required");
  }
  std::vector<double> values;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(cell, &used));
      if (used != cell.size()) {
        throw std::invalid_argument(cell);
      }
    } catch (const std::exception&) {
      throw UsageError(std::string(flag) + ": cannot parse '" + cell +
                       "' as a number");
    }
  }
  if (values.empty()) {
    throw UsageError(std::string(flag) + " must list at least one number");
  }
  return Eigen::Map<Eigen::VectorXd>(values.data(),
                                     static_cast<Eigen::Index>(values.size()));
}

ioc::Interval parse_interval(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) {
    throw UsageError("--box intervals must look like lo:hi, got '" + text +
                     "'");
  }
  try {
    return ioc::Interval{std::stod(text.substr(0, colon)),
                         std::stod(text.substr(colon + 1))};
  } catch (const std::exception&) {
    throw UsageError("--box: cannot parse interval '" + text + "'");
  }
}

// "lo:hi" for every coordinate, or "lo1:hi1,lo2:hi2,..." per coordinate.
std::vector<ioc::Interval> parse_box(const std::string& text, int n) {
  std::vector<ioc::Interval> box;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    box.push_back(parse_interval(cell));
  }
  if (box.size() == 1) {
    box.assign(static_cast<std::size_t>(n), box.front());
  }
  if (static_cast<int>(box.size()) != n) {
    throw UsageError("--box must give one interval or one per state "
                     "coordinate (n = " +
                     std::to_string(n) + ")");
  }
  return box;
}

std::ostream& open_output(const std::string& path, std::ofstream& file) {
  if (path.empty()) {
    return std::cout;
  }
  file.open(path);
  if (!file) {
    throw UsageError("cannot open output file: " + path);
  }
  return file;
}

int run_list_systems() {
  for (const std::string& name : ioc::builtin_system_names()) {
    const ioc::SystemModel sys = ioc::builtin_system(name);
    std::cout << name << "  (" << ioc::to_string(sys.regime())
              << ", n=" << sys.state_dim() << ", m=" << sys.input_dim()
              << ", gamma=" << short_num(sys.gamma()) << ")\n";
  }
  return 0;
}

int run_control(const CommonArgs& args) {
  const ioc::SystemModel sys = resolve_system(args);
  const Eigen::VectorXd x = parse_vector(args.x_text, "--x");
  const ioc::ControlVector u = ioc::optimal_control(sys, x);
  std::cout << "u =";
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    std::cout << ' ' << short_num(u[i]);
  }
  std::cout << '\n';
  return 0;
}

int run_q(const CommonArgs& args) {
  const ioc::SystemModel sys = resolve_system(args);
  const Eigen::VectorXd x = parse_vector(args.x_text, "--x");
  std::cout << "Q = " << short_num(ioc::SynthesizedQ(sys)(x)) << '\n';
  return 0;
}

int run_simulate(const CommonArgs& args) {
  const ioc::SystemModel sys = resolve_system(args);
  const Eigen::VectorXd x0 = parse_vector(args.x0_text, "--x0");
  if (args.steps < 0) {
    throw UsageError("--steps is required");
  }
  ioc::Trajectory traj;
  if (sys.regime() == ioc::TimeRegime::kDiscrete) {
    traj = ioc::discrete::simulate(sys, x0, args.steps);
  } else {
    if (!(args.dt > 0.0)) {
      throw UsageError("--dt is required for continuous-time systems");
    }
    traj = ioc::continuous::integrate_closed_loop(sys, x0, args.dt, args.steps);
  }

  std::ofstream file;
  std::ostream& out = open_output(args.out_path, file);
  if (args.format == "csv") {
    ioc::write_trajectory_csv(traj, out);
  } else if (args.format == "json") {
    out << ioc::trajectory_to_json(traj).dump(2) << '\n';
  } else {
    throw UsageError("--format must be csv or json");
  }
  return 0;
}

int run_verify(const CommonArgs& args) {
  const ioc::SystemModel sys = resolve_system(args);
  ioc::SuiteOptions options;
  options.samples = args.samples;
  options.seed = args.seed;
  if (!args.box_text.empty()) {
    options.box_override = parse_box(args.box_text, sys.state_dim());
  }

  const std::vector<ioc::VerificationReport> reports =
      ioc::run_full_suite(sys, options);
  bool all_pass = true;
  nlohmann::json report_array = nlohmann::json::array();
  for (const ioc::VerificationReport& report : reports) {
    all_pass = all_pass && report.pass;
    report_array.push_back(report.to_json());
    std::cerr << (report.pass ? "[PASS] " : "[FAIL] ") << report.check
              << "  worst=" << short_num(report.worst_value)
              << "  samples=" << report.samples << '\n';
  }
  nlohmann::json doc{{"system", sys.name()},
                     {"all_pass", all_pass},
                     {"samples", args.samples},
                     {"seed", args.seed},
                     {"reports", std::move(report_array)}};

  std::ofstream file;
  std::ostream& out = open_output(args.out_path, file);
  out << doc.dump(2) << '\n';
  return all_pass ? 0 : 1;
}

int run_gamma_bound(const CommonArgs& args) {
  const ioc::SystemModel sys = resolve_system(args);
  std::vector<ioc::Interval> box(static_cast<std::size_t>(sys.state_dim()),
                                 ioc::Interval{-10.0, 10.0});
  if (!args.box_text.empty()) {
    box = parse_box(args.box_text, sys.state_dim());
  }
  ioc::SamplingSpec spec;
  spec.box = box;
  spec.count = args.samples;
  spec.seed = args.seed;
  spec.validate();

  const ioc::LipschitzEstimate est = ioc::estimate_lipschitz(sys, spec);
  std::cout << "L_hat = " << short_num(est.l_hat)
            << "  (sampled lower bound on L, " << est.samples
            << " samples)\n";
  if (sys.regime() == ioc::TimeRegime::kDiscrete) {
    std::cout << "admissible discount bound: gamma <= "
              << short_num(ioc::discrete::max_discount(est))
              << "  (necessary-only evidence; L_hat underestimates L)\n";
  } else {
    std::cout << "admissible discount bound: gamma >= "
              << short_num(ioc::continuous::min_discount(est))
              << "  (necessary-only evidence; L_hat underestimates L)\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Inverse optimal control toolkit for control-affine systems "
               "with quadratic value functions"};
  app.require_subcommand(1);

  CommonArgs args;
  int status = 0;

  CLI::App* list_cmd =
      app.add_subcommand("list-systems", "List the builtin systems");
  list_cmd->callback([&] { status = run_list_systems(); });

  CLI::App* control_cmd = app.add_subcommand(
      "control", "Evaluate the analytic optimal control law u(x)");
  add_system_flags(control_cmd, args);
  control_cmd->add_option("--x", args.x_text, "State, comma-separated");
  control_cmd->callback([&] { status = run_control(args); });

  CLI::App* q_cmd = app.add_subcommand(
      "q", "Evaluate the synthesized state weighting Q(x)");
  add_system_flags(q_cmd, args);
  q_cmd->add_option("--x", args.x_text, "State, comma-separated");
  q_cmd->callback([&] { status = run_q(args); });

  CLI::App* sim_cmd = app.add_subcommand(
      "simulate", "Simulate the optimal closed loop and write the trajectory");
  add_system_flags(sim_cmd, args);
  sim_cmd->add_option("--x0", args.x0_text, "Initial state, comma-separated");
  sim_cmd->add_option("--steps", args.steps, "Number of steps");
  sim_cmd->add_option("--dt", args.dt,
                      "Integration step (continuous-time systems)");
  sim_cmd->add_option("--out", args.out_path, "Output path (default stdout)");
  sim_cmd->add_option("--format", args.format, "csv or json (default csv)");
  sim_cmd->callback([&] { status = run_simulate(args); });

  CLI::App* verify_cmd = app.add_subcommand(
      "verify", "Run the verification suite and write a JSON report");
  add_system_flags(verify_cmd, args);
  verify_cmd->add_option("--samples", args.samples,
                         "Samples per sweep (default 1000)");
  verify_cmd->add_option("--seed", args.seed, "Sampling seed (default 0)");
  verify_cmd->add_option("--box", args.box_text,
                         "Sampling box lo:hi or lo1:hi1,lo2:hi2,...");
  verify_cmd->add_option("--out", args.out_path, "Output path (default stdout)");
  verify_cmd->callback([&] { status = run_verify(args); });

  CLI::App* gamma_cmd = app.add_subcommand(
      "gamma-bound",
      "Estimate the growth constant and the admissible discount bound");
  add_system_flags(gamma_cmd, args);
  gamma_cmd->add_option("--samples", args.samples,
                        "Samples for the estimate (default 100000)");
  gamma_cmd->add_option("--seed", args.seed, "Sampling seed (default 0)");
  gamma_cmd->add_option("--box", args.box_text,
                        "Sampling box (default -10:10)");
  gamma_cmd->callback([&] { status = run_gamma_bound(args); });
  gamma_cmd->parse_complete_callback([&] {
    if (gamma_cmd->count("--samples") == 0) {
      args.samples = 100000;
    }
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const ioc::ModelAssumptionError& e) {
    std::cerr << "model assumption violated: " << e.what() << '\n';
    return 3;
  } catch (const ioc::DivergenceError& e) {
    std::cerr << "simulation diverged: " << e.what() << '\n';
    return 1;
  } catch (const ioc::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << '\n';
    return 1;
  }
  return status;
}
