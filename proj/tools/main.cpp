#include <algorithm>
#include <cstdint>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ebmz/costs.hpp"
#include "ebmz/errors.hpp"
#include "ebmz/estimators.hpp"
#include "ebmz/experiment.hpp"
#include "ebmz/sample_set.hpp"
#include "ebmz/version.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitComputation = 3;

struct SweepOptions {
  std::string config;
  std::string out;
  std::int64_t seed = -1;
  int replications = 0;
  int workers = 0;
  std::string scenario;
};

void apply_overrides(ebmz::ExperimentSpec& spec, const SweepOptions& opt) {
  if (opt.seed >= 0) spec.root_seed = static_cast<std::uint64_t>(opt.seed);
  if (opt.replications > 0) spec.replications = opt.replications;
  if (!opt.scenario.empty()) spec.scenario = ebmz::parse_scenario(opt.scenario);
  spec.workers = opt.workers;
}

void add_sweep_flags(CLI::App* cmd, SweepOptions& opt, bool z_sweep) {
  cmd->add_option("--config", opt.config, "experiment config file (JSON)")->required();
  cmd->add_option("--out", opt.out, "output CSV path")->required();
  cmd->add_option("--seed", opt.seed, "override the config root seed");
  cmd->add_option("--replications", opt.replications, "override the replication count");
  cmd->add_option("--workers", opt.workers, "worker threads (0 = hardware)");
  if (z_sweep) {
    cmd->add_option("--scenario", opt.scenario,
                    "override the scenario (ideal, almost-ideal, realistic-low, "
                    "realistic-high)");
  }
}

struct EstimateOptions {
  std::string estimator;
  std::string data;
  double sigma_p = 0.0;
  double mu_p = 0.0;
  double theta = 1.0;
  double z0 = 1.0;
  int iters = 0;  // 0 -> tolerance mode
};

int run_estimate(const EstimateOptions& opt) {
  static const std::vector<std::string> supported = {
      "opt-bridge", "mis", "self-is-mix", "quad-score", "opt-umbrella",
      "geo",        "stand-is", "ris"};
  if (std::find(supported.begin(), supported.end(), opt.estimator) == supported.end()) {
    throw ebmz::UsageError("estimate-z does not support estimator '" + opt.estimator +
                           "' (multi-bridge needs the sweep harness)");
  }
  const ebmz::UnnormalizedModel model = ebmz::gaussian_model();
  const ebmz::Proposal proposal = ebmz::gaussian_proposal(opt.mu_p, opt.sigma_p);
  const ebmz::ParamVector theta = ebmz::scalar_point(opt.theta);
  const ebmz::SampleSet s = ebmz::read_sample_set_csv(opt.data);

  ebmz::FixedPointConfig cfg;
  cfg.z0 = opt.z0;
  if (opt.iters > 0) {
    cfg.max_iters = opt.iters;
    cfg.fixed_iters = true;
  } else {
    cfg.max_iters = 200;
    cfg.rel_tol = 1e-10;
  }

  double z_hat = 0.0;
  int iters_used = 0;
  bool converged = true;
  const std::string& id = opt.estimator;
  if (id == "opt-bridge") {
    const auto run = ebmz::optimal_bridge(s, model, theta, proposal, cfg);
    z_hat = run.z_hat;
    iters_used = run.iters_used;
    converged = run.converged;
  } else if (id == "mis") {
    const auto run = ebmz::mis_estimator(s, model, theta, proposal, cfg);
    z_hat = run.z_hat;
    iters_used = run.iters_used;
    converged = run.converged;
  } else if (id == "self-is-mix") {
    const auto run = ebmz::self_is_with_mix(s, model, theta, proposal, cfg);
    z_hat = run.z_hat;
    iters_used = run.iters_used;
    converged = run.converged;
  } else if (id == "quad-score") {
    const auto run = ebmz::quadratic_score_iteration(s, model, theta, proposal, cfg);
    z_hat = run.z_hat;
    iters_used = run.iters_used;
    converged = run.converged;
  } else if (id == "opt-umbrella") {
    // All rows of the file are treated as draws from |phi_bar - q|.
    ebmz::PointMatrix pooled(1, s.n() + s.m());
    pooled << s.model_samples(), s.proposal_samples();
    const auto run = ebmz::optimal_umbrella(pooled, model, theta, proposal, cfg);
    z_hat = run.z_hat;
    iters_used = run.iters_used;
    converged = run.converged;
  } else if (id == "geo") {
    z_hat = ebmz::geometric_mean_estimator(s, model, theta, proposal).z_geo;
  } else if (id == "stand-is") {
    z_hat = ebmz::standard_is(s, model, theta, proposal);
  } else if (id == "ris") {
    z_hat = ebmz::reverse_is(s, model, theta, proposal);
  }

  std::cout << "estimator: " << id << "\n";
  std::cout << "Z_hat: " << z_hat << "\n";
  if (iters_used > 0) {
    std::cout << "iterations: " << iters_used << "\n";
    std::cout << "converged: " << (converged ? "yes" : "no") << "\n";
  }
  return kExitOk;
}

void print_registry() {
  std::cout << "z-sweep estimators:\n";
  for (const auto& id : ebmz::z_estimator_ids()) std::cout << "  " << id << "\n";
  std::cout << "theta-sweep costs:\n";
  for (const auto& id : ebmz::theta_cost_ids()) std::cout << "  " << id << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ebmz: contrastive and importance-sampling estimation of "
               "partition functions"};
  app.set_version_flag("--version", ebmz::kVersion);
  app.require_subcommand(0, 1);

  bool list_estimators = false;
  app.add_flag("--list-estimators", list_estimators, "print the estimator registry");

  SweepOptions z_opt;
  CLI::App* z_cmd = app.add_subcommand("z-sweep", "MSE sweep of Z estimators");
  add_sweep_flags(z_cmd, z_opt, true);

  SweepOptions theta_opt;
  CLI::App* theta_cmd =
      app.add_subcommand("theta-sweep", "MSE sweep of theta cost functions");
  add_sweep_flags(theta_cmd, theta_opt, false);

  EstimateOptions est_opt;
  CLI::App* est_cmd = app.add_subcommand("estimate-z", "run one estimator on a CSV");
  est_cmd->add_option("--estimator", est_opt.estimator, "estimator id")->required();
  est_cmd->add_option("--data", est_opt.data, "SampleSet CSV (label,value rows)")
      ->required();
  est_cmd->add_option("--sigma-p", est_opt.sigma_p, "proposal standard deviation")
      ->required();
  est_cmd->add_option("--mu-p", est_opt.mu_p, "proposal mean (default 0)");
  est_cmd->add_option("--theta", est_opt.theta, "model parameter (default 1)");
  est_cmd->add_option("--z0", est_opt.z0, "initial iterate (default 1)");
  est_cmd->add_option("--iters", est_opt.iters, "fixed iteration count");

  CLI::App* selftest_cmd = app.add_subcommand("selftest", "run the invariant suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // prints --help / --version
    std::cerr << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (list_estimators) {
      print_registry();
      return kExitOk;
    }
    if (z_cmd->parsed()) {
      ebmz::ExperimentSpec spec =
          ebmz::load_experiment_spec(z_opt.config, ebmz::ExperimentSpec::Kind::z_sweep);
      apply_overrides(spec, z_opt);
      const auto rows = ebmz::run_z_sweep(spec);
      ebmz::emit_csv(rows, z_opt.out, spec);
      return kExitOk;
    }
    if (theta_cmd->parsed()) {
      ebmz::ExperimentSpec spec = ebmz::load_experiment_spec(
          theta_opt.config, ebmz::ExperimentSpec::Kind::theta_sweep);
      apply_overrides(spec, theta_opt);
      const auto rows = ebmz::run_theta_sweep(spec);
      ebmz::emit_csv(rows, theta_opt.out, spec);
      return kExitOk;
    }
    if (est_cmd->parsed()) {
      return run_estimate(est_opt);
    }
    if (selftest_cmd->parsed()) {
      return ebmz::run_selftest(std::cout);
    }
    std::cerr << app.help();
    return kExitUsage;
  } catch (const ebmz::UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ebmz::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitComputation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitComputation;
  }
}
