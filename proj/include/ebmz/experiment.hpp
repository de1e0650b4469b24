#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "ebmz/model.hpp"

namespace ebmz {

// Fixed-point initialization regimes for the Z sweeps. Each scenario pins
// (Z0, T): ideal -> (Z_tr, 1), almost-ideal -> (1.001 Z_tr, 10),
// realistic-low -> (0.1, 10), realistic-high -> (5, 10).
enum class Scenario { ideal, almost_ideal, realistic_low, realistic_high };

std::string scenario_name(Scenario s);
Scenario parse_scenario(const std::string& name);

struct Split {
  int n = 0;
  int m = 0;
};

struct ExperimentSpec {
  enum class Kind { z_sweep, theta_sweep };

  Kind kind = Kind::z_sweep;
  std::vector<std::string> ids;  // estimator ids (z) or cost ids (theta)
  std::vector<double> sigma_grid;
  std::vector<Split> splits;
  Scenario scenario = Scenario::realistic_low;
  int replications = 0;  // 0 -> kind default (10^4 for z, 2000 for theta)
  std::uint64_t root_seed = 1;
  double theta_tr = 1.0;
  int workers = 0;  // execution detail; 0 -> hardware concurrency
};

// Registry of runnable ids.
const std::vector<std::string>& z_estimator_ids();
const std::vector<std::string>& theta_cost_ids();

// 12 logarithmically spaced points in [0.3, 5].
std::vector<double> default_sigma_grid();

// Fills defaults and validates ids/grids. kind must match the subcommand.
ExperimentSpec load_experiment_spec(const std::filesystem::path& config_path,
                                    ExperimentSpec::Kind kind);

struct SweepRow {
  std::string id;
  double sigma_p = 0.0;
  int n = 0;
  int m = 0;
  std::string scenario;  // empty for theta sweeps
  int replications = 0;
  double mse = 0.0;
  double bias = 0.0;
  double variance = 0.0;
  double mean_iters = 0.0;
  int failures = 0;
};

// One sweep cell plus the Monte Carlo standard error of its MSE estimate.
struct CellResult {
  SweepRow row;
  double se_mse = 0.0;
};

struct CellSpec {
  std::string id;
  double sigma_p = 1.0;
  int n = 20;
  int m = 20;
  Scenario scenario = Scenario::realistic_low;
  int replications = 10000;
  std::uint64_t root_seed = 1;
  double theta_tr = 1.0;
  int workers = 0;
};

CellResult run_z_cell(const CellSpec& cell);
CellResult run_theta_cell(const CellSpec& cell);

std::vector<SweepRow> run_z_sweep(const ExperimentSpec& spec);
std::vector<SweepRow> run_theta_sweep(const ExperimentSpec& spec);

// UTF-8 CSV, shortest round-trip decimals, rows sorted by
// (id, N, M, sigma_p); writes "<path>.meta.json" alongside.
void emit_csv(const std::vector<SweepRow>& rows, const std::filesystem::path& path,
              const ExperimentSpec& spec);

// Quick invariant battery behind the `selftest` subcommand.
// Returns 0 on success, 3 on any failure.
int run_selftest(std::ostream& out);

}  // namespace ebmz
