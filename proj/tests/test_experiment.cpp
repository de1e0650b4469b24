#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ebmz/errors.hpp"
#include "ebmz/experiment.hpp"

using namespace ebmz;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / name;
}

ExperimentSpec small_z_spec() {
  ExperimentSpec spec;
  spec.kind = ExperimentSpec::Kind::z_sweep;
  spec.ids = {"opt-bridge", "mis"};
  spec.sigma_grid = {0.5, 1.5, 3.0};
  spec.splits = {{5, 5}};
  spec.scenario = Scenario::realistic_low;
  spec.replications = 60;
  spec.root_seed = 42;
  return spec;
}

}  // namespace

TEST_CASE("unknown ids are rejected before any computation") {
  ExperimentSpec spec = small_z_spec();
  spec.ids = {"opt-bridge", "nope"};
  CHECK_THROWS_AS(run_z_sweep(spec), UsageError);

  CellSpec cell;
  cell.id = "nope";
  CHECK_THROWS_AS(run_z_cell(cell), UsageError);
}

TEST_CASE("sweep cardinality: estimators x splits x grid") {
  ExperimentSpec spec = small_z_spec();
  spec.ids = {"opt-bridge", "mis", "geo"};
  spec.sigma_grid = default_sigma_grid();
  spec.splits = {{20, 20}, {5, 35}, {35, 5}};
  spec.replications = 2;
  const auto rows = run_z_sweep(spec);
  CHECK(rows.size() == 3 * 3 * 12);

  const auto path = temp_file("ebmz_card.csv");
  emit_csv(rows, path, spec);
  std::istringstream lines(slurp(path));
  int count = 0;
  std::string line;
  while (std::getline(lines, line)) ++count;
  CHECK(count == 109);
  std::filesystem::remove(path);
  std::filesystem::remove(path.string() + ".meta.json");
}

TEST_CASE("csv header, sorting and emptiness contract") {
  ExperimentSpec spec = small_z_spec();
  spec.replications = 3;
  const auto rows = run_z_sweep(spec);
  const auto path = temp_file("ebmz_fmt.csv");
  emit_csv(rows, path, spec);
  const std::string text = slurp(path);
  CHECK(text.rfind("estimator,sigma_p,N,M,scenario,R,mse,bias,variance,mean_iters,"
                   "failures\n", 0) == 0);
  // sorted by id first: every "mis" row after every "opt-bridge" row reversed
  CHECK(text.find("mis,") < text.find("opt-bridge,"));
  std::filesystem::remove(path);
  std::filesystem::remove(path.string() + ".meta.json");

  CHECK_THROWS_AS(emit_csv({}, temp_file("ebmz_empty.csv"), spec), PreconditionError);
}

TEST_CASE("identical spec and seed give byte-identical output at any worker count") {
  ExperimentSpec spec = small_z_spec();
  spec.ids = {"opt-bridge", "mis", "self-is-mix", "ris"};
  spec.replications = 40;

  const auto p1 = temp_file("ebmz_w1.csv");
  const auto p8 = temp_file("ebmz_w8.csv");
  spec.workers = 1;
  emit_csv(run_z_sweep(spec), p1, spec);
  spec.workers = 8;
  emit_csv(run_z_sweep(spec), p8, spec);
  CHECK(slurp(p1) == slurp(p8));
  CHECK(slurp(p1.string() + ".meta.json") == slurp(p8.string() + ".meta.json"));
  for (const auto& p : {p1, p8}) {
    std::filesystem::remove(p);
    std::filesystem::remove(p.string() + ".meta.json");
  }
}

TEST_CASE("ideal scenario at sigma_p = theta_tr collapses the error") {
  // multi-bridge is excluded: its sweep convention adds a wide second
  // proposal, so phi is not proportional to the mixture at sigma_p = 1.
  for (const std::string id : {"opt-bridge", "mis", "self-is-mix", "geo", "stand-is",
                               "ris", "quad-score"}) {
    CellSpec cell;
    cell.id = id;
    cell.sigma_p = 1.0;
    cell.n = cell.m = 20;
    cell.scenario = Scenario::ideal;
    cell.replications = 30;
    cell.root_seed = 7;
    const CellResult r = run_z_cell(cell);
    CAPTURE(id);
    CHECK(r.row.failures == 0);
    CHECK(r.row.mse < 1e-24);
  }
}

TEST_CASE("scenario mapping controls iteration counts") {
  CellSpec cell;
  cell.id = "opt-bridge";
  cell.sigma_p = 2.0;
  cell.n = cell.m = 10;
  cell.replications = 20;
  cell.scenario = Scenario::ideal;
  CHECK(run_z_cell(cell).row.mean_iters == 1.0);
  cell.scenario = Scenario::realistic_high;
  CHECK(run_z_cell(cell).row.mean_iters == 10.0);
}

TEST_CASE("mse identity and failure isolation") {
  CellSpec cell;
  cell.id = "ris";
  cell.sigma_p = 2.5;
  cell.n = 5;
  cell.m = 5;
  cell.replications = 500;
  cell.root_seed = 99;
  const CellResult r = run_z_cell(cell);
  CHECK(r.row.mse ==
        doctest::Approx(r.row.bias * r.row.bias + r.row.variance).epsilon(1e-10));
  CHECK(r.row.failures == 0);

  // A degenerate umbrella cell fails every trial but still reports.
  CellSpec degenerate;
  degenerate.id = "opt-umbrella";
  degenerate.sigma_p = 1.0;  // phi_bar == q
  degenerate.n = degenerate.m = 4;
  degenerate.replications = 12;
  const CellResult d = run_z_cell(degenerate);
  CHECK(d.row.failures == 12);
  CHECK(std::isnan(d.row.mse));
}

TEST_CASE("theta sweep: ml rows repeat bitwise across the grid") {
  ExperimentSpec spec;
  spec.kind = ExperimentSpec::Kind::theta_sweep;
  spec.ids = {"ml", "nce-log"};
  spec.sigma_grid = {0.6, 1.7, 4.0};
  spec.splits = {{5, 5}};
  spec.replications = 40;
  spec.root_seed = 3;
  const auto rows = run_theta_sweep(spec);
  CHECK(rows.size() == 6);

  double ml_mse = -1.0;
  for (const SweepRow& row : rows) {
    if (row.id != "ml") continue;
    if (ml_mse < 0.0) {
      ml_mse = row.mse;
    } else {
      CHECK(row.mse == ml_mse);  // bitwise
    }
    CHECK(row.scenario.empty());
  }
  CHECK(ml_mse >= 0.0);
}

TEST_CASE("config loading: defaults, overrides and rejection of unknown keys") {
  const auto path = temp_file("ebmz_cfg.json");
  {
    std::ofstream out(path);
    out << R"({"estimators": ["geo"], "replications": 7, "root_seed": 5,
               "splits": [[4, 6]], "sigma_grid": [1.0, 2.0]})";
  }
  const ExperimentSpec spec =
      load_experiment_spec(path, ExperimentSpec::Kind::z_sweep);
  CHECK(spec.ids == std::vector<std::string>{"geo"});
  CHECK(spec.replications == 7);
  CHECK(spec.root_seed == 5);
  CHECK(spec.splits.size() == 1);
  CHECK(spec.splits[0].n == 4);
  CHECK(spec.sigma_grid == std::vector<double>{1.0, 2.0});
  std::filesystem::remove(path);

  const auto bad = temp_file("ebmz_bad.json");
  {
    std::ofstream out(bad);
    out << R"({"estimatorz": ["geo"]})";
  }
  CHECK_THROWS_AS(load_experiment_spec(bad, ExperimentSpec::Kind::z_sweep), UsageError);
  std::filesystem::remove(bad);

  const auto defaults = temp_file("ebmz_defaults.json");
  {
    std::ofstream out(defaults);
    out << "{}";
  }
  const ExperimentSpec full =
      load_experiment_spec(defaults, ExperimentSpec::Kind::theta_sweep);
  CHECK(full.ids == theta_cost_ids());
  CHECK(full.sigma_grid.size() == 12);
  CHECK(full.splits.size() == 4);
  CHECK(full.splits[3].m == 100);
  CHECK(full.replications == 2000);
  std::filesystem::remove(defaults);
}

TEST_CASE("default sigma grid spans [0.3, 5] in 12 log-spaced points") {
  const auto grid = default_sigma_grid();
  REQUIRE(grid.size() == 12);
  CHECK(grid.front() == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(grid.back() == doctest::Approx(5.0).epsilon(1e-12));
  for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
    CHECK(grid[i + 1] / grid[i] == doctest::Approx(grid[i] / grid[i - 1]).epsilon(1e-9));
  }
}
