#include "ebmz/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "ebmz/costs.hpp"
#include "ebmz/errors.hpp"
#include "ebmz/estimators.hpp"
#include "ebmz/numeric.hpp"
#include "ebmz/rng.hpp"
#include "ebmz/sample_set.hpp"
#include "ebmz/solvers.hpp"
#include "ebmz/umbrella.hpp"
#include "ebmz/version.hpp"

namespace ebmz {

namespace {

enum class ZId {
  opt_bridge,
  mis,
  self_is_mix,
  geo,
  stand_is,
  ris,
  opt_umbrella,
  quad_score,
  multi_bridge,
};

enum class CostId { nce_log, quad, reciprocal, mis, ml };

const std::vector<std::pair<std::string, ZId>>& z_id_table() {
  static const std::vector<std::pair<std::string, ZId>> table = {
      {"opt-bridge", ZId::opt_bridge}, {"mis", ZId::mis},
      {"self-is-mix", ZId::self_is_mix}, {"geo", ZId::geo},
      {"stand-is", ZId::stand_is},     {"ris", ZId::ris},
      {"opt-umbrella", ZId::opt_umbrella}, {"quad-score", ZId::quad_score},
      {"multi-bridge", ZId::multi_bridge},
  };
  return table;
}

const std::vector<std::pair<std::string, CostId>>& cost_id_table() {
  static const std::vector<std::pair<std::string, CostId>> table = {
      {"nce-log", CostId::nce_log}, {"quad", CostId::quad},
      {"reciprocal", CostId::reciprocal}, {"mis", CostId::mis},
      {"ml", CostId::ml},
  };
  return table;
}

ZId parse_z_id(const std::string& id) {
  for (const auto& [name, value] : z_id_table()) {
    if (name == id) return value;
  }
  throw UsageError("unknown estimator id '" + id + "'");
}

CostId parse_cost_id(const std::string& id) {
  for (const auto& [name, value] : cost_id_table()) {
    if (name == id) return value;
  }
  throw UsageError("unknown cost id '" + id + "'");
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

void parallel_for(int count, int workers, const std::function<void(int)>& fn) {
  if (workers <= 0) {
    workers = static_cast<int>(std::thread::hardware_concurrency());
    if (workers <= 0) workers = 1;
  }
  workers = std::min(workers, count);
  if (workers <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      while (true) {
        const int i = next.fetch_add(1);
        if (i >= count) break;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

struct TrialOutcome {
  double error = 0.0;  // estimate minus truth
  double iters = 0.0;
  bool failed = false;
};

// Fixed-order compensated reduction of per-trial outcomes; identical bits for
// any worker count.
CellResult reduce_cell(const std::vector<TrialOutcome>& outcomes) {
  CompensatedSum se;   // sum of errors
  CompensatedSum se2;  // sum of squared errors
  CompensatedSum se4;  // sum of fourth powers
  CompensatedSum iters;
  int ok = 0;
  int failures = 0;
  for (const TrialOutcome& t : outcomes) {
    if (t.failed) {
      ++failures;
      continue;
    }
    ++ok;
    const double e = t.error;
    se.add(e);
    se2.add(e * e);
    se4.add(e * e * e * e);
    iters.add(t.iters);
  }
  CellResult result;
  result.row.failures = failures;
  if (ok > 0) {
    const double mse = se2.value() / ok;
    const double bias = se.value() / ok;
    result.row.mse = mse;
    result.row.bias = bias;
    result.row.variance = mse - bias * bias;
    result.row.mean_iters = iters.value() / ok;
    const double m4 = se4.value() / ok;
    result.se_mse = std::sqrt(std::max(0.0, m4 - mse * mse) / ok);
  } else {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    result.row.mse = result.row.bias = result.row.variance = nan;
    result.row.mean_iters = nan;
    result.se_mse = nan;
  }
  return result;
}

FixedPointConfig scenario_config(Scenario s, double z_tr) {
  FixedPointConfig cfg;
  cfg.fixed_iters = true;
  switch (s) {
    case Scenario::ideal:
      cfg.z0 = z_tr;
      cfg.max_iters = 1;
      break;
    case Scenario::almost_ideal:
      cfg.z0 = 1.001 * z_tr;
      cfg.max_iters = 10;
      break;
    case Scenario::realistic_low:
      cfg.z0 = 0.1;
      cfg.max_iters = 10;
      break;
    case Scenario::realistic_high:
      cfg.z0 = 5.0;
      cfg.max_iters = 10;
      break;
  }
  return cfg;
}

// Sweep convention for the multi-proposal bridge: the proposal budget is
// split between N(0, sigma_p^2) and a fixed wide N(0, 3^2); with M < 2 the
// second proposal is dropped (K = 1).
MultiProposalSampleSet draw_multi_proposal_set(const UnnormalizedModel& m,
                                               const ParamVector& theta, double sigma_p,
                                               int n, int m_count, std::uint64_t seed) {
  MultiProposalSampleSet out;
  out.model_samples = m.sampler(theta, n, mix_seed(seed, 1));
  out.proposals.push_back(gaussian_proposal(0.0, sigma_p));
  if (m_count >= 2) {
    out.proposals.push_back(gaussian_proposal(0.0, 3.0));
    const int m2 = m_count / 2;
    const int m1 = m_count - m2;
    out.proposal_samples.push_back(out.proposals[0].sample(m1, mix_seed(seed, 2)));
    out.proposal_samples.push_back(out.proposals[1].sample(m2, mix_seed(seed, 3)));
  } else {
    out.proposal_samples.push_back(out.proposals[0].sample(m_count, mix_seed(seed, 2)));
  }
  return out;
}

struct ZCellContext {
  ZId id;
  UnnormalizedModel model;
  ParamVector theta;
  Proposal proposal;
  double sigma_p;
  int n;
  int m;
  double z_tr;
  FixedPointConfig cfg;
};

TrialOutcome run_z_trial(const ZCellContext& ctx, std::uint64_t seed) {
  TrialOutcome out;
  try {
    double z_hat = 0.0;
    double iters = 0.0;
    switch (ctx.id) {
      case ZId::opt_umbrella: {
        const PointMatrix pts = sample_umbrella(ctx.model, ctx.theta, ctx.z_tr,
                                                ctx.proposal, ctx.n + ctx.m, seed);
        const EstimatorRun run =
            optimal_umbrella(pts, ctx.model, ctx.theta, ctx.proposal, ctx.cfg);
        z_hat = run.z_hat;
        iters = run.iters_used;
        break;
      }
      case ZId::multi_bridge: {
        const MultiProposalSampleSet ms = draw_multi_proposal_set(
            ctx.model, ctx.theta, ctx.sigma_p, ctx.n, ctx.m, seed);
        const EstimatorRun run = multi_proposal_bridge(ms, ctx.model, ctx.theta, ctx.cfg);
        z_hat = run.z_hat;
        iters = run.iters_used;
        break;
      }
      default: {
        const SampleSet s =
            draw_sample_set(ctx.model, ctx.theta, ctx.proposal, ctx.n, ctx.m, seed);
        switch (ctx.id) {
          case ZId::opt_bridge: {
            const EstimatorRun run =
                optimal_bridge(s, ctx.model, ctx.theta, ctx.proposal, ctx.cfg);
            z_hat = run.z_hat;
            iters = run.iters_used;
            break;
          }
          case ZId::mis: {
            const EstimatorRun run =
                mis_estimator(s, ctx.model, ctx.theta, ctx.proposal, ctx.cfg);
            z_hat = run.z_hat;
            iters = run.iters_used;
            break;
          }
          case ZId::self_is_mix: {
            const EstimatorRun run =
                self_is_with_mix(s, ctx.model, ctx.theta, ctx.proposal, ctx.cfg);
            z_hat = run.z_hat;
            iters = run.iters_used;
            break;
          }
          case ZId::quad_score: {
            const EstimatorRun run =
                quadratic_score_iteration(s, ctx.model, ctx.theta, ctx.proposal, ctx.cfg);
            z_hat = run.z_hat;
            iters = run.iters_used;
            break;
          }
          case ZId::geo:
            z_hat = geometric_mean_estimator(s, ctx.model, ctx.theta, ctx.proposal).z_geo;
            break;
          case ZId::stand_is:
            z_hat = standard_is(s, ctx.model, ctx.theta, ctx.proposal);
            break;
          case ZId::ris:
            z_hat = reverse_is(s, ctx.model, ctx.theta, ctx.proposal);
            break;
          default:
            break;
        }
        break;
      }
    }
    out.error = z_hat - ctx.z_tr;
    out.iters = iters;
  } catch (const Error&) {
    out.failed = true;
  }
  return out;
}

struct ThetaCellContext {
  CostId id;
  UnnormalizedModel model;
  Proposal proposal;
  int n;
  int m;
  double theta_tr;
  double z_tr;
};

TrialOutcome run_theta_trial(const ThetaCellContext& ctx, std::uint64_t seed) {
  TrialOutcome out;
  static const ScoringRule quad = quadratic_rule();
  static const ScoringRule reciprocal = reciprocal_rule();
  try {
    ParamVector theta(1);
    const SampleSet s = draw_sample_set(ctx.model, scalar_point(ctx.theta_tr),
                                        ctx.proposal, ctx.n, ctx.m, seed);
    auto objective = [&](double th) -> double {
      theta[0] = th;
      switch (ctx.id) {
        case CostId::nce_log:
          return j_nce(theta, ctx.z_tr, s, ctx.model, ctx.proposal).value;
        case CostId::quad:
          return j_scoring(quad, theta, ctx.z_tr, s, ctx.model, ctx.proposal).value;
        case CostId::reciprocal:
          return j_scoring(reciprocal, theta, ctx.z_tr, s, ctx.model, ctx.proposal).value;
        case CostId::mis:
          return j_mis(theta, ctx.z_tr, s, ctx.model, ctx.proposal).value;
        case CostId::ml:
          return j_ml(theta, s, ctx.model);
      }
      return 0.0;
    };
    const SolveReport report = minimize_1d(objective, default_theta_bracket(), 1e-8);
    out.error = report.argmin - ctx.theta_tr;
    out.iters = static_cast<double>(report.evaluations);
  } catch (const Error&) {
    out.failed = true;
  }
  return out;
}

// After this many consecutive degenerate-density failures at the start of a
// cell the remaining trials are marked failed without running; the rejection
// target depends only on the densities, not the draws, so the outcome cannot
// change across trials.
constexpr int kDegenerateShortCircuit = 8;

CellResult run_z_cell_impl(const CellSpec& cell) {
  ZCellContext ctx;
  ctx.id = parse_z_id(cell.id);
  ctx.model = gaussian_model();
  ctx.theta = scalar_point(cell.theta_tr);
  ctx.proposal = gaussian_proposal(0.0, cell.sigma_p);
  ctx.sigma_p = cell.sigma_p;
  ctx.n = cell.n;
  ctx.m = cell.m;
  ctx.z_tr = std::exp(ctx.model.analytic_log_Z(ctx.theta));
  ctx.cfg = scenario_config(cell.scenario, ctx.z_tr);

  std::vector<TrialOutcome> outcomes(cell.replications);

  if (ctx.id == ZId::opt_umbrella) {
    int probe = std::min(kDegenerateShortCircuit, cell.replications);
    bool all_degenerate = true;
    for (int r = 0; r < probe; ++r) {
      outcomes[r] = run_z_trial(ctx, mix_seed(cell.root_seed, r));
      all_degenerate = all_degenerate && outcomes[r].failed;
    }
    if (all_degenerate && probe == kDegenerateShortCircuit) {
      for (int r = probe; r < cell.replications; ++r) outcomes[r].failed = true;
    } else {
      parallel_for(cell.replications - probe, cell.workers, [&](int i) {
        const int r = probe + i;
        outcomes[r] = run_z_trial(ctx, mix_seed(cell.root_seed, r));
      });
    }
  } else {
    parallel_for(cell.replications, cell.workers, [&](int r) {
      outcomes[r] = run_z_trial(ctx, mix_seed(cell.root_seed, r));
    });
  }

  CellResult result = reduce_cell(outcomes);
  result.row.id = cell.id;
  result.row.sigma_p = cell.sigma_p;
  result.row.n = cell.n;
  result.row.m = cell.m;
  result.row.scenario = scenario_name(cell.scenario);
  result.row.replications = cell.replications;
  return result;
}

CellResult run_theta_cell_impl(const CellSpec& cell) {
  ThetaCellContext ctx;
  ctx.id = parse_cost_id(cell.id);
  ctx.model = gaussian_model();
  ctx.proposal = gaussian_proposal(0.0, cell.sigma_p);
  ctx.n = cell.n;
  ctx.m = cell.m;
  ctx.theta_tr = cell.theta_tr;
  ctx.z_tr = std::exp(ctx.model.analytic_log_Z(scalar_point(cell.theta_tr)));

  std::vector<TrialOutcome> outcomes(cell.replications);
  parallel_for(cell.replications, cell.workers, [&](int r) {
    outcomes[r] = run_theta_trial(ctx, mix_seed(cell.root_seed, r));
  });

  CellResult result = reduce_cell(outcomes);
  result.row.id = cell.id;
  result.row.sigma_p = cell.sigma_p;
  result.row.n = cell.n;
  result.row.m = cell.m;
  result.row.scenario = "";
  result.row.replications = cell.replications;
  return result;
}

void validate_spec(const ExperimentSpec& spec) {
  if (spec.ids.empty()) throw UsageError("no estimators/costs listed");
  if (spec.sigma_grid.empty()) throw UsageError("sigma grid is empty");
  for (double s : spec.sigma_grid) {
    if (!(s > 0.0)) throw UsageError("sigma_p values must be > 0");
  }
  if (spec.splits.empty()) throw UsageError("no (N, M) splits listed");
  for (const Split& split : spec.splits) {
    if (split.n < 1 || split.m < 1) throw UsageError("splits need N >= 1 and M >= 1");
  }
  if (spec.replications < 1) throw UsageError("replications must be >= 1");
  if (!(spec.theta_tr > 0.0)) throw UsageError("theta_tr must be > 0");
  if (spec.kind == ExperimentSpec::Kind::z_sweep) {
    for (const std::string& id : spec.ids) parse_z_id(id);
  } else {
    for (const std::string& id : spec.ids) parse_cost_id(id);
  }
}

}  // namespace

std::string scenario_name(Scenario s) {
  switch (s) {
    case Scenario::ideal:
      return "ideal";
    case Scenario::almost_ideal:
      return "almost-ideal";
    case Scenario::realistic_low:
      return "realistic-low";
    case Scenario::realistic_high:
      return "realistic-high";
  }
  return "?";
}

Scenario parse_scenario(const std::string& name) {
  if (name == "ideal") return Scenario::ideal;
  if (name == "almost-ideal") return Scenario::almost_ideal;
  if (name == "realistic-low") return Scenario::realistic_low;
  if (name == "realistic-high") return Scenario::realistic_high;
  throw UsageError("unknown scenario '" + name + "'");
}

const std::vector<std::string>& z_estimator_ids() {
  static const std::vector<std::string> ids = [] {
    std::vector<std::string> out;
    for (const auto& [name, value] : z_id_table()) out.push_back(name);
    return out;
  }();
  return ids;
}

const std::vector<std::string>& theta_cost_ids() {
  static const std::vector<std::string> ids = [] {
    std::vector<std::string> out;
    for (const auto& [name, value] : cost_id_table()) out.push_back(name);
    return out;
  }();
  return ids;
}

std::vector<double> default_sigma_grid() {
  std::vector<double> grid(12);
  const double lo = std::log(0.3);
  const double hi = std::log(5.0);
  for (int i = 0; i < 12; ++i) {
    grid[i] = std::exp(lo + (hi - lo) * i / 11.0);
  }
  return grid;
}

ExperimentSpec load_experiment_spec(const std::filesystem::path& config_path,
                                    ExperimentSpec::Kind kind) {
  std::ifstream in(config_path);
  if (!in) throw UsageError("cannot open config file " + config_path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw UsageError("config parse error: " + std::string(e.what()));
  }
  if (!doc.is_object()) throw UsageError("config must be a JSON object");

  ExperimentSpec spec;
  spec.kind = kind;
  const bool z = kind == ExperimentSpec::Kind::z_sweep;
  const std::string kind_name = z ? "z-sweep" : "theta-sweep";
  const std::string list_key = z ? "estimators" : "costs";

  for (const auto& [key, value] : doc.items()) {
    try {
      if (key == "kind") {
        if (value.get<std::string>() != kind_name) {
          throw UsageError("config kind '" + value.get<std::string>() +
                           "' does not match subcommand '" + kind_name + "'");
        }
      } else if (key == list_key) {
        spec.ids = value.get<std::vector<std::string>>();
      } else if (key == "sigma_grid") {
        spec.sigma_grid = value.get<std::vector<double>>();
      } else if (key == "splits") {
        for (const auto& pair : value) {
          if (!pair.is_array() || pair.size() != 2) {
            throw UsageError("splits must be [N, M] pairs");
          }
          spec.splits.push_back({pair[0].get<int>(), pair[1].get<int>()});
        }
      } else if (key == "scenario") {
        if (!z) throw UsageError("scenario applies to z-sweep configs only");
        spec.scenario = parse_scenario(value.get<std::string>());
      } else if (key == "replications") {
        spec.replications = value.get<int>();
      } else if (key == "root_seed") {
        spec.root_seed = value.get<std::uint64_t>();
      } else if (key == "theta_tr") {
        spec.theta_tr = value.get<double>();
      } else {
        throw UsageError("unknown config key '" + key + "'");
      }
    } catch (const nlohmann::json::exception& e) {
      throw UsageError("config key '" + key + "': " + std::string(e.what()));
    }
  }

  if (spec.ids.empty()) {
    spec.ids = z ? z_estimator_ids() : theta_cost_ids();
  }
  if (spec.sigma_grid.empty()) spec.sigma_grid = default_sigma_grid();
  if (spec.splits.empty()) {
    spec.splits = z ? std::vector<Split>{{20, 20}, {5, 35}, {35, 5}}
                    : std::vector<Split>{{5, 5}, {5, 15}, {1, 20}, {1, 100}};
  }
  if (spec.replications == 0) spec.replications = z ? 10000 : 2000;
  validate_spec(spec);
  return spec;
}

CellResult run_z_cell(const CellSpec& cell) { return run_z_cell_impl(cell); }

CellResult run_theta_cell(const CellSpec& cell) { return run_theta_cell_impl(cell); }

std::vector<SweepRow> run_z_sweep(const ExperimentSpec& spec) {
  validate_spec(spec);
  if (spec.kind != ExperimentSpec::Kind::z_sweep) {
    throw UsageError("run_z_sweep: spec kind must be z-sweep");
  }
  std::vector<SweepRow> rows;
  for (const std::string& id : spec.ids) {
    for (const Split& split : spec.splits) {
      for (double sigma : spec.sigma_grid) {
        CellSpec cell;
        cell.id = id;
        cell.sigma_p = sigma;
        cell.n = split.n;
        cell.m = split.m;
        cell.scenario = spec.scenario;
        cell.replications = spec.replications;
        cell.root_seed = spec.root_seed;
        cell.theta_tr = spec.theta_tr;
        cell.workers = spec.workers;
        rows.push_back(run_z_cell_impl(cell).row);
      }
    }
  }
  return rows;
}

std::vector<SweepRow> run_theta_sweep(const ExperimentSpec& spec) {
  validate_spec(spec);
  if (spec.kind != ExperimentSpec::Kind::theta_sweep) {
    throw UsageError("run_theta_sweep: spec kind must be theta-sweep");
  }
  std::vector<SweepRow> rows;
  for (const std::string& id : spec.ids) {
    const bool is_ml = parse_cost_id(id) == CostId::ml;
    for (const Split& split : spec.splits) {
      CellSpec cell;
      cell.id = id;
      cell.n = split.n;
      cell.m = split.m;
      cell.replications = spec.replications;
      cell.root_seed = spec.root_seed;
      cell.theta_tr = spec.theta_tr;
      cell.workers = spec.workers;
      if (is_ml) {
        // The exact-likelihood cost never reads the proposal side; one run
        // per split is repeated across the grid.
        cell.sigma_p = spec.sigma_grid.front();
        const SweepRow base = run_theta_cell_impl(cell).row;
        for (double sigma : spec.sigma_grid) {
          SweepRow row = base;
          row.sigma_p = sigma;
          rows.push_back(row);
        }
      } else {
        for (double sigma : spec.sigma_grid) {
          cell.sigma_p = sigma;
          rows.push_back(run_theta_cell_impl(cell).row);
        }
      }
    }
  }
  return rows;
}

void emit_csv(const std::vector<SweepRow>& rows, const std::filesystem::path& path,
              const ExperimentSpec& spec) {
  if (rows.empty()) throw PreconditionError("emit_csv: table is empty");

  std::vector<SweepRow> sorted = rows;
  std::sort(sorted.begin(), sorted.end(), [](const SweepRow& a, const SweepRow& b) {
    if (a.id != b.id) return a.id < b.id;
    if (a.n != b.n) return a.n < b.n;
    if (a.m != b.m) return a.m < b.m;
    return a.sigma_p < b.sigma_p;
  });

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("emit_csv: cannot open " + path.string());
  out << "estimator,sigma_p,N,M,scenario,R,mse,bias,variance,mean_iters,failures\n";
  for (const SweepRow& r : sorted) {
    out << r.id << ',' << format_double(r.sigma_p) << ',' << r.n << ',' << r.m << ','
        << r.scenario << ',' << r.replications << ',' << format_double(r.mse) << ','
        << format_double(r.bias) << ',' << format_double(r.variance) << ','
        << format_double(r.mean_iters) << ',' << r.failures << '\n';
  }
  if (!out) throw IoError("emit_csv: write failed for " + path.string());
  out.close();

  nlohmann::json meta;
  meta["kind"] = spec.kind == ExperimentSpec::Kind::z_sweep ? "z-sweep" : "theta-sweep";
  meta["ids"] = spec.ids;
  meta["sigma_grid"] = spec.sigma_grid;
  {
    nlohmann::json splits = nlohmann::json::array();
    for (const Split& s : spec.splits) splits.push_back({s.n, s.m});
    meta["splits"] = splits;
  }
  if (spec.kind == ExperimentSpec::Kind::z_sweep) {
    meta["scenario"] = scenario_name(spec.scenario);
    meta["scenario_mapping"] = {
        {"ideal", {{"z0", "Z_tr"}, {"T", 1}}},
        {"almost-ideal", {{"z0", "1.001 * Z_tr"}, {"T", 10}}},
        {"realistic-low", {{"z0", 0.1}, {"T", 10}}},
        {"realistic-high", {{"z0", 5.0}, {"T", 10}}},
    };
    meta["umbrella"] = {{"z_ref", "analytic Z(theta_tr)"}, {"draws", "N+M"}};
    meta["multi_bridge"] = {
        {"proposals", "N(0, sigma_p^2) plus N(0, 3^2); M split in half, K=1 when M<2"}};
  }
  meta["replications"] = spec.replications;
  meta["root_seed"] = spec.root_seed;
  meta["theta_tr"] = spec.theta_tr;
  meta["solver"] = {
      {"minimizer", "grid scan + golden section"},
      {"theta_bracket", {default_theta_bracket().lo, default_theta_bracket().hi}},
      {"theta_grid_points", default_theta_bracket().grid_points},
      {"log_z_bracket", {default_log_z_bracket().lo, default_log_z_bracket().hi}},
      {"z_grid_points", default_log_z_bracket().grid_points},
      {"tol", 1e-8},
  };
  meta["library_version"] = kVersion;

  const std::filesystem::path meta_path = path.string() + ".meta.json";
  std::ofstream meta_out(meta_path, std::ios::binary);
  if (!meta_out) throw IoError("emit_csv: cannot open " + meta_path.string());
  meta_out << meta.dump(2) << "\n";
  if (!meta_out) throw IoError("emit_csv: write failed for " + meta_path.string());
}

}  // namespace ebmz
