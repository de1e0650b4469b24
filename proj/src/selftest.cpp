#include <cmath>
#include <functional>
#include <ostream>
#include <string>

#include "ebmz/costs.hpp"
#include "ebmz/errors.hpp"
#include "ebmz/estimators.hpp"
#include "ebmz/experiment.hpp"
#include "ebmz/rng.hpp"
#include "ebmz/sample_set.hpp"
#include "ebmz/solvers.hpp"

namespace ebmz {

namespace {

UnnormalizedModel scaled_by(const UnnormalizedModel& m, double log_scale) {
  UnnormalizedModel out = m;
  auto base = m.log_phi;
  out.log_phi = [base, log_scale](const Point& y, const ParamVector& theta) {
    return base(y, theta) + log_scale;
  };
  return out;
}

}  // namespace

int run_selftest(std::ostream& out) {
  int failures = 0;
  auto check = [&](const std::string& name, const std::function<bool()>& body) {
    bool ok = false;
    std::string detail;
    try {
      ok = body();
    } catch (const std::exception& e) {
      detail = std::string(" (") + e.what() + ")";
    }
    out << (ok ? "[ok]   " : "[FAIL] ") << name << detail << "\n";
    if (!ok) ++failures;
  };

  const UnnormalizedModel model = gaussian_model();
  const ParamVector theta = scalar_point(1.0);

  check("sample-set weights: alpha1 + alpha2 = 1 and nu * alpha1 = alpha2", [&] {
    SplitRng rng(99);
    for (int i = 0; i < 200; ++i) {
      const int n = 1 + static_cast<int>(rng.uniform01() * 50);
      const int m = 1 + static_cast<int>(rng.uniform01() * 50);
      const SampleSet s =
          draw_sample_set(model, theta, gaussian_proposal(0.0, 2.0), n, m, i);
      if (std::abs(s.alpha1() + s.alpha2() - 1.0) > 1e-15) return false;
      if (std::abs(s.nu() * s.alpha1() - s.alpha2()) > 1e-15) return false;
    }
    return true;
  });

  check("draw_sample_set determinism", [&] {
    const Proposal q = gaussian_proposal(0.0, 1.0);
    const SampleSet a = draw_sample_set(model, theta, q, 5, 5, 7);
    const SampleSet b = draw_sample_set(model, theta, q, 5, 5, 7);
    return a.model_samples() == b.model_samples() &&
           a.proposal_samples() == b.proposal_samples();
  });

  check("proportional densities: every non-umbrella estimator returns c", [&] {
    const Proposal q = gaussian_proposal(0.0, 1.3);
    for (double c : {0.1, 1.0, std::sqrt(2.0 * 3.141592653589793), 100.0}) {
      UnnormalizedModel prop;
      prop.log_phi = [&q, c](const Point& y, const ParamVector&) {
        return std::log(c) + q.log_q(y);
      };
      const SampleSet s(q.sample(9, 11), q.sample(13, 12));
      FixedPointConfig cfg;
      cfg.rel_tol = 1e-13;  // the mixture map approaches c geometrically
      cfg.max_iters = 400;
      auto close = [&](double v) { return std::abs(v - c) <= 1e-12 * c; };
      if (!close(optimal_bridge(s, prop, theta, q, cfg).z_hat)) return false;
      if (!close(mis_estimator(s, prop, theta, q, cfg).z_hat)) return false;
      if (!close(self_is_with_mix(s, prop, theta, q, cfg).z_hat)) return false;
      if (!close(standard_is(s, prop, theta, q))) return false;
      if (!close(reverse_is(s, prop, theta, q))) return false;
      if (!close(geometric_mean_estimator(s, prop, theta, q).z_geo)) return false;
      if (!close(quadratic_score_iteration(s, prop, theta, q, cfg).z_hat)) return false;
    }
    return true;
  });

  check("NCE minimizer agrees with the optimal bridge fixed point", [&] {
    for (int i = 0; i < 5; ++i) {
      const Proposal q = gaussian_proposal(0.0, 0.5 + 0.8 * i);
      const SampleSet s = draw_sample_set(model, theta, q, 12 + i, 17 - i, 100 + i);
      FixedPointConfig cfg;
      cfg.rel_tol = 1e-12;
      cfg.max_iters = 500;
      const EstimatorRun bridge = optimal_bridge(s, model, theta, q, cfg);
      const SolveReport nce = minimize_over_z(
          [&](double z) { return j_nce(theta, z, s, model, q).value; },
          default_log_z_bracket(), 1e-10);
      if (std::abs(nce.argmin - bridge.z_hat) > 1e-6 * bridge.z_hat) return false;
    }
    return true;
  });

  check("quadratic-score fixed point zeroes the quadratic cost derivative", [&] {
    const ScoringRule quad = quadratic_rule();
    for (int i = 0; i < 5; ++i) {
      const Proposal q = gaussian_proposal(0.0, 0.7 + 0.6 * i);
      const SampleSet s = draw_sample_set(model, theta, q, 10, 14, 200 + i);
      FixedPointConfig cfg;
      cfg.rel_tol = 1e-12;
      cfg.max_iters = 500;
      const EstimatorRun run = quadratic_score_iteration(s, model, theta, q, cfg);
      const CostEvaluation cost = j_scoring(quad, theta, run.z_hat, s, model, q);
      if (std::abs(cost.dz) >= 1e-8) return false;
    }
    return true;
  });

  check("scale equivariance: s * phi scales every estimate by s", [&] {
    const Proposal q = gaussian_proposal(0.0, 2.0);
    const SampleSet s = draw_sample_set(model, theta, q, 10, 10, 31);
    for (double scale : {1e-6, 1e6}) {
      const UnnormalizedModel scaled = scaled_by(model, std::log(scale));
      FixedPointConfig cfg;
      FixedPointConfig cfg_scaled;
      cfg_scaled.z0 = scale;
      const double a = optimal_bridge(s, model, theta, q, cfg).z_hat;
      const double b = optimal_bridge(s, scaled, theta, q, cfg_scaled).z_hat;
      if (std::abs(b - scale * a) > 1e-12 * std::abs(scale * a)) return false;
      const double si = standard_is(s, model, theta, q);
      const double si_scaled = standard_is(s, scaled, theta, q);
      if (std::abs(si_scaled - scale * si) > 1e-12 * std::abs(scale * si)) return false;
    }
    return true;
  });

  check("minimize_1d: quadratic argmin", [&] {
    const SolveReport r = minimize_1d([](double z) { return (z - 3.0) * (z - 3.0); },
                                      Bracket1D{0.0, 10.0, 64}, 1e-8);
    return std::abs(r.argmin - 3.0) < 1e-7;
  });

  check("eta symmetry: phi = nu Z q gives 1/2", [&] {
    const Proposal q = gaussian_proposal(0.0, 1.0);
    UnnormalizedModel prop;
    prop.log_phi = [&q](const Point& y, const ParamVector&) {
      return std::log(2.0 * 1.7) + q.log_q(y);
    };
    return eta(scalar_point(0.4), theta, 1.7, 2.0, prop, q) == 0.5;
  });

  check("ideal scenario at sigma_p = theta_tr: MSE collapses", [&] {
    CellSpec cell;
    cell.id = "opt-bridge";
    cell.sigma_p = 1.0;
    cell.n = cell.m = 20;
    cell.scenario = Scenario::ideal;
    cell.replications = 50;
    cell.root_seed = 5;
    const CellResult r = run_z_cell(cell);
    return r.row.mse < 1e-24 && r.row.failures == 0;
  });

  out << (failures == 0 ? "selftest: all checks passed\n"
                        : "selftest: " + std::to_string(failures) + " check(s) failed\n");
  return failures == 0 ? 0 : 3;
}

}  // namespace ebmz
