#include "ebmz/estimators.hpp"

#include <cmath>
#include <sstream>

#include "ebmz/errors.hpp"
#include "ebmz/numeric.hpp"
#include "ebmz/solvers.hpp"

namespace ebmz {

namespace {

// |phi - Z q| below this (log scale) is treated as an exact cancellation.
constexpr double kLogSingularFloor = -690.7755278982138;  // log(1e-300)

void validate_config(const FixedPointConfig& cfg) {
  if (!(cfg.z0 > 0.0)) throw PreconditionError("FixedPointConfig: Z0 must be > 0");
  if (cfg.max_iters < 1) throw PreconditionError("FixedPointConfig: T must be >= 1");
  if (!(cfg.rel_tol > 0.0 && cfg.rel_tol < 1.0)) {
    throw PreconditionError("FixedPointConfig: rel_tol must lie in (0, 1)");
  }
}

EstimatorRun run_fixed_point(const std::function<double(double)>& step,
                             const FixedPointConfig& cfg) {
  validate_config(cfg);
  EstimatorRun run;
  run.trace.reserve(cfg.max_iters + 1);
  run.trace.push_back(cfg.z0);
  double z = cfg.z0;
  for (int t = 0; t < cfg.max_iters; ++t) {
    const double next = step(z);
    if (!std::isfinite(next) || !(next > 0.0)) {
      std::ostringstream msg;
      msg << "fixed-point iteration diverged at step " << t + 1 << " (iterate " << next
          << ")";
      throw DivergenceError(msg.str(), run.trace);
    }
    run.trace.push_back(next);
    const bool tol_met = std::abs(next - z) <= cfg.rel_tol * std::abs(next);
    z = next;
    if (!cfg.fixed_iters && tol_met) {
      run.converged = true;
      break;
    }
  }
  if (cfg.fixed_iters) {
    const double last = run.trace.back();
    const double prev = run.trace[run.trace.size() - 2];
    run.converged = std::abs(last - prev) <= cfg.rel_tol * std::abs(last);
  }
  run.z_hat = run.trace.back();
  run.iters_used = static_cast<int>(run.trace.size()) - 1;
  return run;
}

Eigen::ArrayXd checked_log_density(const std::function<double(const Point&)>& f,
                                   const PointMatrix& pts, const char* which) {
  Eigen::ArrayXd out = eval_log_density(f, pts);
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    if (std::isnan(out[i]) || out[i] == kPosInf) {
      throw EvaluationError(std::string(which) + " is not finite at sample " +
                            std::to_string(i));
    }
  }
  return out;
}

struct BridgeArrays {
  Eigen::ArrayXd lphi_x, lq_x;  // proposal-side samples
  Eigen::ArrayXd lphi_y, lq_y;  // model-side samples
  int n = 0;
  int m = 0;
};

// Entry check: log_phi must be finite wherever q assigns positive density.
void require_model_support(const Eigen::ArrayXd& lphi, const Eigen::ArrayXd& lq,
                           const char* side) {
  for (Eigen::Index i = 0; i < lphi.size(); ++i) {
    if (lphi[i] == kNegInf && lq[i] != kNegInf) {
      throw EvaluationError(std::string("log_phi is -inf where q > 0 (") + side +
                            " sample " + std::to_string(i) + ")");
    }
  }
}

BridgeArrays eval_bridge_arrays(const SampleSet& s, const UnnormalizedModel& m,
                                const ParamVector& theta, const Proposal& p) {
  BridgeArrays a;
  auto lphi = [&](const Point& u) { return m.log_phi(u, theta); };
  a.lphi_y = checked_log_density(lphi, s.model_samples(), "log_phi");
  a.lq_y = checked_log_density(p.log_q, s.model_samples(), "log_q");
  a.lphi_x = checked_log_density(lphi, s.proposal_samples(), "log_phi");
  a.lq_x = checked_log_density(p.log_q, s.proposal_samples(), "log_q");
  a.n = s.n();
  a.m = s.m();
  require_model_support(a.lphi_y, a.lq_y, "model");
  require_model_support(a.lphi_x, a.lq_x, "proposal");
  return a;
}

// Shared recursion for the optimal bridge; multi_proposal_bridge feeds the
// same core with mixture-proposal arrays so the K = 1 path is bit-identical.
EstimatorRun bridge_core(const BridgeArrays& a, const FixedPointConfig& cfg) {
  const double a1 = static_cast<double>(a.n) / (a.n + a.m);
  const double a2 = static_cast<double>(a.m) / (a.n + a.m);
  const double la1 = std::log(a1);
  const double la2 = std::log(a2);
  auto step = [&](double z) {
    const double lz = std::log(z);
    CompensatedSum num;
    for (Eigen::Index i = 0; i < a.lphi_x.size(); ++i) {
      const double denom = log_sum_exp(la1 + a.lphi_x[i], la2 + lz + a.lq_x[i]);
      num.add(std::exp(a.lphi_x[i] - denom));
    }
    CompensatedSum den;
    for (Eigen::Index i = 0; i < a.lphi_y.size(); ++i) {
      const double denom = log_sum_exp(la1 + a.lphi_y[i], la2 + lz + a.lq_y[i]);
      den.add(std::exp(a.lq_y[i] - denom));
    }
    const double den_mean = den.value() / a.n;
    if (den_mean == 0.0) {
      throw DegenerateSamplesError("optimal_bridge: denominator sum is zero");
    }
    return (num.value() / a.m) / den_mean;
  };
  return run_fixed_point(step, cfg);
}

}  // namespace

EstimatorRun optimal_bridge(const SampleSet& s, const UnnormalizedModel& m,
                            const ParamVector& theta, const Proposal& p,
                            const FixedPointConfig& cfg) {
  return bridge_core(eval_bridge_arrays(s, m, theta, p), cfg);
}

EstimatorRun mis_estimator(const SampleSet& s, const UnnormalizedModel& m,
                           const ParamVector& theta, const Proposal& p,
                           const FixedPointConfig& cfg) {
  const BridgeArrays a = eval_bridge_arrays(s, m, theta, p);
  const double la1 = std::log(s.alpha1());
  const double la2 = std::log(s.alpha2());
  const int total = a.n + a.m;
  Eigen::ArrayXd lphi_u(total);
  Eigen::ArrayXd lq_u(total);
  lphi_u << a.lphi_y, a.lphi_x;
  lq_u << a.lq_y, a.lq_x;
  auto step = [&, la1, la2, total](double z) {
    const double lz = std::log(z);
    CompensatedSum sum;
    for (Eigen::Index i = 0; i < total; ++i) {
      const double denom = log_sum_exp(la1 + lphi_u[i], la2 + lz + lq_u[i]);
      sum.add(std::exp(lz + lphi_u[i] - denom));
    }
    return sum.value() / total;
  };
  return run_fixed_point(step, cfg);
}

EstimatorRun self_is_with_mix(const SampleSet& s, const UnnormalizedModel& m,
                              const ParamVector& theta, const Proposal& p,
                              const FixedPointConfig& cfg) {
  const BridgeArrays a = eval_bridge_arrays(s, m, theta, p);
  const double la1 = std::log(s.alpha1());
  const double la2 = std::log(s.alpha2());
  Eigen::ArrayXd lphi_u(a.n + a.m);
  Eigen::ArrayXd lq_u(a.n + a.m);
  lphi_u << a.lphi_y, a.lphi_x;
  lq_u << a.lq_y, a.lq_x;
  auto step = [&, la1, la2](double z) {
    const double lz = std::log(z);
    CompensatedSum num;
    CompensatedSum den;
    for (Eigen::Index i = 0; i < lphi_u.size(); ++i) {
      const double denom = log_sum_exp(la1 + lphi_u[i], la2 + lz + lq_u[i]);
      num.add(std::exp(lphi_u[i] - denom));
      den.add(std::exp(lq_u[i] - denom));
    }
    if (den.value() == 0.0) {
      throw DegenerateSamplesError("self_is_with_mix: denominator sum is zero");
    }
    return num.value() / den.value();
  };
  return run_fixed_point(step, cfg);
}

double standard_is(const SampleSet& s, const UnnormalizedModel& m,
                   const ParamVector& theta, const Proposal& p) {
  auto lphi = [&](const Point& u) { return m.log_phi(u, theta); };
  const Eigen::ArrayXd lphi_x = checked_log_density(lphi, s.proposal_samples(), "log_phi");
  const Eigen::ArrayXd lq_x = checked_log_density(p.log_q, s.proposal_samples(), "log_q");
  for (Eigen::Index i = 0; i < lq_x.size(); ++i) {
    if (lq_x[i] == kNegInf) {
      throw ZeroDensityError("standard_is: q is zero at proposal sample " +
                             std::to_string(i));
    }
  }
  return std::exp(log_mean_exp(lphi_x - lq_x));
}

double reverse_is(const SampleSet& s, const UnnormalizedModel& m,
                  const ParamVector& theta, const Proposal& p) {
  auto lphi = [&](const Point& u) { return m.log_phi(u, theta); };
  const Eigen::ArrayXd lphi_y = checked_log_density(lphi, s.model_samples(), "log_phi");
  const Eigen::ArrayXd lq_y = checked_log_density(p.log_q, s.model_samples(), "log_q");
  for (Eigen::Index i = 0; i < lphi_y.size(); ++i) {
    if (lphi_y[i] == kNegInf) {
      throw ZeroDensityError("reverse_is: phi is zero at model sample " +
                             std::to_string(i));
    }
  }
  return std::exp(-log_mean_exp(lq_y - lphi_y));
}

GeoEstimate geometric_mean_estimator(const SampleSet& s, const UnnormalizedModel& m,
                                     const ParamVector& theta, const Proposal& p) {
  const double stand = standard_is(s, m, theta, p);
  const double reverse = reverse_is(s, m, theta, p);
  GeoEstimate g;
  g.z_geo = std::exp(0.5 * (std::log(stand) + std::log(reverse)));
  g.z_bad = std::sqrt(static_cast<double>(s.n()) / s.m()) * g.z_geo;
  return g;
}

EstimatorRun optimal_umbrella(const PointMatrix& umbrella_points,
                              const UnnormalizedModel& m, const ParamVector& theta,
                              const Proposal& p, const FixedPointConfig& cfg) {
  if (umbrella_points.cols() < 1) {
    throw PreconditionError("optimal_umbrella: at least one umbrella draw is required");
  }
  auto lphi = [&](const Point& u) { return m.log_phi(u, theta); };
  const Eigen::ArrayXd lphi_u = checked_log_density(lphi, umbrella_points, "log_phi");
  const Eigen::ArrayXd lq_u = checked_log_density(p.log_q, umbrella_points, "log_q");

  auto step = [&](double z) {
    const double lz = std::log(z);
    Eigen::ArrayXd lnum(lphi_u.size());
    Eigen::ArrayXd lden(lphi_u.size());
    for (Eigen::Index i = 0; i < lphi_u.size(); ++i) {
      const double d = log_abs_diff_exp(lphi_u[i], lz + lq_u[i]);
      if (d < kLogSingularFloor) {
        throw SingularIterateError(
            "optimal_umbrella: |phi - Z q| vanished at sample " + std::to_string(i) +
                " for iterate " + std::to_string(z),
            z, static_cast<int>(i));
      }
      lnum[i] = lphi_u[i] - d;
      lden[i] = lq_u[i] - d;
    }
    const double den = log_sum_exp(lden);
    if (den == kNegInf) {
      throw DegenerateSamplesError("optimal_umbrella: denominator sum is zero");
    }
    return std::exp(log_sum_exp(lnum) - den);
  };
  return run_fixed_point(step, cfg);
}

EstimatorRun generic_bridge(const BridgeFunction& b, const SampleSet& s,
                            const UnnormalizedModel& m, const ParamVector& theta,
                            const Proposal& p, const FixedPointConfig& cfg) {
  if (!b.log_b) throw PreconditionError("generic_bridge: bridge function is empty");
  const BridgeArrays a = eval_bridge_arrays(s, m, theta, p);

  auto eval_at = [&](double z) {
    Eigen::ArrayXd lnum(a.m);
    for (int i = 0; i < a.m; ++i) {
      const double lb = b.log_b(s.proposal_samples().col(i), theta, z);
      if (std::isnan(lb) || lb == kPosInf) {
        throw EvaluationError("generic_bridge: bridge function not finite at a sample");
      }
      lnum[i] = lb + a.lphi_x[i];
    }
    Eigen::ArrayXd lden(a.n);
    for (int i = 0; i < a.n; ++i) {
      const double lb = b.log_b(s.model_samples().col(i), theta, z);
      if (std::isnan(lb) || lb == kPosInf) {
        throw EvaluationError("generic_bridge: bridge function not finite at a sample");
      }
      lden[i] = lb + a.lq_y[i];
    }
    const double den = log_mean_exp(lden);
    if (den == kNegInf) {
      throw DegenerateSamplesError("generic_bridge: denominator sum is zero");
    }
    return std::exp(log_mean_exp(lnum) - den);
  };

  if (!b.depends_on_z) {
    validate_config(cfg);
    EstimatorRun run;
    run.trace = {cfg.z0, eval_at(cfg.z0)};
    run.z_hat = run.trace.back();
    run.converged = true;
    run.iters_used = 1;
    return run;
  }
  return run_fixed_point(eval_at, cfg);
}

EstimatorRun quadratic_score_iteration(const SampleSet& s, const UnnormalizedModel& m,
                                       const ParamVector& theta, const Proposal& p,
                                       const FixedPointConfig& cfg) {
  const BridgeArrays a = eval_bridge_arrays(s, m, theta, p);
  const double lnu = std::log(s.nu());
  auto step = [&, lnu](double z) {
    const double lz = std::log(z);
    Eigen::ArrayXd lnum(a.m);
    for (int i = 0; i < a.m; ++i) {
      const double d = log_sum_exp(a.lphi_x[i], lnu + lz + a.lq_x[i]);
      lnum[i] = 2.0 * a.lphi_x[i] + a.lq_x[i] - 3.0 * d;
    }
    Eigen::ArrayXd lden(a.n);
    for (int i = 0; i < a.n; ++i) {
      const double d = log_sum_exp(a.lphi_y[i], lnu + lz + a.lq_y[i]);
      lden[i] = a.lphi_y[i] + 2.0 * a.lq_y[i] - 3.0 * d;
    }
    const double den = log_mean_exp(lden);
    if (den == kNegInf) {
      throw DegenerateSamplesError("quadratic_score_iteration: denominator sum is zero");
    }
    return std::exp(log_mean_exp(lnum) - den);
  };
  return run_fixed_point(step, cfg);
}

Eigen::VectorXd rlr_estimate(const RlrProblem& problem) {
  const int k = problem.k();
  if (k < 2) throw PreconditionError("rlr_estimate: at least two classes are required");
  if (static_cast<int>(problem.samples_k.size()) != k) {
    throw PreconditionError("rlr_estimate: one sample set per density is required");
  }
  if (problem.pinned_index < 0 || problem.pinned_index >= k) {
    throw PreconditionError("rlr_estimate: pinned index out of range");
  }

  // Pool the samples and cache log N_k + log phi_k at every pooled point.
  std::vector<int> counts(k);
  int total = 0;
  for (int c = 0; c < k; ++c) {
    counts[c] = static_cast<int>(problem.samples_k[c].cols());
    if (counts[c] < 1) throw PreconditionError("rlr_estimate: every N_k must be >= 1");
    total += counts[c];
  }
  Eigen::MatrixXd scores(k, total);  // scores(c, i) = log N_c + log phi_c(u_i)
  std::vector<int> labels(total);
  {
    int i = 0;
    for (int c = 0; c < k; ++c) {
      for (int j = 0; j < counts[c]; ++j, ++i) {
        labels[i] = c;
        const Point u = problem.samples_k[c].col(j);
        for (int d = 0; d < k; ++d) {
          const double lp = problem.log_phi_k[d](u);
          if (!std::isfinite(lp)) {
            throw EvaluationError("rlr_estimate: log phi_" + std::to_string(d) +
                                  " not finite at a pooled sample");
          }
          scores(d, i) = std::log(static_cast<double>(counts[d])) + lp;
        }
      }
    }
  }

  Eigen::VectorXd lambda = Eigen::VectorXd::Zero(k);

  auto neg_log_lik = [&](const Eigen::VectorXd& lam) {
    CompensatedSum nll;
    Eigen::ArrayXd row(k);
    for (int i = 0; i < total; ++i) {
      for (int c = 0; c < k; ++c) row[c] = scores(c, i) - lam[c];
      nll.add(log_sum_exp(row) - row[labels[i]]);
    }
    return nll.value();
  };

  // d(log lik)/d lambda_c = sum_i p_c(u_i) - N_c.
  auto gradient = [&](const Eigen::VectorXd& lam) {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(k);
    Eigen::ArrayXd row(k);
    for (int i = 0; i < total; ++i) {
      for (int c = 0; c < k; ++c) row[c] = scores(c, i) - lam[c];
      const double l = log_sum_exp(row);
      for (int c = 0; c < k; ++c) g[c] += std::exp(row[c] - l);
    }
    for (int c = 0; c < k; ++c) g[c] -= counts[c];
    return g;
  };

  // Curvature of the log-likelihood in one coordinate: -sum_i p_c (1 - p_c).
  auto coordinate_curvature = [&](const Eigen::VectorXd& lam, int c) {
    Eigen::ArrayXd row(k);
    double h = 0.0;
    for (int i = 0; i < total; ++i) {
      for (int d = 0; d < k; ++d) row[d] = scores(d, i) - lam[d];
      const double l = log_sum_exp(row);
      const double pc = std::exp(row[c] - l);
      h += pc * (1.0 - pc);
    }
    return h;
  };

  constexpr double kGradTol = 1e-9;

  // Globalize with a coordinate sweep of the 1-D minimizer, then polish with
  // coordinate Newton steps until the gradient tolerance is met.
  for (int c = 0; c < k; ++c) {
    if (c == problem.pinned_index) continue;
    Bracket1D bracket{lambda[c] - 12.0, lambda[c] + 12.0, 48};
    const SolveReport r = minimize_1d(
        [&](double lc) {
          Eigen::VectorXd lam = lambda;
          lam[c] = lc;
          return neg_log_lik(lam);
        },
        bracket, 1e-10);
    lambda[c] = r.argmin;
  }

  bool converged = false;
  for (int sweep = 0; sweep < 200 && !converged; ++sweep) {
    const Eigen::VectorXd g = gradient(lambda);
    double sup = 0.0;
    for (int c = 0; c < k; ++c) {
      if (c == problem.pinned_index) continue;
      sup = std::max(sup, std::abs(g[c]));
    }
    if (sup < kGradTol) {
      converged = true;
      break;
    }
    for (int c = 0; c < k; ++c) {
      if (c == problem.pinned_index) continue;
      const double h = coordinate_curvature(lambda, c);
      if (!(h > 0.0)) {
        std::ostringstream msg;
        msg << "rlr_estimate: no ascent direction found (curvature " << h
            << " in coordinate " << c << ", last lambda:";
        for (int d = 0; d < k; ++d) msg << " " << lambda[d];
        msg << ")";
        throw OptimizationError(msg.str());
      }
      const double gc = gradient(lambda)[c];
      const double step = gc / h;
      // Ascent on the log-likelihood; cap the step so early iterates stay sane.
      lambda[c] += std::clamp(step, -4.0, 4.0);
      if (!std::isfinite(lambda[c])) {
        throw OptimizationError("rlr_estimate: non-finite iterate");
      }
    }
  }
  if (!converged) {
    std::ostringstream msg;
    msg << "rlr_estimate: gradient tolerance not reached (last lambda:";
    for (int d = 0; d < k; ++d) msg << " " << lambda[d];
    msg << ")";
    throw OptimizationError(msg.str());
  }

  Eigen::VectorXd z(k);
  for (int c = 0; c < k; ++c) z[c] = std::exp(lambda[c]);
  z[problem.pinned_index] = 1.0;
  return z;
}

EstimatorRun multi_proposal_bridge(const MultiProposalSampleSet& s_multi,
                                   const UnnormalizedModel& m, const ParamVector& theta,
                                   const FixedPointConfig& cfg) {
  const int k = s_multi.k();
  if (k < 1) throw PreconditionError("multi_proposal_bridge: K must be >= 1");
  if (static_cast<int>(s_multi.proposal_samples.size()) != k) {
    throw PreconditionError("multi_proposal_bridge: one draw set per proposal");
  }
  if (s_multi.model_samples.cols() < 1) {
    throw PreconditionError("multi_proposal_bridge: N must be >= 1");
  }
  int m_total = 0;
  for (const auto& draws : s_multi.proposal_samples) {
    if (draws.cols() < 1) {
      throw PreconditionError("multi_proposal_bridge: every M_k must be >= 1");
    }
    m_total += static_cast<int>(draws.cols());
  }

  // The K-proposal recursion is the optimal bridge against the mixture
  // sum_k (M_k/M) q_k evaluated over the pooled draws.
  std::vector<double> log_w(k);
  for (int c = 0; c < k; ++c) {
    log_w[c] = std::log(static_cast<double>(s_multi.proposal_samples[c].cols()) /
                        static_cast<double>(m_total));
  }
  auto log_q_mix = [&](const Point& u) {
    Eigen::ArrayXd parts(k);
    for (int c = 0; c < k; ++c) parts[c] = log_w[c] + s_multi.proposals[c].log_q(u);
    return log_sum_exp(parts);
  };

  PointMatrix pooled_x(s_multi.model_samples.rows(), m_total);
  {
    int col = 0;
    for (const auto& draws : s_multi.proposal_samples) {
      pooled_x.middleCols(col, draws.cols()) = draws;
      col += static_cast<int>(draws.cols());
    }
  }

  BridgeArrays a;
  auto lphi = [&](const Point& u) { return m.log_phi(u, theta); };
  a.lphi_y = checked_log_density(lphi, s_multi.model_samples, "log_phi");
  a.lq_y = checked_log_density(log_q_mix, s_multi.model_samples, "log_q");
  a.lphi_x = checked_log_density(lphi, pooled_x, "log_phi");
  a.lq_x = checked_log_density(log_q_mix, pooled_x, "log_q");
  a.n = static_cast<int>(s_multi.model_samples.cols());
  a.m = m_total;
  require_model_support(a.lphi_y, a.lq_y, "model");
  require_model_support(a.lphi_x, a.lq_x, "proposal");
  return bridge_core(a, cfg);
}

}  // namespace ebmz
