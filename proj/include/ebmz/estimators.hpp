#pragma once

#include <functional>
#include <vector>

#include "ebmz/model.hpp"
#include "ebmz/sample_set.hpp"

namespace ebmz {

// Controls the fixed-point drivers. fixed_iters disables the tolerance stop
// and runs exactly max_iters steps, reproducing a fixed-T recursion.
struct FixedPointConfig {
  double z0 = 1.0;
  int max_iters = 100;
  double rel_tol = 1e-10;
  bool fixed_iters = false;
};

struct EstimatorRun {
  double z_hat = 0.0;
  std::vector<double> trace;  // trace[0] == z0
  bool converged = false;
  int iters_used = 0;
};

// Positive bridge function b(y, theta, Z), supplied in log scale. When
// depends_on_z is false the estimator is a single-shot ratio of sample means.
struct BridgeFunction {
  std::function<double(const Point&, const ParamVector&, double)> log_b;
  bool depends_on_z = true;
};

// Iterates Z <- [(1/M) sum phi(x)/(a1 phi + a2 Z q)] /
//              [(1/N) sum q(y)/(a1 phi + a2 Z q)].
EstimatorRun optimal_bridge(const SampleSet& s, const UnnormalizedModel& m,
                            const ParamVector& theta, const Proposal& p,
                            const FixedPointConfig& cfg);

// Deterministic-mixture estimator over the pooled samples:
// Z <- (1/(N+M)) sum Z phi(u)/(a1 phi + a2 Z q).
EstimatorRun mis_estimator(const SampleSet& s, const UnnormalizedModel& m,
                           const ParamVector& theta, const Proposal& p,
                           const FixedPointConfig& cfg);

// Ratio form of the mixture estimator; both sums run over the pooled samples.
EstimatorRun self_is_with_mix(const SampleSet& s, const UnnormalizedModel& m,
                              const ParamVector& theta, const Proposal& p,
                              const FixedPointConfig& cfg);

// (1/M) sum phi(x_m)/q(x_m); non-recursive.
double standard_is(const SampleSet& s, const UnnormalizedModel& m,
                   const ParamVector& theta, const Proposal& p);

// [ (1/N) sum q(y_n)/phi(y_n) ]^-1; non-recursive and positively biased.
double reverse_is(const SampleSet& s, const UnnormalizedModel& m,
                  const ParamVector& theta, const Proposal& p);

struct GeoEstimate {
  double z_geo = 0.0;  // sqrt(standard_is * reverse_is)
  double z_bad = 0.0;  // sqrt(N/M) * z_geo
};

GeoEstimate geometric_mean_estimator(const SampleSet& s, const UnnormalizedModel& m,
                                     const ParamVector& theta, const Proposal& p);

// Umbrella estimator over draws from r(y) ~ |phi_bar - q|:
// Z <- [sum phi/|phi - Z q|] / [sum q/|phi - Z q|].
EstimatorRun optimal_umbrella(const PointMatrix& umbrella_points,
                              const UnnormalizedModel& m, const ParamVector& theta,
                              const Proposal& p, const FixedPointConfig& cfg);

// Bridge identity Z = E_q[b phi] / E_phi_bar[b q] with empirical means.
EstimatorRun generic_bridge(const BridgeFunction& b, const SampleSet& s,
                            const UnnormalizedModel& m, const ParamVector& theta,
                            const Proposal& p, const FixedPointConfig& cfg);

// Fixed point of the quadratic-score stationarity condition:
// Z <- [(1/M) sum phi^2 q/(phi + nu Z q)^3] / [(1/N) sum phi q^2/(phi + nu Z q)^3].
EstimatorRun quadratic_score_iteration(const SampleSet& s, const UnnormalizedModel& m,
                                       const ParamVector& theta, const Proposal& p,
                                       const FixedPointConfig& cfg);

// K-class reverse logistic regression: unnormalized densities phi_k with
// samples from each, one normalizer pinned to 1 for identifiability.
struct RlrProblem {
  std::vector<std::function<double(const Point&)>> log_phi_k;
  std::vector<PointMatrix> samples_k;
  int pinned_index = 0;

  int k() const { return static_cast<int>(log_phi_k.size()); }
};

// Maximizes the multinomial log-likelihood over lambda_k = log Z_k via
// coordinate sweeps of the 1-D minimizer; stops at gradient sup-norm < 1e-9.
// The pinned entry is returned as exactly 1.
Eigen::VectorXd rlr_estimate(const RlrProblem& problem);

// Model samples plus K proposals with separate draws per proposal.
struct MultiProposalSampleSet {
  PointMatrix model_samples;
  std::vector<Proposal> proposals;
  std::vector<PointMatrix> proposal_samples;

  int k() const { return static_cast<int>(proposals.size()); }
};

// Bridge iteration against the proposal mixture sum_k (M_k/M) q_k over the
// pooled proposal draws. With K = 1 the recursion is the optimal bridge,
// sharing its exact arithmetic path.
EstimatorRun multi_proposal_bridge(const MultiProposalSampleSet& s_multi,
                                   const UnnormalizedModel& m, const ParamVector& theta,
                                   const FixedPointConfig& cfg);

}  // namespace ebmz
