#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ebmz/model.hpp"
#include "ebmz/sample_set.hpp"

namespace ebmz {

// Class posterior eta = phi / (phi + nu Z q) and its complement, computed
// from one stabilized log-domain pair.
struct EtaPair {
  double eta = 0.0;
  double complement = 0.0;
};

EtaPair eta_pair(const Point& u, const ParamVector& theta, double z, double nu,
                 const UnnormalizedModel& m, const Proposal& p);

double eta(const Point& u, const ParamVector& theta, double z, double nu,
           const UnnormalizedModel& m, const Proposal& p);

// d eta / dZ in closed form: -nu phi q / (phi + nu Z q)^2.
double eta_dot(const Point& u, const ParamVector& theta, double z, double nu,
               const UnnormalizedModel& m, const Proposal& p);

// Loss V on predicted class probabilities, with derivative. Construction
// validates dV against central differences on an interior grid, and positivity
// plus monotone decrease for rules flagged proper.
struct ScoringRule {
  std::string name;
  std::function<double(double)> v;
  std::function<double(double)> dv;
  bool proper = false;
};

ScoringRule make_scoring_rule(std::string name, std::function<double(double)> v,
                              std::function<double(double)> dv, bool proper);

ScoringRule neg_log_rule();     // V = -log(eta), proper; recovers the NCE cost
ScoringRule quadratic_rule();   // V = (1 - eta)^2, proper
ScoringRule reciprocal_rule();  // V = 1/eta, not proper

// An unbounded V at an attained eta is a value-level barrier signal
// (+inf plus the flag), never an exception, so 1-D minimizers can step over.
struct CostEvaluation {
  double value = 0.0;
  double dz = 0.0;
  bool infinite = false;
};

struct CostBreakdown {
  std::vector<double> model_terms;
  std::vector<double> proposal_terms;
};

// Generalized contrastive cost: sum V(eta(y_n)) + sum V(1 - eta(x_m)),
// with the analytic partial derivative in Z.
CostEvaluation j_scoring(const ScoringRule& rule, const ParamVector& theta, double z,
                         const SampleSet& s, const UnnormalizedModel& m,
                         const Proposal& p, CostBreakdown* breakdown = nullptr);

// Negative Bernoulli log-likelihood of the labeled data; equals
// j_scoring with the neg-log rule by construction.
CostEvaluation j_nce(const ParamVector& theta, double z, const SampleSet& s,
                     const UnnormalizedModel& m, const Proposal& p,
                     CostBreakdown* breakdown = nullptr);

// Pooled-sample mixture cost; both sums run over {y} union {x}.
CostEvaluation j_mis(const ParamVector& theta, double z, const SampleSet& s,
                     const UnnormalizedModel& m, const Proposal& p,
                     CostBreakdown* breakdown = nullptr);

// Exact negative log-likelihood; needs analytic_log_Z and ignores the
// proposal side entirely.
double j_ml(const ParamVector& theta, const SampleSet& s, const UnnormalizedModel& m);

}  // namespace ebmz
