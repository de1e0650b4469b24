#include "ebmz/costs.hpp"

#include <cmath>

#include "ebmz/errors.hpp"
#include "ebmz/numeric.hpp"

namespace ebmz {

namespace {

void check_log_density(double value, const char* which) {
  if (std::isnan(value) || value == kPosInf) {
    throw EvaluationError(std::string(which) + " is not finite at a sample");
  }
}

struct LogEta {
  double log_eta;
  double log_complement;
};

// Both logs from one stabilized pair: L = lse(lphi, lnu + lz + lq).
LogEta log_eta_pair(double lphi, double lq, double lnu, double lz) {
  check_log_density(lphi, "log_phi");
  check_log_density(lq, "log_q");
  if (lphi == kNegInf && lq == kNegInf) {
    throw UndefinedPosteriorError("eta: both densities vanish at the point");
  }
  const double shifted = lnu + lz + lq;
  const double l = log_sum_exp(lphi, shifted);
  return {lphi - l, shifted - l};
}

double log_eta_dot_magnitude(double lphi, double lq, double lnu, double lz) {
  const double l = log_sum_exp(lphi, lnu + lz + lq);
  return lnu + lphi + lq - 2.0 * l;
}

void validate_eta_args(double z, double nu) {
  if (!(z > 0.0)) throw PreconditionError("eta: Z must be > 0");
  if (!(nu > 0.0)) throw PreconditionError("eta: nu must be > 0");
}

}  // namespace

EtaPair eta_pair(const Point& u, const ParamVector& theta, double z, double nu,
                 const UnnormalizedModel& m, const Proposal& p) {
  validate_eta_args(z, nu);
  const LogEta le = log_eta_pair(m.log_phi(u, theta), p.log_q(u), std::log(nu), std::log(z));
  return {std::exp(le.log_eta), std::exp(le.log_complement)};
}

double eta(const Point& u, const ParamVector& theta, double z, double nu,
           const UnnormalizedModel& m, const Proposal& p) {
  return eta_pair(u, theta, z, nu, m, p).eta;
}

double eta_dot(const Point& u, const ParamVector& theta, double z, double nu,
               const UnnormalizedModel& m, const Proposal& p) {
  validate_eta_args(z, nu);
  const double lphi = m.log_phi(u, theta);
  const double lq = p.log_q(u);
  check_log_density(lphi, "log_phi");
  check_log_density(lq, "log_q");
  if (lphi == kNegInf && lq == kNegInf) {
    throw UndefinedPosteriorError("eta_dot: both densities vanish at the point");
  }
  const double mag = log_eta_dot_magnitude(lphi, lq, std::log(nu), std::log(z));
  const double v = std::exp(mag);
  return v == 0.0 ? 0.0 : -v;
}

ScoringRule make_scoring_rule(std::string name, std::function<double(double)> v,
                              std::function<double(double)> dv, bool proper) {
  if (!v || !dv) throw PreconditionError("make_scoring_rule: V and dV are required");
  constexpr double h = 1e-6;
  for (int i = 1; i <= 24; ++i) {
    const double e = i / 25.0;
    const double ve = v(e);
    const double de = dv(e);
    if (!std::isfinite(ve) || !std::isfinite(de)) {
      throw PreconditionError("make_scoring_rule(" + name +
                              "): V or dV not finite on (0,1)");
    }
    if (proper && !(ve > 0.0 && de < 0.0)) {
      throw PreconditionError("make_scoring_rule(" + name +
                              "): proper rules must be positive and decreasing");
    }
    const double fd = (v(e + h) - v(e - h)) / (2.0 * h);
    if (std::abs(fd - de) > 1e-6 * std::max(1.0, std::abs(de))) {
      throw PreconditionError("make_scoring_rule(" + name +
                              "): dV disagrees with finite differences of V");
    }
  }
  ScoringRule rule;
  rule.name = std::move(name);
  rule.v = std::move(v);
  rule.dv = std::move(dv);
  rule.proper = proper;
  return rule;
}

ScoringRule neg_log_rule() {
  return make_scoring_rule(
      "neg-log", [](double e) { return -std::log(e); },
      [](double e) { return -1.0 / e; }, true);
}

ScoringRule quadratic_rule() {
  return make_scoring_rule(
      "quadratic", [](double e) { return (1.0 - e) * (1.0 - e); },
      [](double e) { return -2.0 * (1.0 - e); }, true);
}

ScoringRule reciprocal_rule() {
  return make_scoring_rule(
      "reciprocal", [](double e) { return 1.0 / e; },
      [](double e) { return -1.0 / (e * e); }, false);
}

CostEvaluation j_scoring(const ScoringRule& rule, const ParamVector& theta, double z,
                         const SampleSet& s, const UnnormalizedModel& m,
                         const Proposal& p, CostBreakdown* breakdown) {
  if (!(z > 0.0)) throw PreconditionError("j_scoring: Z must be > 0");
  const double lnu = std::log(s.nu());
  const double lz = std::log(z);

  CompensatedSum value;
  CompensatedSum dz;
  if (breakdown) {
    breakdown->model_terms.clear();
    breakdown->proposal_terms.clear();
  }

  for (int i = 0; i < s.n(); ++i) {
    const Point u = s.model_samples().col(i);
    const double lphi = m.log_phi(u, theta);
    const double lq = p.log_q(u);
    const LogEta le = log_eta_pair(lphi, lq, lnu, lz);
    const double e = std::exp(le.log_eta);
    const double term = rule.v(e);
    if (std::isnan(term)) throw EvaluationError("j_scoring: V returned NaN");
    value.add(term);
    if (breakdown) breakdown->model_terms.push_back(term);
    const double dot = -std::exp(log_eta_dot_magnitude(lphi, lq, lnu, lz));
    dz.add(rule.dv(e) * dot);
  }
  for (int i = 0; i < s.m(); ++i) {
    const Point u = s.proposal_samples().col(i);
    const double lphi = m.log_phi(u, theta);
    const double lq = p.log_q(u);
    const LogEta le = log_eta_pair(lphi, lq, lnu, lz);
    const double comp = std::exp(le.log_complement);
    const double term = rule.v(comp);
    if (std::isnan(term)) throw EvaluationError("j_scoring: V returned NaN");
    value.add(term);
    if (breakdown) breakdown->proposal_terms.push_back(term);
    const double dot = -std::exp(log_eta_dot_magnitude(lphi, lq, lnu, lz));
    dz.add(-rule.dv(comp) * dot);
  }

  CostEvaluation out;
  out.value = value.value();
  if (!std::isfinite(out.value)) {
    out.value = kPosInf;
    out.dz = std::numeric_limits<double>::quiet_NaN();
    out.infinite = true;
    return out;
  }
  out.dz = dz.value();
  return out;
}

CostEvaluation j_nce(const ParamVector& theta, double z, const SampleSet& s,
                     const UnnormalizedModel& m, const Proposal& p,
                     CostBreakdown* breakdown) {
  static const ScoringRule rule = neg_log_rule();
  return j_scoring(rule, theta, z, s, m, p, breakdown);
}

CostEvaluation j_mis(const ParamVector& theta, double z, const SampleSet& s,
                     const UnnormalizedModel& m, const Proposal& p,
                     CostBreakdown* breakdown) {
  if (!(z > 0.0)) throw PreconditionError("j_mis: Z must be > 0");
  const double la1 = std::log(s.alpha1());
  const double la2 = std::log(s.alpha2());
  const double lz = std::log(z);

  CompensatedSum value;
  CompensatedSum dz_sum;
  if (breakdown) {
    breakdown->model_terms.clear();
    breakdown->proposal_terms.clear();
  }

  const int total = s.n() + s.m();
  for (int i = 0; i < total; ++i) {
    const bool from_model = i < s.n();
    const Point u = from_model ? Point(s.model_samples().col(i))
                               : Point(s.proposal_samples().col(i - s.n()));
    const double lphi = m.log_phi(u, theta);
    const double lq = p.log_q(u);
    check_log_density(lphi, "log_phi");
    check_log_density(lq, "log_q");
    if (lphi == kNegInf && lq == kNegInf) {
      throw UndefinedPosteriorError("j_mis: both densities vanish at a pooled sample");
    }
    // -log(phi/D) - log(Zq/D) with D = a1 phi + a2 Z q.
    const double l = log_sum_exp(la1 + lphi, la2 + lz + lq);
    const double term = 2.0 * l - lphi - lq - lz;
    value.add(term);
    if (breakdown) {
      (from_model ? breakdown->model_terms : breakdown->proposal_terms).push_back(term);
    }
    // dJ/dZ collects (2 w(u) - 1)/Z with w = a2 Z q / D.
    const double w = std::exp(la2 + lz + lq - l);
    dz_sum.add(2.0 * w - 1.0);
  }

  CostEvaluation out;
  out.value = value.value();
  if (!std::isfinite(out.value)) {
    out.value = kPosInf;
    out.dz = std::numeric_limits<double>::quiet_NaN();
    out.infinite = true;
    return out;
  }
  out.dz = dz_sum.value() / z;
  return out;
}

double j_ml(const ParamVector& theta, const SampleSet& s, const UnnormalizedModel& m) {
  if (!m.has_analytic_log_Z()) {
    throw CapabilityError("j_ml: model has no analytic_log_Z");
  }
  const double log_z = m.analytic_log_Z(theta);
  CompensatedSum sum;
  for (int i = 0; i < s.n(); ++i) {
    const double lphi = m.log_phi(s.model_samples().col(i), theta);
    check_log_density(lphi, "log_phi");
    sum.add(log_z - lphi);
  }
  return sum.value();
}

}  // namespace ebmz
