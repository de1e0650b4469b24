#include "ebmz/solvers.hpp"

#include <cmath>

#include "ebmz/errors.hpp"
#include "ebmz/numeric.hpp"

namespace ebmz {

namespace {

void validate(const Bracket1D& b) {
  if (!(b.lo < b.hi)) throw PreconditionError("Bracket1D: lo must be < hi");
  if (b.grid_points < 3) throw PreconditionError("Bracket1D: grid_points must be >= 3");
}

struct Best {
  double x = 0.0;
  double f = kPosInf;
  bool seen = false;

  // Strict improvement, or equal value at a smaller argmin.
  void offer(double xi, double fi) {
    if (std::isnan(fi)) return;
    if (!seen || fi < f || (fi == f && xi < x)) {
      x = xi;
      f = fi;
      seen = seen || fi < kPosInf;
    }
  }
};

}  // namespace

SolveReport minimize_1d(const std::function<double(double)>& f, const Bracket1D& bracket,
                        double tol) {
  validate(bracket);
  if (!(tol > 0.0)) throw PreconditionError("minimize_1d: tol must be > 0");

  const int g = bracket.grid_points;
  const double span = bracket.hi - bracket.lo;
  long evals = 0;
  Best best;
  int best_idx = -1;
  for (int i = 0; i < g; ++i) {
    const double xi = bracket.lo + span * static_cast<double>(i) / (g - 1);
    const double fi = f(xi);
    ++evals;
    if (std::isnan(fi)) {
      throw EvaluationError("minimize_1d: objective returned NaN on the grid");
    }
    if (fi < kPosInf && (best_idx < 0 || fi < best.f)) best_idx = i;
    best.offer(xi, fi);
  }
  if (best_idx < 0) {
    throw NoFeasiblePointError("minimize_1d: objective is +inf at every grid point");
  }

  const double h = span / (g - 1);
  double a = std::max(bracket.lo, bracket.lo + h * (best_idx - 1));
  double b = std::min(bracket.hi, bracket.lo + h * (best_idx + 1));

  // Golden-section; ties keep the left interval so plateaus resolve to their
  // smallest argmin.
  constexpr double invphi = 0.6180339887498949;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = f(c);
  double fd = f(d);
  evals += 2;
  best.offer(c, fc);
  best.offer(d, fd);

  bool converged = false;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (a + b);
    if (b - a <= tol * std::max(1.0, std::abs(mid))) {
      converged = true;
      break;
    }
    if (fc <= fd || std::isnan(fd)) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = f(c);
      best.offer(c, fc);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = f(d);
      best.offer(d, fd);
    }
    ++evals;
  }

  SolveReport report;
  report.argmin = best.x;
  report.value_at_min = best.f;
  report.evaluations = evals;
  report.converged = converged;
  return report;
}

Bracket1D default_log_z_bracket() {
  return Bracket1D{std::log(1e-3), std::log(1e3), 64};
}

Bracket1D default_theta_bracket() { return Bracket1D{0.05, 10.0, 200}; }

SolveReport minimize_over_z(const std::function<double(double)>& f_of_z,
                            const Bracket1D& log_z_bracket, double tol) {
  SolveReport r =
      minimize_1d([&](double lz) { return f_of_z(std::exp(lz)); }, log_z_bracket, tol);
  r.argmin = std::exp(r.argmin);
  return r;
}

AlternateResult alternate_minimize(
    const std::function<double(double, double)>& j,
    const std::optional<std::function<double(double, double)>>& z_updater,
    const Bracket1D& theta_bracket, const Bracket1D& log_z_bracket, int rounds,
    double tol) {
  if (rounds < 1) throw PreconditionError("alternate_minimize: rounds must be >= 1");

  AlternateResult result;
  result.z = 1.0;
  result.theta = 0.5 * (theta_bracket.lo + theta_bracket.hi);

  for (int round = 0; round < rounds; ++round) {
    const double prev_theta = result.theta;
    const double prev_z = result.z;

    const SolveReport theta_step =
        minimize_1d([&](double th) { return j(th, result.z); }, theta_bracket, tol);
    result.theta = theta_step.argmin;
    result.evaluations += theta_step.evaluations;

    if (z_updater) {
      result.z = (*z_updater)(result.theta, result.z);
      ++result.evaluations;
    } else {
      const SolveReport z_step = minimize_over_z(
          [&](double z) { return j(result.theta, z); }, log_z_bracket, tol);
      result.z = z_step.argmin;
      result.evaluations += z_step.evaluations;
    }

    result.rounds_used = round + 1;
    const double dtheta = std::abs(result.theta - prev_theta);
    const double dz = std::abs(result.z - prev_z);
    if (round > 0 && dtheta <= tol * std::max(1.0, std::abs(result.theta)) &&
        dz <= tol * std::max(1.0, std::abs(result.z))) {
      result.converged = true;
      break;
    }
  }
  result.value = j(result.theta, result.z);
  return result;
}

Eigen::VectorXd fd_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                            const Eigen::VectorXd& x, double step) {
  if (!(step > 0.0)) throw PreconditionError("fd_gradient: step must be > 0");
  Eigen::VectorXd grad(x.size());
  Eigen::VectorXd probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double h = step * std::max(1.0, std::abs(x[i]));
    probe[i] = x[i] + h;
    const double fp = f(probe);
    probe[i] = x[i] - h;
    const double fm = f(probe);
    probe[i] = x[i];
    if (!std::isfinite(fp) || !std::isfinite(fm)) {
      throw EvaluationError("fd_gradient: objective not finite in a step-neighborhood");
    }
    grad[i] = (fp - fm) / (2.0 * h);
  }
  return grad;
}

}  // namespace ebmz
