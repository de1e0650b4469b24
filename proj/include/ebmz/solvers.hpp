#pragma once

#include <Eigen/Core>
#include <functional>
#include <optional>

namespace ebmz {

// Search interval plus the size of the initial scan grid.
struct Bracket1D {
  double lo = 0.0;
  double hi = 1.0;
  int grid_points = 64;
};

struct SolveReport {
  double argmin = 0.0;
  double value_at_min = 0.0;
  long evaluations = 0;
  bool converged = false;
};

// Grid scan to locate the best cell, then golden-section refinement down to
// interval width <= tol * max(1, |argmin|). +inf values act as barriers.
// Ties break toward the smallest argmin. Deterministic: identical inputs give
// bitwise-identical reports.
SolveReport minimize_1d(const std::function<double(double)>& f, const Bracket1D& bracket,
                        double tol = 1e-8);

// Default search ranges. Z searches run in log Z; positivity is structural
// and the contrastive costs are much better conditioned in log Z.
Bracket1D default_log_z_bracket();
Bracket1D default_theta_bracket();

// Minimizes f(z) for z > 0 by searching over log z.
SolveReport minimize_over_z(const std::function<double(double)>& f_of_z,
                            const Bracket1D& log_z_bracket, double tol);

struct AlternateResult {
  double theta = 0.0;
  double z = 1.0;
  double value = 0.0;
  int rounds_used = 0;
  bool converged = false;
  long evaluations = 0;
};

// Alternates a theta-step (1-D minimization of J at the current Z) with a
// Z-step: either one sweep of a supplied fixed-point updater or a 1-D
// minimization over log Z.
AlternateResult alternate_minimize(
    const std::function<double(double, double)>& j,
    const std::optional<std::function<double(double, double)>>& z_updater,
    const Bracket1D& theta_bracket, const Bracket1D& log_z_bracket, int rounds,
    double tol = 1e-8);

// Central differences per coordinate, steps scaled by max(1, |x_i|).
Eigen::VectorXd fd_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                            const Eigen::VectorXd& x, double step);

}  // namespace ebmz
