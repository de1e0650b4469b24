#include "ebmz/model.hpp"

#include <cmath>
#include <numbers>

#include "ebmz/errors.hpp"
#include "ebmz/rng.hpp"

namespace ebmz {

namespace {
constexpr double kLogTwoPi = 1.8378770664093455;  // log(2 pi)
}

UnnormalizedModel gaussian_model() {
  UnnormalizedModel m;
  m.log_phi = [](const Point& y, const ParamVector& theta) {
    const double t = theta[0];
    return -0.5 * y[0] * y[0] / (t * t);
  };
  m.analytic_log_Z = [](const ParamVector& theta) {
    const double t = theta[0];
    if (!(t != 0.0)) throw PreconditionError("gaussian_model: theta must be nonzero");
    return 0.5 * (kLogTwoPi + std::log(t * t));
  };
  m.sampler = [](const ParamVector& theta, int count, std::uint64_t seed) {
    const double t = theta[0];
    if (!(t > 0.0)) throw PreconditionError("gaussian_model: sampler needs theta > 0");
    SplitRng rng(seed);
    PointMatrix out(1, count);
    for (int i = 0; i < count; ++i) out(0, i) = t * rng.normal();
    return out;
  };
  return m;
}

Proposal gaussian_proposal(double mu, double sigma) {
  if (!(sigma > 0.0)) throw PreconditionError("gaussian_proposal: sigma must be > 0");
  Proposal p;
  p.log_q = [mu, sigma](const Point& y) {
    const double z = (y[0] - mu) / sigma;
    return -0.5 * z * z - std::log(sigma) - 0.5 * kLogTwoPi;
  };
  p.sample = [mu, sigma](int count, std::uint64_t seed) {
    SplitRng rng(seed);
    PointMatrix out(1, count);
    for (int i = 0; i < count; ++i) out(0, i) = mu + sigma * rng.normal();
    return out;
  };
  p.params = {{"mu_p", mu}, {"sigma_p", sigma}};
  return p;
}

Point scalar_point(double y) {
  Point p(1);
  p[0] = y;
  return p;
}

Eigen::ArrayXd eval_log_density(const std::function<double(const Point&)>& log_f,
                                const PointMatrix& points) {
  Eigen::ArrayXd out(points.cols());
  for (Eigen::Index i = 0; i < points.cols(); ++i) {
    out[i] = log_f(points.col(i));
  }
  return out;
}

}  // namespace ebmz
