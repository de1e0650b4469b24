#include <doctest.h>

#include <cmath>
#include <vector>

#include "ebmz/errors.hpp"
#include "ebmz/umbrella.hpp"
#include "oracles.hpp"

using namespace ebmz;

namespace {

const double kSqrt2Pi = std::sqrt(2.0 * 3.14159265358979323846);

double umbrella_density(double y, double sigma_p) {
  return std::abs(oracle::normal_pdf(y, 0.0, 1.0) - oracle::normal_pdf(y, 0.0, sigma_p));
}

}  // namespace

TEST_CASE("identical densities trigger the degenerate error") {
  const UnnormalizedModel m = gaussian_model();
  const Proposal q = gaussian_proposal(0.0, 1.0);
  CHECK_THROWS_AS(sample_umbrella(m, scalar_point(1.0), kSqrt2Pi, q, 4, 3),
                  DegenerateDensityError);
}

TEST_CASE("empirical acceptance rate matches the quadrature integral") {
  // Acceptance rate of the envelope scheme is int |phi_bar - q| dy / 2.
  const double expected =
      oracle::trapezoid([](double y) { return umbrella_density(y, 2.0); }, -30.0, 30.0,
                        400000) /
      2.0;
  const UnnormalizedModel m = gaussian_model();
  const Proposal q = gaussian_proposal(0.0, 2.0);

  // Count attempts through a wrapped proposal sampler plus the model sampler.
  // Each attempt consumes exactly one component draw.
  int attempts = 0;
  UnnormalizedModel counting = m;
  auto base_sampler = m.sampler;
  counting.sampler = [&attempts, base_sampler](const ParamVector& t, int c,
                                               std::uint64_t s) {
    ++attempts;
    return base_sampler(t, c, s);
  };
  Proposal counting_q = q;
  auto base_sample = q.sample;
  counting_q.sample = [&attempts, base_sample](int c, std::uint64_t s) {
    ++attempts;
    return base_sample(c, s);
  };

  const int draws = 40000;
  sample_umbrella(counting, scalar_point(1.0), kSqrt2Pi, counting_q, draws, 5);
  const double rate = static_cast<double>(draws) / attempts;
  const double se = std::sqrt(expected * (1.0 - expected) / attempts);
  CHECK(std::abs(rate - expected) < 5.0 * se);
}

TEST_CASE("draws match the quadrature CDF of the umbrella density") {
  const UnnormalizedModel m = gaussian_model();
  const Proposal q = gaussian_proposal(0.0, 2.0);
  const oracle::CdfTable cdf = oracle::make_cdf(
      [](double y) { return umbrella_density(y, 2.0); }, -25.0, 25.0, 250000);

  for (std::uint64_t seed : {11ull, 5021ull}) {
    const PointMatrix pts = sample_umbrella(m, scalar_point(1.0), kSqrt2Pi, q, 30000, seed);
    std::vector<double> draws(pts.cols());
    for (Eigen::Index i = 0; i < pts.cols(); ++i) draws[i] = pts(0, i);
    CHECK(oracle::ks_statistic(std::move(draws), cdf) < 0.015);
  }
}

TEST_CASE("umbrella preconditions") {
  const UnnormalizedModel m = gaussian_model();
  const Proposal q = gaussian_proposal(0.0, 2.0);
  CHECK_THROWS_AS(sample_umbrella(m, scalar_point(1.0), 0.0, q, 4, 1), PreconditionError);
  CHECK_THROWS_AS(sample_umbrella(m, scalar_point(1.0), 1.0, q, 0, 1), PreconditionError);
  UnnormalizedModel no_sampler = m;
  no_sampler.sampler = nullptr;
  CHECK_THROWS_AS(sample_umbrella(no_sampler, scalar_point(1.0), 1.0, q, 4, 1),
                  CapabilityError);
}
