#include "ebmz/umbrella.hpp"

#include <cmath>

#include "ebmz/errors.hpp"
#include "ebmz/numeric.hpp"
#include "ebmz/rng.hpp"

namespace ebmz {

namespace {
constexpr std::int64_t kDegenerateWindow = 1'000'000;
}

PointMatrix sample_umbrella(const UnnormalizedModel& m, const ParamVector& theta,
                            double z_ref, const Proposal& p, int count,
                            std::uint64_t seed) {
  if (!(z_ref > 0.0)) throw PreconditionError("sample_umbrella: Z_ref must be > 0");
  if (count < 1) throw PreconditionError("sample_umbrella: count must be >= 1");
  if (!m.has_sampler()) throw CapabilityError("sample_umbrella: model has no sampler");

  const double log_z = std::log(z_ref);
  SplitRng rng(seed);
  PointMatrix out(1, count);

  int accepted = 0;
  std::int64_t attempts = 0;
  while (accepted < count) {
    // Envelope draw from g = phi_bar/2 + q/2.
    const bool from_model = rng.uniform01() < 0.5;
    const PointMatrix draw = from_model ? m.sampler(theta, 1, rng.next_u64())
                                        : p.sample(1, rng.next_u64());
    if (draw.rows() != 1) {
      throw PreconditionError("sample_umbrella: only 1-D supports are handled");
    }
    const Point y = draw.col(0);
    const double lphi_bar = m.log_phi(y, theta) - log_z;
    const double lq = p.log_q(y);
    if (std::isnan(lphi_bar) || lphi_bar == kPosInf || std::isnan(lq) || lq == kPosInf) {
      throw EvaluationError("sample_umbrella: non-finite density at a proposed point");
    }
    // Accept with probability |phi_bar - q| / (phi_bar + q).
    const double log_accept = log_abs_diff_exp(lphi_bar, lq) - log_sum_exp(lphi_bar, lq);
    const double u = rng.uniform_open01();
    ++attempts;
    if (std::log(u) < log_accept) {
      out(0, accepted++) = y[0];
    }
    if (attempts % kDegenerateWindow == 0 &&
        static_cast<double>(accepted) < 1e-6 * static_cast<double>(attempts)) {
      throw DegenerateDensityError(
          "sample_umbrella: acceptance rate below 1e-6; |phi_bar - q| is "
          "(numerically) zero almost everywhere");
    }
  }
  return out;
}

}  // namespace ebmz
