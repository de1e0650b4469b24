#pragma once

#include <cstdint>

#include "ebmz/model.hpp"

namespace ebmz {

// Draws i.i.d. samples from r(y) proportional to |phi(y|theta)/z_ref - q(y)|
// by rejection from the envelope g = (phi_bar + q)/2, accepting with
// probability |phi_bar - q| / (phi_bar + q). One seeded stream drives the
// component coin, the component draw, and the accept decision. 1-D only.
//
// Throws DegenerateDensityError when the acceptance rate stays below 1e-6
// over a 10^6-attempt window (phi_bar and q essentially identical).
PointMatrix sample_umbrella(const UnnormalizedModel& m, const ParamVector& theta,
                            double z_ref, const Proposal& p, int count,
                            std::uint64_t seed);

}  // namespace ebmz
