#pragma once

#include <cstdint>
#include <filesystem>

#include "ebmz/model.hpp"

namespace ebmz {

// Paired data: N observations from the model and M draws from the proposal.
// Immutable after construction; the mixture weights alpha_1, alpha_2 and the
// class ratio nu = M/N are derived, never stored.
class SampleSet {
 public:
  SampleSet(PointMatrix model_samples, PointMatrix proposal_samples);

  const PointMatrix& model_samples() const { return y_; }
  const PointMatrix& proposal_samples() const { return x_; }

  int n() const { return static_cast<int>(y_.cols()); }
  int m() const { return static_cast<int>(x_.cols()); }
  int dim() const { return static_cast<int>(y_.rows()); }

  double alpha1() const { return static_cast<double>(n()) / (n() + m()); }
  double alpha2() const { return static_cast<double>(m()) / (n() + m()); }
  double nu() const { return static_cast<double>(m()) / n(); }

 private:
  PointMatrix y_;
  PointMatrix x_;
};

// Draws N model samples and M proposal samples. Identical
// (seed, N, M, params) inputs reproduce the identical set.
SampleSet draw_sample_set(const UnnormalizedModel& m, const ParamVector& theta_tr,
                          const Proposal& p, int n, int m_count, std::uint64_t seed);

// log( alpha1 * phi(y|theta)/Z + alpha2 * q(y) ), combined in log domain.
double log_mixture(const Point& y, const ParamVector& theta, double z,
                   const SampleSet& s, const Proposal& p, const UnnormalizedModel& model);

// CSV of "label,value" rows with label in {model, proposal}. 1-D sets only.
void write_sample_set_csv(const SampleSet& s, const std::filesystem::path& path);
SampleSet read_sample_set_csv(const std::filesystem::path& path);

}  // namespace ebmz
