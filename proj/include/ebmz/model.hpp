#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <map>
#include <string>

namespace ebmz {

using Point = Eigen::VectorXd;
// A batch of points, one per column.
using PointMatrix = Eigen::MatrixXd;
using ParamVector = Eigen::VectorXd;

// Unnormalized density phi(y|theta), evaluated in natural-log units.
// analytic_log_Z and sampler are optional and only populated for test models;
// estimators never rely on them.
struct UnnormalizedModel {
  std::function<double(const Point&, const ParamVector&)> log_phi;
  std::function<double(const ParamVector&)> analytic_log_Z;
  std::function<PointMatrix(const ParamVector&, int, std::uint64_t)> sampler;

  bool has_analytic_log_Z() const { return static_cast<bool>(analytic_log_Z); }
  bool has_sampler() const { return static_cast<bool>(sampler); }
};

// Normalized proposal density q with exact log-density and a sampler.
struct Proposal {
  std::function<double(const Point&)> log_q;
  std::function<PointMatrix(int, std::uint64_t)> sample;
  std::map<std::string, double> params;
};

// One candidate location in the augmented parameter space [theta, Z].
struct ParameterPoint {
  ParamVector theta;
  double z = 1.0;
};

// Built-in zero-mean Gaussian family: phi(y|theta) = exp(-y^2 / (2 theta^2)),
// with Z(theta) = sqrt(2 pi theta^2) and a seeded sampler.
UnnormalizedModel gaussian_model();

// Gaussian proposal N(mu, sigma^2); params carry "mu_p" and "sigma_p".
Proposal gaussian_proposal(double mu, double sigma);

Point scalar_point(double y);

// Evaluates a log density down the columns of a batch.
Eigen::ArrayXd eval_log_density(const std::function<double(const Point&)>& log_f,
                                const PointMatrix& points);

}  // namespace ebmz
