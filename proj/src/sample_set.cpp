#include "ebmz/sample_set.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "ebmz/errors.hpp"
#include "ebmz/numeric.hpp"
#include "ebmz/rng.hpp"

namespace ebmz {

SampleSet::SampleSet(PointMatrix model_samples, PointMatrix proposal_samples)
    : y_(std::move(model_samples)), x_(std::move(proposal_samples)) {
  if (y_.cols() < 1 || x_.cols() < 1) {
    throw PreconditionError("SampleSet: both sides must hold at least one sample");
  }
  if (y_.rows() != x_.rows()) {
    throw PreconditionError("SampleSet: model and proposal samples must share a dimension");
  }
}

SampleSet draw_sample_set(const UnnormalizedModel& m, const ParamVector& theta_tr,
                          const Proposal& p, int n, int m_count, std::uint64_t seed) {
  if (n < 1 || m_count < 1) {
    throw PreconditionError("draw_sample_set: N and M must be >= 1");
  }
  if (!m.has_sampler()) {
    throw CapabilityError("draw_sample_set: model has no sampler");
  }
  PointMatrix y = m.sampler(theta_tr, n, mix_seed(seed, 1));
  PointMatrix x = p.sample(m_count, mix_seed(seed, 2));
  return SampleSet(std::move(y), std::move(x));
}

double log_mixture(const Point& y, const ParamVector& theta, double z,
                   const SampleSet& s, const Proposal& p, const UnnormalizedModel& model) {
  if (!(z > 0.0)) throw PreconditionError("log_mixture: Z must be > 0");
  const double lphi = model.log_phi(y, theta);
  if (std::isnan(lphi) || lphi == kPosInf) {
    throw EvaluationError("log_mixture: log_phi is not finite at the query point");
  }
  const double lq = p.log_q(y);
  if (std::isnan(lq) || lq == kPosInf) {
    throw EvaluationError("log_mixture: log_q is not finite at the query point");
  }
  return log_sum_exp(std::log(s.alpha1()) + lphi - std::log(z),
                     std::log(s.alpha2()) + lq);
}

namespace {

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

}  // namespace

void write_sample_set_csv(const SampleSet& s, const std::filesystem::path& path) {
  if (s.dim() != 1) {
    throw PreconditionError("write_sample_set_csv: only 1-D sample sets are serializable");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("write_sample_set_csv: cannot open " + path.string());
  out << "label,value\n";
  for (int i = 0; i < s.n(); ++i) {
    out << "model," << format_double(s.model_samples()(0, i)) << "\n";
  }
  for (int i = 0; i < s.m(); ++i) {
    out << "proposal," << format_double(s.proposal_samples()(0, i)) << "\n";
  }
  if (!out) throw IoError("write_sample_set_csv: write failed for " + path.string());
}

SampleSet read_sample_set_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("read_sample_set_csv: cannot open " + path.string());
  std::string line;
  std::vector<double> y, x;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (first) {
      first = false;
      if (line == "label,value") continue;  // header is optional
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw IoError("read_sample_set_csv: malformed row '" + line + "'");
    }
    const std::string label = line.substr(0, comma);
    const std::string value_str = line.substr(comma + 1);
    double value = 0.0;
    try {
      value = std::stod(value_str);
    } catch (const std::exception&) {
      throw IoError("read_sample_set_csv: bad value '" + value_str + "'");
    }
    if (label == "model") {
      y.push_back(value);
    } else if (label == "proposal") {
      x.push_back(value);
    } else {
      throw IoError("read_sample_set_csv: unknown label '" + label + "'");
    }
  }
  if (y.empty() || x.empty()) {
    throw IoError("read_sample_set_csv: file must contain model and proposal rows");
  }
  PointMatrix ym(1, static_cast<Eigen::Index>(y.size()));
  PointMatrix xm(1, static_cast<Eigen::Index>(x.size()));
  for (std::size_t i = 0; i < y.size(); ++i) ym(0, static_cast<Eigen::Index>(i)) = y[i];
  for (std::size_t i = 0; i < x.size(); ++i) xm(0, static_cast<Eigen::Index>(i)) = x[i];
  return SampleSet(std::move(ym), std::move(xm));
}

}  // namespace ebmz
