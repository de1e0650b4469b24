#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace ebmz {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// A density or bridge function returned NaN / +inf where a finite value is required.
class EvaluationError : public Error {
 public:
  using Error::Error;
};

// A requested capability (sampler, analytic normalizer) is absent on the model.
class CapabilityError : public Error {
 public:
  using Error::Error;
};

// The target of a rejection sampler vanishes (almost) everywhere.
class DegenerateDensityError : public Error {
 public:
  using Error::Error;
};

// A sum over samples that must be positive evaluated to zero.
class DegenerateSamplesError : public Error {
 public:
  using Error::Error;
};

// A density is exactly zero at a sample where the estimator divides by it.
class ZeroDensityError : public Error {
 public:
  using Error::Error;
};

// A fixed-point iterate left the valid domain; the trace so far is attached.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, std::vector<double> trace)
      : Error(what), trace_(std::move(trace)) {}
  const std::vector<double>& trace() const { return trace_; }

 private:
  std::vector<double> trace_;
};

// An |phi - Z q| denominator collapsed; carries the iterate and sample index.
class SingularIterateError : public Error {
 public:
  SingularIterateError(const std::string& what, double z_iterate, int sample_index)
      : Error(what), z_iterate_(z_iterate), sample_index_(sample_index) {}
  double z_iterate() const { return z_iterate_; }
  int sample_index() const { return sample_index_; }

 private:
  double z_iterate_;
  int sample_index_;
};

// Both densities vanish at a point, so the class posterior is undefined.
class UndefinedPosteriorError : public Error {
 public:
  using Error::Error;
};

// Every grid point of a 1-D search evaluated to +inf.
class NoFeasiblePointError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

// An iterative optimizer could not make progress; message carries the last iterate.
class OptimizationError : public Error {
 public:
  using Error::Error;
};

// Bad command-line / configuration input. Mapped to exit code 2 by the CLI.
class UsageError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace ebmz
