#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace rdio {

/// Malformed or inconsistent caller input (bad dimensions, missing data, ...).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Requested combination of problem features is outside what the library supports.
class UnsupportedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numerical failure: stalled pivoting, non-convergence, singular basis.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An optimality certificate condition failed to verify.
class CertificateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A model-size audit found a count mismatch.
class AuditError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/**
 * Deterministic pseudo-random generator.
 *
 * Wraps xoshiro256** with manually derived uniform/normal variates so that a
 * given seed produces the same stream on every platform and standard library.
 * All data generators and the evaluation harness key off this type.
 */
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next();

  /// Uniform double in [0, 1).
  double uniform();

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi);

  /// Uniform integer in [lo, hi], inclusive.
  int uniformInt(int lo, int hi);

  /// Standard normal variate (Marsaglia polar method).
  double normal();

  /// Derive an independent child generator for a named substream.
  Rng fork(std::uint64_t stream);

 private:
  std::uint64_t s_[4];
  bool haveSpare_ = false;
  double spare_ = 0.0;
};

}  // namespace rdio
