#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <stdexcept>
#include <string>

namespace mixsaem {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input data (CSV cells, schema, shapes).
class DataError : public Error {
 public:
  using Error::Error;
};

/// A covariance matrix that is not (and cannot be repaired into) SPD.
class NotSpdError : public Error {
 public:
  using Error::Error;
};

/// Too many missing-discrete combinations to enumerate exactly.
class EnumerationCapError : public Error {
 public:
  using Error::Error;
};

/// An iterative solver failed to reach its stopping criterion.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

using Rng = std::mt19937_64;

/// Deterministic sub-seed: splitmix64 folded over (master, parts...).
/// Used so that every stream (replication, stage, iteration, sample) is
/// independent of scheduling and thread count.
std::uint64_t derive_seed(std::uint64_t master,
                          std::initializer_list<std::uint64_t> parts);

/// Stable 64-bit tag for a stage name (FNV-1a).
std::uint64_t stage_tag(const std::string& name);

inline double uniform01(Rng& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

}  // namespace mixsaem
