#pragma once

#include <stdexcept>
#include <string>

namespace berger {

/// Invalid argument or precondition violation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// The requested (tau, K) pair admits no rotational CGC sphere (K < k0).
class NoSphereError : public std::runtime_error {
 public:
  NoSphereError(const std::string& what, double k0)
      : std::runtime_error(what), k0_(k0) {}
  double k0() const noexcept { return k0_; }

 private:
  double k0_;
};

/// A numerical procedure did not reach its target accuracy.
class AccuracyError : public std::runtime_error {
 public:
  AccuracyError(const std::string& what, double estimate)
      : std::runtime_error(what), estimate_(estimate) {}
  double estimate() const noexcept { return estimate_; }

 private:
  double estimate_;
};

/// Root bracket does not contain a sign change.
class BracketError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace berger
