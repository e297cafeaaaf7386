#pragma once

// Invariant suites shared by `berger-cgc verify` and the test programs.

#include <functional>
#include <string>
#include <vector>

#include "berger/geometry.hpp"
#include "berger/phase.hpp"

namespace berger::verify {

struct SuiteResult {
  std::string name;
  bool passed = false;
  /// Worst observed value of the suite's metric and the bound it is held to.
  double metric = 0.0;
  double threshold = 0.0;
  std::string detail;
};

using PhaseFunction = std::function<double(const BergerParams&, double, PhasePoint)>;

struct VerifyConfig {
  double integrator_rtol = 1e-10;
  /// Points per identity in the boundary suite.
  std::size_t boundary_points = 10000;
  PhaseFunction phase_function = energy_value;
};

/// Axis-seeded integrations keep |F - F(seed)| within 100 x rtol, and the
/// assembled sphere profiles keep |F - 1| within 1e-8.
SuiteResult energy_suite(const VerifyConfig& cfg = {});

/// phi = sqrt(G) solves phi'' + K phi = 0 to 1e-5 at spacing 1e-3, and halving
/// the spacing shrinks the residual at least threefold.
SuiteResult frobenius_suite(const VerifyConfig& cfg = {});

/// The six profile symmetries keep the ODE residual within 1e-8; the
/// turning-point mirror maps a sphere profile onto itself to 1e-7.
SuiteResult symmetry_suite(const VerifyConfig& cfg = {});

/// Quadrature h agrees with half the y-extent of the assembled profile to 1e-7.
SuiteResult route_equivalence_suite(const VerifyConfig& cfg = {});

/// Edge identities of the phase function to 1e-12.
SuiteResult boundary_identity_suite(const VerifyConfig& cfg = {});

/// Level-1 connectivity agrees with K >= k0 on a coarse grid.
SuiteResult existence_suite(const VerifyConfig& cfg = {});

std::vector<SuiteResult> run_all(const VerifyConfig& cfg = {});

}  // namespace berger::verify
