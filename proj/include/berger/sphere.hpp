#pragma once

// Rotationally invariant CGC spheres S_K in S^3_tau (exist iff K >= k0).

#include <cstddef>
#include <utility>

#include "berger/geometry.hpp"
#include "berger/profile.hpp"

namespace berger {

/// sin^2 of the horizontal radius, 2 / (K (1 + sqrt(1 - 4 lam / K))).
/// Throws NoSphereError for K < k0.
double sin2_horizontal_radius(const BergerParams& params, double K);

/// Maximum colatitude r in [0, pi/2] reached by the profile.
double horizontal_radius(const BergerParams& params, double K);

/// True when the profile reaches the pole (sin^2 r = 1): the round great
/// sphere (tau = 1, K = 1) and the threshold spheres K = k0 for tau > 1.
bool touches_pole(const BergerParams& params, double K);

/// Half the fiber-direction extent of S_K, by tanh-sinh quadrature of the
/// integral in x over [0, r]. Returns 0 for the great sphere and +inf for the
/// pole-touching threshold spheres with tau > 1, where the integral diverges.
/// Throws NoSphereError for K < k0 and AccuracyError if the quadrature error
/// estimate exceeds 1e-10.
double vertical_radius(const BergerParams& params, double K);

enum class Embeddedness { embedded, not_embedded, indeterminate };
const char* to_string(Embeddedness e);

/// h < pi, with |h - pi| < 1e-8 reported as indeterminate.
Embeddedness is_embedded(const BergerParams& params, double K);
Embeddedness classify_vertical_radius(double h);

/// tau* in [tau_lo, tau_hi] with h(tau*, K) = pi, to |h - pi| <= 1e-8
/// (bisection, then secant polishing). Throws BracketError without a sign change.
double embeddedness_boundary(double K, double tau_lo, double tau_hi);

/// Scans tau upward from tau_min in steps of `step` and returns the first
/// bracket across which h(tau, K) - pi changes sign. Throws BracketError if
/// none is found before tau_max.
std::pair<double, double> find_boundary_bracket(double K, double tau_min, double tau_max, double step);

struct SphereSolution {
  BergerParams params;
  double K = 0.0;
  double r = 0.0;
  /// Vertical radius from the quadrature route.
  double h = 0.0;
  bool embedded = false;
  Embeddedness verdict = Embeddedness::embedded;
  /// Full profile on [0, T], uniformly sampled, y(T/2) = 0.
  Trajectory profile;
  double T = 0.0;
};

struct SphereOptions {
  /// Cross-check the construction against a traced level-1 curve of F.
  bool validate_with_trace = true;
};

/// Builds S_K with `samples` uniformly spaced profile samples (>= 3).
/// Throws NoSphereError for K < k0 and DomainError for the pole-touching
/// spheres, whose profiles are not assembled from a turning point.
SphereSolution build_sphere(const BergerParams& params, double K, std::size_t samples = 513,
                            const SphereOptions& opts = {});

/// As build_sphere, choosing the sample count so the spacing is at most ds.
SphereSolution build_sphere_with_spacing(const BergerParams& params, double K, double ds,
                                         const SphereOptions& opts = {});

}  // namespace berger
