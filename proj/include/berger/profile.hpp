#pragma once

// Profile curves s -> (e^{iy} cos x, sin x) of rotationally invariant
// surfaces and the first-order system they satisfy:
//
//   x'     = cos a
//   y'     = (1/tau) sqrt(1 - lam sin^2 x) / cos x * sin a
//   a'     = tan x / sin a * [ K (1 - lam S)/(1 - 2 lam S)
//                              - cos^2 a ((1 - lam)/(1 - lam S) + 4 lam cos^2 x/(1 - 2 lam S)) ]
//
// with S = sin^2 x. The energy F(sin^2 x, cos a) is a first integral.

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "berger/geometry.hpp"
#include "berger/ode.hpp"

namespace berger {

struct ProfileState {
  double s = 0.0;
  double x = 0.0;
  double y = 0.0;
  double alpha = 0.0;
};

enum class Termination {
  boundary_axis,   // sin x fell to eps_axis
  boundary_pole,   // sin x rose to 1 - eps_pole
  step_limit,      // max_steps exhausted
  singular_alpha,  // |sin alpha| fell to eps_sing
  alpha_target,    // alpha reached the requested stop value
  span_complete,   // requested parameter length covered
};

const char* to_string(Termination t);

struct Trajectory {
  BergerParams params;
  double K = 0.0;
  std::vector<ProfileState> states;
  /// |energy(state) - energy0| per state.
  std::vector<double> energy_drift;
  double energy0 = 0.0;
  double max_energy_drift = 0.0;
  /// Drift allowance implied by the integrator tolerance (100 x rtol).
  double drift_budget = 0.0;
  Termination termination = Termination::span_complete;
};

struct RhsValue {
  double dx = 0.0;
  double dy = 0.0;
  double dalpha = 0.0;
};

/// Raised at the singular loci of the system, or when the integrator's step
/// size underflows. Carries the partial trajectory when one exists.
class SingularityError : public std::runtime_error {
 public:
  SingularityError(const std::string& what, std::string factor, std::optional<Trajectory> partial = {})
      : std::runtime_error(what), factor_(std::move(factor)), partial_(std::move(partial)) {}
  const std::string& factor() const noexcept { return factor_; }
  const std::optional<Trajectory>& partial() const noexcept { return partial_; }

 private:
  std::string factor_;
  std::optional<Trajectory> partial_;
};

/// Right-hand side of the profile system. Throws SingularityError when
/// |sin alpha|, |cos x| or |1 - 2 lam sin^2 x| is below singular_tol.
RhsValue rhs(const BergerParams& params, double K, const ProfileState& state, double singular_tol = 1e-12);

/// Energy F(sin^2 x, cos alpha) of a state.
double profile_energy(const BergerParams& params, double K, const ProfileState& state);

struct IntegrateOptions {
  double length = 10.0;
  /// +1 integrates towards increasing s, -1 backwards; states are always
  /// returned in increasing s.
  int direction = 1;
  /// Dense-output spacing; 0 records every accepted step instead.
  double sample_spacing = 1e-2;
  ode::Tolerances tol{};
  double eps_axis = 1e-9;
  double eps_pole = 1e-9;
  double eps_sing = 1e-8;
  double event_tol = 1e-12;
  std::size_t max_steps = 2000000;
  std::optional<double> stop_alpha;
};

/// Adaptive Dormand-Prince integration with event detection and energy
/// monitoring.
Trajectory integrate(const BergerParams& params, double K, const ProfileState& init,
                     const IntegrateOptions& opts = {});

/// Launch state near the axis on the energy-1 curve: x = x_start and alpha
/// from the energy identity, ~ sqrt(K - (4 - 3 tau^2)) x.
ProfileState axis_seed(const BergerParams& params, double K, double x_start = 1e-5);

/// The six symmetries of the profile system.
struct Symmetry {
  enum class Kind { y_translate, alpha_shift, reverse, reflect, turn_reflect, pole_continue };
  Kind kind = Kind::y_translate;
  double value = 0.0;
  int k = 0;

  static Symmetry y_translate(double y0) { return {Kind::y_translate, y0, 0}; }
  static Symmetry alpha_shift(int k) { return {Kind::alpha_shift, 0.0, k}; }
  static Symmetry reverse(double s0) { return {Kind::reverse, s0, 0}; }
  static Symmetry reflect(double y0) { return {Kind::reflect, y0, 0}; }
  /// Mirror through a turning point s0 where x'(s0) = 0.
  static Symmetry turn_reflect(double s0) { return {Kind::turn_reflect, s0, 0}; }
  static Symmetry pole_continue() { return {Kind::pole_continue, 0.0, 0}; }
};

Trajectory apply_symmetry(const Trajectory& traj, const Symmetry& sym, double eps_pole = 1e-9);

/// Largest deviation between five-point central differences of (x, y, alpha)
/// and the right-hand side, over uniformly spaced interior windows away from
/// the singular loci (|sin alpha| or |cos x| below singular_margin).
double ode_residual(const Trajectory& traj, double singular_margin = 1e-6);

/// Clifford torus profile (x0, omega s, pi/2), K = 0, over one full turn in y
/// unless a length is given.
Trajectory clifford_solution(const BergerParams& params, double x0, std::size_t samples = 257,
                             std::optional<double> length = {});

/// Great-sphere profile (s, y0, 0) of the round sphere, K = 1, s in [0, pi/2].
Trajectory great_sphere_solution(const BergerParams& params, double y0, std::size_t samples = 257);

struct FundamentalForm {
  double E = 0.0;
  double F = 0.0;
  double G = 0.0;
};

FundamentalForm fundamental_form(const BergerParams& params, double K, const ProfileState& state, double xprime,
                                 double yprime);

/// max |phi'' + K phi| over interior samples, phi = sqrt(G).
double frobenius_residual(const Trajectory& traj);

/// Phi(s, t) = (e^{iy} cos x, e^{it} sin x).
AmbientPoint embedding(const BergerParams& params, const ProfileState& state, double t);

}  // namespace berger
