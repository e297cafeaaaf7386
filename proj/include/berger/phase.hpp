#pragma once

// The phase function F(X, Y) on [0,1] x [-1,1], with X = sin^2 x and
// Y = cos(alpha). Solutions of the profile ODE run along its level curves;
// spheres are exactly the level-1 arcs joining (0, 1) to (0, -1).

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "berger/geometry.hpp"

namespace berger {

struct PhasePoint {
  double X = 0.0;
  double Y = 0.0;
};

struct PhaseGradient {
  double dX = 0.0;
  double dY = 0.0;
};

/// F(X, Y) = (1 - 2 lam X)^2 / (1 - lam X) (1 - X) Y^2 + K (1 - lam X) X.
double energy_value(const BergerParams& params, double K, PhasePoint p);

/// Analytic partial derivatives of F.
PhaseGradient energy_gradient(const BergerParams& params, double K, PhasePoint p);

/// A critical point of F; when y_free is set the whole vertical segment
/// {point.X} x [-1, 1] is critical and point.Y carries no information.
struct CriticalPoint {
  PhasePoint point;
  bool y_free = false;
};

/// Interior critical set of F. Empty for lambda <= 1/2, the segment
/// X = 1/(2 lambda) otherwise. Throws DomainError for K == 0, where F loses
/// its X-growth term and the whole Y = 0 line is critical.
std::vector<CriticalPoint> interior_critical_points(const BergerParams& params, double K);

struct LevelCurve {
  double level = 0.0;
  std::vector<PhasePoint> points;
  bool closed = false;
  std::optional<std::pair<PhasePoint, PhasePoint>> endpoints;
  /// Start point sits on the boundary with the level curve tangent to it
  /// (e.g. the corner (0, 1) at K = k0 for tau <= 1).
  bool degenerate_start = false;
};

struct TraceOptions {
  double initial_step = 1e-3;
  double max_step = 1e-2;
  double min_step = 1e-11;
  double trace_tol = 1e-9;
  std::size_t max_steps = 200000;
};

/// Raised when the tracer runs into a point where |grad F| < 1e-12.
class CriticalPointError : public std::runtime_error {
 public:
  CriticalPointError(const std::string& what, LevelCurve partial)
      : std::runtime_error(what), partial_(std::move(partial)) {}
  const LevelCurve& partial() const noexcept { return partial_; }

 private:
  LevelCurve partial_;
};

/// Arc-length predictor-corrector trace of {F = level} from `start`.
/// direction = +1 leaves along the tangent with positive X component
/// (positive Y component if the tangent is vertical), -1 the opposite way.
/// Stops on the rectangle boundary, on closure, or after max_steps.
LevelCurve trace_level_curve(const BergerParams& params, double K, double level, PhasePoint start,
                             int direction, const TraceOptions& opts = {});

/// Closed-form existence criterion K >= k0.
bool sphere_exists(const BergerParams& params, double K);

struct Connectivity {
  bool connected = false;
  /// Set when the trace started at a degenerate corner or hit a critical point.
  bool flagged = false;
  LevelCurve curve;
};

/// Traces the level-1 curve from (0, 1) and reports whether it reaches (0, -1).
Connectivity level_one_connectivity(const BergerParams& params, double K, const TraceOptions& opts = {});

}  // namespace berger

namespace berger {

/// All traced components of {F = level}, seeded from sign changes of
/// F - level along the edges of a grid_n x grid_n grid over the rectangle.
/// Components that hit a critical point are returned partially and counted
/// in `failures`.
struct ContourSet {
  double level = 0.0;
  std::vector<LevelCurve> components;
  std::size_t failures = 0;
};

ContourSet trace_contours(const BergerParams& params, double K, double level, std::size_t grid_n = 48,
                          const TraceOptions& opts = {});

}  // namespace berger
