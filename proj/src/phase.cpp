#include "berger/phase.hpp"

#include <algorithm>
#include <cmath>

#include "berger/errors.hpp"

namespace berger {

double energy_value(const BergerParams& params, double K, PhasePoint p) {
  const double lam = params.lambda();
  const double a = 1.0 - 2.0 * lam * p.X;
  const double b = 1.0 - lam * p.X;
  return a * a / b * (1.0 - p.X) * p.Y * p.Y + K * b * p.X;
}

PhaseGradient energy_gradient(const BergerParams& params, double K, PhasePoint p) {
  const double lam = params.lambda();
  const double X = p.X;
  const double a = 1.0 - 2.0 * lam * X;
  const double b = 1.0 - lam * X;
  // A(X) = a^2 (1 - X) / b
  const double A = a * a * (1.0 - X) / b;
  const double dA = -4.0 * lam * a * (1.0 - X) / b - a * a / b + lam * a * a * (1.0 - X) / (b * b);
  return {dA * p.Y * p.Y + K * a, 2.0 * A * p.Y};
}

std::vector<CriticalPoint> interior_critical_points(const BergerParams& params, double K) {
  if (K == 0.0) {
    throw DomainError("interior_critical_points: K = 0 is degenerate (the line Y = 0 is critical)");
  }
  const double lam = params.lambda();
  if (lam <= 0.5) return {};
  return {CriticalPoint{{1.0 / (2.0 * lam), 0.0}, true}};
}

bool sphere_exists(const BergerParams& params, double K) {
  return std::isfinite(K) && K != 0.0 && K >= params.k0();
}

namespace {

constexpr double kEdgeTol = 1e-12;
constexpr double kCriticalGrad = 1e-12;

double dist(PhasePoint a, PhasePoint b) { return std::hypot(a.X - b.X, a.Y - b.Y); }

bool in_rect(PhasePoint p, double tol) {
  return p.X >= -tol && p.X <= 1.0 + tol && p.Y >= -1.0 - tol && p.Y <= 1.0 + tol;
}

class Tracer {
 public:
  Tracer(const BergerParams& params, double K, double level, const TraceOptions& opts)
      : params_(params), K_(K), level_(level), opts_(opts) {}

  double residual(PhasePoint p) const { return energy_value(params_, K_, p) - level_; }
  PhaseGradient grad(PhasePoint p) const { return energy_gradient(params_, K_, p); }

  /// Unit tangent oriented along `ref`.
  PhasePoint tangent(PhasePoint p, PhasePoint ref) const {
    const auto g = grad(p);
    const double n = std::hypot(g.dX, g.dY);
    PhasePoint t{-g.dY / n, g.dX / n};
    if (t.X * ref.X + t.Y * ref.Y < 0.0) t = {-t.X, -t.Y};
    return t;
  }

  /// Newton projection onto the level set along the gradient.
  std::optional<PhasePoint> correct(PhasePoint p, int* iterations = nullptr) const {
    const double tol = 1e-13 * std::max(1.0, std::abs(level_));
    for (int i = 0; i < 12; ++i) {
      const double r = residual(p);
      if (std::abs(r) <= tol) {
        if (iterations) *iterations = i;
        return p;
      }
      const auto g = grad(p);
      const double n2 = g.dX * g.dX + g.dY * g.dY;
      if (!(n2 > kCriticalGrad * kCriticalGrad)) return std::nullopt;
      p.X -= r * g.dX / n2;
      p.Y -= r * g.dY / n2;
    }
    if (std::abs(residual(p)) <= opts_.trace_tol * 1e-2) {
      if (iterations) *iterations = 12;
      return p;
    }
    return std::nullopt;
  }

  /// Point where the curve leaves the rectangle between `from` (inside) and
  /// `from + h t` (outside), snapped onto the boundary edge.
  PhasePoint locate_exit(PhasePoint from, PhasePoint t, double h) const {
    double lo = 0.0;
    double hi = h;
    PhasePoint best = from;
    for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
      const double mid = 0.5 * (lo + hi);
      const auto q = correct({from.X + mid * t.X, from.Y + mid * t.Y});
      if (q && in_rect(*q, 0.0)) {
        lo = mid;
        best = *q;
      } else {
        hi = mid;
      }
    }
    return snap(best);
  }

  /// Moves a point lying within a few ulps of an edge exactly onto it, then
  /// re-solves the level equation along that edge.
  PhasePoint snap(PhasePoint p) const {
    const double dx0 = std::abs(p.X);
    const double dx1 = std::abs(1.0 - p.X);
    const double dy0 = std::abs(p.Y + 1.0);
    const double dy1 = std::abs(1.0 - p.Y);
    const double dmin = std::min({dx0, dx1, dy0, dy1});
    if (dmin > 1e-9) return p;
    const bool vertical_edge = (dmin == dx0 || dmin == dx1);
    PhasePoint q = p;
    if (vertical_edge) {
      q.X = (dmin == dx0) ? 0.0 : 1.0;
    } else {
      q.Y = (dmin == dy0) ? -1.0 : 1.0;
    }
    // 1-D Newton along the edge; only accept small moves.
    PhasePoint r = q;
    for (int i = 0; i < 20; ++i) {
      const double res = residual(r);
      if (std::abs(res) <= 1e-14 * std::max(1.0, std::abs(level_))) break;
      const auto g = grad(r);
      const double d = vertical_edge ? g.dY : g.dX;
      if (std::abs(d) < 1e-14) break;
      if (vertical_edge) {
        r.Y -= res / d;
      } else {
        r.X -= res / d;
      }
    }
    r.X = std::clamp(r.X, 0.0, 1.0);
    r.Y = std::clamp(r.Y, -1.0, 1.0);
    if (dist(r, q) <= 1e-7 && std::abs(residual(r)) <= std::abs(residual(q))) return r;
    return q;
  }

 private:
  const BergerParams& params_;
  double K_;
  double level_;
  const TraceOptions& opts_;
};

bool on_boundary(PhasePoint p) {
  return std::abs(p.X) <= kEdgeTol || std::abs(p.X - 1.0) <= kEdgeTol || std::abs(p.Y - 1.0) <= kEdgeTol ||
         std::abs(p.Y + 1.0) <= kEdgeTol;
}

}  // namespace

LevelCurve trace_level_curve(const BergerParams& params, double K, double level, PhasePoint start,
                             int direction, const TraceOptions& opts) {
  if (direction != 1 && direction != -1) throw DomainError("trace_level_curve: direction must be +1 or -1");
  if (!in_rect(start, kEdgeTol)) throw DomainError("trace_level_curve: start lies outside the phase rectangle");

  Tracer tr(params, K, level, opts);
  LevelCurve curve;
  curve.level = level;
  if (!(std::abs(tr.residual(start)) <= opts.trace_tol)) {
    throw DomainError("trace_level_curve: start point is not on the requested level");
  }
  curve.points.push_back(start);

  const auto g0 = tr.grad(start);
  const double gn = std::hypot(g0.dX, g0.dY);
  if (gn < kCriticalGrad) throw CriticalPointError("trace_level_curve: start point is critical", curve);

  PhasePoint t{-g0.dY / gn, g0.dX / gn};
  const double lead = std::abs(t.X) > 1e-12 ? t.X : t.Y;
  if (lead * direction < 0.0) t = {-t.X, -t.Y};

  const bool start_on_boundary = on_boundary(start);
  if (start_on_boundary) {
    // Tangent to an edge through the start point: the usual corner degeneracy.
    const bool on_x_edge = std::abs(start.X) <= kEdgeTol || std::abs(start.X - 1.0) <= kEdgeTol;
    const bool on_y_edge = std::abs(std::abs(start.Y) - 1.0) <= kEdgeTol;
    curve.degenerate_start = (on_x_edge && std::abs(t.X) < 1e-6) || (on_y_edge && std::abs(t.Y) < 1e-6);
  }

  double h = opts.initial_step;
  double arc = 0.0;
  PhasePoint prev = start;
  for (std::size_t step = 0; step < opts.max_steps; ++step) {
    const PhasePoint pred{prev.X + h * t.X, prev.Y + h * t.Y};
    int iters = 0;
    const auto q = tr.correct(pred, &iters);
    bool ok = q.has_value() && dist(*q, pred) <= 0.5 * h;
    PhasePoint tq{};
    if (ok) {
      const auto gq = tr.grad(*q);
      if (std::hypot(gq.dX, gq.dY) < kCriticalGrad) {
        curve.points.push_back(*q);
        throw CriticalPointError("trace_level_curve: encountered a critical point of F", curve);
      }
      tq = tr.tangent(*q, t);
      ok = (t.X * tq.X + t.Y * tq.Y) >= std::cos(0.3);
    }
    if (!ok) {
      // A predictor leaving the rectangle may fail to correct; check for an exit first.
      if (!in_rect(pred, kEdgeTol) && h <= 4.0 * opts.min_step) {
        curve.points.push_back(tr.locate_exit(prev, t, h));
        curve.endpoints = std::make_pair(start, curve.points.back());
        return curve;
      }
      h *= 0.5;
      if (h < opts.min_step) {
        throw CriticalPointError("trace_level_curve: step size underflow (near-critical region)", curve);
      }
      continue;
    }
    if (!in_rect(*q, kEdgeTol)) {
      const PhasePoint exit = tr.locate_exit(prev, t, h);
      if (dist(exit, curve.points.back()) > 0.0 || curve.points.size() == 1) curve.points.push_back(exit);
      curve.endpoints = std::make_pair(start, curve.points.back());
      return curve;
    }
    const double d = dist(*q, prev);
    arc += d;
    if (!start_on_boundary && curve.points.size() > 8 && arc > 4.0 * opts.max_step &&
        dist(*q, start) <= 1.5 * h) {
      curve.points.push_back(start);
      curve.closed = true;
      return curve;
    }
    curve.points.push_back(*q);
    prev = *q;
    const bool smooth = (t.X * tq.X + t.Y * tq.Y) >= std::cos(0.05);
    t = tq;
    if (iters <= 3 && smooth) h = std::min(1.5 * h, opts.max_step);
  }
  return curve;
}

Connectivity level_one_connectivity(const BergerParams& params, double K, const TraceOptions& opts) {
  Connectivity out;
  try {
    out.curve = trace_level_curve(params, K, 1.0, {0.0, 1.0}, +1, opts);
    out.flagged = out.curve.degenerate_start;
  } catch (const CriticalPointError& e) {
    out.curve = e.partial();
    out.flagged = true;
    return out;
  }
  if (!out.curve.closed && out.curve.endpoints) {
    const PhasePoint end = out.curve.endpoints->second;
    out.connected = dist(end, {0.0, -1.0}) <= 1e-6 && out.curve.points.size() > 2;
  }
  return out;
}

}  // namespace berger

namespace berger {

ContourSet trace_contours(const BergerParams& params, double K, double level, std::size_t grid_n,
                          const TraceOptions& opts) {
  if (grid_n < 2) throw DomainError("trace_contours: grid must have at least 2 cells per side");
  ContourSet out;
  out.level = level;
  const std::size_t n = grid_n;
  auto gx = [n](std::size_t i) { return static_cast<double>(i) / static_cast<double>(n); };
  auto gy = [n](std::size_t j) { return -1.0 + 2.0 * static_cast<double>(j) / static_cast<double>(n); };
  std::vector<char> visited(n * n, 0);
  auto mark = [&](PhasePoint p) {
    const auto i = static_cast<std::size_t>(std::clamp(p.X * n, 0.0, n - 1.0));
    const auto j = static_cast<std::size_t>(std::clamp((p.Y + 1.0) * 0.5 * n, 0.0, n - 1.0));
    visited[j * n + i] = 1;
  };
  auto is_visited = [&](PhasePoint p) {
    const auto i = static_cast<std::size_t>(std::clamp(p.X * n, 0.0, n - 1.0));
    const auto j = static_cast<std::size_t>(std::clamp((p.Y + 1.0) * 0.5 * n, 0.0, n - 1.0));
    return visited[j * n + i] != 0;
  };
  auto mark_curve = [&](const LevelCurve& c) {
    for (std::size_t k = 0; k < c.points.size(); ++k) {
      mark(c.points[k]);
      if (k + 1 < c.points.size()) {
        mark({0.5 * (c.points[k].X + c.points[k + 1].X), 0.5 * (c.points[k].Y + c.points[k + 1].Y)});
      }
    }
  };
  auto f = [&](PhasePoint p) { return energy_value(params, K, p) - level; };

  auto seed_on_edge = [&](PhasePoint a, PhasePoint b) -> std::optional<PhasePoint> {
    double fa = f(a);
    const double fb = f(b);
    if ((fa < 0.0) == (fb < 0.0)) return std::nullopt;
    for (int it = 0; it < 200; ++it) {
      const PhasePoint m{0.5 * (a.X + b.X), 0.5 * (a.Y + b.Y)};
      const double fm = f(m);
      if ((fm < 0.0) == (fa < 0.0)) {
        a = m;
        fa = fm;
      } else {
        b = m;
      }
      if (std::hypot(a.X - b.X, a.Y - b.Y) < 1e-15) break;
    }
    return PhasePoint{0.5 * (a.X + b.X), 0.5 * (a.Y + b.Y)};
  };

  auto trace_from = [&](PhasePoint seed) {
    LevelCurve joined;
    joined.level = level;
    try {
      LevelCurve fwd = trace_level_curve(params, K, level, seed, +1, opts);
      if (fwd.closed) {
        joined = std::move(fwd);
      } else {
        LevelCurve bwd = trace_level_curve(params, K, level, seed, -1, opts);
        joined.points.assign(bwd.points.rbegin(), bwd.points.rend());
        joined.points.insert(joined.points.end(), fwd.points.begin() + 1, fwd.points.end());
        if (fwd.endpoints && bwd.endpoints) {
          joined.endpoints = std::make_pair(bwd.endpoints->second, fwd.endpoints->second);
        }
      }
    } catch (const CriticalPointError& e) {
      joined = e.partial();
      ++out.failures;
    } catch (const DomainError&) {
      ++out.failures;
      return;
    }
    if (joined.points.size() < 2) return;
    mark_curve(joined);
    out.components.push_back(std::move(joined));
  };

  for (std::size_t j = 0; j <= n; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      if (auto s = seed_on_edge({gx(i), gy(j)}, {gx(i + 1), gy(j)}); s && !is_visited(*s)) trace_from(*s);
    }
  }
  for (std::size_t i = 0; i <= n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (auto s = seed_on_edge({gx(i), gy(j)}, {gx(i), gy(j + 1)}); s && !is_visited(*s)) trace_from(*s);
    }
  }
  return out;
}

}  // namespace berger
