// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

#include "berger/errors.hpp"
#include "berger/phase.hpp"
#include "berger/profile.hpp"
#include "berger/sphere.hpp"

using namespace berger;
using Rational = boost::multiprecision::cpp_rational;
constexpr double kPi = std::numbers::pi;

namespace {

struct Outcome {
  bool ok;
  std::string detail;
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

struct Pair {
  double tau;
  double K;
};
constexpr Pair kFour[] = {{0.75, 3.0}, {0.5, 4.0}, {2.0, 0.5}, {1.0, 2.0}};

Outcome thresholds() {
  const Rational taus[] = {Rational(1, 2), Rational(3, 4), Rational(1), Rational(2)};
  const double k0_expected[] = {3.25, 2.3125, 1.0, 0.25};
  const double kp_expected[] = {3.25, 2.3125, 1.0, 4.0};
  bool ok = true;
  for (int i = 0; i < 4; ++i) {
    const Rational t = taus[i];
    const Rational k0 = t <= 1 ? Rational(4 - 3 * t * t) : Rational(1 / (t * t));
    const Rational kp = t <= 1 ? Rational(4 - 3 * t * t) : Rational(t * t);
    const auto p = make_params(static_cast<double>(t));
    ok = ok && p.k0() == static_cast<double>(k0) && p.kp() == static_cast<double>(kp);
    ok = ok && p.k0() == k0_expected[i] && p.kp() == kp_expected[i];
  }
  return {ok, "bit-exact against rational evaluation"};
}

Outcome boundary_identities() {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  double worst = 0.0;
  auto rel = [](double got, double want) { return std::abs(got - want) / std::max(1.0, std::abs(want)); };
  for (int i = 0; i < 10000; ++i) {
    const auto p = make_params(0.05 + 3.0 * U(rng));
    const double K = 8.0 * U(rng) - 1.0;
    const double lam = p.lambda();
    const double X = U(rng), Y = 2.0 * U(rng) - 1.0;
    worst = std::max(worst, rel(energy_value(p, K, {0.0, i % 2 ? 1.0 : -1.0}), 1.0));
    worst = std::max(worst, rel(energy_value(p, K, {1.0, Y}), K * (1.0 - lam)));
    worst = std::max(worst, rel(energy_value(p, K, {X, 0.0}), K * (1.0 - lam * X) * X));
    // lambda > 1/2 needs tau < 1/sqrt(2).
    const auto q = make_params(0.01 + 0.69 * U(rng));
    const double lq = q.lambda();
    worst = std::max(worst, rel(energy_value(q, K, {1.0 / (2.0 * lq), Y}), K / (4.0 * lq)));
  }
  return {worst <= 1e-12, "max relative error " + num(worst) + " over 4 x 10^4 points"};
}

Outcome existence() {
  int checked = 0, wrong = 0;
  for (int i = 0; i < 20; ++i) {
    const double tau = 0.4 + 2.1 * i / 19.0;
    const auto p = make_params(tau);
    for (int j = 0; j < 20; ++j) {
      const double K = 0.1 + 5.9 * j / 19.0;
      if (std::abs(K - p.k0()) < 1e-3) continue;
      ++checked;
      if (level_one_connectivity(p, K).connected != (K >= p.k0())) ++wrong;
    }
  }
  return {wrong == 0, std::to_string(wrong) + " disagreements on " + std::to_string(checked) + " grid points"};
}

Outcome energy() {
  double worst = 0.0;
  for (const auto& c : kFour) {
    worst = std::max(worst, build_sphere(make_params(c.tau), c.K).profile.max_energy_drift);
  }
  return {worst <= 1e-8, "max |E - 1| = " + num(worst)};
}

Outcome frobenius() {
  double worst = 0.0, worst_ratio = std::numeric_limits<double>::infinity();
  for (const auto& c : kFour) {
    const auto p = make_params(c.tau);
    const double coarse = frobenius_residual(build_sphere_with_spacing(p, c.K, 1e-3).profile);
    const double fine = frobenius_residual(build_sphere_with_spacing(p, c.K, 5e-4).profile);
    worst = std::max(worst, coarse);
    worst_ratio = std::min(worst_ratio, coarse / fine);
  }
  return {worst <= 1e-5 && worst_ratio >= 3.0,
          "max residual " + num(worst) + " at spacing 1e-3, smallest halving ratio " + num(worst_ratio)};
}

Outcome route_equivalence() {
  double worst = 0.0;
  for (const auto& c : kFour) {
    const auto p = make_params(c.tau);
    const auto sol = build_sphere(p, c.K, 513, {.validate_with_trace = false});
    double lo = 0.0, hi = 0.0;
    for (const auto& st : sol.profile.states) {
      lo = std::min(lo, st.y);
      hi = std::max(hi, st.y);
    }
    worst = std::max(worst, std::abs(vertical_radius(p, c.K) - 0.5 * (hi - lo)));
  }
  return {worst <= 1e-7, "max |h - y-span / 2| = " + num(worst)};
}

Outcome embeddedness() {
  const double h1 = vertical_radius(make_params(0.1), 5.0);
  const double h2 = vertical_radius(make_params(0.2), 5.0);
  const double t = embeddedness_boundary(5.0, 0.1, 0.2);
  const double gap = std::abs(vertical_radius(make_params(t), 5.0) - kPi);
  const bool ok = h1 > kPi && h2 < kPi && t > 0.1 && t < 0.2 && gap <= 1e-8;
  char buf[160];
  std::snprintf(buf, sizeof buf, "h(0.1,5) = %.6f, h(0.2,5) = %.6f, tau* = %.10f, |h(tau*) - pi| = %.2e", h1, h2, t,
                gap);
  return {ok, buf};
}

Outcome radius() {
  const bool round = sin2_horizontal_radius(make_params(1.0), 4.0) == 0.25;
  // (1/(2 lam)) (1 - sqrt(1 - 4 lam / K)) with lam = -3, K = 1/4 is exactly 1.
  const Rational disc = 1 - 4 * Rational(-3) / Rational(1, 4);
  const bool exact = disc == 49 && Rational((1 - Rational(7)) / (2 * Rational(-3))) == 1;
  const double pole_gap = std::abs(sin2_horizontal_radius(make_params(2.0), 0.25) - 1.0);
  const double cont_gap = std::abs(sin2_horizontal_radius(make_params(std::sqrt(1.0 - 1e-10)), 4.0) - 0.25);
  return {round && exact && pole_gap <= 1e-12 && cont_gap <= 1e-8,
          std::string("round case ") + (round ? "exact" : "inexact") + ", pole gap " + num(pole_gap) +
              ", continuity gap " + num(cont_gap)};
}

Outcome symmetries() {
  const auto p = make_params(0.75);
  const double K = 3.0;
  IntegrateOptions o;
  o.tol = {1e-13, 1e-15};
  o.sample_spacing = 2e-3;
  o.length = 20.0;
  const auto traj = integrate(p, K, axis_seed(p, K), o);
  double worst = ode_residual(traj);
  const double mid = traj.states[traj.states.size() / 2].s;
  for (const auto& sym : {Symmetry::y_translate(1.5), Symmetry::alpha_shift(2), Symmetry::reverse(mid),
                          Symmetry::reflect(0.4)}) {
    worst = std::max(worst, ode_residual(apply_symmetry(traj, sym)));
  }

  // Turning point: integrate both ways from alpha = pi/2 and mirror.
  const ProfileState turn{0.0, horizontal_radius(p, K), 0.0, kPi / 2};
  IntegrateOptions t = o;
  t.sample_spacing = 1e-3;
  t.length = 0.6;
  auto both = integrate(p, K, turn, {t.length, -1, t.sample_spacing, t.tol});
  const auto fwd = integrate(p, K, turn, t);
  both.states.insert(both.states.end(), fwd.states.begin() + 1, fwd.states.end());
  const auto mirrored = apply_symmetry(both, Symmetry::turn_reflect(0.0));
  worst = std::max(worst, ode_residual(mirrored));
  double mirror_gap = 0.0;
  for (std::size_t i = 0; i < both.states.size(); ++i) {
    mirror_gap = std::max({mirror_gap, std::abs(mirrored.states[i].x - both.states[i].x),
                           std::abs(mirrored.states[i].y - both.states[i].y),
                           std::abs(mirrored.states[i].alpha - both.states[i].alpha)});
  }

  // Pole continuation on the threshold sphere of tau = 2, kept 0.1 away from
  // the pole where y' ~ 1 / cos x defeats the difference stencil.
  const auto q = make_params(2.0);
  IntegrateOptions po = o;
  po.sample_spacing = 1e-4;
  po.eps_pole = 1e-7;
  const auto to_pole = integrate(q, q.k0(), axis_seed(q, q.k0()), po);
  const bool at_pole = to_pole.termination == Termination::boundary_pole;
  if (at_pole) {
    worst = std::max(worst, ode_residual(apply_symmetry(to_pole, Symmetry::pole_continue(), po.eps_pole), 0.1));
  }
  return {worst <= 1e-8 && mirror_gap <= 1e-7 && at_pole,
          "max residual " + num(worst) + ", turning-point mirror gap " + num(mirror_gap)};
}

Outcome constant_solutions() {
  double worst_rhs = 0.0, worst_frob = 0.0;
  for (double tau : {0.5, 1.0, 2.0}) {
    const auto p = make_params(tau);
    for (double x0 : {0.3, kPi / 4, 1.2}) {
      const auto c = clifford_solution(p, x0);
      worst_rhs = std::max(worst_rhs, ode_residual(c));
      for (const auto& st : c.states) {
        const auto d = rhs(p, 0.0, st);
        worst_rhs = std::max({worst_rhs, std::abs(d.dx), std::abs(d.dalpha)});
      }
      worst_frob = std::max(worst_frob, frobenius_residual(c));
    }
  }
  // (s, y0, 0) at tau = 1, K = 1: x' = cos 0 = 1, y' = 0 and the bracket of the
  // alpha equation vanishes, so alpha' -> 0 as alpha -> 0.
  const auto round = make_params(1.0);
  const auto g = great_sphere_solution(round, 0.3);
  double worst_geo = 0.0;
  for (const auto& st : g.states) {
    if (st.x <= 0.0 || st.x >= 1.5) continue;
    const auto d0 = rhs(round, 1.0, {st.s, st.x, st.y, 1e-13}, 1e-15);
    worst_geo = std::max({worst_geo, std::abs(d0.dx - 1.0), std::abs(d0.dy), std::abs(d0.dalpha)});
    // Along alpha -> 0 the alpha equation reduces to alpha' = tan x sin alpha.
    const double a = 1e-3;
    const auto d = rhs(round, 1.0, {st.s, st.x, st.y, a});
    worst_geo = std::max(worst_geo, std::abs(d.dalpha - std::tan(st.x) * std::sin(a)));
    worst_geo = std::max(worst_geo, std::abs(st.x - st.s) + std::abs(st.y - 0.3) + std::abs(st.alpha));
  }
  return {worst_rhs <= 1e-10 && worst_frob <= 1e-10 && worst_geo <= 1e-10,
          "Clifford rhs residual " + num(worst_rhs) + ", Frobenius " + num(worst_frob) + ", great sphere " +
              num(worst_geo)};
}

Outcome fundamental_forms() {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const double h = 1e-6;
  double worst_fd = 0.0, worst_id = 0.0;
  int done = 0;
  while (done < 100) {
    const auto p = make_params(0.2 + 2.5 * U(rng));
    const double K = 0.5 + 4.0 * U(rng);
    const ProfileState st{0.0, 0.05 + 1.4 * U(rng), 6.0 * U(rng), 0.05 + 3.0 * U(rng)};
    const double t = 6.0 * U(rng);
    if (std::abs(1 - 2 * p.lambda() * std::pow(std::sin(st.x), 2)) < 1e-3) continue;
    ++done;
    const auto d = rhs(p, K, st);
    auto at = [&](double dx, double dy, double dt) {
      return embedding(p, {0.0, st.x + dx, st.y + dy, st.alpha}, t + dt).as_real();
    };
    std::array<double, 4> ps{}, pt{};
    const auto xp = at(h, 0, 0), xm = at(-h, 0, 0), yp = at(0, h, 0), ym = at(0, -h, 0);
    const auto tp = at(0, 0, h), tm = at(0, 0, -h);
    for (int k = 0; k < 4; ++k) {
      ps[k] = d.dx * (xp[k] - xm[k]) / (2 * h) + d.dy * (yp[k] - ym[k]) / (2 * h);
      pt[k] = (tp[k] - tm[k]) / (2 * h);
    }
    const auto base = embedding(p, st, t);
    const auto us = make_tangent(base, ps), ut = make_tangent(base, pt);
    const auto ff = fundamental_form(p, K, st, d.dx, d.dy);
    auto rel = [](double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); };
    worst_fd = std::max({worst_fd, rel(metric(p, us, us), ff.E), rel(metric(p, us, ut), ff.F),
                         rel(metric(p, ut, ut), ff.G)});
    worst_id = std::max(worst_id, std::abs(ff.E * ff.G - ff.F * ff.F - ff.G));
  }
  return {worst_fd <= 1e-6 && worst_id <= 1e-10,
          "finite-difference gap " + num(worst_fd) + ", |EG - F^2 - G| " + num(worst_id)};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
  };
  const Criterion criteria[] = {
      {1, "threshold exactness", 1.0, thresholds},
      {2, "boundary identities of F", 1.0, boundary_identities},
      {3, "existence classification", 30.0, existence},
      {4, "energy conservation", 10.0, energy},
      {5, "Frobenius check", 10.0, frobenius},
      {6, "route equivalence", 10.0, route_equivalence},
      {7, "embeddedness at K = 5", 30.0, embeddedness},
      {8, "horizontal radius closed form", 1.0, radius},
      {9, "symmetry suite", 30.0, symmetries},
      {10, "Clifford and geodesic solutions", 10.0, constant_solutions},
      {11, "fundamental form cross-check", 10.0, fundamental_forms},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out{false, ""};
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs <= c.budget_s;
    const bool pass = out.ok && in_time;
    if (!pass) ++failed;
    std::printf("criterion %2d %-32s %s  %s [%.2f s%s]\n", c.id, c.name, pass ? "PASS" : "FAIL", out.detail.c_str(),
                secs, in_time ? "" : ", over budget");
  }
  std::printf("%d of 11 criteria passed\n", 11 - failed);
  return failed == 0 ? 0 : 1;
}
