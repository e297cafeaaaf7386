#include "berger/profile.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "berger/errors.hpp"
#include "berger/phase.hpp"

namespace berger {

const char* to_string(Termination t) {
  switch (t) {
    case Termination::boundary_axis: return "boundary_axis";
    case Termination::boundary_pole: return "boundary_pole";
    case Termination::step_limit: return "step_limit";
    case Termination::singular_alpha: return "singular_alpha";
    case Termination::alpha_target: return "alpha_target";
    case Termination::span_complete: return "span_complete";
  }
  return "unknown";
}

namespace {

using Vec3 = ode::State<3>;

// Unchecked right-hand side; may return non-finite values at singular loci.
Vec3 raw_rhs(const BergerParams& params, double K, const Vec3& u) {
  const double lam = params.lambda();
  const double sx = std::sin(u[0]);
  const double cx = std::cos(u[0]);
  const double S = sx * sx;
  const double sa = std::sin(u[2]);
  const double ca = std::cos(u[2]);
  const double one_m_lS = 1.0 - lam * S;
  const double one_m_2lS = 1.0 - 2.0 * lam * S;
  const double bracket =
      one_m_lS / one_m_2lS * K - ca * ca * ((1.0 - lam) / one_m_lS + 4.0 * lam * cx * cx / one_m_2lS);
  return {ca, std::sqrt(one_m_lS) / (params.tau() * cx) * sa, sx / cx / sa * bracket};
}

void check_singular(const BergerParams& params, const ProfileState& st, double tol) {
  if (std::abs(std::sin(st.alpha)) < tol) {
    throw SingularityError("rhs: sin(alpha) vanishes", "sin(alpha)");
  }
  if (std::abs(std::cos(st.x)) < tol) {
    throw SingularityError("rhs: cos(x) vanishes", "cos(x)");
  }
  const double sx = std::sin(st.x);
  if (std::abs(1.0 - 2.0 * params.lambda() * sx * sx) < tol) {
    throw SingularityError("rhs: 1 - 2 lambda sin^2 x vanishes", "1 - 2 lambda sin^2 x");
  }
}

ProfileState to_state(double s, const Vec3& u) { return {s, u[0], u[1], u[2]}; }

void finalize(Trajectory& traj) {
  traj.energy_drift.resize(traj.states.size());
  traj.max_energy_drift = 0.0;
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    const double d = std::abs(profile_energy(traj.params, traj.K, traj.states[i]) - traj.energy0);
    traj.energy_drift[i] = d;
    traj.max_energy_drift = std::max(traj.max_energy_drift, d);
  }
}

}  // namespace

RhsValue rhs(const BergerParams& params, double K, const ProfileState& state, double singular_tol) {
  check_singular(params, state, singular_tol);
  const auto d = raw_rhs(params, K, {state.x, state.y, state.alpha});
  return {d[0], d[1], d[2]};
}

double profile_energy(const BergerParams& params, double K, const ProfileState& state) {
  const double sx = std::sin(state.x);
  return energy_value(params, K, {sx * sx, std::cos(state.alpha)});
}

ProfileState axis_seed(const BergerParams& params, double K, double x_start) {
  const double lam = params.lambda();
  const double c2 = K - 1.0 - 3.0 * lam;
  if (!(c2 > 0.0)) {
    throw DomainError("axis_seed: no launch from the axis when K <= 4 - 3 tau^2");
  }
  const double sx = std::sin(x_start);
  const double X = sx * sx;
  // sin^2(alpha) on the energy-1 curve, expanded so the O(X) leading term
  // carries no cancellation.
  const double P = c2 + 2.0 * lam * (2.0 * lam + 2.0 - K) * X + lam * lam * (K - 4.0) * X * X;
  const double den = (1.0 - 2.0 * lam * X) * (1.0 - 2.0 * lam * X) * (1.0 - X);
  const double sin2 = X * P / den;
  if (!(sin2 > 0.0 && sin2 < 1.0)) throw DomainError("axis_seed: x_start too large for an energy-1 launch");
  return {0.0, x_start, 0.0, std::atan2(std::sqrt(sin2), std::sqrt(1.0 - sin2))};
}

Trajectory integrate(const BergerParams& params, double K, const ProfileState& init, const IntegrateOptions& opts) {
  if (opts.direction != 1 && opts.direction != -1) throw DomainError("integrate: direction must be +1 or -1");
  if (!(opts.length > 0.0)) throw DomainError("integrate: length must be positive");
  if (std::abs(std::sin(init.alpha)) <= opts.eps_sing || std::abs(std::cos(init.x)) <= opts.eps_pole) {
    throw SingularityError("integrate: initial state lies on a singular locus", "initial state");
  }

  Trajectory traj;
  traj.params = params;
  traj.K = K;
  traj.energy0 = profile_energy(params, K, init);
  traj.drift_budget = 100.0 * opts.tol.rtol;

  auto f = [&params, K](double, const Vec3& u) { return raw_rhs(params, K, u); };
  ode::DormandPrince<3, decltype(f)> dp(f, opts.tol);

  const double dir = opts.direction;
  const double t_end = init.s + dir * opts.length;
  double t = init.s;
  Vec3 u{init.x, init.y, init.alpha};
  Vec3 du = dp.derivative(t, u);
  double h = ode::initial_step<3>(f, t, u, du, dir, std::min(opts.length, 0.1), opts.tol);

  traj.states.push_back(init);
  std::size_t next_sample = 1;
  auto sample_time = [&](std::size_t k) { return init.s + dir * static_cast<double>(k) * opts.sample_spacing; };

  const double alpha0 = init.alpha;
  auto events = [&](const Vec3& v) {
    // Each entry <= 0 means the event has fired.
    std::array<double, 4> g{};
    const double sx = std::sin(v[0]);
    g[0] = sx - opts.eps_axis;
    g[1] = (1.0 - opts.eps_pole) - sx;
    g[2] = std::abs(std::sin(v[2])) - opts.eps_sing;
    g[3] = opts.stop_alpha ? (*opts.stop_alpha - v[2]) * (*opts.stop_alpha >= alpha0 ? 1.0 : -1.0) : 1.0;
    return g;
  };
  constexpr Termination kEventKind[4] = {Termination::boundary_axis, Termination::boundary_pole,
                                         Termination::singular_alpha, Termination::alpha_target};

  auto emit_until = [&](const ode::Step<3>& step, double t_stop) {
    if (opts.sample_spacing <= 0.0) return;
    while (true) {
      const double ts = sample_time(next_sample);
      if (dir * (ts - t_stop) > 1e-14 * std::max(1.0, std::abs(ts))) break;
      traj.states.push_back(to_state(ts, step.at(ts)));
      ++next_sample;
    }
  };
  auto push_terminal = [&](double ts, const Vec3& v) {
    if (dir * (ts - traj.states.back().s) > 1e-13) traj.states.push_back(to_state(ts, v));
  };

  ode::Step<3> step;
  Vec3 du_new{};
  std::size_t nstep = 0;
  while (true) {
    if (nstep >= opts.max_steps) {
      traj.termination = Termination::step_limit;
      break;
    }
    const double remaining = dir * (t_end - t);
    if (remaining <= 1e-14 * std::max(1.0, std::abs(t_end))) {
      traj.termination = Termination::span_complete;
      break;
    }
    double h_try = std::min(std::abs(h), remaining);
    if (h_try < 1e-14 * std::max(1.0, std::abs(t))) {
      if (dir < 0) std::reverse(traj.states.begin(), traj.states.end());
      finalize(traj);
      throw SingularityError("integrate: step-size underflow at s = " + std::to_string(t), "step size",
                             std::move(traj));
    }
    double h_next = 0.0;
    if (!dp.try_step(t, u, du, dir * h_try, step, du_new, h_next)) {
      h = std::abs(h_next);
      continue;
    }
    ++nstep;
    h = std::abs(h_next);

    const auto g1 = events(step.y1);
    int fired = -1;
    double t_event = 0.0;
    Vec3 u_event{};
    for (int e = 0; e < 4; ++e) {
      if (g1[e] > 0.0) continue;
      double lo = step.t0;
      double hi = step.t1();
      for (int it = 0; it < 200 && std::abs(hi - lo) > opts.event_tol; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (events(step.at(mid))[e] > 0.0) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      if (fired < 0 || dir * (hi - t_event) < 0.0) {
        fired = e;
        t_event = hi;
        u_event = (hi == step.t1()) ? step.y1 : step.at(hi);
      }
    }
    if (fired >= 0) {
      emit_until(step, t_event);
      push_terminal(t_event, u_event);
      traj.termination = kEventKind[fired];
      break;
    }

    emit_until(step, step.t1());
    t = step.t1();
    u = step.y1;
    du = du_new;
    if (opts.sample_spacing <= 0.0) traj.states.push_back(to_state(t, u));
    if (dir * (t_end - t) <= 1e-14 * std::max(1.0, std::abs(t_end))) {
      push_terminal(t_end, u);
      traj.termination = Termination::span_complete;
      break;
    }
  }
  if (dir < 0) std::reverse(traj.states.begin(), traj.states.end());
  finalize(traj);
  return traj;
}

Trajectory apply_symmetry(const Trajectory& traj, const Symmetry& sym, double eps_pole) {
  Trajectory out = traj;
  auto& st = out.states;
  using Kind = Symmetry::Kind;
  switch (sym.kind) {
    case Kind::y_translate:
      for (auto& p : st) p.y += sym.value;
      break;
    case Kind::alpha_shift:
      for (auto& p : st) p.alpha += 2.0 * std::numbers::pi * sym.k;
      break;
    case Kind::reverse:
      for (auto& p : st) {
        p.s = 2.0 * sym.value - p.s;
        p.alpha += std::numbers::pi;
      }
      std::reverse(st.begin(), st.end());
      std::reverse(out.energy_drift.begin(), out.energy_drift.end());
      break;
    case Kind::reflect:
      for (auto& p : st) {
        p.y = 2.0 * sym.value - p.y;
        p.alpha = -p.alpha;
      }
      break;
    case Kind::turn_reflect: {
      const auto it = std::min_element(st.begin(), st.end(), [&](const ProfileState& a, const ProfileState& b) {
        return std::abs(a.s - sym.value) < std::abs(b.s - sym.value);
      });
      if (it == st.end() || std::abs(it->s - sym.value) > 1e-9) {
        throw DomainError("turn_reflect: s0 must coincide with a sample of the trajectory");
      }
      if (std::abs(std::cos(it->alpha)) > 1e-7) {
        throw DomainError("turn_reflect: x'(s0) = cos(alpha(s0)) does not vanish");
      }
      const double y0 = it->y;
      const double base = std::sin(it->alpha) > 0.0 ? std::numbers::pi : -std::numbers::pi;
      for (auto& p : st) {
        p.s = 2.0 * sym.value - p.s;
        p.y = 2.0 * y0 - p.y;
        p.alpha = base - p.alpha;
      }
      std::reverse(st.begin(), st.end());
      std::reverse(out.energy_drift.begin(), out.energy_drift.end());
      break;
    }
    case Kind::pole_continue:
      if (st.empty() || std::sin(st.back().x) < 1.0 - eps_pole) {
        throw DomainError("pole_continue: trajectory does not end at the pole (sin x = 1)");
      }
      for (auto& p : st) p.y += std::numbers::pi;
      break;
  }
  return out;
}

double ode_residual(const Trajectory& traj, double singular_margin) {
  const auto& st = traj.states;
  double worst = 0.0;
  for (std::size_t i = 2; i + 2 < st.size(); ++i) {
    // Five-point stencil, only on uniformly spaced windows.
    const double h = st[i + 1].s - st[i].s;
    if (!(h > 0.0)) continue;
    bool uniform = true;
    for (std::size_t j = i - 2; j < i + 2; ++j) {
      if (std::abs((st[j + 1].s - st[j].s) - h) > 1e-9 * h) uniform = false;
    }
    if (!uniform) continue;
    const auto& p = st[i];
    if (std::abs(std::sin(p.alpha)) < singular_margin || std::abs(std::cos(p.x)) < singular_margin) continue;
    auto d = [&](double ProfileState::*f) {
      return ((st[i - 2].*f) - 8.0 * (st[i - 1].*f) + 8.0 * (st[i + 1].*f) - (st[i + 2].*f)) / (12.0 * h);
    };
    const auto r = raw_rhs(traj.params, traj.K, {p.x, p.y, p.alpha});
    worst = std::max({worst, std::abs(d(&ProfileState::x) - r[0]), std::abs(d(&ProfileState::y) - r[1]),
                      std::abs(d(&ProfileState::alpha) - r[2])});
  }
  return worst;
}

Trajectory clifford_solution(const BergerParams& params, double x0, std::size_t samples,
                             std::optional<double> length) {
  const double q = x0 / (0.5 * std::numbers::pi);
  if (!std::isfinite(x0) || std::abs(q - std::round(q)) < 1e-12) {
    throw DomainError("clifford_solution: x0 must not be an integer multiple of pi/2");
  }
  if (samples < 2) throw DomainError("clifford_solution: need at least two samples");
  const double sx = std::sin(x0);
  const double omega = std::sqrt(1.0 - params.lambda() * sx * sx) / (params.tau() * std::cos(x0));
  const double L = length.value_or(2.0 * std::numbers::pi / std::abs(omega));
  Trajectory traj;
  traj.params = params;
  traj.K = 0.0;
  traj.termination = Termination::span_complete;
  for (std::size_t i = 0; i < samples; ++i) {
    const double s = L * static_cast<double>(i) / static_cast<double>(samples - 1);
    traj.states.push_back({s, x0, omega * s, 0.5 * std::numbers::pi});
  }
  traj.energy0 = profile_energy(params, 0.0, traj.states.front());
  finalize(traj);
  return traj;
}

Trajectory great_sphere_solution(const BergerParams& params, double y0, std::size_t samples) {
  if (params.lambda() != 0.0) throw DomainError("great_sphere_solution: only the round sphere (tau = 1)");
  if (samples < 2) throw DomainError("great_sphere_solution: need at least two samples");
  Trajectory traj;
  traj.params = params;
  traj.K = 1.0;
  traj.termination = Termination::boundary_pole;
  for (std::size_t i = 0; i < samples; ++i) {
    const double s = 0.5 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(samples - 1);
    traj.states.push_back({s, s, y0, 0.0});
  }
  traj.energy0 = 1.0;
  finalize(traj);
  return traj;
}

FundamentalForm fundamental_form(const BergerParams& params, double /*K*/, const ProfileState& state, double xprime,
                                 double yprime) {
  const double lam = params.lambda();
  const double sx = std::sin(state.x);
  const double cx = std::cos(state.x);
  const double S = sx * sx;
  const double C = cx * cx;
  return {xprime * xprime + C * (1.0 - lam * C) * yprime * yprime, -lam * S * C * yprime, (1.0 - lam * S) * S};
}

double frobenius_residual(const Trajectory& traj) {
  const auto& st = traj.states;
  if (st.size() < 3) throw DomainError("frobenius_residual: need at least 3 samples");
  const double lam = traj.params.lambda();
  auto phi = [lam](const ProfileState& p) {
    const double sx = std::sin(p.x);
    return std::sqrt((1.0 - lam * sx * sx) * sx * sx);
  };
  // phi(b) - phi(a) without cancellation: G(b) - G(a) = sin(b - a) sin(b + a) (1 - lam (Sa + Sb)).
  auto dphi = [lam, &phi](const ProfileState& a, const ProfileState& b) {
    const double sa = std::sin(a.x), sb = std::sin(b.x);
    const double dG = std::sin(b.x - a.x) * std::sin(b.x + a.x) * (1.0 - lam * (sa * sa + sb * sb));
    const double sum = phi(a) + phi(b);
    return sum > 0.0 ? dG / sum : 0.0;
  };
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < st.size(); ++i) {
    const double hm = st[i].s - st[i - 1].s;
    const double hp = st[i + 1].s - st[i].s;
    if (!(hm > 0.0 && hp > 0.0) || hp > 2.0 * hm || hm > 2.0 * hp) continue;
    const double f0 = phi(st[i]);
    const double d2 = 2.0 * (dphi(st[i], st[i + 1]) / hp - dphi(st[i - 1], st[i]) / hm) / (hm + hp);
    worst = std::max(worst, std::abs(d2 + traj.K * f0));
  }
  return worst;
}

AmbientPoint embedding(const BergerParams& /*params*/, const ProfileState& state, double t) {
  const double cx = std::cos(state.x);
  const double sx = std::sin(state.x);
  return {{cx * std::cos(state.y), cx * std::sin(state.y)}, {sx * std::cos(t), sx * std::sin(t)}};
}

}  // namespace berger
