#include "berger/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <limits>
#include <random>
#include <sstream>

#include "berger/errors.hpp"
#include "berger/profile.hpp"
#include "berger/sphere.hpp"

namespace berger::verify {

namespace {

struct Case {
  double tau;
  double K;
};

// Sphere parameters exercised by the profile suites.
constexpr Case kSphereCases[] = {{0.75, 3.0}, {0.5, 4.0}, {2.0, 0.5}, {1.0, 2.0}};

std::string label(const Case& c) {
  std::ostringstream os;
  os << "(tau=" << c.tau << ", K=" << c.K << ")";
  return os.str();
}

SuiteResult finish(SuiteResult r, double worst, std::string detail) {
  r.metric = worst;
  r.passed = worst <= r.threshold;
  r.detail = std::move(detail);
  return r;
}

Trajectory seeded(const BergerParams& params, double K, double rtol, double spacing) {
  IntegrateOptions opts;
  opts.tol = {rtol, rtol * 1e-2};
  opts.sample_spacing = spacing;
  opts.length = 20.0;
  try {
    return integrate(params, K, axis_seed(params, K), opts);
  } catch (const SingularityError& e) {
    if (e.partial()) return *e.partial();
    throw;
  }
}

}  // namespace

SuiteResult energy_suite(const VerifyConfig& cfg) {
  SuiteResult r{"energy", false, 0.0, 1.0, {}};
  // Worst ratio drift / budget over both routes.
  double worst = 0.0;
  std::ostringstream detail;
  for (const auto& c : kSphereCases) {
    const auto params = make_params(c.tau);
    const auto traj = seeded(params, c.K, cfg.integrator_rtol, 0.0);
    const double budget = 100.0 * cfg.integrator_rtol;
    worst = std::max(worst, traj.max_energy_drift / budget);
    const auto sphere = build_sphere_with_spacing(params, c.K, 1e-3);
    worst = std::max(worst, sphere.profile.max_energy_drift / 1e-8);
    detail << label(c) << " integrated drift " << traj.max_energy_drift << " (budget " << budget
           << "), assembled drift " << sphere.profile.max_energy_drift << "; ";
  }
  return finish(r, worst, detail.str());
}

SuiteResult frobenius_suite(const VerifyConfig&) {
  SuiteResult r{"frobenius", false, 0.0, 1e-5, {}};
  double worst = 0.0;
  std::ostringstream detail;
  bool halving_ok = true;
  for (const auto& c : kSphereCases) {
    const auto params = make_params(c.tau);
    const double coarse = frobenius_residual(build_sphere_with_spacing(params, c.K, 1e-3).profile);
    const double fine = frobenius_residual(build_sphere_with_spacing(params, c.K, 5e-4).profile);
    worst = std::max(worst, coarse);
    if (!(fine * 3.0 <= coarse)) halving_ok = false;
    detail << label(c) << " residual " << coarse << " -> " << fine << "; ";
  }
  auto out = finish(r, worst, detail.str());
  if (!halving_ok) {
    out.passed = false;
    out.detail += "halving the spacing did not reduce the residual threefold";
  }
  return out;
}

SuiteResult symmetry_suite(const VerifyConfig&) {
  SuiteResult r{"symmetry", false, 0.0, 1e-8, {}};
  double worst = 0.0;
  std::ostringstream detail;
  const auto params = make_params(0.75);
  const auto traj = seeded(params, 3.0, 1e-13, 2e-3);
  const double s_mid = traj.states[traj.states.size() / 2].s;
  const Symmetry transforms[] = {Symmetry::y_translate(0.7), Symmetry::alpha_shift(-2), Symmetry::reverse(s_mid),
                                 Symmetry::reflect(0.3)};
  const double base = ode_residual(traj);
  worst = std::max(worst, base);
  for (const auto& sym : transforms) worst = std::max(worst, ode_residual(apply_symmetry(traj, sym)));
  detail << "integrated residual " << base << "; ";

  // Turning-point mirror: the sphere profile is its own image through s = T/2.
  const auto sphere = build_sphere(params, 3.0, 4097);
  const auto& st = sphere.profile.states;
  const auto mirrored = apply_symmetry(sphere.profile, Symmetry::turn_reflect(st[st.size() / 2].s));
  worst = std::max(worst, ode_residual(mirrored));
  double mirror_gap = 0.0;
  for (std::size_t i = 0; i < st.size(); ++i) {
    const auto& a = st[i];
    const auto& b = mirrored.states[i];
    mirror_gap = std::max({mirror_gap, std::abs(a.s - b.s), std::abs(a.x - b.x), std::abs(a.y - b.y),
                           std::abs(a.alpha - b.alpha)});
  }
  detail << "turning-point mirror gap " << mirror_gap << "; ";

  // Continuation through the pole on the threshold sphere of tau = 2.
  const auto p2 = make_params(2.0);
  IntegrateOptions opts;
  opts.tol = {1e-13, 1e-15};
  opts.sample_spacing = 1e-4;
  opts.length = 20.0;
  opts.eps_pole = 1e-7;
  double pole_residual = 0.0;
  bool reached_pole = false;
  try {
    const auto to_pole = integrate(p2, p2.k0(), axis_seed(p2, p2.k0()), opts);
    if (to_pole.termination == Termination::boundary_pole) {
      reached_pole = true;
      // y' grows like 1 / cos x at the pole, so the stencil is kept 0.1 away from it.
      pole_residual = ode_residual(apply_symmetry(to_pole, Symmetry::pole_continue(), opts.eps_pole), 0.1);
    }
  } catch (const SingularityError& e) {
    detail << "pole trajectory: " << e.what() << "; ";
  }
  worst = std::max(worst, pole_residual);
  detail << "pole continuation residual " << pole_residual << (reached_pole ? "" : " (pole not reached)");

  auto out = finish(r, worst, detail.str());
  if (mirror_gap > 1e-7 || !reached_pole) out.passed = false;
  return out;
}

SuiteResult route_equivalence_suite(const VerifyConfig&) {
  SuiteResult r{"route-equivalence", false, 0.0, 1e-7, {}};
  double worst = 0.0;
  std::ostringstream detail;
  for (const auto& c : kSphereCases) {
    const auto params = make_params(c.tau);
    const auto sphere = build_sphere(params, c.K, 2049, {.validate_with_trace = false});
    double ymin = 0.0, ymax = 0.0;
    for (const auto& st : sphere.profile.states) {
      ymin = std::min(ymin, st.y);
      ymax = std::max(ymax, st.y);
    }
    const double gap = std::abs(sphere.h - 0.5 * (ymax - ymin));
    worst = std::max(worst, gap);
    detail << label(c) << " h " << sphere.h << " gap " << gap << "; ";
  }
  return finish(r, worst, detail.str());
}

SuiteResult boundary_identity_suite(const VerifyConfig& cfg) {
  SuiteResult r{"boundary-identity", false, 0.0, 1e-12, {}};
  const auto& F = cfg.phase_function;
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst = 0.0;
  const Case cases[] = {{0.5, 3.0}, {0.75, 2.5}, {1.0, 1.5}, {2.0, 0.3}, {0.3, 5.0}};
  for (const auto& c : cases) {
    const auto params = make_params(c.tau);
    const double lam = params.lambda();
    const double K = c.K;
    auto rel = [](double got, double want) { return std::abs(got - want) / std::max(1.0, std::abs(want)); };
    worst = std::max({worst, rel(F(params, K, {0.0, 1.0}), 1.0), rel(F(params, K, {0.0, -1.0}), 1.0)});
    for (std::size_t i = 0; i < cfg.boundary_points; ++i) {
      const double Y = 2.0 * unit(rng) - 1.0;
      const double X = unit(rng);
      worst = std::max(worst, rel(F(params, K, {1.0, Y}), K * (1.0 - lam)));
      worst = std::max(worst, rel(F(params, K, {X, 0.0}), K * (1.0 - lam * X) * X));
      if (lam > 0.5) worst = std::max(worst, rel(F(params, K, {1.0 / (2.0 * lam), Y}), K / (4.0 * lam)));
    }
  }
  return finish(r, worst, "corner, X = 1, Y = 0 and critical-segment identities");
}

SuiteResult existence_suite(const VerifyConfig&) {
  SuiteResult r{"existence", false, 0.0, 0.0, {}};
  std::size_t disagreements = 0, checked = 0;
  constexpr int n = 8;
  for (int i = 0; i < n; ++i) {
    const double tau = 0.4 + (2.5 - 0.4) * i / (n - 1);
    const auto params = make_params(tau);
    for (int j = 0; j < n; ++j) {
      const double K = 0.1 + (6.0 - 0.1) * j / (n - 1);
      if (std::abs(K - params.k0()) < 1e-3) continue;
      const auto conn = level_one_connectivity(params, K);
      ++checked;
      if (conn.connected != sphere_exists(params, K)) ++disagreements;
    }
  }
  std::ostringstream detail;
  detail << disagreements << " disagreements over " << checked << " grid points";
  return finish(r, static_cast<double>(disagreements), detail.str());
}

std::vector<SuiteResult> run_all(const VerifyConfig& cfg) {
  std::vector<SuiteResult> out;
  auto guarded = [&](const char* name, SuiteResult (*suite)(const VerifyConfig&)) {
    try {
      out.push_back(suite(cfg));
    } catch (const std::exception& e) {
      out.push_back({name, false, std::numeric_limits<double>::infinity(), 0.0, e.what()});
    }
  };
  guarded("energy", energy_suite);
  guarded("frobenius", frobenius_suite);
  guarded("symmetry", symmetry_suite);
  guarded("route-equivalence", route_equivalence_suite);
  guarded("boundary-identity", boundary_identity_suite);
  guarded("existence", existence_suite);
  return out;
}

}  // namespace berger::verify
