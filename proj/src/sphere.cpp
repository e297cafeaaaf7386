#include "berger/sphere.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "berger/errors.hpp"
#include "berger/phase.hpp"

namespace berger {

namespace {

constexpr double kPi = std::numbers::pi;

void require_sphere(const BergerParams& params, double K, const char* who) {
  if (!sphere_exists(params, K)) {
    throw NoSphereError(std::string(who) + ": no rotational CGC sphere for K = " + std::to_string(K) +
                            " below k0 = " + std::to_string(params.k0()),
                        params.k0());
  }
}

}  // namespace

double sin2_horizontal_radius(const BergerParams& params, double K) {
  require_sphere(params, K, "horizontal_radius");
  const double lam = params.lambda();
  if (std::abs(lam) < 1e-14) return 1.0 / K;
  // (1 - sqrt(1 - 4 lam / K)) / (2 lam), rationalised to avoid cancellation as lam -> 0.
  const double disc = 1.0 - 4.0 * lam / K;
  return std::min(2.0 / (K * (1.0 + std::sqrt(std::max(disc, 0.0)))), 1.0);
}

double horizontal_radius(const BergerParams& params, double K) {
  return std::asin(std::sqrt(std::min(sin2_horizontal_radius(params, K), 1.0)));
}

bool touches_pole(const BergerParams& params, double K) {
  return sin2_horizontal_radius(params, K) >= 1.0 - 1e-15;
}

double vertical_radius(const BergerParams& params, double K) {
  require_sphere(params, K, "vertical_radius");
  if (touches_pole(params, K)) {
    // Near x = r = pi/2 the integrand behaves like tau sqrt(-2 lam) / cos x.
    return params.lambda() < 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  }
  const double lam = params.lambda();
  const double r = horizontal_radius(params, K);
  const double X1 = sin2_horizontal_radius(params, K);

  // xc is the signed distance to the nearer endpoint (positive on the right half).
  auto integrand = [&](double x, double xc) {
    const double sx = std::sin(x);
    const double cx = std::cos(x);
    const double S = sx * sx;
    const double d = xc > 0.0 ? xc : r - x;
    // 1 - K (1 - lam S) S = (X1 - S) K (1 - lam (X1 + S)), X1 - S = sin(r - x) sin(r + x)
    const double D = std::sin(d) * std::sin(2.0 * r - d) * K * (1.0 - lam * (X1 + S));
    const double a = 1.0 - 2.0 * lam * S;
    const double N = cx * cx * a * a - (1.0 - lam * S) * D;
    if (!(D > 0.0)) return 0.0;
    return std::sqrt(std::max(N, 0.0)) / (cx * std::sqrt(D));
  };

  static boost::math::quadrature::tanh_sinh<double> integrator(15);
  double err = 0.0;
  double l1 = 0.0;
  const double value = integrator.integrate(integrand, 0.0, r, 1e-14, &err, &l1);
  const double h = value / params.tau();
  const double err_abs = err * std::max(1.0, std::abs(value)) / params.tau();
  if (!std::isfinite(h) || err_abs > 1e-10) {
    throw AccuracyError("vertical_radius: tanh-sinh quadrature did not converge", h);
  }
  return h;
}

const char* to_string(Embeddedness e) {
  switch (e) {
    case Embeddedness::embedded: return "embedded";
    case Embeddedness::not_embedded: return "not_embedded";
    case Embeddedness::indeterminate: return "indeterminate";
  }
  return "unknown";
}

Embeddedness classify_vertical_radius(double h) {
  if (std::abs(h - kPi) < 1e-8) return Embeddedness::indeterminate;
  return h < kPi ? Embeddedness::embedded : Embeddedness::not_embedded;
}

Embeddedness is_embedded(const BergerParams& params, double K) {
  return classify_vertical_radius(vertical_radius(params, K));
}

double embeddedness_boundary(double K, double tau_lo, double tau_hi) {
  if (!(tau_lo > 0.0 && tau_hi > tau_lo)) throw DomainError("embeddedness_boundary: need 0 < tau_lo < tau_hi");
  auto g = [K](double tau) { return vertical_radius(make_params(tau), K) - kPi; };
  double a = tau_lo, b = tau_hi;
  double ga = g(a), gb = g(b);
  if (ga == 0.0) return a;
  if (gb == 0.0) return b;
  if ((ga > 0.0) == (gb > 0.0)) {
    throw BracketError("embeddedness_boundary: h - pi does not change sign on [" + std::to_string(tau_lo) + ", " +
                       std::to_string(tau_hi) + "]");
  }
  // Bisection down to a narrow bracket, then secant steps kept inside it.
  while (b - a > 1e-4 * std::max(1.0, a)) {
    const double m = 0.5 * (a + b);
    const double gm = g(m);
    if (gm == 0.0) return m;
    if ((gm > 0.0) == (ga > 0.0)) {
      a = m;
      ga = gm;
    } else {
      b = m;
      gb = gm;
    }
  }
  double best = std::abs(ga) < std::abs(gb) ? a : b;
  double gbest = std::min(std::abs(ga), std::abs(gb));
  for (int it = 0; it < 100 && gbest > 1e-10; ++it) {
    double m = b - gb * (b - a) / (gb - ga);
    if (!(m > a && m < b)) m = 0.5 * (a + b);
    const double gm = g(m);
    if (std::abs(gm) < gbest) {
      best = m;
      gbest = std::abs(gm);
    }
    if (gm == 0.0) break;
    if ((gm > 0.0) == (ga > 0.0)) {
      a = m;
      ga = gm;
    } else {
      b = m;
      gb = gm;
    }
    if (b - a < 4.0 * std::numeric_limits<double>::epsilon() * b) break;
  }
  if (gbest > 1e-8) throw AccuracyError("embeddedness_boundary: root not resolved to 1e-8", gbest);
  return best;
}

std::pair<double, double> find_boundary_bracket(double K, double tau_min, double tau_max, double step) {
  if (!(step > 0.0) || !(tau_max > tau_min)) throw DomainError("find_boundary_bracket: bad scan range");
  double prev_tau = tau_min;
  double prev_g = vertical_radius(make_params(tau_min), K) - kPi;
  const auto n = static_cast<std::size_t>(std::ceil((tau_max - tau_min) / step));
  for (std::size_t i = 1; i <= n; ++i) {
    const double tau = std::min(tau_min + static_cast<double>(i) * step, tau_max);
    const double g = vertical_radius(make_params(tau), K) - kPi;
    if ((g > 0.0) != (prev_g > 0.0)) return {prev_tau, tau};
    prev_tau = tau;
    prev_g = g;
  }
  throw BracketError("find_boundary_bracket: no sign change of h - pi found");
}

namespace {

/// Monotone half of the sphere profile (axis to turning point) parametrised
/// by w with x = r - w^2, which removes the square-root turning point of
/// ds/dx = 1 / cos(alpha).
class HalfProfile {
 public:
  HalfProfile(const BergerParams& params, double K)
      : params_(params), K_(K), lam_(params.lambda()) {
    X1_ = sin2_horizontal_radius(params, K);
    r_ = std::asin(std::sqrt(X1_));
    wmax_ = std::sqrt(r_);
    knots_.resize(kPanels + 1);
    cum_s_.assign(kPanels + 1, 0.0);
    cum_y_.assign(kPanels + 1, 0.0);
    for (std::size_t j = 0; j <= kPanels; ++j) {
      const double u = static_cast<double>(j) / kPanels;
      knots_[j] = wmax_ * u * u;
    }
    knots_.back() = wmax_;
    using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
    for (std::size_t j = 0; j < kPanels; ++j) {
      double e1 = 0.0, e2 = 0.0;
      cum_s_[j + 1] = cum_s_[j] + GK::integrate([this](double w) { return ds_dw(w); }, knots_[j], knots_[j + 1], 10,
                                                1e-15, &e1);
      cum_y_[j + 1] = cum_y_[j] + GK::integrate([this](double w) { return dy_dw(w); }, knots_[j], knots_[j + 1], 10,
                                                1e-15, &e2);
    }
  }

  double r() const { return r_; }
  double half_length() const { return cum_s_.back(); }
  double half_span() const { return cum_y_.back(); }

  struct Angles {
    double sin_a;
    double cos_a;
  };

  Angles angles(double w) const {
    const double x = r_ - w * w;
    const double sx = std::sin(x);
    const double X = sx * sx;
    const double cx2 = std::cos(x) * std::cos(x);
    const double a = 1.0 - 2.0 * lam_ * X;
    const double den = a * a * cx2;
    const double diff = std::sin(w * w) * std::sin(2.0 * r_ - w * w);
    const double cos2 = diff * K_ * (1.0 - lam_ * (X1_ + X)) * (1.0 - lam_ * X) / den;
    const double P = (K_ - 1.0 - 3.0 * lam_) + 2.0 * lam_ * (2.0 * lam_ + 2.0 - K_) * X +
                     lam_ * lam_ * (K_ - 4.0) * X * X;
    const double sin2 = X * P / den;
    return {std::sqrt(std::max(sin2, 0.0)), std::sqrt(std::max(cos2, 0.0))};
  }

  double ds_dw(double w) const {
    const double x = r_ - w * w;
    const double sx = std::sin(x);
    const double X = sx * sx;
    const double cx2 = std::cos(x) * std::cos(x);
    const double a = 1.0 - 2.0 * lam_ * X;
    const double w2 = w * w;
    const double sinc = w2 < 1e-300 ? 1.0 : std::sin(w2) / w2;
    const double q = K_ * (1.0 - lam_ * (X1_ + X)) * (1.0 - lam_ * X) / (a * a * cx2);
    return 2.0 / std::sqrt(sinc * std::sin(2.0 * r_ - w2) * q);
  }

  double dy_dw(double w) const {
    const double x = r_ - w * w;
    const double sx = std::sin(x);
    const double sin_a = angles(w).sin_a;
    return std::sqrt(1.0 - lam_ * sx * sx) / (params_.tau() * std::cos(x)) * sin_a * ds_dw(w);
  }

  /// State at distance sigma from the turning point (sigma in [0, T/2]),
  /// on the ascending side, with y measured from the turning point.
  ProfileState state_at(double sigma) const {
    sigma = std::clamp(sigma, 0.0, half_length());
    if (sigma == 0.0) return {0.0, r_, 0.0, 0.5 * kPi};
    std::size_t j = static_cast<std::size_t>(std::upper_bound(cum_s_.begin(), cum_s_.end(), sigma) - cum_s_.begin());
    j = std::clamp<std::size_t>(j, 1, kPanels) - 1;
    const double a = knots_[j];
    const double b = knots_[j + 1];
    auto partial = [&](double w) {
      return cum_s_[j] + G::integrate([this](double v) { return ds_dw(v); }, a, w);
    };
    double w = a + (b - a) * (sigma - cum_s_[j]) / (cum_s_[j + 1] - cum_s_[j]);
    for (int it = 0; it < 50; ++it) {
      const double f = partial(w) - sigma;
      const double dw = f / ds_dw(w);
      w = std::clamp(w - dw, a, b);
      if (std::abs(dw) <= 1e-17 * std::max(1.0, w)) break;
    }
    const double y = cum_y_[j] + G::integrate([this](double v) { return dy_dw(v); }, a, w);
    const auto ang = angles(w);
    return {0.0, r_ - w * w, -y, std::atan2(ang.sin_a, ang.cos_a)};
  }

 private:
  using G = boost::math::quadrature::gauss<double, 30>;
  static constexpr std::size_t kPanels = 48;

  const BergerParams& params_;
  double K_;
  double lam_;
  double X1_ = 0.0;
  double r_ = 0.0;
  double wmax_ = 0.0;
  std::vector<double> knots_;
  std::vector<double> cum_s_;
  std::vector<double> cum_y_;
};

SphereSolution assemble(const BergerParams& params, double K, const HalfProfile& half, std::size_t samples) {
  SphereSolution sol;
  sol.params = params;
  sol.K = K;
  sol.r = half.r();
  sol.T = 2.0 * half.half_length();
  sol.h = vertical_radius(params, K);
  sol.verdict = classify_vertical_radius(sol.h);
  sol.embedded = sol.verdict == Embeddedness::embedded;

  Trajectory& prof = sol.profile;
  prof.params = params;
  prof.K = K;
  prof.energy0 = 1.0;
  prof.drift_budget = 1e-8;
  prof.termination = Termination::boundary_axis;
  prof.states.resize(samples);
  const double half_T = 0.5 * sol.T;
  const std::size_t last = samples - 1;
  for (std::size_t k = 0; k <= last / 2; ++k) {
    const double s = sol.T * static_cast<double>(k) / static_cast<double>(last);
    ProfileState st = half.state_at(half_T - s);
    st.s = s;
    prof.states[k] = st;
    // Mirror through the turning point: x(T - s) = x(s), y(T - s) = -y(s), alpha -> pi - alpha.
    ProfileState mirrored{sol.T - s, st.x, -st.y, kPi - st.alpha};
    if (last - k != k) prof.states[last - k] = mirrored;
  }
  if (last % 2 == 0) prof.states[last / 2] = {half_T, half.r(), 0.0, 0.5 * kPi};
  prof.energy_drift.resize(samples);
  prof.max_energy_drift = 0.0;
  for (std::size_t k = 0; k < samples; ++k) {
    const double d = std::abs(profile_energy(params, K, prof.states[k]) - 1.0);
    prof.energy_drift[k] = d;
    prof.max_energy_drift = std::max(prof.max_energy_drift, d);
  }
  return sol;
}

void validate_against_trace(const BergerParams& params, double K, const HalfProfile& half) {
  const auto conn = level_one_connectivity(params, K);
  if (conn.flagged) return;  // degenerate corner: the closed form is authoritative
  if (!conn.connected) {
    throw AccuracyError("build_sphere: traced level-1 curve does not join (0, 1) to (0, -1)", 0.0);
  }
  double max_X = 0.0;
  for (const auto& p : conn.curve.points) max_X = std::max(max_X, p.X);
  const double sr = std::sin(half.r());
  const double gap = std::abs(max_X - sr * sr);
  if (gap > 1e-4) throw AccuracyError("build_sphere: traced level curve disagrees with sin^2 r", gap);
}

}  // namespace

SphereSolution build_sphere(const BergerParams& params, double K, std::size_t samples, const SphereOptions& opts) {
  require_sphere(params, K, "build_sphere");
  if (samples < 3) throw DomainError("build_sphere: need at least 3 samples");
  if (touches_pole(params, K)) {
    throw DomainError("build_sphere: the profile reaches the pole (sin^2 r = 1); no turning point to mirror");
  }
  const HalfProfile half(params, K);
  if (opts.validate_with_trace) validate_against_trace(params, K, half);
  return assemble(params, K, half, samples);
}

SphereSolution build_sphere_with_spacing(const BergerParams& params, double K, double ds, const SphereOptions& opts) {
  require_sphere(params, K, "build_sphere");
  if (!(ds > 0.0)) throw DomainError("build_sphere: spacing must be positive");
  if (touches_pole(params, K)) {
    throw DomainError("build_sphere: the profile reaches the pole (sin^2 r = 1); no turning point to mirror");
  }
  const HalfProfile half(params, K);
  if (opts.validate_with_trace) validate_against_trace(params, K, half);
  const double T = 2.0 * half.half_length();
  const auto samples = static_cast<std::size_t>(std::ceil(T / ds)) + 1;
  return assemble(params, K, half, std::max<std::size_t>(samples, 3));
}

}  // namespace berger
