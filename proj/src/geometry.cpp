#include "berger/geometry.hpp"

#include <cmath>
#include <string>

#include "berger/errors.hpp"

namespace berger {

BergerParams make_params(double tau) {
  if (!std::isfinite(tau) || tau <= 0.0) {
    throw DomainError("tau must be finite and positive, got " + std::to_string(tau));
  }
  BergerParams p;
  const double tau2 = tau * tau;
  p.tau_ = tau;
  p.lambda_ = 1.0 - tau2;
  if (tau <= 1.0) {
    p.k0_ = 4.0 - 3.0 * tau2;
    p.kp_ = p.k0_;
  } else {
    p.k0_ = 1.0 / tau2;
    p.kp_ = tau2;
  }
  return p;
}

AmbientPoint AmbientPoint::checked(std::complex<double> z, std::complex<double> w) {
  const double n = std::norm(z) + std::norm(w);
  if (!(std::abs(n - 1.0) <= 1e-12)) {
    throw DomainError("point is not on the unit 3-sphere (|z|^2+|w|^2 = " + std::to_string(n) + ")");
  }
  return {z, w};
}

double euclidean_dot(const std::array<double, 4>& a, const std::array<double, 4>& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3];
}

TangentVector fiber_direction(const AmbientPoint& p) {
  // i(a + ib) = -b + ia
  return {{-p.z.imag(), p.z.real(), -p.w.imag(), p.w.real()}, p};
}

TangentVector make_tangent(const AmbientPoint& p, const std::array<double, 4>& v) {
  const auto n = p.as_real();
  const double d = euclidean_dot(v, n) / euclidean_dot(n, n);
  TangentVector t{v, p};
  for (int i = 0; i < 4; ++i) t.components[i] -= d * n[i];
  return t;
}

double metric(const BergerParams& params, const TangentVector& u, const TangentVector& v) {
  if (!(u.base == v.base)) {
    throw DomainError("metric: tangent vectors have different base points");
  }
  const auto V = fiber_direction(u.base).components;
  const double uv = euclidean_dot(u.components, v.components);
  return uv - params.lambda() * euclidean_dot(u.components, V) * euclidean_dot(v.components, V);
}

HopfImage hopf_project(const AmbientPoint& p) {
  return {p.z * std::conj(p.w), 0.5 * (std::norm(p.z) - std::norm(p.w))};
}

double sectional_curvature(const BergerParams& params, double nu) {
  if (!(std::abs(nu) <= 1.0)) {
    throw DomainError("sectional_curvature: |nu| must not exceed 1");
  }
  // tau^2 + 4 lambda nu^2, anchored at the maximiser so the extreme value is kp bit for bit.
  if (params.lambda() >= 0.0) {
    return params.kp() - 4.0 * params.lambda() * (1.0 - nu * nu);
  }
  return params.kp() + 4.0 * params.lambda() * nu * nu;
}

}  // namespace berger
