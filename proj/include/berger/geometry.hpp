#pragma once

// Ambient geometry of the Berger spheres S^3_tau: the unit sphere of C^2 with
// the round metric rescaled by tau^2 along the Hopf fibers.

#include <array>
#include <complex>

namespace berger {

/// Fiber scaling tau together with the quantities every classification
/// depends on. Built through make_params so the derived fields are always
/// consistent; default-constructed values describe the round sphere.
class BergerParams {
 public:
  BergerParams() = default;

  double tau() const noexcept { return tau_; }
  /// 1 - tau^2.
  double lambda() const noexcept { return lambda_; }
  /// Existence threshold for rotational CGC spheres.
  double k0() const noexcept { return k0_; }
  /// Supremum of the ambient sectional curvature.
  double kp() const noexcept { return kp_; }

  bool operator==(const BergerParams&) const = default;

 private:
  friend BergerParams make_params(double tau);

  double tau_ = 1.0;
  double lambda_ = 0.0;
  double k0_ = 1.0;
  double kp_ = 1.0;
};

/// Throws DomainError unless tau is finite and positive.
BergerParams make_params(double tau);

/// Point (z, w) on the unit sphere |z|^2 + |w|^2 = 1.
struct AmbientPoint {
  std::complex<double> z;
  std::complex<double> w;

  /// Throws DomainError if the point is off the unit sphere by more than 1e-12.
  static AmbientPoint checked(std::complex<double> z, std::complex<double> w);

  std::array<double, 4> as_real() const { return {z.real(), z.imag(), w.real(), w.imag()}; }
  bool operator==(const AmbientPoint&) const = default;
};

/// Tangent vector stored as a real quadruple (Re z, Im z, Re w, Im w).
struct TangentVector {
  std::array<double, 4> components{};
  AmbientPoint base;
};

/// Fiber direction V = (iz, iw) at p (Euclidean unit length).
TangentVector fiber_direction(const AmbientPoint& p);

/// Projects an arbitrary R^4 vector onto the tangent space at p.
TangentVector make_tangent(const AmbientPoint& p, const std::array<double, 4>& v);

/// Berger metric g_tau(u, v) = <u, v> - (1 - tau^2) <u, V> <v, V>.
/// Throws DomainError when u and v live at different base points.
double metric(const BergerParams& params, const TangentVector& u, const TangentVector& v);

struct HopfImage {
  std::complex<double> zw;  // z * conj(w)
  double height;            // (|z|^2 - |w|^2) / 2
};

/// Hopf projection onto the sphere of radius 1/2 in C x R.
HopfImage hopf_project(const AmbientPoint& p);

/// Sectional curvature of a plane whose unit normal N has g_tau(N, xi) = nu.
double sectional_curvature(const BergerParams& params, double nu);

double euclidean_dot(const std::array<double, 4>& a, const std::array<double, 4>& b);

}  // namespace berger
