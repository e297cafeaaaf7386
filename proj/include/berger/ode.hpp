#pragma once

// Dormand-Prince 5(4) with PI step-size control and Hairer's fourth-order
// continuous extension. Non-finite stage values reject the step, which lets
// callers integrate right up to singular loci and stop there with events.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>

namespace berger::ode {

template <std::size_t N>
using State = std::array<double, N>;

struct Tolerances {
  double rtol = 1e-10;
  double atol = 1e-12;
};

/// One accepted step with its dense-output coefficients.
template <std::size_t N>
class Step {
 public:
  double t0 = 0.0;
  double h = 0.0;
  State<N> y0{};
  State<N> y1{};

  double t1() const { return t0 + h; }

  /// Continuous extension at t in [t0, t0 + h] (also works for h < 0).
  State<N> at(double t) const {
    const double th = (t - t0) / h;
    const double th1 = 1.0 - th;
    State<N> y{};
    for (std::size_t i = 0; i < N; ++i) {
      y[i] = r1_[i] + th * (r2_[i] + th1 * (r3_[i] + th * (r4_[i] + th1 * r5_[i])));
    }
    return y;
  }

 private:
  template <std::size_t M, class F>
  friend class DormandPrince;
  State<N> r1_{}, r2_{}, r3_{}, r4_{}, r5_{};
};

template <std::size_t N, class F>
class DormandPrince {
 public:
  DormandPrince(F rhs, Tolerances tol) : rhs_(std::move(rhs)), tol_(tol) {}

  /// Attempts one step of size h from (t, y) with derivative dy. On success
  /// fills `out`, returns true and stores the suggested next step in h_next.
  /// On rejection returns false with a reduced h_next.
  bool try_step(double t, const State<N>& y, const State<N>& dy, double h, Step<N>& out, State<N>& dy_new,
                double& h_next) {
    constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    constexpr double a21 = 1.0 / 5;
    constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                     a65 = -5103.0 / 18656;
    constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                     a76 = 11.0 / 84;
    constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                     e6 = 22.0 / 525, e7 = -1.0 / 40;
    constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                     d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                     d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

    const auto& k1 = dy;
    State<N> k2, k3, k4, k5, k6, k7, tmp, ynew;
    auto combo = [&](std::initializer_list<std::pair<double, const State<N>*>> terms) {
      for (std::size_t i = 0; i < N; ++i) {
        double acc = 0.0;
        for (const auto& [c, k] : terms) acc += c * (*k)[i];
        tmp[i] = y[i] + h * acc;
      }
      return tmp;
    };
    k2 = rhs_(t + c2 * h, combo({{a21, &k1}}));
    k3 = rhs_(t + c3 * h, combo({{a31, &k1}, {a32, &k2}}));
    k4 = rhs_(t + c4 * h, combo({{a41, &k1}, {a42, &k2}, {a43, &k3}}));
    k5 = rhs_(t + c5 * h, combo({{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
    k6 = rhs_(t + h, combo({{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
    ynew = combo({{a71, &k1}, {a73, &k3}, {a74, &k4}, {a75, &k5}, {a76, &k6}});
    k7 = rhs_(t + h, ynew);

    double err = 0.0;
    bool finite = true;
    for (std::size_t i = 0; i < N; ++i) {
      const double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      const double sc = tol_.atol + tol_.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
      err += (e / sc) * (e / sc);
      finite = finite && std::isfinite(ynew[i]) && std::isfinite(k7[i]);
    }
    err = std::sqrt(err / static_cast<double>(N));
    ++evaluations_;
    if (!finite || !std::isfinite(err)) {
      h_next = 0.25 * h;
      return false;
    }

    constexpr double beta = 0.04, expo1 = 0.2 - beta * 0.75, safe = 0.9;
    const double fac11 = std::pow(err, expo1);
    if (err <= 1.0) {
      double fac = fac11 / std::pow(fac_old_, beta);
      fac = std::clamp(fac / safe, 1.0 / 10.0, 1.0 / 0.2);
      fac_old_ = std::max(err, 1e-4);
      h_next = h / fac;
      out.t0 = t;
      out.h = h;
      out.y0 = y;
      out.y1 = ynew;
      for (std::size_t i = 0; i < N; ++i) {
        const double ydiff = ynew[i] - y[i];
        const double bspl = h * k1[i] - ydiff;
        out.r1_[i] = y[i];
        out.r2_[i] = ydiff;
        out.r3_[i] = bspl;
        out.r4_[i] = ydiff - h * k7[i] - bspl;
        out.r5_[i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
      }
      dy_new = k7;
      return true;
    }
    h_next = h / std::min(1.0 / 0.2, fac11 / safe);
    return false;
  }

  State<N> derivative(double t, const State<N>& y) { return rhs_(t, y); }
  std::size_t evaluations() const { return evaluations_; }
  const Tolerances& tolerances() const { return tol_; }

 private:
  F rhs_;
  Tolerances tol_;
  double fac_old_ = 1e-4;
  std::size_t evaluations_ = 0;
};

/// Initial step guess (Hairer's HINIT, order 5).
template <std::size_t N, class F>
double initial_step(F& rhs, double t, const State<N>& y, const State<N>& dy, double direction, double hmax,
                    const Tolerances& tol) {
  double dnf = 0.0, dny = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const double sk = tol.atol + tol.rtol * std::abs(y[i]);
    dnf += (dy[i] / sk) * (dy[i] / sk);
    dny += (y[i] / sk) * (y[i] / sk);
  }
  double h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : std::sqrt(dny / dnf) * 0.01;
  h = std::min(h, hmax);
  State<N> y1;
  for (std::size_t i = 0; i < N; ++i) y1[i] = y[i] + direction * h * dy[i];
  const State<N> f1 = rhs(t + direction * h, y1);
  double der2 = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const double sk = tol.atol + tol.rtol * std::abs(y[i]);
    der2 += ((f1[i] - dy[i]) / sk) * ((f1[i] - dy[i]) / sk);
  }
  if (!std::isfinite(der2)) return 1e-3 * h;
  der2 = std::sqrt(der2) / h;
  const double der12 = std::max(std::abs(der2), std::sqrt(dnf));
  const double h1 = der12 <= 1e-15 ? std::max(1e-6, std::abs(h) * 1e-3) : std::pow(0.01 / der12, 0.2);
  return std::min({100.0 * std::abs(h), h1, hmax});
}

}  // namespace berger::ode
