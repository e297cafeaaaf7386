#pragma once

#include <cmath>
#include <complex>
#include <random>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include "berger/geometry.hpp"

namespace test {

using Rational = boost::multiprecision::cpp_rational;
using Big = boost::multiprecision::cpp_bin_float_50;

/// Uniform point on S^3 from a normalised Gaussian quadruple.
inline berger::AmbientPoint random_point(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  double v[4];
  double n = 0.0;
  for (double& c : v) {
    c = g(rng);
    n += c * c;
  }
  n = std::sqrt(n);
  return {{v[0] / n, v[1] / n}, {v[2] / n, v[3] / n}};
}

inline std::array<double, 4> random_vector(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  return {g(rng), g(rng), g(rng), g(rng)};
}

inline double rel_err(double got, double want) {
  return std::abs(got - want) / std::max(1.0, std::abs(want));
}

}  // namespace test
