#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "fjlp/wht.hpp"

namespace fjlp::testing {

inline RealVector gaussian_vector(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal;
  RealVector v(n);
  for (double& x : v) x = normal(gen);
  return v;
}

inline RealVector unit_gaussian(std::size_t n, std::uint64_t seed) {
  RealVector v = gaussian_vector(n, seed);
  double s = 0;
  for (double x : v) s += x * x;
  s = std::sqrt(s);
  for (double& x : v) x /= s;
  return v;
}

inline double max_abs_diff(const RealVector& a, const RealVector& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double l2(const RealVector& v) {
  double s = 0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

// Sylvester Hadamard entry: (-1)^{popcount(i & j)}.
inline double hadamard_entry(std::size_t i, std::size_t j) {
  return (__builtin_popcountll(i & j) & 1) ? -1.0 : 1.0;
}

// Dense normalized H_d x.
inline RealVector dense_wht(const RealVector& x) {
  const std::size_t d = x.size();
  RealVector y(d, 0.0);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) y[i] += hadamard_entry(i, j) * x[j];
  for (double& v : y) v /= std::sqrt(static_cast<double>(d));
  return y;
}

}  // namespace fjlp::testing
