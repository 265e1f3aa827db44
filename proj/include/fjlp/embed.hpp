#pragma once

// The embedding Psi x = k^{-1/p} beta_p^{-1} A D1 H D2 H D3 x from
// (R^d, l2) into (R^k, lp), p in [1, 2].

#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "fjlp/fourwise.hpp"
#include "fjlp/random.hpp"
#include "fjlp/stats.hpp"
#include "fjlp/wht.hpp"

namespace fjlp {

inline void require_p(double p) {
  if (!(p >= 1.0 && p <= 2.0))
    throw std::invalid_argument("p must lie in [1, 2], got " + std::to_string(p));
}

/// beta_p = (E|Z|^p)^{1/p} for Z ~ N(0, 1), from
/// E|Z|^p = 2^{p/2} Gamma((p+1)/2) / sqrt(pi).
inline double beta_p(double p) {
  require_p(p);
  const double log_moment =
      0.5 * p * std::numbers::ln2 + std::lgamma(0.5 * (p + 1.0)) - 0.5 * std::log(std::numbers::pi);
  return std::exp(log_moment / p);
}

struct MomentConstants {
  // Conservative published constant for the non-uniform Berry-Esseen bound.
  static constexpr double kDefaultC0 = 30.84;

  double p = 1.0;
  double beta = 0.0;
  double c0 = kDefaultC0;

  static MomentConstants for_p(double p, double c0 = kDefaultC0) {
    return MomentConstants{p, beta_p(p), c0};
  }
};

enum class KGate {
  strict,   // k <= d_pad^{1/4}, the regime the guarantees are proved in
  relaxed,  // k <= sqrt(d_pad) - 1, construction limit only
};

/// Smallest power of 4 that is >= max(d, 4).
inline std::uint64_t padded_dimension(std::uint64_t d) {
  std::uint64_t p = 4;
  while (p < d) {
    if (p > (std::uint64_t{1} << 32) / 4)
      throw std::invalid_argument("dimension " + std::to_string(d) + " too large");
    p <<= 2;
  }
  return p;
}

// k^4 <= d without overflow.
inline bool within_quarter_power(std::uint64_t k, std::uint64_t d) {
  if (k > 65536) return false;
  const unsigned __int128 k2 = static_cast<unsigned __int128>(k) * k;
  return k2 * k2 <= d;
}

class Transform {
 public:
  Transform(std::uint64_t d, std::size_t k, double p, std::uint64_t seed,
            KGate gate = KGate::strict)
      : d_orig_(d), d_pad_(checked_pad(d)), k_(k), p_(p), seed_(seed), gate_(gate),
        a_(check_k(k, d_pad_, gate), d_pad_) {
    require_p(p);
    scale_ = std::pow(static_cast<double>(k), -1.0 / p) / beta_p(p);
    draw_signs();
  }

  std::uint64_t input_dim() const noexcept { return d_orig_; }
  std::uint64_t padded_dim() const noexcept { return d_pad_; }
  std::size_t output_dim() const noexcept { return k_; }
  double p() const noexcept { return p_; }
  std::uint64_t seed() const noexcept { return seed_; }
  KGate gate() const noexcept { return gate_; }
  double scale() const noexcept { return scale_; }
  const FourWiseMatrix& matrix() const noexcept { return a_; }
  // Stream 1 is D1 (applied last), stream 3 is D3 (applied first).
  std::span<const double> signs(int stream) const {
    switch (stream) {
      case 1: return diag1_;
      case 2: return diag2_;
      case 3: return diag3_;
      default: throw std::out_of_range("sign stream must be 1, 2 or 3");
    }
  }
  // True when k exceeds d_pad^{1/4}; only possible under KGate::relaxed.
  bool outside_proven_regime() const { return !within_quarter_power(k_, d_pad_); }

  /// Same dimensions and A, diagonals redrawn from `seed`.
  Transform reseeded(std::uint64_t seed) const {
    Transform t = *this;
    t.reseed(seed);
    return t;
  }

  void reseed(std::uint64_t seed) {
    seed_ = seed;
    draw_signs();
  }

  /// D1 H D2 H D3 x on the zero-padded input (length d_pad). Orthogonal.
  RealVector precondition(std::span<const double> x) const {
    require_input(x);
    RealVector buf(d_pad_, 0.0);
    for (std::size_t j = 0; j < x.size(); ++j) buf[j] = x[j] * diag3_[j];
    fwht_normalized_inplace(buf);
    for (std::size_t j = 0; j < buf.size(); ++j) buf[j] *= diag2_[j];
    fwht_normalized_inplace(buf);
    for (std::size_t j = 0; j < buf.size(); ++j) buf[j] *= diag1_[j];
    return buf;
  }

  RealVector apply(std::span<const double> x) const {
    RealVector y = a_.multiply_fast(precondition(x));
    for (double& v : y) v *= scale_;
    return y;
  }

  std::vector<RealVector> apply_set(std::span<const RealVector> xs) const {
    std::vector<RealVector> out(xs.size());
    parallel_for(xs.size(), [&](std::size_t i) { out[i] = apply(xs[i]); });
    return out;
  }

  /// Dense k x d_orig row-major matrix of the map, one column per basis vector.
  std::vector<double> materialize() const {
    std::vector<double> m(k_ * d_orig_);
    RealVector e(d_orig_, 0.0);
    for (std::uint64_t j = 0; j < d_orig_; ++j) {
      e[j] = 1.0;
      const RealVector col = apply(e);
      for (std::size_t i = 0; i < k_; ++i) m[i * d_orig_ + j] = col[i];
      e[j] = 0.0;
    }
    return m;
  }

 private:
  static std::uint64_t checked_pad(std::uint64_t d) {
    if (d < 1) throw std::invalid_argument("input dimension must be >= 1");
    return padded_dimension(d);
  }

  static std::size_t check_k(std::size_t k, std::uint64_t d_pad, KGate gate) {
    if (k < 1) throw std::invalid_argument("target dimension k must be >= 1");
    const std::uint64_t side = std::uint64_t{1} << (std::countr_zero(d_pad) / 2);
    if (k > side - 1)
      throw std::invalid_argument("k=" + std::to_string(k) + " exceeds sqrt(d_pad)-1=" +
                                  std::to_string(side - 1) + " (construction limit)");
    if (gate == KGate::strict && !within_quarter_power(k, d_pad))
      throw std::invalid_argument("k=" + std::to_string(k) + " exceeds d_pad^(1/4) for d_pad=" +
                                  std::to_string(d_pad) + " (strict mode)");
    return k;
  }

  void require_input(std::span<const double> x) const {
    if (x.size() != d_orig_)
      throw std::invalid_argument("input length " + std::to_string(x.size()) +
                                  " != d=" + std::to_string(d_orig_));
    for (double v : x)
      if (!std::isfinite(v)) throw std::invalid_argument("non-finite input entry");
  }

  void draw_signs() {
    rademacher_signs(seed_, 1, diag1_, d_pad_);
    rademacher_signs(seed_, 2, diag2_, d_pad_);
    rademacher_signs(seed_, 3, diag3_, d_pad_);
  }

  std::uint64_t d_orig_;
  std::uint64_t d_pad_;
  std::size_t k_;
  double p_;
  std::uint64_t seed_;
  KGate gate_;
  FourWiseMatrix a_;
  double scale_ = 1.0;
  std::vector<double> diag1_, diag2_, diag3_;
};

inline Transform plan(std::uint64_t d, std::size_t k, double p, std::uint64_t seed,
                      KGate gate = KGate::strict) {
  return Transform(d, k, p, seed, gate);
}

/// Dense k x d matrix of i.i.d. N(0,1) entries scaled by k^{-1/p} beta_p^{-1},
/// so E||G x||_p^p = 1 for unit x.
class GaussianBaseline {
 public:
  static constexpr std::uint64_t kDefaultEntryCap = std::uint64_t{1} << 26;

  GaussianBaseline(std::uint64_t d, std::size_t k, double p, std::uint64_t seed,
                   std::uint64_t entry_cap = kDefaultEntryCap)
      : d_(d), k_(k), p_(p) {
    require_p(p);
    if (d < 1 || k < 1) throw std::invalid_argument("gaussian baseline: empty dimensions");
    if (static_cast<double>(d) * static_cast<double>(k) > static_cast<double>(entry_cap))
      throw std::invalid_argument("gaussian baseline: k*d exceeds the entry cap of " +
                                  std::to_string(entry_cap));
    const double scale = std::pow(static_cast<double>(k), -1.0 / p) / beta_p(p);
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> normal;
    g_.resize(k * d);
    for (double& v : g_) v = scale * normal(gen);
  }

  std::uint64_t input_dim() const noexcept { return d_; }
  std::size_t output_dim() const noexcept { return k_; }
  double p() const noexcept { return p_; }
  std::span<const double> data() const noexcept { return g_; }

  RealVector apply(std::span<const double> x) const {
    if (x.size() != d_)
      throw std::invalid_argument("gaussian baseline: input length mismatch");
    RealVector y(k_, 0.0);
    for (std::size_t i = 0; i < k_; ++i) {
      const double* row = g_.data() + i * d_;
      double acc = 0.0;
      for (std::uint64_t j = 0; j < d_; ++j) acc += row[j] * x[j];
      y[i] = acc;
    }
    return y;
  }

 private:
  std::uint64_t d_;
  std::size_t k_;
  double p_;
  std::vector<double> g_;
};

}  // namespace fjlp
