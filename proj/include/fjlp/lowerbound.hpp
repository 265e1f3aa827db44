#pragma once

// Desk-scale encoding argument behind the dimension lower bound.
//
// A hard family P = {0, e_1..e_d, y_S1..y_Sd} with y_S = s^{-1/2} sum_{j in S} e_j
// is pushed through a map f with (1 +- eps) distortion, every image is rounded
// to an eps-cover of the radius-2 ball, and the subsets S_i are recovered from
// the rounded images alone by thresholding ||z_j - z_S||. Recovery succeeding
// for every family means the encoding is injective.
//
// The cover is the cubic lattice with spacing 2r, never materialized. Under the
// max-coordinate norm r = eps; under the Euclidean norm r = eps / sqrt(k), so
// the rounding error is at most eps in either norm.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "fjlp/random.hpp"
#include "fjlp/stats.hpp"
#include "fjlp/wht.hpp"

namespace fjlp::lowerbound {

// Largest eps with s >= 1.
inline const double kMaxEps = 1.0 / std::sqrt(128.0);

/// floor(1 / (128 eps^2)), robust to eps landing one ulp off 1/sqrt(128).
inline std::size_t subset_size(double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  return static_cast<std::size_t>(std::floor(1.0 / (128.0 * eps * eps) * (1.0 + 1e-12)));
}

struct HardFamily {
  std::size_t d = 0;
  double eps = 0.0;
  std::size_t s = 0;
  std::vector<std::vector<std::size_t>> subsets;  // d sorted index sets of size s

  /// 0, e_1..e_d, y_S1..y_Sd, in that order.
  std::vector<RealVector> points() const {
    std::vector<RealVector> pts;
    pts.reserve(2 * d + 1);
    pts.emplace_back(d, 0.0);
    for (std::size_t j = 0; j < d; ++j) {
      RealVector e(d, 0.0);
      e[j] = 1.0;
      pts.push_back(std::move(e));
    }
    const double w = 1.0 / std::sqrt(static_cast<double>(s));
    for (const auto& set : subsets) {
      RealVector y(d, 0.0);
      for (std::size_t j : set) y[j] = w;
      pts.push_back(std::move(y));
    }
    return pts;
  }
};

inline HardFamily hard_family_build(std::size_t d, double eps, std::uint64_t seed) {
  if (!(eps > 0.0) || eps > kMaxEps * (1.0 + 1e-12))
    throw std::invalid_argument("eps must lie in (0, 1/sqrt(128)], got " + std::to_string(eps));
  const std::size_t s = subset_size(eps);
  if (d < 1) throw std::invalid_argument("hard family: d must be >= 1");
  if (s > d)
    throw std::invalid_argument("hard family: subset size s=" + std::to_string(s) + " exceeds d=" +
                                std::to_string(d));
  HardFamily f{d, eps, s, {}};
  std::vector<std::size_t> perm(d);
  for (std::size_t i = 0; i < d; ++i) {
    std::mt19937_64 gen(hash3(seed, 0x66616d696c79ULL, i));
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    // Partial Fisher-Yates: first s entries form a uniform s-subset.
    for (std::size_t a = 0; a < s; ++a) {
      std::uniform_int_distribution<std::size_t> pick(a, d - 1);
      std::swap(perm[a], perm[pick(gen)]);
    }
    std::vector<std::size_t> set(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(s));
    std::sort(set.begin(), set.end());
    f.subsets.push_back(std::move(set));
  }
  return f;
}

struct Separation {
  double d_in = 0.0, d_out = 0.0;
  double in_lo = 0.0, in_hi = 0.0;
  double out_lo = 0.0, out_hi = 0.0;
  double gap = 0.0;  // out_lo - in_hi
  bool disjoint = false;
  bool eight_eps = false;  // d_out - d_in >= 8 eps
  std::optional<double> tau;
};

/// Distance windows of rounded images for j in S and j not in S.
inline Separation separation_intervals(std::size_t s, double eps) {
  if (s < 1) throw std::invalid_argument("separation: s must be >= 1");
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("separation: eps must lie in (0,1)");
  Separation r;
  r.d_in = std::sqrt(2.0 - 2.0 / std::sqrt(static_cast<double>(s)));
  r.d_out = std::sqrt(2.0);
  r.in_lo = (1.0 - eps) * r.d_in - 2.0 * eps;
  r.in_hi = (1.0 + eps) * r.d_in + 2.0 * eps;
  r.out_lo = (1.0 - eps) * r.d_out - 2.0 * eps;
  r.out_hi = (1.0 + eps) * r.d_out + 2.0 * eps;
  r.gap = r.out_lo - r.in_hi;
  r.disjoint = r.gap > 0.0;
  r.eight_eps = r.d_out - r.d_in >= 8.0 * eps;
  if (r.disjoint) r.tau = 0.5 * (r.in_hi + r.out_lo);
  return r;
}

// ---- arbitrary-length unsigned integers for mixed-radix packing ------------

class BigUint {
 public:
  void mul_add(std::uint32_t mul, std::uint32_t add) {
    std::uint64_t carry = add;
    for (auto& limb : limbs_) {
      const std::uint64_t v = static_cast<std::uint64_t>(limb) * mul + carry;
      limb = static_cast<std::uint32_t>(v);
      carry = v >> 32;
    }
    if (carry) limbs_.push_back(static_cast<std::uint32_t>(carry));
  }

  std::uint32_t divmod(std::uint32_t div) {
    std::uint64_t rem = 0;
    for (std::size_t i = limbs_.size(); i-- > 0;) {
      const std::uint64_t cur = (rem << 32) | limbs_[i];
      limbs_[i] = static_cast<std::uint32_t>(cur / div);
      rem = cur % div;
    }
    while (!limbs_.empty() && limbs_.back() == 0) limbs_.pop_back();
    return static_cast<std::uint32_t>(rem);
  }

  std::size_t bit_length() const {
    if (limbs_.empty()) return 0;
    return 32 * (limbs_.size() - 1) + (32 - static_cast<std::size_t>(std::countl_zero(limbs_.back())));
  }

  bool bit(std::size_t i) const {
    const std::size_t w = i / 32;
    return w < limbs_.size() && ((limbs_[w] >> (i % 32)) & 1U);
  }

  void set_bit(std::size_t i) {
    const std::size_t w = i / 32;
    if (w >= limbs_.size()) limbs_.resize(w + 1, 0);
    limbs_[w] |= 1U << (i % 32);
  }

 private:
  std::vector<std::uint32_t> limbs_;  // little-endian
};

// ---- cover -----------------------------------------------------------------

enum class TargetNorm { euclidean, max_coordinate };

inline double norm_of(std::span<const double> v, TargetNorm n) {
  if (n == TargetNorm::euclidean) return stats::lp_norm(v, 2.0);
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

/// Nearest multiple of `spacing`, ties toward -infinity.
inline std::int64_t round_index(double v, double spacing) {
  return static_cast<std::int64_t>(std::ceil(v / spacing - 0.5));
}

struct CoverCode {
  std::size_t k = 0;
  double eps = 0.0;
  TargetNorm norm = TargetNorm::euclidean;
  double radius = 0.0;   // per-coordinate rounding radius
  double spacing = 0.0;  // 2 * radius
  std::int64_t max_index = 0;
  std::uint32_t levels = 0;  // 2 * max_index + 1 lattice values per coordinate
  std::size_t bits_per_point = 0;  // ceil(log2 |N|), |N| = levels^k
  double log2_size = 0.0;
  double volumetric_log2 = 0.0;  // log2 (6/eps)^k

  std::size_t total_bits(std::size_t d) const { return 2 * d * bits_per_point; }
};

inline CoverCode make_cover(std::size_t k, double eps, TargetNorm norm = TargetNorm::euclidean) {
  if (k < 1) throw std::invalid_argument("cover: k must be >= 1");
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("cover: eps must lie in (0,1)");
  CoverCode c;
  c.k = k;
  c.eps = eps;
  c.norm = norm;
  c.radius = norm == TargetNorm::euclidean ? eps / std::sqrt(static_cast<double>(k)) : eps;
  c.spacing = 2.0 * c.radius;
  // Accepted inputs have coordinates in [-2 - r, 2 + r]; rounding keeps
  // them in [-M, M] lattice steps.
  c.max_index = std::max(round_index(2.0 + c.radius, c.spacing),
                         -round_index(-2.0 - c.radius, c.spacing));
  const std::int64_t lv = 2 * c.max_index + 1;
  if (lv > (std::int64_t{1} << 31)) throw std::invalid_argument("cover: eps too small");
  c.levels = static_cast<std::uint32_t>(lv);
  BigUint top;  // levels^k - 1 is the largest code
  top.mul_add(1, 1);
  for (std::size_t i = 0; i < k; ++i) top.mul_add(c.levels, 0);
  // top = levels^k; bit length of levels^k - 1 equals that of levels^k
  // because levels is odd, so levels^k is never a power of two.
  c.bits_per_point = top.bit_length();
  if (c.levels == 1) c.bits_per_point = 0;
  c.log2_size = static_cast<double>(k) * std::log2(static_cast<double>(c.levels));
  c.volumetric_log2 = static_cast<double>(k) * std::log2(6.0 / eps);
  return c;
}

struct Rounded {
  RealVector point;                   // lattice point
  std::vector<std::int64_t> indices;  // coordinates in lattice steps
  std::vector<bool> bits;             // bits_per_point bits, LSB first
  bool clamped = false;
};

/// Rounds each coordinate to the nearest lattice value and packs the
/// coordinates as one mixed-radix integer. Points outside the box reachable
/// from the radius-2 ball are clamped and flagged.
inline Rounded cover_round(const CoverCode& c, std::span<const double> point) {
  if (point.size() != c.k) throw std::invalid_argument("cover_round: dimension mismatch");
  Rounded r;
  r.point.resize(c.k);
  r.indices.resize(c.k);
  BigUint code;
  for (std::size_t i = c.k; i-- > 0;) {
    std::int64_t m = round_index(point[i], c.spacing);
    if (!std::isfinite(point[i]) || m > c.max_index || m < -c.max_index) {
      r.clamped = true;
      m = std::isfinite(point[i]) ? std::clamp(m, -c.max_index, c.max_index) : 0;
    }
    r.indices[i] = m;
    r.point[i] = static_cast<double>(m) * c.spacing;
    code.mul_add(c.levels, static_cast<std::uint32_t>(m + c.max_index));
  }
  r.bits.resize(c.bits_per_point);
  for (std::size_t b = 0; b < c.bits_per_point; ++b) r.bits[b] = code.bit(b);
  return r;
}

/// Inverse of the packing in cover_round, reading bits_per_point bits of
/// `bits` starting at `offset`.
inline RealVector cover_unpack(const CoverCode& c, const std::vector<bool>& bits,
                               std::size_t offset = 0) {
  if (offset + c.bits_per_point > bits.size())
    throw std::invalid_argument("cover_unpack: not enough bits");
  BigUint code;
  for (std::size_t b = 0; b < c.bits_per_point; ++b)
    if (bits[offset + b]) code.set_bit(b);
  RealVector p(c.k);
  for (std::size_t i = 0; i < c.k; ++i) {
    const auto digit = static_cast<std::int64_t>(code.divmod(c.levels));
    p[i] = static_cast<double>(digit - c.max_index) * c.spacing;
  }
  if (code.bit_length() != 0) throw std::invalid_argument("cover_unpack: code out of range");
  return p;
}

// ---- encoding --------------------------------------------------------------

struct Encoding {
  std::vector<bool> bits;
  std::size_t clamped = 0;
};

/// Concatenated rounded representatives of f(e_1)..f(e_d), f(y_S1)..f(y_Sd),
/// with f(0) = 0 already arranged by the caller.
inline Encoding encode(const HardFamily& family, std::span<const RealVector> images,
                       const CoverCode& cover) {
  if (images.size() != 2 * family.d)
    throw std::invalid_argument("encode: expected " + std::to_string(2 * family.d) +
                                " images, got " + std::to_string(images.size()));
  Encoding enc;
  enc.bits.reserve(cover.total_bits(family.d));
  for (const auto& z : images) {
    const Rounded r = cover_round(cover, z);
    enc.clamped += r.clamped;
    enc.bits.insert(enc.bits.end(), r.bits.begin(), r.bits.end());
  }
  return enc;
}

/// Applies f to every point of the family, subtracts f(0), and encodes.
template <typename Map>
Encoding encode_map(const HardFamily& family, Map&& f, const CoverCode& cover) {
  const auto pts = family.points();
  const RealVector origin = f(pts.front());
  std::vector<RealVector> images;
  images.reserve(pts.size() - 1);
  for (std::size_t i = 1; i < pts.size(); ++i) {
    RealVector z = f(pts[i]);
    if (z.size() != origin.size()) throw std::invalid_argument("encode_map: ragged images");
    for (std::size_t c = 0; c < z.size(); ++c) z[c] -= origin[c];
    images.push_back(std::move(z));
  }
  return encode(family, images, cover);
}

struct Decoded {
  std::vector<std::vector<std::size_t>> subsets;
  std::size_t gap_violations = 0;  // distances strictly inside the forbidden gap
  std::size_t size_mismatches = 0;  // recovered sets whose size is not s
  bool ok = false;
};

/// Recovers S_i = { j : ||z_j - z_Si|| <= tau } from the bit string alone.
inline Decoded decode_subsets(const std::vector<bool>& bits, std::size_t d, const CoverCode& cover,
                              std::size_t s) {
  if (bits.size() != cover.total_bits(d))
    throw std::invalid_argument("decode: expected " + std::to_string(cover.total_bits(d)) +
                                " bits, got " + std::to_string(bits.size()));
  const Separation sep = separation_intervals(s, cover.eps);
  if (!sep.tau) throw std::invalid_argument("decode: separation intervals overlap");
  std::vector<RealVector> z;
  z.reserve(2 * d);
  for (std::size_t p = 0; p < 2 * d; ++p)
    z.push_back(cover_unpack(cover, bits, p * cover.bits_per_point));
  Decoded out;
  RealVector diff(cover.k);
  for (std::size_t i = 0; i < d; ++i) {
    const RealVector& zs = z[d + i];
    std::vector<std::size_t> set;
    for (std::size_t j = 0; j < d; ++j) {
      for (std::size_t c = 0; c < cover.k; ++c) diff[c] = z[j][c] - zs[c];
      const double dist = norm_of(diff, cover.norm);
      if (dist > sep.in_hi && dist < sep.out_lo) ++out.gap_violations;
      if (dist <= *sep.tau) set.push_back(j);
    }
    if (set.size() != s) ++out.size_mismatches;
    out.subsets.push_back(std::move(set));
  }
  out.ok = out.gap_violations == 0 && out.size_mismatches == 0;
  return out;
}

/// log(eps^2 n) / (eps^2 log(1/eps)), natural logs. A scale only: the hidden
/// constant of the asymptotic bound is not known.
inline double lower_bound_scale(double n, double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("lower_bound_scale: eps in (0,1)");
  if (!(eps * eps * n > 1.0))
    throw std::invalid_argument("lower_bound_scale: needs eps^2 n > 1");
  return std::log(eps * eps * n) / (eps * eps * std::log(1.0 / eps));
}

/// Haar-ish random orthogonal n x n matrix (Gram-Schmidt on Gaussian columns),
/// row-major. Used as an exact isometry in recovery demonstrations.
inline std::vector<double> random_orthogonal(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal;
  std::vector<RealVector> cols;
  while (cols.size() < n) {
    RealVector v(n);
    for (double& c : v) c = normal(gen);
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& q : cols) {
        double dot = 0.0;
        for (std::size_t i = 0; i < n; ++i) dot += q[i] * v[i];
        for (std::size_t i = 0; i < n; ++i) v[i] -= dot * q[i];
      }
    const double nv = stats::lp_norm(v, 2.0);
    if (nv < 1e-8) continue;
    for (double& c : v) c /= nv;
    cols.push_back(std::move(v));
  }
  std::vector<double> m(n * n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) m[i * n + j] = cols[j][i];
  return m;
}

}  // namespace fjlp::lowerbound
