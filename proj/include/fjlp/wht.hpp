#pragma once

// Fast Walsh-Hadamard transforms.
//
// H_d is the orthonormal Sylvester-ordered Hadamard matrix,
//   (H_d)_{u,w} = d^{-1/2} (-1)^{popcount(u & w)}.
// The butterfly runs unscaled and the d^{-1/2} factor is applied once at the
// end, so the normalized and unnormalized variants differ by one multiply.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace fjlp {

using RealVector = std::vector<double>;

constexpr bool is_power_of_two(std::size_t n) noexcept {
  return n != 0 && (n & (n - 1)) == 0;
}

namespace detail {

inline void require_transform_input(std::span<const double> x) {
  if (!is_power_of_two(x.size()))
    throw std::invalid_argument("wht: length " + std::to_string(x.size()) +
                                " is not a power of two");
  for (double v : x)
    if (!std::isfinite(v))
      throw std::invalid_argument("wht: non-finite input entry");
}

// Butterflies for strides 1, 2, ..., block/2 on every contiguous block of
// length `block`. block == x.size() gives the full unnormalized transform.
inline void butterflies(std::span<double> x, std::size_t block) noexcept {
  const std::size_t n = x.size();
  double* a = x.data();
  for (std::size_t h = 1; h < block; h <<= 1) {
    for (std::size_t i = 0; i < n; i += h << 1) {
      for (std::size_t j = i; j < i + h; ++j) {
        const double u = a[j];
        const double v = a[j + h];
        a[j] = u + v;
        a[j + h] = u - v;
      }
    }
  }
}

// Fixed-size H_B (unnormalized) for one block; fully unrolled by the compiler.
template <std::size_t B>
inline void small_block_wht(double* a) noexcept {
  for (std::size_t h = 1; h < B; h <<= 1)
    for (std::size_t i = 0; i < B; i += h << 1)
      for (std::size_t j = i; j < i + h; ++j) {
        const double u = a[j];
        const double v = a[j + h];
        a[j] = u + v;
        a[j + h] = u - v;
      }
}

inline void block_wht(std::span<double> a) noexcept {
  switch (a.size()) {
    case 1: return;
    case 2: return small_block_wht<2>(a.data());
    case 4: return small_block_wht<4>(a.data());
    case 8: return small_block_wht<8>(a.data());
    case 16: return small_block_wht<16>(a.data());
    case 32: return small_block_wht<32>(a.data());
    case 64: return small_block_wht<64>(a.data());
    default: return butterflies(a, a.size());
  }
}

inline void validate_outputs(std::span<const std::size_t> outputs,
                             std::size_t d) {
  if (outputs.empty())
    throw std::invalid_argument("wht_partial: empty output set");
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    if (outputs[i] >= d)
      throw std::out_of_range("wht_partial: output index " +
                              std::to_string(outputs[i]) + " >= " +
                              std::to_string(d));
    if (i > 0 && outputs[i] == outputs[i - 1])
      throw std::invalid_argument("wht_partial: duplicate output index " +
                                  std::to_string(outputs[i]));
    if (i > 0 && outputs[i] < outputs[i - 1])
      throw std::invalid_argument("wht_partial: output indices not sorted");
  }
}

// Block size for the partial transform: next power of two >= r, clamped to
// [1, d].
inline std::size_t partial_block(std::size_t r, std::size_t d) noexcept {
  std::size_t b = std::bit_ceil(r == 0 ? std::size_t{1} : r);
  return b > d ? d : b;
}

}  // namespace detail

/// Precomputed evaluation of the unnormalized WHT of length d at a fixed,
/// strictly increasing set of r outputs. Reusable across input vectors.
///
/// Uses H_d = H_{d/B} (x) H_B with B = bit_ceil(r): each contiguous block of
/// length B gets a full H_B, then output u = (hi, lo) is the signed sum over
/// blocks b of (-1)^{popcount(hi & b)} block_b[lo]. Block indices are split
/// into chunks of up to 64 so the sign inside a chunk comes from a table and
/// the chunk sign is applied once per chunk.
class PartialWhtPlan {
 public:
  PartialWhtPlan() = default;

  PartialWhtPlan(std::span<const std::size_t> outputs, std::size_t d) {
    if (!is_power_of_two(d))
      throw std::invalid_argument("wht: length " + std::to_string(d) + " is not a power of two");
    detail::validate_outputs(outputs, d);
    d_ = d;
    r_ = outputs.size();
    block_ = detail::partial_block(r_, d);
    shift_ = static_cast<unsigned>(std::countr_zero(block_));
    const std::size_t nblocks = d >> shift_;
    chunk_ = std::min<std::size_t>(nblocks, 64);
    chunk_shift_ = static_cast<unsigned>(std::countr_zero(chunk_));
    lo_.resize(r_);
    hi_chunk_.resize(r_);
    sign_.resize(chunk_ * r_);
    for (std::size_t o = 0; o < r_; ++o) {
      const std::size_t hi = outputs[o] >> shift_;
      lo_[o] = outputs[o] & (block_ - 1);
      hi_chunk_[o] = hi >> chunk_shift_;
      for (std::size_t bl = 0; bl < chunk_; ++bl)
        sign_[bl * r_ + o] = (std::popcount(hi & bl) & 1U) ? -1.0 : 1.0;
    }
  }

  std::size_t size() const noexcept { return d_; }
  std::size_t outputs() const noexcept { return r_; }
  /// Scratch length required by execute().
  std::size_t scratch() const noexcept { return block_ + r_; }

  /// out[o] = sum_w (-1)^{popcount(outputs[o] & w)} x[w]. No validation.
  void execute(std::span<const double> x, std::span<double> work,
               std::span<double> out) const noexcept {
    double* local = work.data();
    double* part = work.data() + block_;
    std::fill_n(out.begin(), r_, 0.0);
    const std::size_t nchunks = (d_ >> shift_) >> chunk_shift_;
    const double* src = x.data();
    for (std::size_t c = 0; c < nchunks; ++c) {
      std::fill_n(part, r_, 0.0);
      for (std::size_t bl = 0; bl < chunk_; ++bl, src += block_) {
        std::copy_n(src, block_, local);
        detail::block_wht(std::span<double>(local, block_));
        const double* sg = sign_.data() + bl * r_;
        for (std::size_t o = 0; o < r_; ++o) part[o] += sg[o] * local[lo_[o]];
      }
      for (std::size_t o = 0; o < r_; ++o)
        out[o] += (std::popcount(hi_chunk_[o] & c) & 1U) ? -part[o] : part[o];
    }
  }

 private:
  std::size_t d_ = 0, r_ = 0, block_ = 1, chunk_ = 1;
  unsigned shift_ = 0, chunk_shift_ = 0;
  std::vector<std::size_t> lo_, hi_chunk_;
  std::vector<double> sign_;  // chunk x r, row-major
};

/// In-place unnormalized transform: x <- sqrt(d) H_d x. No validation beyond
/// the caller's guarantee that x.size() is a power of two.
inline void fwht_inplace(std::span<double> x) noexcept {
  detail::butterflies(x, x.size());
}

/// In-place orthonormal transform: x <- H_d x.
inline void fwht_normalized_inplace(std::span<double> x) noexcept {
  detail::butterflies(x, x.size());
  const double s = 1.0 / std::sqrt(static_cast<double>(x.size()));
  for (double& v : x) v *= s;
}

/// H_d x with H_d orthonormal.
inline RealVector wht_full(std::span<const double> x) {
  detail::require_transform_input(x);
  RealVector y(x.begin(), x.end());
  fwht_normalized_inplace(y);
  return y;
}

/// output[u] = sum_w (-1)^{popcount(u & w)} x[w].
inline RealVector wht_unnormalized(std::span<const double> x) {
  detail::require_transform_input(x);
  RealVector y(x.begin(), x.end());
  fwht_inplace(y);
  return y;
}

/// Unnormalized transform restricted to `outputs` (strictly increasing).
inline RealVector wht_partial_unnormalized(
    std::span<const double> x, std::span<const std::size_t> outputs) {
  const PartialWhtPlan plan(outputs, x.size());
  RealVector work(plan.scratch());
  RealVector out(outputs.size());
  plan.execute(x, work, out);
  // Every output is a +-1 combination of every input, so a non-finite input
  // always yields a non-finite output.
  for (double v : out)
    if (!std::isfinite(v)) throw std::invalid_argument("wht: non-finite input entry");
  return out;
}

/// (H_d x) restricted to `outputs` in O(d log r + d) operations, r =
/// outputs.size(). Strictly increasing outputs are required.
inline RealVector wht_partial(std::span<const double> x,
                              std::span<const std::size_t> outputs) {
  RealVector out = wht_partial_unnormalized(x, outputs);
  const double s = 1.0 / std::sqrt(static_cast<double>(x.size()));
  for (double& v : out) v *= s;
  return out;
}

}  // namespace fjlp
