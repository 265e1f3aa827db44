#pragma once

// Arithmetic in GF(2^m), 1 <= m <= 32, in the polynomial basis.
//
// Elements are bit vectors: bit l is the coefficient of x^l. The modulus is
// the lexicographically smallest irreducible polynomial of degree m with a
// nonzero constant term, so every FieldSpec of a given degree is identical on
// every platform.

#include <bit>
#include <cstddef>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace fjlp {

namespace gf2poly {

// Carry-less product of two polynomials of degree < 32.
constexpr std::uint64_t clmul(std::uint64_t a, std::uint64_t b) noexcept {
  std::uint64_t r = 0;
  while (b != 0) {
    if (b & 1U) r ^= a;
    a <<= 1;
    b >>= 1;
  }
  return r;
}

constexpr int degree(std::uint64_t a) noexcept {
  return a == 0 ? -1 : 63 - std::countl_zero(a);
}

constexpr std::uint64_t mod(std::uint64_t a, std::uint64_t m) noexcept {
  const int dm = degree(m);
  for (int da = degree(a); da >= dm; da = degree(a))
    a ^= m << (da - dm);
  return a;
}

constexpr std::uint64_t mulmod(std::uint64_t a, std::uint64_t b,
                               std::uint64_t m) noexcept {
  return mod(clmul(a, b), m);
}

constexpr std::uint64_t gcd(std::uint64_t a, std::uint64_t b) noexcept {
  while (b != 0) {
    const std::uint64_t r = mod(a, b);
    a = b;
    b = r;
  }
  return a;
}

// x^(2^e) mod m by repeated squaring.
constexpr std::uint64_t x_pow_2e(unsigned e, std::uint64_t m) noexcept {
  std::uint64_t r = mod(2, m);
  for (unsigned i = 0; i < e; ++i) r = mulmod(r, r, m);
  return r;
}

// Trial division by every polynomial of degree 1..deg/2.
inline bool irreducible_exhaustive(std::uint64_t f) {
  const int n = degree(f);
  if (n < 1) return false;
  for (int dg = 1; 2 * dg <= n; ++dg)
    for (std::uint64_t g = std::uint64_t{1} << dg;
         g < (std::uint64_t{1} << (dg + 1)); ++g)
      if (mod(f, g) == 0) return false;
  return true;
}

// Rabin: f of degree n is irreducible iff x^(2^n) = x mod f and
// gcd(x^(2^(n/q)) - x, f) = 1 for every prime q | n.
inline bool irreducible_rabin(std::uint64_t f) {
  const int n = degree(f);
  if (n < 1) return false;
  if (x_pow_2e(static_cast<unsigned>(n), f) != mod(2, f)) return false;
  int rest = n;
  for (int q = 2; q <= rest; ++q) {
    if (rest % q != 0) continue;
    while (rest % q == 0) rest /= q;
    const std::uint64_t h = x_pow_2e(static_cast<unsigned>(n / q), f) ^ mod(2, f);
    if (gcd(f, h) != 1) return false;
  }
  return true;
}

inline bool irreducible(std::uint64_t f) {
  return degree(f) <= 16 ? irreducible_exhaustive(f) : irreducible_rabin(f);
}

}  // namespace gf2poly

/// GF(2^m) with precomputed trace mask and trace-form index map.
///
/// trace(a) = parity(popcount(a & trace_mask)), and the index map sigma
/// satisfies Tr(u * v) = parity(popcount(u & sigma(v))) for all u, v.
class FieldSpec {
 public:
  static constexpr unsigned kMaxDegree = 32;
  static constexpr unsigned kMaxTabulatedDegree = 16;

  explicit FieldSpec(unsigned degree) : FieldSpec(degree, smallest_modulus(degree)) {}

  // Rebuilds a field from a serialized modulus; rejects reducible or
  // wrong-degree polynomials.
  FieldSpec(unsigned degree, std::uint64_t modulus) : degree_(degree), modulus_(modulus) {
    if (degree < 1 || degree > kMaxDegree)
      throw std::invalid_argument("field degree must lie in [1, 32], got " +
                                  std::to_string(degree));
    if (gf2poly::degree(modulus) != static_cast<int>(degree) || (modulus & 1U) == 0 ||
        !gf2poly::irreducible(modulus))
      throw std::invalid_argument("modulus is not an irreducible polynomial of degree " +
                                  std::to_string(degree));
    precompute();
  }

  unsigned degree() const noexcept { return degree_; }
  std::uint64_t modulus() const noexcept { return modulus_; }
  std::uint32_t trace_mask() const noexcept { return trace_mask_; }
  std::uint64_t size() const noexcept { return std::uint64_t{1} << degree_; }

  std::uint32_t multiply(std::uint64_t a, std::uint64_t b) const {
    check(a);
    check(b);
    return mul_unchecked(a, b);
  }

  std::uint32_t cube(std::uint64_t a) const {
    check(a);
    return mul_unchecked(mul_unchecked(a, a), a);
  }

  unsigned trace(std::uint64_t a) const {
    check(a);
    return static_cast<unsigned>(std::popcount(static_cast<std::uint32_t>(a) & trace_mask_) & 1);
  }

  // Tr(a) computed from the definition sum_{i<m} a^(2^i).
  unsigned trace_by_definition(std::uint64_t a) const {
    check(a);
    std::uint64_t acc = 0;
    std::uint64_t pw = a;
    for (unsigned i = 0; i < degree_; ++i) {
      acc ^= pw;
      pw = mul_unchecked(pw, pw);
    }
    if (acc > 1) throw std::logic_error("trace left the prime field");
    return static_cast<unsigned>(acc);
  }

  /// sigma(v): bit l equals Tr(x^l * v).
  std::uint32_t form_index(std::uint64_t v) const {
    check(v);
    if (!form_table_.empty()) return form_table_[v];
    std::uint32_t r = 0;
    for (unsigned l = 0; l < degree_; ++l)
      if ((v >> l) & 1U) r ^= form_basis_[l];
    return r;
  }

  bool has_form_table() const noexcept { return !form_table_.empty(); }

  std::string modulus_hex() const {
    std::ostringstream os;
    os << "0x" << std::hex << modulus_;
    return os.str();
  }

  static std::uint64_t smallest_modulus(unsigned degree) {
    if (degree < 1 || degree > kMaxDegree)
      throw std::invalid_argument("field degree must lie in [1, 32], got " +
                                  std::to_string(degree));
    const std::uint64_t lo = std::uint64_t{1} << degree;
    for (std::uint64_t f = lo | 1U; f < (lo << 1); f += 2)
      if (gf2poly::irreducible(f)) return f;
    throw std::logic_error("no irreducible polynomial found");
  }

  friend bool operator==(const FieldSpec& a, const FieldSpec& b) noexcept {
    return a.degree_ == b.degree_ && a.modulus_ == b.modulus_;
  }

 private:
  void check(std::uint64_t a) const {
    if (a >= size())
      throw std::out_of_range("field element " + std::to_string(a) +
                              " out of range for GF(2^" + std::to_string(degree_) + ")");
  }

  std::uint32_t mul_unchecked(std::uint64_t a, std::uint64_t b) const noexcept {
    return static_cast<std::uint32_t>(gf2poly::mulmod(a, b, modulus_));
  }

  void precompute() {
    // Tr is linear, so its mask is Tr on the basis x^l.
    trace_mask_ = 0;
    for (unsigned l = 0; l < degree_; ++l)
      trace_mask_ |= static_cast<std::uint32_t>(trace_by_definition(std::uint64_t{1} << l)) << l;
    // sigma is linear in v; sigma(x^b) has bit l = Tr(x^(l+b)).
    form_basis_.assign(degree_, 0);
    for (unsigned b = 0; b < degree_; ++b) {
      std::uint32_t s = 0;
      for (unsigned l = 0; l < degree_; ++l) {
        const std::uint32_t prod = mul_unchecked(std::uint64_t{1} << l, std::uint64_t{1} << b);
        s |= static_cast<std::uint32_t>(std::popcount(prod & trace_mask_) & 1) << l;
      }
      form_basis_[b] = s;
    }
    if (degree_ <= kMaxTabulatedDegree) {
      form_table_.assign(size(), 0);
      // Gray-code fill: table[v] = table[v without lowest set bit] ^ basis.
      for (std::uint64_t v = 1; v < size(); ++v) {
        const unsigned low = static_cast<unsigned>(std::countr_zero(v));
        form_table_[v] = form_table_[v & (v - 1)] ^ form_basis_[low];
      }
    }
  }

  unsigned degree_;
  std::uint64_t modulus_;
  std::uint32_t trace_mask_ = 0;
  std::vector<std::uint32_t> form_basis_;
  std::vector<std::uint32_t> form_table_;
};

}  // namespace fjlp
