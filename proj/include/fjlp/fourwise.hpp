#pragma once

// The k x d signed 4-wise independent matrix A.
//
// Columns are indexed by pairs (a, b) in GF(2^m)^2, j = a * 2^m + b, and
// rows by distinct nonzero field points x_i (bit patterns 1..k):
//
//   A[i][(a, b)] = (-1)^{Tr(a x_i) + Tr(b x_i^3)}.
//
// Each row is a codeword of the dual of the double-error-correcting BCH code,
// whose dual distance is at least 5; every 4 rows therefore form an exact
// strength-4 orthogonal array and each of the 16 sign patterns appears in
// exactly d/16 columns.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "fjlp/gf2m.hpp"
#include "fjlp/report.hpp"
#include "fjlp/wht.hpp"

namespace fjlp {

constexpr bool is_power_of_four(std::uint64_t n) noexcept {
  return is_power_of_two(n) && (std::countr_zero(n) % 2 == 0);
}

class FourWiseMatrix {
 public:
  FourWiseMatrix(std::size_t k, std::uint64_t d)
      : k_(k), d_(d), field_(field_degree_for(d)) {
    const std::uint64_t side = std::uint64_t{1} << field_.degree();
    if (k < 1 || k > side - 1)
      throw std::invalid_argument("fourwise: k=" + std::to_string(k) +
                                  " outside [1, sqrt(d)-1] = [1, " +
                                  std::to_string(side - 1) + "]");
    side_ = static_cast<std::size_t>(side);
    row_points_.resize(k);
    row_cubes_.resize(k);
    mask_a_.resize(k);
    mask_b_.resize(k);
    for (std::size_t i = 0; i < k; ++i) {
      const std::uint32_t xi = static_cast<std::uint32_t>(i + 1);
      row_points_[i] = xi;
      row_cubes_[i] = field_.cube(xi);
      mask_a_[i] = field_.form_index(xi);
      mask_b_[i] = field_.form_index(row_cubes_[i]);
    }
    // Distinct WHT output positions needed per column block, and which one
    // each row reads. Cubing is 3-to-1 on even-degree fields, so positions can
    // repeat.
    positions_.assign(mask_b_.begin(), mask_b_.end());
    std::sort(positions_.begin(), positions_.end());
    positions_.erase(std::unique(positions_.begin(), positions_.end()), positions_.end());
    slot_.resize(k);
    for (std::size_t i = 0; i < k; ++i)
      slot_[i] = static_cast<std::size_t>(
          std::lower_bound(positions_.begin(), positions_.end(), mask_b_[i]) -
          positions_.begin());
    inner_plan_ = PartialWhtPlan(positions_, side_);
    // Outer stage: for each slot, a partial WHT over a at outputs sigma(x_i)
    // of the rows reading that slot. sigma is a bijection, so these are
    // distinct.
    outer_rows_.resize(positions_.size());
    outer_plans_.resize(positions_.size());
    for (std::size_t i = 0; i < k; ++i) outer_rows_[slot_[i]].push_back(i);
    for (std::size_t s = 0; s < positions_.size(); ++s) {
      auto& rows = outer_rows_[s];
      std::sort(rows.begin(), rows.end(),
                [&](std::size_t x, std::size_t y) { return mask_a_[x] < mask_a_[y]; });
      std::vector<std::size_t> outs;
      for (std::size_t i : rows) outs.push_back(mask_a_[i]);
      outer_plans_[s] = PartialWhtPlan(outs, side_);
    }
  }

  std::size_t rows() const noexcept { return k_; }
  std::uint64_t cols() const noexcept { return d_; }
  const FieldSpec& field() const noexcept { return field_; }
  std::span<const std::uint32_t> row_points() const noexcept { return row_points_; }
  std::span<const std::uint32_t> row_cubes() const noexcept { return row_cubes_; }

  /// +1 or -1.
  int entry(std::size_t i, std::uint64_t j) const {
    if (i >= k_ || j >= d_)
      throw std::out_of_range("fourwise: entry index out of range");
    return entry_unchecked(i, j);
  }

  int entry_unchecked(std::size_t i, std::uint64_t j) const noexcept {
    const std::uint32_t a = static_cast<std::uint32_t>(j >> field_.degree());
    const std::uint32_t b = static_cast<std::uint32_t>(j & (side_ - 1));
    const int parity = std::popcount((a & mask_a_[i])) + std::popcount((b & mask_b_[i]));
    return (parity & 1) ? -1 : 1;
  }

  /// Direct O(k d) summation. Reference for multiply_fast.
  RealVector multiply_explicit(std::span<const double> v) const {
    require_length(v);
    RealVector y(k_, 0.0);
    for (std::size_t i = 0; i < k_; ++i) {
      double acc = 0.0;
      for (std::uint64_t j = 0; j < d_; ++j)
        acc += entry_unchecked(i, j) > 0 ? v[j] : -v[j];
      y[i] = acc;
    }
    return y;
  }

  /// A v in O(d log k) operations.
  ///
  /// With V[a][b] = v[a * 2^m + b]:
  ///   y_i = sum_a (-1)^{Tr(a x_i)} sum_b (-1)^{Tr(b x_i^3)} V[a][b].
  /// The inner sum is the unnormalized WHT of row V[a] at output
  /// sigma(x_i^3), computed for all rows i at once by a partial WHT. The outer
  /// sum is a signed length-2^m sum per row i.
  RealVector multiply_fast(std::span<const double> v) const {
    require_length(v);
    const std::size_t r = positions_.size();
    std::size_t scratch = inner_plan_.scratch();
    for (const auto& p : outer_plans_) scratch = std::max(scratch, p.scratch());
    std::vector<double> work(scratch), tmp(std::max(r, k_));
    // inner[s * side + a] = unnormalized WHT of row V[a] at positions_[s].
    std::vector<double> inner(r * side_);
    for (std::size_t a = 0; a < side_; ++a) {
      inner_plan_.execute(v.subspan(a * side_, side_), work, tmp);
      for (std::size_t s = 0; s < r; ++s) inner[s * side_ + a] = tmp[s];
    }
    RealVector y(k_, 0.0);
    for (std::size_t s = 0; s < r; ++s) {
      outer_plans_[s].execute(std::span<const double>(inner).subspan(s * side_, side_), work, tmp);
      for (std::size_t n = 0; n < outer_rows_[s].size(); ++n) y[outer_rows_[s][n]] = tmp[n];
    }
    return y;
  }

  /// Dense row-major k x d matrix of +-1 entries.
  std::vector<double> materialize() const {
    std::vector<double> m(k_ * d_);
    for (std::size_t i = 0; i < k_; ++i)
      for (std::uint64_t j = 0; j < d_; ++j) m[i * d_ + j] = entry_unchecked(i, j);
    return m;
  }

  static unsigned field_degree_for(std::uint64_t d) {
    if (!is_power_of_four(d) || d < 4)
      throw std::invalid_argument("fourwise: d=" + std::to_string(d) +
                                  " is not a power of 4 (>= 4)");
    const unsigned m = static_cast<unsigned>(std::countr_zero(d)) / 2;
    if (m > FieldSpec::kMaxTabulatedDegree)
      throw std::invalid_argument("fourwise: d=" + std::to_string(d) + " exceeds 2^32");
    return m;
  }

 private:
  void require_length(std::span<const double> v) const {
    if (v.size() != d_)
      throw std::invalid_argument("fourwise: vector length " + std::to_string(v.size()) +
                                  " != d=" + std::to_string(d_));
  }

  std::size_t k_;
  std::uint64_t d_;
  FieldSpec field_;
  std::size_t side_ = 0;
  std::vector<std::uint32_t> row_points_;
  PartialWhtPlan inner_plan_;
  std::vector<PartialWhtPlan> outer_plans_;
  std::vector<std::vector<std::size_t>> outer_rows_;
  std::vector<std::uint32_t> row_cubes_;
  std::vector<std::uint32_t> mask_a_;  // sigma(x_i)
  std::vector<std::uint32_t> mask_b_;  // sigma(x_i^3)
  std::vector<std::size_t> positions_;
  std::vector<std::size_t> slot_;
};

/// Exhaustive strength-4 check: for every 4 rows and each of the 16 sign
/// patterns, counts matching columns and passes iff every count is d/16.
///
/// Work is C(k,4) * d entry evaluations; when that exceeds `budget` the check
/// covers as many quadruples as the budget allows and does not pass. With
/// k < 4 there are no quadruples: counts for the min(k,4)-row tuples are
/// reported and the check passes vacuously.
inline VerificationReport verify_strength4(const FourWiseMatrix& a,
                                           std::uint64_t budget = 1'000'000'000ULL) {
  const std::size_t k = a.rows();
  const std::uint64_t d = a.cols();
  const std::size_t t = std::min<std::size_t>(k, 4);

  // Sign bits per row, one byte per column.
  std::vector<std::vector<std::uint8_t>> bit(k, std::vector<std::uint8_t>(d));
  for (std::size_t i = 0; i < k; ++i)
    for (std::uint64_t j = 0; j < d; ++j) bit[i][j] = a.entry_unchecked(i, j) < 0 ? 1 : 0;

  std::vector<std::size_t> idx(t);
  for (std::size_t i = 0; i < t; ++i) idx[i] = i;
  auto next_combination = [&]() {
    for (std::size_t pos = t; pos-- > 0;) {
      if (idx[pos] < k - t + pos) {
        ++idx[pos];
        for (std::size_t q = pos + 1; q < t; ++q) idx[q] = idx[q - 1] + 1;
        return true;
      }
    }
    return false;
  };

  const std::uint64_t expected = d >> t;
  std::uint64_t tuples = 0;
  std::uint64_t total_tuples = 1;
  for (std::size_t i = 0; i < t; ++i) total_tuples = total_tuples * (k - i) / (i + 1);
  std::uint64_t work = 0;
  std::uint64_t min_count = d, max_count = 0;
  bool all_exact = true;
  bool budget_hit = false;
  do {
    if (work + d > budget) {
      budget_hit = true;
      break;
    }
    std::uint64_t counts[16] = {};
    for (std::uint64_t j = 0; j < d; ++j) {
      unsigned pat = 0;
      for (std::size_t q = 0; q < t; ++q) pat |= static_cast<unsigned>(bit[idx[q]][j]) << q;
      ++counts[pat];
    }
    for (std::size_t p = 0; p < (std::size_t{1} << t); ++p) {
      min_count = std::min(min_count, counts[p]);
      max_count = std::max(max_count, counts[p]);
      if (counts[p] != expected) all_exact = false;
    }
    work += d;
    ++tuples;
  } while (next_combination());

  VerificationReport rep;
  rep.check = "fourwise_strength4";
  rep.estimate = static_cast<double>(max_count);
  rep.ci = {static_cast<double>(min_count), static_cast<double>(max_count)};
  rep.bound = static_cast<double>(expected);
  rep.trials = tuples;
  rep.pass = !budget_hit && (k < 4 || all_exact);
  rep.params = {{"k", k},
                {"d", d},
                {"tuple_size", t},
                {"tuples_checked", tuples},
                {"tuples_total", total_tuples},
                {"coverage", total_tuples == 0 ? 1.0
                                               : static_cast<double>(tuples) /
                                                     static_cast<double>(total_tuples)},
                {"expected_count", expected},
                {"min_count", min_count},
                {"max_count", max_count},
                {"all_counts_exact", all_exact},
                {"budget", budget},
                {"budget_exceeded", budget_hit},
                {"vacuous", k < 4}};
  return rep;
}

}  // namespace fjlp
