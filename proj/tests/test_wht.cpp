#include <gtest/gtest.h>

#include <algorithm>
#include <chrono>
#include <numeric>
#include <random>

#include "fjlp/wht.hpp"
#include "test_support.hpp"

using namespace fjlp;
using fjlp::testing::dense_wht;
using fjlp::testing::gaussian_vector;
using fjlp::testing::l2;
using fjlp::testing::max_abs_diff;

TEST(Wht, SmallExamples) {
  EXPECT_EQ(wht_full(RealVector{5.0}), RealVector{5.0});
  const auto y = wht_full(RealVector{1.0, 0.0});
  EXPECT_NEAR(y[0], 0.7071067811865476, 1e-15);
  EXPECT_NEAR(y[1], 0.7071067811865476, 1e-15);
  const auto z = wht_full(RealVector{1, 0, 0, 0});
  for (double v : z) EXPECT_DOUBLE_EQ(v, 0.5);
  EXPECT_EQ(wht_unnormalized(RealVector{1, 0}), (RealVector{1, 1}));
  EXPECT_EQ(wht_unnormalized(RealVector{1, 1}), (RealVector{2, 0}));
}

TEST(Wht, MatchesDenseOracle) {
  for (std::size_t d = 1; d <= 256; d *= 2) {
    const auto x = gaussian_vector(d, d);
    EXPECT_LT(max_abs_diff(wht_full(x), dense_wht(x)), 1e-12) << "d=" << d;
  }
}

TEST(Wht, IsometryAndInvolution) {
  for (std::size_t d = 2; d <= (1u << 14); d *= 2) {
    const auto x = gaussian_vector(d, 100 + d);
    const auto y = wht_full(x);
    EXPECT_NEAR(l2(y), l2(x), 1e-12 * l2(x));
    EXPECT_LT(max_abs_diff(wht_full(y), x), 1e-12 * l2(x));
  }
}

TEST(Wht, RejectsBadInput) {
  EXPECT_THROW(wht_full(RealVector{}), std::invalid_argument);
  EXPECT_THROW(wht_full(RealVector(3, 1.0)), std::invalid_argument);
  EXPECT_THROW(wht_full(RealVector{1.0, NAN}), std::invalid_argument);
  const RealVector x(8, 1.0);
  const std::vector<std::size_t> dup{1, 1}, oob{8}, none{};
  EXPECT_THROW(wht_partial(x, dup), std::invalid_argument);
  EXPECT_THROW(wht_partial(x, oob), std::out_of_range);
  EXPECT_THROW(wht_partial(x, none), std::invalid_argument);
}

TEST(WhtPartial, Examples) {
  const auto x = gaussian_vector(8, 3);
  const auto full = wht_full(x);
  std::vector<std::size_t> all(8);
  std::iota(all.begin(), all.end(), 0);
  EXPECT_LT(max_abs_diff(wht_partial(x, all), full), 1e-12);
  const std::vector<std::size_t> zero{0};
  EXPECT_NEAR(wht_partial(x, zero)[0], std::accumulate(x.begin(), x.end(), 0.0) / std::sqrt(8.0), 1e-12);
  const std::vector<std::size_t> some{3, 5};
  const auto part = wht_partial(x, some);
  EXPECT_NEAR(part[0], full[3], 1e-12);
  EXPECT_NEAR(part[1], full[5], 1e-12);
}

TEST(WhtPartial, RandomCasesAgreeWithFull) {
  std::mt19937_64 gen(2024);
  for (int c = 0; c < 1000; ++c) {
    const std::size_t d = std::size_t{1} << std::uniform_int_distribution<int>(0, 12)(gen);
    const auto x = gaussian_vector(d, gen());
    const std::size_t r = std::uniform_int_distribution<std::size_t>(1, std::min<std::size_t>(d, 40))(gen);
    std::vector<std::size_t> idx(d);
    std::iota(idx.begin(), idx.end(), 0);
    std::shuffle(idx.begin(), idx.end(), gen);
    idx.resize(r);
    std::sort(idx.begin(), idx.end());
    const auto full = wht_full(x);
    const auto part = wht_partial(x, idx);
    const double scale = std::max(1.0, l2(x));
    for (std::size_t i = 0; i < r; ++i) ASSERT_NEAR(part[i], full[idx[i]], 1e-12 * scale);
  }
}

TEST(WhtPartial, FasterThanFullForFewOutputs) {
  const std::size_t d = std::size_t{1} << 20;
  const auto x = gaussian_vector(d, 9);
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < 16; ++i) idx.push_back(i * 65521 % d);
  std::sort(idx.begin(), idx.end());
  auto best = [](auto&& fn) {
    double b = 1e9;
    for (int r = 0; r < 5; ++r) {
      const auto t0 = std::chrono::steady_clock::now();
      fn();
      b = std::min(b, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }
    return b;
  };
  volatile double sink = 0;
  const double tf = best([&] { sink = wht_full(x)[idx[0]]; });
  const double tp = best([&] { sink = wht_partial(x, idx)[0]; });
  (void)sink;
  EXPECT_GE(tf / tp, 2.0) << "full " << tf << "s partial " << tp << "s";
}

TEST(WhtPartial, RejectsNonFiniteInput) {
  for (double bad : {NAN, INFINITY, -INFINITY}) {
    RealVector x(1024, 1.0);
    x[517] = bad;
    const std::vector<std::size_t> idx{0, 3, 900};
    EXPECT_THROW(wht_partial(x, idx), std::invalid_argument);
  }
  RealVector y(16, 1.0);
  y[0] = INFINITY;
  y[1] = -INFINITY;
  const std::vector<std::size_t> one{2};
  EXPECT_THROW(wht_partial(y, one), std::invalid_argument);
}
