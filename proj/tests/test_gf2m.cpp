#include <gtest/gtest.h>

#include <bit>
#include <random>
#include <set>

#include "fjlp/gf2m.hpp"

using namespace fjlp;

TEST(Gf2m, SmallestModuli) {
  EXPECT_EQ(FieldSpec(1).modulus(), 0b11u);
  EXPECT_EQ(FieldSpec(2).modulus(), 0b111u);
  EXPECT_EQ(FieldSpec(3).modulus(), 0b1011u);
  EXPECT_EQ(FieldSpec(3).modulus_hex(), "0xb");
  // m = 1: trace is the identity bit.
  const FieldSpec f1(1);
  EXPECT_EQ(f1.trace(0), 0u);
  EXPECT_EQ(f1.trace(1), 1u);
}

TEST(Gf2m, DocumentedProducts) {
  const FieldSpec f(3);
  EXPECT_EQ(f.multiply(0b010, 0b100), 0b011u);
  EXPECT_EQ(f.cube(0b010), 0b011u);
  EXPECT_EQ(f.cube(0), 0u);
  EXPECT_EQ(f.cube(1), 1u);
  for (unsigned a = 0; a < 8; ++a) {
    EXPECT_EQ(f.multiply(a, 0), 0u);
    EXPECT_EQ(f.multiply(a, 1), a);
  }
  EXPECT_EQ(FieldSpec(3).trace(1), 1u);
  EXPECT_EQ(FieldSpec(2).trace(1), 0u);
  EXPECT_EQ(FieldSpec(5).trace(0), 0u);
}

TEST(Gf2m, IrreducibilityTestsAgree) {
  for (std::uint64_t f = 2; f < (1u << 13); ++f)
    ASSERT_EQ(gf2poly::irreducible_exhaustive(f), gf2poly::irreducible_rabin(f)) << f;
}

TEST(Gf2m, FieldAxiomsExhaustive) {
  for (unsigned m = 1; m <= 4; ++m) {
    const FieldSpec f(m);
    const unsigned q = 1u << m;
    for (unsigned a = 0; a < q; ++a) {
      bool has_inverse = a == 0;
      for (unsigned b = 0; b < q; ++b) {
        ASSERT_EQ(f.multiply(a, b), f.multiply(b, a));
        if (f.multiply(a, b) == 1) has_inverse = true;
        for (unsigned c = 0; c < q; ++c) {
          ASSERT_EQ(f.multiply(f.multiply(a, b), c), f.multiply(a, f.multiply(b, c)));
          ASSERT_EQ(f.multiply(a, b ^ c), f.multiply(a, b) ^ f.multiply(a, c));
        }
      }
      ASSERT_TRUE(has_inverse) << "m=" << m << " a=" << a;
    }
  }
}

TEST(Gf2m, TraceLinearityAndFrobenius) {
  for (unsigned m = 1; m <= 8; ++m) {
    const FieldSpec f(m);
    const unsigned q = 1u << m;
    unsigned ones = 0;
    for (unsigned a = 0; a < q; ++a) {
      ASSERT_EQ(f.trace(a), f.trace_by_definition(a));
      ASSERT_EQ(f.trace(a), f.trace(f.multiply(a, a)));
      ones += f.trace(a);
      for (unsigned b = 0; b < q; ++b) ASSERT_EQ(f.trace(a ^ b), f.trace(a) ^ f.trace(b));
    }
    EXPECT_EQ(ones, q / 2) << "trace must be balanced";
    EXPECT_EQ(f.trace(1), m % 2);
  }
}

TEST(Gf2m, FormIndexIsBijectionAndRepresentsTraceForm) {
  for (unsigned m = 1; m <= 16; ++m) {
    const FieldSpec f(m);
    const std::uint64_t q = f.size();
    std::vector<bool> seen(q, false);
    for (std::uint64_t v = 0; v < q; ++v) {
      const auto s = f.form_index(v);
      ASSERT_LT(s, q);
      ASSERT_FALSE(seen[s]);
      seen[s] = true;
    }
    std::mt19937_64 gen(m);
    for (int t = 0; t < 200; ++t) {
      const std::uint64_t u = gen() % q, v = gen() % q;
      ASSERT_EQ(f.trace(f.multiply(u, v)),
                static_cast<unsigned>(std::popcount(u & f.form_index(v)) & 1));
    }
  }
}

TEST(Gf2m, LargeDegreeWithoutTable) {
  const FieldSpec f(20);
  EXPECT_FALSE(f.has_form_table());
  std::mt19937_64 gen(5);
  for (int t = 0; t < 200; ++t) {
    const std::uint64_t u = gen() % f.size(), v = gen() % f.size();
    ASSERT_EQ(f.trace(f.multiply(u, v)),
              static_cast<unsigned>(std::popcount(u & f.form_index(v)) & 1));
    ASSERT_EQ(f.trace(u), f.trace_by_definition(u));
  }
}

TEST(Gf2m, RejectsBadParameters) {
  EXPECT_THROW(FieldSpec(0), std::invalid_argument);
  EXPECT_THROW(FieldSpec(33), std::invalid_argument);
  EXPECT_THROW(FieldSpec(3, 0b1001), std::invalid_argument);  // x^3+1 = (x+1)(x^2+x+1)
  EXPECT_THROW(FieldSpec(3).multiply(8, 1), std::out_of_range);
  EXPECT_EQ(FieldSpec(3, 0b1101).modulus(), 0b1101u);
}
