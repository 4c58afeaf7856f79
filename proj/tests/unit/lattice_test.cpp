#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "andor/lattice.hpp"
#include "andor/metrics.hpp"
#include "oracles.hpp"

using namespace andor;

TEST(SubsetMask, BitConvention) {
  const auto s = make_mask({0, 2, 5});
  EXPECT_EQ(s.bits, 0b100101U);
  EXPECT_EQ(s.order(), 3);
  EXPECT_TRUE(s.contains(2));
  EXPECT_FALSE(s.contains(1));
  EXPECT_TRUE(make_mask({2}).is_subset_of(s));
  EXPECT_FALSE(make_mask({1}).is_subset_of(s));
  EXPECT_TRUE(make_mask({1, 5}).intersects(s));
  EXPECT_FALSE(make_mask({1, 3}).intersects(s));
  EXPECT_TRUE(SubsetMask{}.empty());
  EXPECT_THROW(make_mask({24}), std::invalid_argument);
  EXPECT_THROW(make_mask({-1}), std::invalid_argument);
}

TEST(LatticeVector, RejectsBadInput) {
  EXPECT_THROW(LatticeVector(3, std::vector<double>(7)), std::invalid_argument);
  EXPECT_THROW(LatticeVector(2, {0.0, 1.0, std::nan(""), 2.0}), std::invalid_argument);
  EXPECT_THROW(LatticeVector(1, {0.0, std::numeric_limits<double>::infinity()}), std::invalid_argument);
  EXPECT_THROW(check_variable_count(0), std::invalid_argument);
  EXPECT_THROW(check_variable_count(kMaxVariables + 1), std::invalid_argument);
  EXPECT_NO_THROW(check_variable_count(kMaxVariables));
  LatticeVector v(3);
  EXPECT_EQ(v.size(), 8U);
  EXPECT_EQ(v.max_abs(), 0.0);
}

TEST(Transforms, MobiusMatchesNaiveOracle) {
  std::mt19937_64 rng(11);
  for (int n = 1; n <= 8; ++n) {
    const auto f = oracle::random_values(lattice_size(n), rng);
    const auto fast = mobius_transform(LatticeVector(n, f));
    EXPECT_LT(oracle::max_abs_diff(fast.values(), oracle::mobius(f)), 1e-10) << "n=" << n;
  }
}

TEST(Transforms, ZetaMatchesNaiveOracle) {
  std::mt19937_64 rng(12);
  for (int n = 1; n <= 8; ++n) {
    const auto g = oracle::random_values(lattice_size(n), rng);
    const auto fast = zeta_transform(LatticeVector(n, g));
    EXPECT_LT(oracle::max_abs_diff(fast.values(), oracle::zeta(g)), 1e-10) << "n=" << n;
  }
}

TEST(Transforms, SupersetMobiusMatchesNaiveOracle) {
  std::mt19937_64 rng(13);
  for (int n = 1; n <= 7; ++n) {
    auto f = oracle::random_values(lattice_size(n), rng);
    const auto expect = oracle::superset_mobius(f);
    superset_mobius_in_place(f, n);
    EXPECT_LT(oracle::max_abs_diff(f, expect), 1e-10) << "n=" << n;
  }
}

TEST(Transforms, RoundTripAtTwelveVariables) {
  std::mt19937_64 rng(14);
  const auto f = oracle::random_values(lattice_size(12), rng);
  const LatticeVector v(12, f);
  EXPECT_LT(oracle::max_abs_diff(zeta_transform(mobius_transform(v)).values(), f), 1e-10);
  EXPECT_LT(oracle::max_abs_diff(mobius_transform(zeta_transform(v)).values(), f), 1e-10);
}

TEST(Transforms, KnownValues) {
  // f = indicator of containing {0,1} -> g is the delta at {0,1}.
  std::vector<double> f{0, 0, 0, 1, 0, 0, 0, 1};
  mobius_in_place(f, 3);
  EXPECT_EQ(f, (std::vector<double>{0, 0, 0, 1, 0, 0, 0, 0}));
  std::vector<double> c{1, 1, 1, 1};
  mobius_in_place(c, 2);
  EXPECT_EQ(c, (std::vector<double>{1, 0, 0, 0}));
}

TEST(Transforms, ComplementReverse) {
  std::vector<double> f{0, 1, 2, 3, 4, 5, 6, 7};
  complement_reverse_in_place(f, 3);
  EXPECT_EQ(f, (std::vector<double>{7, 6, 5, 4, 3, 2, 1, 0}));
}

TEST(Transforms, SupersetComplementMatchesDefinition) {
  std::mt19937_64 rng(15);
  const int n = 5;
  const auto h = oracle::random_values(lattice_size(n), rng);
  const auto g = superset_complement_transform(LatticeVector(n, h));
  const auto full = full_mask(n);
  for (std::uint32_t s = 0; s < h.size(); ++s) {
    double expect = 0.0;
    for (std::uint32_t t = 0; t < h.size(); ++t) {
      if ((t & ~s) == 0) expect -= oracle::parity_sign(s, t) * h[full & ~t];
    }
    EXPECT_NEAR(g[s], expect, 1e-12) << "S=" << s;
  }
}

TEST(Transforms, SpanLengthChecked) {
  std::vector<double> f(7);
  EXPECT_THROW(mobius_in_place(f, 3), std::invalid_argument);
  EXPECT_THROW(zeta_in_place(f, 3), std::invalid_argument);
}

TEST(Transforms, LinearityProperty) {
  std::mt19937_64 rng(16);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + trial % 9;
    const auto a = oracle::random_values(lattice_size(n), rng);
    const auto b = oracle::random_values(lattice_size(n), rng);
    std::vector<double> mix(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) mix[i] = 2.0 * a[i] - 0.5 * b[i];
    const auto ma = mobius_transform(LatticeVector(n, a));
    const auto mb = mobius_transform(LatticeVector(n, b));
    const auto mm = mobius_transform(LatticeVector(n, mix));
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(mm[i], 2.0 * ma[i] - 0.5 * mb[i], 1e-10);
  }
}

TEST(SubsetsOfOrder, CountsAndOrdering) {
  for (int n = 1; n <= 10; ++n) {
    for (int k = 0; k <= n; ++k) {
      const auto s = subsets_of_order(n, k);
      EXPECT_EQ(static_cast<double>(s.size()), binomial(n, k));
      for (std::size_t i = 0; i < s.size(); ++i) {
        EXPECT_EQ(s[i].order(), k);
        if (i) {
          EXPECT_LT(s[i - 1].bits, s[i].bits);
        }
      }
    }
  }
}
