#include <gtest/gtest.h>

#include <random>

#include "andor/sparsifier.hpp"
#include "oracles.hpp"

using namespace andor;

namespace {

struct BranchMass {
  double and_mass = 0.0;
  double or_mass = 0.0;
};

BranchMass masses(const InteractionSpectrum& s) {
  BranchMass b;
  for (std::size_t m = 1; m < s.i_and.size(); ++m) {
    b.and_mass += std::abs(s.i_and[m]);
    b.or_mass += std::abs(s.i_or[m]);
  }
  return b;
}

}  // namespace

TEST(Sparsify, PlantedAndReachesFloor) {
  const auto t = oracle::planted_and(6, make_mask({1, 2, 3}).bits, 5.0);
  const auto s = sparsify(t);
  EXPECT_LE(std::abs(s.l1_objective() - 5.0), 0.05 * 5.0);
  const auto b = masses(s);
  EXPECT_LT(b.or_mass, 0.05 * (b.and_mass + b.or_mass));
  const auto ranked = ranked_salient_effects(s, SaliencyRule::relative(0.05).resolve(s));
  ASSERT_FALSE(ranked.empty());
  EXPECT_TRUE(ranked[0].is_and);
  EXPECT_EQ(ranked[0].set, make_mask({1, 2, 3}));
  EXPECT_NEAR(ranked[0].effect, 5.0, 0.05);
}

TEST(Sparsify, PlantedOrReachesFloor) {
  const auto t = oracle::planted_or(6, make_mask({1, 2}).bits, 5.0);
  const auto s = sparsify(t);
  EXPECT_LE(std::abs(s.l1_objective() - 5.0), 0.05 * 5.0);
  const auto b = masses(s);
  EXPECT_LT(b.and_mass, 0.05 * (b.and_mass + b.or_mass));
  const auto ranked = ranked_salient_effects(s, SaliencyRule::relative(0.05).resolve(s));
  ASSERT_FALSE(ranked.empty());
  EXPECT_FALSE(ranked[0].is_and);
  EXPECT_EQ(ranked[0].set, make_mask({1, 2}));
}

TEST(Sparsify, SmallPlantedOrWithAmplitudeThree) {
  const auto s = sparsify(oracle::planted_or(4, make_mask({1, 2}).bits, 3.0));
  EXPECT_NEAR(s.i_or[make_mask({1, 2})], 3.0, 0.03);
  EXPECT_LT(masses(s).and_mass, 0.05 * 3.0);
}

TEST(Sparsify, NeverWorseThanGammaZeroAndTraceMonotone) {
  std::mt19937_64 rng(31);
  for (const auto method : {SparsifyMethod::primal_dual, SparsifyMethod::subgradient}) {
    for (int trial = 0; trial < 8; ++trial) {
      const int n = 2 + trial % 6;
      const auto t = oracle::random_table(n, rng);
      SparsifierConfig cfg;
      cfg.method = method;
      cfg.max_iterations = 400;
      const auto s = sparsify(t, cfg);
      const double base = decompose(t, GammaSplit::zero(n)).l1_objective();
      EXPECT_LE(s.l1_objective(), base + 1e-9);
      const auto& tr = s.source_meta.trace;
      EXPECT_TRUE(s.source_meta.optimized);
      EXPECT_NEAR(tr.initial_objective, base, 1e-9);
      EXPECT_NEAR(tr.final_objective, s.l1_objective(), 1e-9);
      for (std::size_t i = 1; i < tr.objective.size(); ++i) EXPECT_LE(tr.objective[i], tr.objective[i - 1]);
      if (method == SparsifyMethod::primal_dual) {
        EXPECT_LE(tr.lower_bound, s.l1_objective() + 1e-9);
      }
    }
  }
}

TEST(Sparsify, RespectsBoxAndKeepsMatching) {
  std::mt19937_64 rng(32);
  for (const double rho : {0.0, 0.1, 0.5, 2.0}) {
    const auto t = oracle::random_table(6, rng);
    SparsifierConfig cfg;
    cfg.bound_ratio = rho;
    cfg.max_iterations = 300;
    const auto s = sparsify(t, cfg);
    const double bound = rho * t.dynamic_range();
    EXPECT_EQ(s.split.gamma[0], 0.0);
    for (std::size_t m = 0; m < s.split.gamma.size(); ++m) EXPECT_LE(std::abs(s.split.gamma[m]), bound * (1 + 1e-12));
    EXPECT_LT(verify_universal_matching(s, t).max_abs_error, 1e-9 * t.reconstruction_scale());
  }
}

TEST(Sparsify, Deterministic) {
  std::mt19937_64 rng(33);
  const auto t = oracle::random_table(7, rng);
  for (const auto method : {SparsifyMethod::primal_dual, SparsifyMethod::subgradient}) {
    SparsifierConfig cfg;
    cfg.method = method;
    cfg.max_iterations = 200;
    const auto a = sparsify(t, cfg);
    const auto b = sparsify(t, cfg);
    EXPECT_EQ(a.split.gamma, b.split.gamma);
    EXPECT_EQ(a.i_and, b.i_and);
  }
}

TEST(Sparsify, ConstantTableIsTrivial) {
  const auto s = sparsify(MaskedOutputTable(3, std::vector<double>(8, 1.0)));
  EXPECT_EQ(s.l1_objective(), 0.0);
  EXPECT_TRUE(s.source_meta.trace.converged);
}

TEST(Sparsify, RejectsBadConfig) {
  const auto t = oracle::planted_and(3, 1, 1.0);
  SparsifierConfig cfg;
  cfg.bound_ratio = -1.0;
  EXPECT_THROW(sparsify(t, cfg), std::invalid_argument);
  cfg = {};
  cfg.max_iterations = -1;
  EXPECT_THROW(sparsify(t, cfg), std::invalid_argument);
  EXPECT_EQ(parse_sparsify_method(to_string(SparsifyMethod::subgradient)), SparsifyMethod::subgradient);
  EXPECT_THROW(parse_sparsify_method("newton"), std::invalid_argument);
}
