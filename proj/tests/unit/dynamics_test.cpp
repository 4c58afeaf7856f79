#include <gtest/gtest.h>

#include <random>

#include "andor/dynamics.hpp"
#include "andor/metrics.hpp"

using namespace andor;

namespace {

/// Profile whose strength sits at one order, so its mean order is exactly k.
OrderProfile point_profile(int n, double k_real) {
  OrderProfile p;
  p.n = n;
  p.orders.assign(static_cast<std::size_t>(n), {});
  // Split mass between floor and ceil so the mean order equals k_real.
  const int lo = static_cast<int>(std::floor(k_real));
  const double w = k_real - lo;
  p.at(lo).j_pos += 1.0 - w;
  if (w > 0) p.at(lo + 1).j_pos += w;
  p.refresh_mean_order();
  return p;
}

std::vector<EpochRecord> series_from(const std::vector<double>& orders, const std::vector<double>& gaps, int n = 10) {
  std::vector<EpochRecord> s;
  for (std::size_t i = 0; i < orders.size(); ++i) {
    EpochRecord r;
    r.epoch = static_cast<int>(i);
    r.aggregate = point_profile(n, orders[i]);
    r.train_loss = 1.0;
    r.test_loss = 1.0 + gaps[i];
    s.push_back(r);
  }
  return s;
}

}  // namespace

TEST(AggregateEpoch, SingleProfileIsIdentity) {
  const auto p = point_profile(6, 2.5);
  const std::vector<OrderProfile> one{p};
  const auto a = aggregate_epoch(one);
  for (int k = 1; k <= 6; ++k) EXPECT_EQ(a.at(k).j_pos, p.at(k).j_pos);
  EXPECT_DOUBLE_EQ(a.mean_salient_order, 2.5);
  EXPECT_THROW(aggregate_epoch(std::vector<OrderProfile>{}), std::invalid_argument);
  EXPECT_THROW(aggregate_epoch(std::vector<OrderProfile>{p, point_profile(5, 2.0)}), std::invalid_argument);
}

TEST(AggregateEpoch, MirroredProfilesAreSymmetric) {
  OrderProfile a, b;
  a.n = b.n = 4;
  a.orders = {{1, 0, 1}, {2, 0, 1}, {0, 0, 0}, {0, -3, 1}};
  b.orders = {{0, -3, 1}, {0, 0, 0}, {2, 0, 1}, {1, 0, 1}};
  const auto m = aggregate_epoch(std::vector<OrderProfile>{a, b});
  for (int k = 1; k <= 4; ++k) {
    EXPECT_DOUBLE_EQ(m.at(k).j_pos - m.at(k).j_neg, m.at(5 - k).j_pos - m.at(5 - k).j_neg);
  }
  EXPECT_DOUBLE_EQ(m.mean_salient_order, 2.5);
}

TEST(AggregateEpoch, MatchesNaiveMean) {
  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<OrderProfile> ps(100);
  for (auto& p : ps) {
    p.n = 7;
    for (int k = 0; k < 7; ++k) p.orders.push_back({u(rng), -u(rng), std::floor(10 * u(rng))});
  }
  const auto m = aggregate_epoch(ps);
  double num = 0, den = 0;
  for (int k = 1; k <= 7; ++k) {
    double pos = 0, neg = 0, cnt = 0;
    for (const auto& p : ps) {
      pos += p.at(k).j_pos;
      neg += p.at(k).j_neg;
      cnt += p.at(k).salient_count;
    }
    EXPECT_NEAR(m.at(k).j_pos, pos / 100, 1e-12);
    EXPECT_NEAR(m.at(k).j_neg, neg / 100, 1e-12);
    EXPECT_NEAR(m.at(k).salient_count, cnt / 100, 1e-12);
    num += k * (pos - neg);
    den += pos - neg;
  }
  EXPECT_NEAR(m.mean_salient_order, num / den, 1e-12);
}

TEST(Smoothing, CentredWindowShrinksAtEnds) {
  const std::vector<double> x{1, 2, 3, 4, 10};
  EXPECT_EQ(centered_moving_average(x, 1), x);
  const auto s = centered_moving_average(x, 3);
  EXPECT_DOUBLE_EQ(s[0], 1.5);
  EXPECT_DOUBLE_EQ(s[2], 3.0);
  EXPECT_DOUBLE_EQ(s[4], 7.0);
  EXPECT_THROW(centered_moving_average(x, 0), std::invalid_argument);
  EXPECT_DOUBLE_EQ(fitted_slope(std::vector<double>{0, 1, 2}, std::vector<double>{1, 3, 5}), 2.0);
  EXPECT_EQ(fitted_slope(std::vector<double>{1}, std::vector<double>{1}), 0.0);
}

TEST(DetectTransition, ArgminExample) {
  const auto s = series_from({5.0, 3.1, 1.8, 2.2, 3.0}, {0, 0, 0, 0.5, 1.0});
  TransitionConfig cfg;
  cfg.smooth_window = 1;
  const auto r = detect_transition(s, cfg);
  ASSERT_TRUE(r.transition_epoch);
  EXPECT_EQ(*r.transition_epoch, 2);
  EXPECT_LE(r.phase1_trend, 0.0);
  EXPECT_GE(r.phase2_trend, 0.0);
  ASSERT_TRUE(r.gap_rise_epoch);
  EXPECT_EQ(*r.gap_rise_epoch, 2);
  EXPECT_EQ(r.alignment_offset, 0);
  EXPECT_EQ(r.total_epochs, 4);
}

TEST(DetectTransition, MonotoneDecreasingNotEntered) {
  const auto r = detect_transition(series_from({6, 5, 4, 3, 2, 1}, {0, 0, 0, 0, 0, 0}));
  EXPECT_FALSE(r.transition_epoch);
  EXPECT_FALSE(r.alignment_offset);
  EXPECT_LT(r.phase1_trend, 0.0);
  EXPECT_NE(describe(r).find("not-entered"), std::string::npos);
}

TEST(DetectTransition, InputValidation) {
  EXPECT_THROW(detect_transition(series_from({1, 2}, {0, 0})), std::invalid_argument);
  auto s = series_from({3, 2, 1, 2}, {0, 0, 0, 0});
  s[2].test_loss = std::nan("");
  EXPECT_THROW(detect_transition(s), std::invalid_argument);
  s = series_from({3, 2, 1, 2}, {0, 0, 0, 0});
  s[3].epoch = 1;
  EXPECT_THROW(detect_transition(s), std::invalid_argument);
}

TEST(DetectTransition, InvariantUnderAffineLossRescaling) {
  std::mt19937_64 rng(62);
  std::uniform_real_distribution<double> u(0.0, 0.2);
  std::vector<double> orders, gaps;
  for (int e = 0; e < 40; ++e) {
    orders.push_back(std::abs(e - 15) * 0.2 + 2 + u(rng));
    gaps.push_back(e < 15 ? u(rng) * 0.1 : 0.05 * (e - 15) + u(rng) * 0.1);
  }
  const auto s = series_from(orders, gaps);
  auto scaled = s;
  for (auto& r : scaled) {
    r.train_loss = 3.0 * r.train_loss + 7.0;
    r.test_loss = 3.0 * r.test_loss + 7.0;
  }
  const auto a = detect_transition(s);
  const auto b = detect_transition(scaled);
  EXPECT_EQ(a.transition_epoch, b.transition_epoch);
  EXPECT_EQ(a.gap_rise_epoch, b.gap_rise_epoch);
}

TEST(DetectTransition, DuplicatedRecordsChangeNothing) {
  const auto s = series_from({5, 4, 3, 2.5, 2, 2.4, 3, 3.5}, {0, 0, 0, 0, 0.1, 0.3, 0.6, 1.0});
  std::vector<EpochRecord> doubled;
  for (const auto& r : s) {
    doubled.push_back(r);
    doubled.push_back(r);
  }
  const auto a = detect_transition(s);
  const auto b = detect_transition(doubled);
  EXPECT_EQ(a.transition_epoch, b.transition_epoch);
  EXPECT_EQ(a.gap_rise_epoch, b.gap_rise_epoch);
  EXPECT_EQ(a.smoothed_mean_order, b.smoothed_mean_order);
}

TEST(DetectTransition, NoisyVShapeFindsVertex) {
  std::mt19937_64 rng(63);
  for (int trial = 0; trial < 50; ++trial) {
    const int len = 30 + trial % 20;
    const int vertex = 5 + static_cast<int>(rng() % static_cast<unsigned>(len - 10));
    const double depth = 3.0;
    std::uniform_real_distribution<double> noise(-0.49 * depth / len, 0.49 * depth / len);
    std::vector<double> orders, gaps(len, 0.0);
    for (int e = 0; e < len; ++e) {
      const double v = e <= vertex ? depth * (vertex - e) / vertex : depth * (e - vertex) / (len - 1 - vertex);
      orders.push_back(2.0 + v + noise(rng));
    }
    TransitionConfig cfg;
    const auto r = detect_transition(series_from(orders, gaps), cfg);
    ASSERT_TRUE(r.transition_epoch);
    EXPECT_LE(std::abs(*r.transition_epoch - vertex), cfg.smooth_window) << "trial " << trial;
  }
}

TEST(FusiformCheck, BinomialProfilePasses) {
  OrderProfile p;
  p.n = 10;
  for (int k = 1; k <= 10; ++k) p.orders.push_back({binomial(10, k), -binomial(10, k), 0});
  const auto c = initial_fusiform_check(p);
  EXPECT_TRUE(c.pass);
  EXPECT_EQ(c.peak_order, 5);
}

TEST(FusiformCheck, MonotoneDecreasingFails) {
  OrderProfile p;
  p.n = 10;
  for (int k = 1; k <= 10; ++k) p.orders.push_back({11.0 - k, 0, 0});
  const auto c = initial_fusiform_check(p);
  EXPECT_FALSE(c.pass);
  EXPECT_EQ(c.peak_order, 1);
}

TEST(FusiformCheck, BimodalFails) {
  OrderProfile p;
  p.n = 10;
  for (double x : {1.0, 8.0, 1.0, 0.1, 0.1, 0.1, 1.0, 8.0, 1.0, 0.1}) p.orders.push_back({x, 0, 0});
  EXPECT_FALSE(initial_fusiform_check(p).pass);
}
