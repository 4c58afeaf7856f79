#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "andor/interaction.hpp"

namespace andor {

struct OrderStrength {
  double j_pos = 0.0;          ///< >= 0
  double j_neg = 0.0;          ///< <= 0
  double salient_count = 0.0;  ///< fractional after averaging
};

/// Salient-interaction strength per order k = 1..n, pooled over both branches.
struct OrderProfile {
  int n = 0;
  std::vector<OrderStrength> orders;  ///< orders[k - 1] holds order k
  double mean_salient_order = 0.0;

  const OrderStrength& at(int k) const { return orders.at(static_cast<std::size_t>(k - 1)); }
  OrderStrength& at(int k) { return orders.at(static_cast<std::size_t>(k - 1)); }
  /// sum_k (j_pos(k) - j_neg(k))
  double total_strength() const;
  /// Recomputes mean_salient_order = sum_k k (j_pos - j_neg) / sum_k (j_pos - j_neg), 0 if empty.
  void refresh_mean_order();
};

OrderProfile order_profile(const InteractionSpectrum& spectrum, double tau);

enum class Branch { and_branch, or_branch, sum };

struct OrderVector {
  int n = 0;
  int k = 0;
  std::vector<double> values;  ///< over order-k masks in ascending integer order
};

OrderVector vectorize_order(const InteractionSpectrum& spectrum, int k, Branch branch = Branch::sum);

/// Jaccard similarity of the sign-split projections [max(w,0), max(-w,0)].
/// Two all-zero vectors have similarity 1.
double jaccard_similarity(const OrderVector& a, const OrderVector& b);
double jaccard_similarity(std::span<const double> a, std::span<const double> b);

struct CategoryMeanVector {
  int k = 0;
  int category = 0;
  OrderVector mean;
  std::size_t sample_count = 0;
};

/// Elementwise mean of same-order vectors (pairwise summation).
CategoryMeanVector category_mean(std::span<const OrderVector> vectors, int category);

struct OrderSimilarity {
  int k = 0;
  double mean_similarity = 0.0;
  std::size_t categories = 0;
};

/// For each order k: E_c[jaccard(train mean_{k,c}, test mean_{k,c})]. Every
/// (k, c) on one side needs a partner on the other.
std::vector<OrderSimilarity> generalization_curve(std::span<const CategoryMeanVector> train,
                                                  std::span<const CategoryMeanVector> test);

/// Spearman rank correlation with average ranks for ties.
double spearman_correlation(std::span<const double> x, std::span<const double> y);

double binomial(int n, int k);

struct GaussianStrength {
  double e_pos = 0.0;
  double e_neg = 0.0;
};

/// Expected positive / negative strength of order k when every interaction is
/// i.i.d. N(0, sd^2): E[Psi_pos] = C(n,k) sd / sqrt(2 pi), E[Psi_neg] = -E[Psi_pos].
GaussianStrength gaussian_strength_expectation(int n, int k, double sd);

struct FusiformEstimate {
  int n = 0;
  std::uint64_t trials = 0;
  std::vector<double> pos_mean;     ///< index k - 1
  std::vector<double> neg_mean;
  std::vector<double> pos_std_err;
  std::vector<double> neg_std_err;
};

/// Monte Carlo estimate of E[Psi_pos^(k)], E[Psi_neg^(k)] with one i.i.d.
/// Gaussian interaction per non-empty subset. Trial t draws from its own stream
/// seeded by (seed, t), so results do not depend on how trials are batched.
FusiformEstimate fusiform_monte_carlo(int n, double sd, std::uint64_t trials, std::uint64_t seed);

}  // namespace andor
