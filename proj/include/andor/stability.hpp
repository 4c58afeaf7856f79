#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "andor/interaction.hpp"

namespace andor {

/// Pair (k', k) with k' < k witnessing a failed order condition.
using OrderPair = std::pair<int, int>;

struct StabilityConditions {
  int max_order = 0;  ///< M
  double tolerance = 0.0;

  /// No AND interaction above order M exceeds the tolerance. Empty when no
  /// spectrum was supplied.
  std::optional<bool> high_order_absent;
  double largest_high_order_effect = 0.0;
  std::optional<SubsetMask> high_order_witness;

  /// u_bar[k] = mean over |S| = k of v(x_S) - v(x_empty), k = 0..n.
  std::vector<double> mean_gain;

  bool monotone_gain = false;
  std::optional<OrderPair> monotone_witness;

  bool polynomial_bound = false;
  std::optional<double> exponent;  ///< smallest admissible p found
  std::optional<OrderPair> polynomial_witness;
};

/// Checks the three stability conditions behind the sparsity bound. Condition 1
/// needs a spectrum and is skipped when none is given.
StabilityConditions check_stability_conditions(const MaskedOutputTable& table, int max_order, double tolerance,
                                               const InteractionSpectrum* spectrum = nullptr);

/// u_bar[k] for k = 0..n.
std::vector<double> mean_gain_by_order(const MaskedOutputTable& table);

struct SparsityReport {
  double tau = 0.0;
  std::size_t salient_count = 0;
  int n = 0;
  double kappa_low = 0.9;
  double kappa_high = 1.2;
  StabilityConditions conditions;
};

SparsityReport sparsity_report(const InteractionSpectrum& spectrum, const MaskedOutputTable& table, double tau,
                               int max_order, double tolerance);

struct SalientCountSample {
  int n = 0;
  double tau = 0.0;
  double salient_count = 0.0;
};

struct KappaFit {
  double kappa = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  ///< RMS residual of the log-log fit
};

/// Least-squares fit of log(count * tau) = kappa * log(n) + c. Needs at least
/// three distinct n.
KappaFit estimate_kappa(const std::vector<SalientCountSample>& samples);

}  // namespace andor
