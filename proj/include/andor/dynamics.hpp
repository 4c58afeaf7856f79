#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "andor/metrics.hpp"

namespace andor {

struct EpochRecord {
  int epoch = 0;
  OrderProfile aggregate;
  double train_loss = 0.0;
  double test_loss = 0.0;

  double gap() const { return test_loss - train_loss; }
};

/// Mean of j_pos, j_neg and counts across samples; the mean order is
/// recomputed from the averaged strengths.
OrderProfile aggregate_epoch(std::span<const OrderProfile> profiles);

struct TransitionConfig {
  int smooth_window = 3;        ///< centred moving-average width
  double gap_threshold = 0.05;  ///< relative to the smoothed gap's range
};

struct PhaseReport {
  std::optional<int> transition_epoch;  ///< empty: second phase not entered
  std::optional<int> gap_rise_epoch;
  std::optional<int> alignment_offset;  ///< transition - gap rise
  double phase1_trend = 0.0;            ///< LS slope of smoothed mean order up to the transition
  double phase2_trend = 0.0;            ///< LS slope from the transition on
  int total_epochs = 0;                 ///< last epoch - first epoch

  std::vector<int> epochs;
  std::vector<double> smoothed_mean_order;
  std::vector<double> smoothed_gap;
};

/// Centred moving average; the window shrinks at the ends.
std::vector<double> centered_moving_average(std::span<const double> x, int window);

/// Least-squares slope of y against x (0 for fewer than two points).
double fitted_slope(std::span<const double> x, std::span<const double> y);

/// Records sharing an epoch with their predecessor are dropped; the rest must be
/// strictly increasing in epoch and have finite losses. Needs >= 3 epochs.
PhaseReport detect_transition(std::span<const EpochRecord> series, const TransitionConfig& cfg = {});

struct FusiformCheck {
  bool pass = false;
  int peak_order = 0;
  std::vector<double> smoothed_strength;  ///< index k - 1
};

/// Total strength |j_pos(k)| + |j_neg(k)|, smoothed (window 3), must rise to a
/// single peak and then fall (dips up to unimodal_slack * peak tolerated), with
/// the peak within peak_tolerance of n / 2.
FusiformCheck initial_fusiform_check(const OrderProfile& profile, double peak_tolerance = 1.0,
                                     double unimodal_slack = 0.05);

std::string describe(const PhaseReport& report);

}  // namespace andor
