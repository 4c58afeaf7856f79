#include "andor/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace andor {

OrderProfile aggregate_epoch(std::span<const OrderProfile> profiles) {
  if (profiles.empty()) throw std::invalid_argument("cannot aggregate an empty set of profiles");
  OrderProfile out;
  out.n = profiles.front().n;
  out.orders.assign(static_cast<std::size_t>(out.n), {});
  for (const auto& p : profiles) {
    if (p.n != out.n || p.orders.size() != out.orders.size()) {
      throw std::invalid_argument("profiles with different n cannot be aggregated");
    }
    for (std::size_t i = 0; i < out.orders.size(); ++i) {
      out.orders[i].j_pos += p.orders[i].j_pos;
      out.orders[i].j_neg += p.orders[i].j_neg;
      out.orders[i].salient_count += p.orders[i].salient_count;
    }
  }
  const double m = static_cast<double>(profiles.size());
  for (auto& o : out.orders) {
    o.j_pos /= m;
    o.j_neg /= m;
    o.salient_count /= m;
  }
  out.refresh_mean_order();
  return out;
}

std::vector<double> centered_moving_average(std::span<const double> x, int window) {
  if (window < 1) throw std::invalid_argument("smoothing window must be >= 1");
  const int half = window / 2;
  const int len = static_cast<int>(x.size());
  std::vector<double> out(x.size());
  for (int i = 0; i < len; ++i) {
    const int lo = std::max(0, i - half);
    const int hi = std::min(len - 1, i + (window - 1 - half));
    double s = 0.0;
    for (int j = lo; j <= hi; ++j) s += x[j];
    out[i] = s / (hi - lo + 1);
  }
  return out;
}

double fitted_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("slope: length mismatch");
  if (x.size() < 2) return 0.0;
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxx > 0.0 ? sxy / sxx : 0.0;
}

PhaseReport detect_transition(std::span<const EpochRecord> series, const TransitionConfig& cfg) {
  if (cfg.smooth_window < 1) throw std::invalid_argument("smoothing window must be >= 1");
  std::vector<const EpochRecord*> records;
  for (const auto& r : series) {
    if (!records.empty() && records.back()->epoch == r.epoch) continue;
    if (!records.empty() && r.epoch < records.back()->epoch) {
      throw std::invalid_argument("epoch series is not increasing at epoch " + std::to_string(r.epoch));
    }
    if (!std::isfinite(r.train_loss) || !std::isfinite(r.test_loss)) {
      throw std::invalid_argument("non-finite loss at epoch " + std::to_string(r.epoch));
    }
    records.push_back(&r);
  }
  if (records.size() < 3) throw std::invalid_argument("transition detection needs at least 3 epochs");

  PhaseReport rep;
  std::vector<double> order, gap, x;
  for (const auto* r : records) {
    rep.epochs.push_back(r->epoch);
    x.push_back(static_cast<double>(r->epoch));
    order.push_back(r->aggregate.mean_salient_order);
    gap.push_back(r->gap());
  }
  rep.total_epochs = rep.epochs.back() - rep.epochs.front();
  rep.smoothed_mean_order = centered_moving_average(order, cfg.smooth_window);
  rep.smoothed_gap = centered_moving_average(gap, cfg.smooth_window);

  const auto& s = rep.smoothed_mean_order;
  const std::size_t t = static_cast<std::size_t>(std::min_element(s.begin(), s.end()) - s.begin());
  const std::span<const double> xs(x), ss(s);
  if (t + 1 < s.size()) {
    rep.transition_epoch = rep.epochs[t];
    rep.phase1_trend = fitted_slope(xs.first(t + 1), ss.first(t + 1));
    rep.phase2_trend = fitted_slope(xs.subspan(t), ss.subspan(t));
  } else {
    rep.phase1_trend = fitted_slope(xs, ss);
  }

  const auto& g = rep.smoothed_gap;
  const auto [gmin, gmax] = std::minmax_element(g.begin(), g.end());
  const double rise = cfg.gap_threshold * (*gmax - *gmin);
  const std::size_t hold = static_cast<std::size_t>(cfg.smooth_window);
  for (std::size_t i = 0; i + 1 < g.size(); ++i) {
    if (!(g[i + 1] - g[i] > rise)) continue;
    bool stays = true;
    for (std::size_t j = i; j < i + hold; ++j) {
      if (j + 1 >= g.size() || !(g[j + 1] - g[j] > 0.0)) {
        stays = false;
        break;
      }
    }
    if (stays) {
      rep.gap_rise_epoch = rep.epochs[i];
      break;
    }
  }
  if (rep.transition_epoch && rep.gap_rise_epoch) rep.alignment_offset = *rep.transition_epoch - *rep.gap_rise_epoch;
  return rep;
}

FusiformCheck initial_fusiform_check(const OrderProfile& profile, double peak_tolerance, double unimodal_slack) {
  FusiformCheck out;
  std::vector<double> strength;
  for (const auto& o : profile.orders) strength.push_back(std::abs(o.j_pos) + std::abs(o.j_neg));
  if (strength.empty()) return out;
  out.smoothed_strength = centered_moving_average(strength, 3);
  const auto& s = out.smoothed_strength;
  const std::size_t peak = static_cast<std::size_t>(std::max_element(s.begin(), s.end()) - s.begin());
  out.peak_order = static_cast<int>(peak) + 1;
  const double slack = unimodal_slack * s[peak];
  if (!(s[peak] > 0.0)) return out;

  bool unimodal = true;
  for (std::size_t i = 0; i < peak; ++i) {
    if (s[i + 1] < s[i] - slack) unimodal = false;
  }
  for (std::size_t i = peak; i + 1 < s.size(); ++i) {
    if (s[i + 1] > s[i] + slack) unimodal = false;
  }
  const double centre = 0.5 * profile.n;
  out.pass = unimodal && std::abs(out.peak_order - centre) <= peak_tolerance;
  return out;
}

std::string describe(const PhaseReport& r) {
  std::ostringstream os;
  os << "transition_epoch: " << (r.transition_epoch ? std::to_string(*r.transition_epoch) : "not-entered") << "\n";
  os << "gap_rise_epoch: " << (r.gap_rise_epoch ? std::to_string(*r.gap_rise_epoch) : "none") << "\n";
  os << "alignment_offset: " << (r.alignment_offset ? std::to_string(*r.alignment_offset) : "none") << "\n";
  os << "phase1_trend: " << r.phase1_trend << "\n";
  os << "phase2_trend: " << r.phase2_trend << "\n";
  os << "total_epochs: " << r.total_epochs << "\n";
  return os.str();
}

}  // namespace andor
