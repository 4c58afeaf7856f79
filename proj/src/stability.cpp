#include "andor/stability.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace andor {

namespace {

constexpr double kExponentMin = 0.1;
constexpr double kExponentMax = 10.0;
constexpr int kExponentGrid = 41;

// First (k', k) violating u[k'] >= (k'/k)^p u[k] - tol, or nullopt.
std::optional<OrderPair> polynomial_violation(const std::vector<double>& u, double p, double tol) {
  const int n = static_cast<int>(u.size()) - 1;
  for (int k = 2; k <= n; ++k) {
    for (int kp = k - 1; kp >= 1; --kp) {
      const double ratio = std::pow(static_cast<double>(kp) / k, p);
      if (u[kp] < ratio * u[k] - tol) return OrderPair{kp, k};
    }
  }
  return std::nullopt;
}

}  // namespace

std::vector<double> mean_gain_by_order(const MaskedOutputTable& table) {
  const int n = table.n();
  std::vector<double> sum(n + 1, 0.0);
  std::vector<double> count(n + 1, 0.0);
  const double base = table.empty_output();
  for (std::uint32_t m = 0; m < lattice_size(n); ++m) {
    const int k = std::popcount(m);
    sum[k] += table[m] - base;
    count[k] += 1.0;
  }
  for (int k = 0; k <= n; ++k) sum[k] /= count[k];
  return sum;
}

StabilityConditions check_stability_conditions(const MaskedOutputTable& table, int max_order, double tolerance,
                                               const InteractionSpectrum* spectrum) {
  const int n = table.n();
  if (max_order < 0 || max_order > n) throw std::invalid_argument("condition order M must lie in [0, n]");
  if (!(tolerance >= 0.0)) throw std::invalid_argument("tolerance must be non-negative");

  StabilityConditions out;
  out.max_order = max_order;
  out.tolerance = tolerance;

  if (spectrum != nullptr) {
    if (spectrum->n != n) throw std::invalid_argument("spectrum and table have different n");
    bool ok = true;
    for (std::uint32_t m = 1; m < lattice_size(n); ++m) {
      if (std::popcount(m) <= max_order) continue;
      const double a = std::abs(spectrum->i_and[m]);
      if (a > out.largest_high_order_effect) {
        out.largest_high_order_effect = a;
        if (a >= tolerance) out.high_order_witness = SubsetMask{m};
      }
      if (a >= tolerance) ok = false;
    }
    out.high_order_absent = ok;
  }

  const auto& u = out.mean_gain = mean_gain_by_order(table);

  out.monotone_gain = true;
  for (int k = 1; k <= n && out.monotone_gain; ++k) {
    for (int kp = k - 1; kp >= 1; --kp) {
      if (u[kp] > u[k] + tolerance) {
        out.monotone_gain = false;
        out.monotone_witness = OrderPair{kp, k};
        break;
      }
    }
  }

  // Feasible exponents form an up-set when all u[k] >= 0, so scan a log grid
  // for the first feasible point and bisect against its predecessor.
  const double log_lo = std::log(kExponentMin);
  const double log_hi = std::log(kExponentMax);
  std::optional<double> prev_infeasible;
  for (int i = 0; i < kExponentGrid; ++i) {
    const double p = std::exp(log_lo + (log_hi - log_lo) * i / (kExponentGrid - 1));
    if (!polynomial_violation(u, p, tolerance)) {
      double hi = p;
      if (prev_infeasible) {
        double lo = *prev_infeasible;
        for (int it = 0; it < 60; ++it) {
          const double mid = 0.5 * (lo + hi);
          if (polynomial_violation(u, mid, tolerance)) lo = mid; else hi = mid;
        }
      }
      out.polynomial_bound = true;
      out.exponent = hi;
      break;
    }
    prev_infeasible = p;
  }
  if (!out.polynomial_bound) out.polynomial_witness = polynomial_violation(u, kExponentMax, tolerance);
  return out;
}

SparsityReport sparsity_report(const InteractionSpectrum& spectrum, const MaskedOutputTable& table, double tau,
                               int max_order, double tolerance) {
  SparsityReport r;
  r.tau = tau;
  r.salient_count = salient_sets(spectrum, tau).size();
  r.n = spectrum.n;
  r.conditions = check_stability_conditions(table, max_order, tolerance, &spectrum);
  return r;
}

KappaFit estimate_kappa(const std::vector<SalientCountSample>& samples) {
  std::set<int> distinct;
  for (const auto& s : samples) {
    if (s.n < 1 || !(s.tau > 0.0) || !(s.salient_count > 0.0)) {
      throw std::invalid_argument("kappa fit needs n >= 1, tau > 0 and a positive salient count");
    }
    distinct.insert(s.n);
  }
  if (distinct.size() < 3) throw std::invalid_argument("kappa fit needs at least three distinct n values");

  const double m = static_cast<double>(samples.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& s : samples) {
    const double x = std::log(static_cast<double>(s.n));
    const double y = std::log(s.salient_count * s.tau);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = m * sxx - sx * sx;
  KappaFit fit;
  fit.kappa = (m * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.kappa * sx) / m;
  double ss = 0.0;
  for (const auto& s : samples) {
    const double r = std::log(s.salient_count * s.tau) - (fit.kappa * std::log(static_cast<double>(s.n)) + fit.intercept);
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / m);
  return fit;
}

}  // namespace andor
