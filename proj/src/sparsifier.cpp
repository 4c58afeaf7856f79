#include "andor/sparsifier.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

namespace andor {

namespace {

// The interactions are affine in gamma:
//   I_and = M gamma + c_and,     c_and = 0.5 M u
//   I_or  = M R gamma + c_or,    c_or  = -0.5 M R u
// with u = v - v(empty), M the subset Mobius matrix and R the complement
// permutation. Rows and columns for the empty set are dropped.
class AffineInteractions {
 public:
  AffineInteractions(const MaskedOutputTable& table) : n_(table.n()), size_(lattice_size(n_)) {
    std::vector<double> u(size_);
    for (std::size_t m = 0; m < size_; ++m) u[m] = 0.5 * (table[m] - table.empty_output());
    c_and_ = u;
    mobius_in_place(c_and_, n_);
    c_or_ = u;
    complement_reverse_in_place(c_or_, n_);
    mobius_in_place(c_or_, n_);
    for (double& x : c_or_) x = -x;
    c_and_[0] = 0.0;
    c_or_[0] = 0.0;
  }

  std::size_t size() const { return size_; }
  int n() const { return n_; }

  /// out_and = M x, out_or = M R x (empty-set rows zeroed)
  void apply(const std::vector<double>& x, std::vector<double>& out_and, std::vector<double>& out_or) const {
    out_and = x;
    mobius_in_place(out_and, n_);
    out_or = x;
    complement_reverse_in_place(out_or, n_);
    mobius_in_place(out_or, n_);
    out_and[0] = 0.0;
    out_or[0] = 0.0;
  }

  /// out = M^T y_and + R^T M^T y_or (empty-set column zeroed)
  void apply_transpose(const std::vector<double>& y_and, const std::vector<double>& y_or,
                       std::vector<double>& out, std::vector<double>& scratch) const {
    out = y_and;
    out[0] = 0.0;
    superset_mobius_in_place(out, n_);
    scratch = y_or;
    scratch[0] = 0.0;
    superset_mobius_in_place(scratch, n_);
    complement_reverse_in_place(scratch, n_);
    for (std::size_t m = 0; m < size_; ++m) out[m] += scratch[m];
    out[0] = 0.0;
  }

  double objective(const std::vector<double>& k_and, const std::vector<double>& k_or) const {
    double total = 0.0;
    for (std::size_t m = 1; m < size_; ++m) total += std::abs(k_and[m] + c_and_[m]) + std::abs(k_or[m] + c_or_[m]);
    return total;
  }

  const std::vector<double>& c_and() const { return c_and_; }
  const std::vector<double>& c_or() const { return c_or_; }

 private:
  int n_;
  std::size_t size_;
  std::vector<double> c_and_;
  std::vector<double> c_or_;
};

void project_box(std::vector<double>& x, double bound) {
  for (double& v : x) v = std::clamp(v, -bound, bound);
  x[0] = 0.0;
}

// Diagonally preconditioned Chambolle-Pock iteration for
//   min_x ||K x + c||_1  s.t. |x_T| <= bound, x_empty = 0.
// Row sums of |K| are 2^|S| for both blocks; the column sum for T is
// 2^(n-|T|) + 2^|T|.
OptimizerTrace run_primal_dual(const AffineInteractions& op, double bound, double range, const SparsifierConfig& cfg,
                               std::vector<double>& best_x) {
  const std::size_t size = op.size();
  const int n = op.n();
  std::vector<double> sigma(size);
  std::vector<double> tau(size);
  for (std::size_t m = 0; m < size; ++m) {
    const int k = std::popcount(static_cast<std::uint32_t>(m));
    sigma[m] = std::ldexp(1.0, -k);
    tau[m] = 1.0 / (std::ldexp(1.0, n - k) + std::ldexp(1.0, k));
  }

  std::vector<double> x(size, 0.0);
  std::vector<double> y_and(size, 0.0), y_or(size, 0.0);
  std::vector<double> kx_and, kx_or, kbar_and(size, 0.0), kbar_or(size, 0.0);
  std::vector<double> grad, scratch, prev_and, prev_or;
  op.apply(x, kx_and, kx_or);

  OptimizerTrace trace;
  trace.method = SparsifyMethod::primal_dual;
  trace.initial_objective = op.objective(kx_and, kx_or);
  double best = trace.initial_objective;
  double best_dual = 0.0;
  best_x = x;
  const auto& c_and = op.c_and();
  const auto& c_or = op.c_or();
  const double stop_gap = cfg.tolerance * std::max(1.0, range);
  trace.objective.reserve(static_cast<std::size_t>(cfg.max_iterations));
  kbar_and = kx_and;
  kbar_or = kx_or;

  for (int it = 1; it <= cfg.max_iterations; ++it) {
    for (std::size_t m = 1; m < size; ++m) {
      y_and[m] = std::clamp(y_and[m] + sigma[m] * (kbar_and[m] + c_and[m]), -1.0, 1.0);
      y_or[m] = std::clamp(y_or[m] + sigma[m] * (kbar_or[m] + c_or[m]), -1.0, 1.0);
    }
    op.apply_transpose(y_and, y_or, grad, scratch);

    // Dual bound: <c, y> - bound * ||K^T y||_1 <= optimum for any |y| <= 1.
    double dual = 0.0;
    for (std::size_t m = 1; m < size; ++m) dual += c_and[m] * y_and[m] + c_or[m] * y_or[m] - bound * std::abs(grad[m]);
    best_dual = std::max(best_dual, dual);

    prev_and.swap(kx_and);
    prev_or.swap(kx_or);
    for (std::size_t m = 1; m < size; ++m) x[m] = std::clamp(x[m] - tau[m] * grad[m], -bound, bound);
    op.apply(x, kx_and, kx_or);
    for (std::size_t m = 0; m < size; ++m) {
      kbar_and[m] = 2.0 * kx_and[m] - prev_and[m];
      kbar_or[m] = 2.0 * kx_or[m] - prev_or[m];
    }

    const double f = op.objective(kx_and, kx_or);
    if (f < best) {
      best = f;
      best_x = x;
    }
    trace.objective.push_back(best);
    trace.iterations = it;
    if (best - best_dual <= stop_gap) {
      trace.converged = true;
      break;
    }
  }
  trace.final_objective = best;
  trace.lower_bound = best_dual;
  return trace;
}

OptimizerTrace run_subgradient(const AffineInteractions& op, double bound, double range, const SparsifierConfig& cfg,
                               std::vector<double>& best_x) {
  const std::size_t size = op.size();
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> tie(-1.0, 1.0);

  std::vector<double> x(size, 0.0);
  std::vector<double> k_and, k_or, s_and(size, 0.0), s_or(size, 0.0), grad, scratch;
  op.apply(x, k_and, k_or);

  OptimizerTrace trace;
  trace.method = SparsifyMethod::subgradient;
  trace.initial_objective = op.objective(k_and, k_or);
  double best = trace.initial_objective;
  best_x = x;
  const auto& c_and = op.c_and();
  const auto& c_or = op.c_or();
  auto sign_or_tie = [&](double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : tie(rng)); };
  trace.objective.reserve(static_cast<std::size_t>(cfg.max_iterations));

  for (int it = 1; it <= cfg.max_iterations; ++it) {
    for (std::size_t m = 1; m < size; ++m) {
      s_and[m] = sign_or_tie(k_and[m] + c_and[m]);
      s_or[m] = sign_or_tie(k_or[m] + c_or[m]);
    }
    op.apply_transpose(s_and, s_or, grad, scratch);
    const double step = cfg.step_scale * range / std::sqrt(static_cast<double>(it));
    for (std::size_t m = 1; m < size; ++m) x[m] -= step * grad[m];
    project_box(x, bound);
    op.apply(x, k_and, k_or);
    const double f = op.objective(k_and, k_or);
    if (f < best) {
      best = f;
      best_x = x;
    }
    trace.objective.push_back(best);
    trace.iterations = it;
  }
  trace.final_objective = best;
  return trace;
}

}  // namespace

InteractionSpectrum sparsify(const MaskedOutputTable& table, const SparsifierConfig& cfg) {
  if (!(cfg.bound_ratio >= 0.0)) throw std::invalid_argument("sparsifier bound ratio must be non-negative");
  if (cfg.max_iterations < 0) throw std::invalid_argument("sparsifier iteration budget must be non-negative");

  const double range = table.dynamic_range();
  const double bound = cfg.bound_ratio * range;
  const AffineInteractions op(table);

  std::vector<double> best_x;
  OptimizerTrace trace;
  if (bound == 0.0 || range == 0.0) {
    // Only gamma = 0 is feasible.
    best_x.assign(op.size(), 0.0);
    std::vector<double> k_and, k_or;
    op.apply(best_x, k_and, k_or);
    trace.method = cfg.method;
    trace.initial_objective = trace.final_objective = trace.lower_bound = op.objective(k_and, k_or);
    trace.converged = true;
  } else if (cfg.method == SparsifyMethod::primal_dual) {
    trace = run_primal_dual(op, bound, range, cfg, best_x);
  } else {
    trace = run_subgradient(op, bound, range, cfg, best_x);
  }

  GammaSplit split{LatticeVector(table.n(), std::move(best_x)), cfg.bound_ratio};
  InteractionSpectrum out = decompose(table, split);
  out.source_meta.optimized = true;
  out.source_meta.trace = std::move(trace);
  return out;
}

}  // namespace andor
