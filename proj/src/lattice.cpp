#include "andor/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace andor {

namespace {

void check_span(std::span<const double> data, int n) {
  check_variable_count(n);
  if (data.size() != lattice_size(n)) {
    throw std::invalid_argument("lattice table has " + std::to_string(data.size()) +
                                " entries, expected 2^" + std::to_string(n));
  }
}

}  // namespace

void check_variable_count(int n) {
  if (n < 1 || n > kMaxVariables) {
    throw std::invalid_argument("variable count " + std::to_string(n) + " outside [1, " +
                                std::to_string(kMaxVariables) + "]");
  }
}

SubsetMask make_mask(std::initializer_list<int> vars) {
  SubsetMask s;
  for (int v : vars) {
    if (v < 0 || v >= kMaxVariables) throw std::invalid_argument("variable index out of range");
    s.bits |= std::uint32_t{1} << v;
  }
  return s;
}

LatticeVector::LatticeVector(int n) : n_(n) {
  check_variable_count(n);
  coeffs_.assign(lattice_size(n), 0.0);
}

LatticeVector::LatticeVector(int n, std::vector<double> coeffs) : n_(n), coeffs_(std::move(coeffs)) {
  check_span(coeffs_, n);
  if (!all_finite()) throw std::invalid_argument("lattice table contains non-finite entries");
}

bool LatticeVector::all_finite() const {
  return std::all_of(coeffs_.begin(), coeffs_.end(), [](double x) { return std::isfinite(x); });
}

double LatticeVector::max_abs() const {
  double m = 0.0;
  for (double x : coeffs_) m = std::max(m, std::abs(x));
  return m;
}

// Each pass pairs m (bit clear) with m | bit. Iterating over blocks of 2*bit
// keeps the inner loop contiguous.
template <typename Op>
void butterfly(std::span<double> data, int n, Op op) {
  const std::size_t size = data.size();
  double* p = data.data();
  for (int i = 0; i < n; ++i) {
    const std::size_t bit = std::size_t{1} << i;
    for (std::size_t base = 0; base < size; base += 2 * bit) {
      double* lo = p + base;
      double* hi = lo + bit;
      for (std::size_t j = 0; j < bit; ++j) op(lo[j], hi[j]);
    }
  }
}

void mobius_in_place(std::span<double> data, int n) {
  check_span(data, n);
  butterfly(data, n, [](double& lo, double& hi) { hi -= lo; });
}

void zeta_in_place(std::span<double> data, int n) {
  check_span(data, n);
  butterfly(data, n, [](double& lo, double& hi) { hi += lo; });
}

void superset_mobius_in_place(std::span<double> data, int n) {
  check_span(data, n);
  butterfly(data, n, [](double& lo, double& hi) { lo -= hi; });
}

void complement_reverse_in_place(std::span<double> data, int n) {
  check_span(data, n);
  // m -> N \ m is index reversal on a dense table.
  std::reverse(data.begin(), data.end());
}

LatticeVector mobius_transform(const LatticeVector& f) {
  LatticeVector g = f;
  mobius_in_place(g.span(), g.n());
  return g;
}

LatticeVector zeta_transform(const LatticeVector& g) {
  LatticeVector f = g;
  zeta_in_place(f.span(), f.n());
  return f;
}

LatticeVector superset_complement_transform(const LatticeVector& h) {
  LatticeVector g = h;
  complement_reverse_in_place(g.span(), g.n());
  mobius_in_place(g.span(), g.n());
  for (double& x : g.span()) x = -x;
  return g;
}

std::vector<SubsetMask> subsets_of_order(int n, int k) {
  check_variable_count(n);
  std::vector<SubsetMask> out;
  if (k < 0 || k > n) return out;
  for (std::uint32_t m = 0; m < lattice_size(n); ++m) {
    if (std::popcount(m) == k) out.push_back(SubsetMask{m});
  }
  return out;
}

}  // namespace andor
