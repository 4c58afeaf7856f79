#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

namespace andor {

inline constexpr int kMaxVariables = 24;

/// A subset S of the variable set N = {0, ..., n-1}. Bit i (LSB first) is set
/// iff variable i is in S.
struct SubsetMask {
  std::uint32_t bits = 0;

  constexpr int order() const { return std::popcount(bits); }
  constexpr bool empty() const { return bits == 0; }
  constexpr bool contains(int var) const { return (bits >> var) & 1U; }
  constexpr bool is_subset_of(SubsetMask other) const { return (bits & ~other.bits) == 0; }
  constexpr bool intersects(SubsetMask other) const { return (bits & other.bits) != 0; }

  constexpr auto operator<=>(const SubsetMask&) const = default;
};

constexpr std::size_t lattice_size(int n) { return std::size_t{1} << n; }
constexpr std::uint32_t full_mask(int n) { return static_cast<std::uint32_t>(lattice_size(n) - 1); }

/// Throws std::invalid_argument unless 1 <= n <= kMaxVariables.
void check_variable_count(int n);

/// Builds a mask from a list of variable indices (0-based).
SubsetMask make_mask(std::initializer_list<int> vars);

/// Dense table of 2^n reals indexed by subset mask.
class LatticeVector {
 public:
  LatticeVector() = default;
  /// Zero-filled table over n variables.
  explicit LatticeVector(int n);
  /// Takes ownership of coeffs; rejects length != 2^n and non-finite entries.
  LatticeVector(int n, std::vector<double> coeffs);

  int n() const { return n_; }
  std::size_t size() const { return coeffs_.size(); }

  double& operator[](std::size_t mask) { return coeffs_[mask]; }
  double operator[](std::size_t mask) const { return coeffs_[mask]; }
  double& operator[](SubsetMask s) { return coeffs_[s.bits]; }
  double operator[](SubsetMask s) const { return coeffs_[s.bits]; }

  std::span<double> span() { return coeffs_; }
  std::span<const double> span() const { return coeffs_; }
  const std::vector<double>& values() const { return coeffs_; }

  bool all_finite() const;
  double max_abs() const;

  friend bool operator==(const LatticeVector&, const LatticeVector&) = default;

 private:
  int n_ = 0;
  std::vector<double> coeffs_;
};

// In-place kernels. Each requires data.size() == 2^n.

/// g(S) = sum_{T subset S} (-1)^{|S|-|T|} f(T)
void mobius_in_place(std::span<double> data, int n);
/// f(T) = sum_{S subset T} g(S)
void zeta_in_place(std::span<double> data, int n);
/// g(T) = sum_{S superset T} (-1)^{|S|-|T|} f(S); the transpose of mobius_in_place.
void superset_mobius_in_place(std::span<double> data, int n);
/// data[m] <-> data[N \ m]
void complement_reverse_in_place(std::span<double> data, int n);

LatticeVector mobius_transform(const LatticeVector& f);
LatticeVector zeta_transform(const LatticeVector& g);
/// g(S) = -sum_{T subset S} (-1)^{|S|-|T|} h(N \ T). Applied to a v_or table this
/// yields the OR interactions (g(empty) = -h(N) is returned as computed).
LatticeVector superset_complement_transform(const LatticeVector& h);

/// Masks of order k in ascending integer order.
std::vector<SubsetMask> subsets_of_order(int n, int k);

}  // namespace andor
