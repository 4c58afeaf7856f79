#pragma once

// Slow reference implementations written straight from the definitions.

#include <bit>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "andor/lattice.hpp"
#include "andor/table.hpp"

namespace oracle {

inline double parity_sign(std::uint32_t a, std::uint32_t b) {
  return (std::popcount(a) - std::popcount(b)) % 2 ? -1.0 : 1.0;
}

/// g(S) = sum_{T subset S} (-1)^{|S|-|T|} f(T), by enumerating every pair.
inline std::vector<double> mobius(const std::vector<double>& f) {
  const auto size = static_cast<std::uint32_t>(f.size());
  std::vector<double> g(size, 0.0);
  for (std::uint32_t s = 0; s < size; ++s) {
    for (std::uint32_t t = 0; t < size; ++t) {
      if ((t & ~s) == 0) g[s] += parity_sign(s, t) * f[t];
    }
  }
  return g;
}

inline std::vector<double> zeta(const std::vector<double>& g) {
  const auto size = static_cast<std::uint32_t>(g.size());
  std::vector<double> f(size, 0.0);
  for (std::uint32_t t = 0; t < size; ++t) {
    for (std::uint32_t s = 0; s < size; ++s) {
      if ((s & ~t) == 0) f[t] += g[s];
    }
  }
  return f;
}

inline std::vector<double> superset_mobius(const std::vector<double>& f) {
  const auto size = static_cast<std::uint32_t>(f.size());
  std::vector<double> g(size, 0.0);
  for (std::uint32_t t = 0; t < size; ++t) {
    for (std::uint32_t s = 0; s < size; ++s) {
      if ((t & ~s) == 0) g[t] += parity_sign(s, t) * f[s];
    }
  }
  return g;
}

/// v(T) = v(empty) + sum_{empty != S subset T} I_and(S) + sum_{S meets T} I_or(S)
inline double reconstruct(const std::vector<double>& i_and, const std::vector<double>& i_or, double v_empty,
                          std::uint32_t t) {
  double v = v_empty;
  for (std::uint32_t s = 1; s < i_and.size(); ++s) {
    if ((s & ~t) == 0) v += i_and[s];
    if ((s & t) != 0) v += i_or[s];
  }
  return v;
}

inline andor::MaskedOutputTable random_table(int n, std::mt19937_64& rng, double sd = 1.0) {
  std::normal_distribution<double> g(0.0, sd);
  std::vector<double> v(andor::lattice_size(n));
  for (double& x : v) x = g(rng);
  return andor::MaskedOutputTable(n, std::move(v));
}

inline std::vector<double> random_values(std::size_t size, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::vector<double> v(size);
  for (double& x : v) x = g(rng);
  return v;
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

/// Table of amp * [[S subset T]] over n variables.
inline andor::MaskedOutputTable planted_and(int n, std::uint32_t s, double amp) {
  std::vector<double> v(andor::lattice_size(n));
  for (std::uint32_t t = 0; t < v.size(); ++t) v[t] = (s & ~t) == 0 ? amp : 0.0;
  return andor::MaskedOutputTable(n, std::move(v));
}

/// Table of amp * [[S meets T]] over n variables.
inline andor::MaskedOutputTable planted_or(int n, std::uint32_t s, double amp) {
  std::vector<double> v(andor::lattice_size(n));
  for (std::uint32_t t = 0; t < v.size(); ++t) v[t] = (s & t) != 0 ? amp : 0.0;
  return andor::MaskedOutputTable(n, std::move(v));
}

}  // namespace oracle
