#include "andor/interaction.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace andor {

std::string to_string(SparsifyMethod m) {
  return m == SparsifyMethod::primal_dual ? "primal-dual" : "subgradient";
}

SparsifyMethod parse_sparsify_method(const std::string& s) {
  if (s == "primal-dual" || s == "pdhg") return SparsifyMethod::primal_dual;
  if (s == "subgradient") return SparsifyMethod::subgradient;
  throw std::invalid_argument("unknown sparsify method '" + s + "'");
}

void check_split(const GammaSplit& split, const MaskedOutputTable& table) {
  if (split.gamma.n() != table.n()) {
    throw std::invalid_argument("gamma split has n=" + std::to_string(split.gamma.n()) +
                                " but table has n=" + std::to_string(table.n()));
  }
  if (!(split.bound_ratio >= 0.0)) throw std::invalid_argument("gamma bound ratio must be non-negative");
  if (split.gamma[0] != 0.0) throw std::invalid_argument("gamma of the empty set must be 0");
  const double bound = split.bound_ratio * table.dynamic_range();
  const double slack = 1e-12 * std::max(1.0, bound);
  for (std::size_t m = 0; m < split.gamma.size(); ++m) {
    if (std::abs(split.gamma[m]) > bound + slack) {
      throw std::invalid_argument("gamma violates the box constraint at mask " + std::to_string(m));
    }
  }
}

double InteractionSpectrum::l1_objective() const {
  double total = 0.0;
  for (std::size_t m = 1; m < i_and.size(); ++m) total += std::abs(i_and[m]) + std::abs(i_or[m]);
  return total;
}

double InteractionSpectrum::max_abs_effect() const { return std::max(i_and.max_abs(), i_or.max_abs()); }

InteractionSpectrum decompose(const MaskedOutputTable& table, const GammaSplit& split) {
  check_split(split, table);
  const int n = table.n();
  const double base = table.empty_output();

  LatticeVector v_and(n);
  LatticeVector v_or(n);
  for (std::size_t m = 0; m < v_and.size(); ++m) {
    const double half = 0.5 * (table[m] - base);
    v_and[m] = half + split.gamma[m];
    v_or[m] = half - split.gamma[m];
  }

  InteractionSpectrum out;
  out.n = n;
  out.i_and = mobius_transform(v_and);
  out.i_or = superset_complement_transform(v_or);
  out.i_and[0] = 0.0;
  out.i_or[0] = 0.0;
  out.v_empty = base;
  out.split = split;
  out.source_meta.table = table.meta();
  return out;
}

SaliencyRule SaliencyRule::parse(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw std::invalid_argument("threshold must be rel:<r> or abs:<v>, got '" + text + "'");
  const std::string kind = text.substr(0, colon);
  double value = 0.0;
  try {
    std::size_t used = 0;
    value = std::stod(text.substr(colon + 1), &used);
    if (used != text.size() - colon - 1) throw std::invalid_argument("trailing characters");
  } catch (const std::exception&) {
    throw std::invalid_argument("bad threshold value in '" + text + "'");
  }
  if (!(value >= 0.0)) throw std::invalid_argument("threshold must be non-negative");
  if (kind == "rel") return relative(value);
  if (kind == "abs") return absolute(value);
  throw std::invalid_argument("threshold must be rel:<r> or abs:<v>, got '" + text + "'");
}

double SaliencyRule::resolve(const InteractionSpectrum& spectrum) const {
  return kind == Kind::absolute ? value : value * spectrum.max_abs_effect();
}

std::string SaliencyRule::to_string() const {
  return (kind == Kind::absolute ? "abs:" : "rel:") + std::to_string(value);
}

SalientSets salient_sets(const InteractionSpectrum& spectrum, double tau) {
  if (tau < 0.0) throw std::invalid_argument("saliency threshold must be non-negative");
  SalientSets out;
  for (std::uint32_t m = 1; m < spectrum.i_and.size(); ++m) {
    if (std::abs(spectrum.i_and[m]) > tau) out.and_set.push_back(SubsetMask{m});
    if (std::abs(spectrum.i_or[m]) > tau) out.or_set.push_back(SubsetMask{m});
  }
  return out;
}

std::vector<SalientEffect> ranked_salient_effects(const InteractionSpectrum& spectrum, double tau) {
  std::vector<SalientEffect> out;
  for (std::uint32_t m = 1; m < spectrum.i_and.size(); ++m) {
    if (std::abs(spectrum.i_and[m]) > tau) out.push_back({SubsetMask{m}, true, spectrum.i_and[m]});
    if (std::abs(spectrum.i_or[m]) > tau) out.push_back({SubsetMask{m}, false, spectrum.i_or[m]});
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const SalientEffect& a, const SalientEffect& b) { return std::abs(a.effect) > std::abs(b.effect); });
  return out;
}

MatchReport verify_universal_matching(const InteractionSpectrum& spectrum, const MaskedOutputTable& table,
                                      bool restrict_to_salient, double tau) {
  if (spectrum.n != table.n()) throw std::invalid_argument("spectrum and table have different n");
  const int n = table.n();

  LatticeVector and_part = spectrum.i_and;
  LatticeVector or_part = spectrum.i_or;
  and_part[0] = 0.0;
  or_part[0] = 0.0;
  if (restrict_to_salient) {
    for (std::size_t m = 1; m < and_part.size(); ++m) {
      if (!(std::abs(and_part[m]) > tau)) and_part[m] = 0.0;
      if (!(std::abs(or_part[m]) > tau)) or_part[m] = 0.0;
    }
  }
  double or_total = 0.0;
  for (double x : or_part.span()) or_total += x;

  // sum_{S subset T} I_and(S), and sum_{S cap T != empty} I_or(S) = total - sum_{S subset N\T} I_or(S).
  zeta_in_place(and_part.span(), n);
  zeta_in_place(or_part.span(), n);

  MatchReport report;
  report.scale = table.reconstruction_scale();
  const std::uint32_t full = full_mask(n);
  double sum_err = 0.0;
  for (std::uint32_t t = 0; t <= full; ++t) {
    const double recon = and_part[t] + (or_total - or_part[full ^ t]) + spectrum.v_empty;
    const double err = std::abs(recon - table[t]);
    sum_err += err;
    if (err > report.max_abs_error) {
      report.max_abs_error = err;
      report.worst_mask = SubsetMask{t};
    }
  }
  report.mean_abs_error = sum_err / static_cast<double>(lattice_size(n));
  return report;
}

}  // namespace andor
