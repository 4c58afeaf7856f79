#pragma once

#include <string>
#include <vector>

#include "andor/lattice.hpp"
#include "andor/table.hpp"

namespace andor {

/// Per-mask split gamma_T of the centred output between the AND and OR parts:
///   v_and(T) = 0.5 (v(T) - v(empty)) + gamma_T
///   v_or(T)  = 0.5 (v(T) - v(empty)) - gamma_T
/// subject to gamma_empty = 0 and |gamma_T| <= bound_ratio * max_T |v(T) - v(empty)|.
struct GammaSplit {
  LatticeVector gamma;
  double bound_ratio = 0.5;

  static GammaSplit zero(int n, double bound_ratio = 0.5) { return {LatticeVector(n), bound_ratio}; }
};

/// Throws std::invalid_argument if the split does not fit the table.
void check_split(const GammaSplit& split, const MaskedOutputTable& table);

enum class SparsifyMethod { primal_dual, subgradient };

std::string to_string(SparsifyMethod m);
SparsifyMethod parse_sparsify_method(const std::string& s);

struct OptimizerTrace {
  SparsifyMethod method = SparsifyMethod::primal_dual;
  int iterations = 0;
  bool converged = false;         ///< false means the iteration budget ran out
  double initial_objective = 0.0; ///< objective at gamma = 0
  double final_objective = 0.0;
  double lower_bound = 0.0;       ///< best dual bound (primal-dual only; 0 otherwise)
  std::vector<double> objective;  ///< best objective so far, one entry per iteration
};

struct SpectrumMeta {
  TableMeta table;
  bool optimized = false;
  OptimizerTrace trace;
};

struct InteractionSpectrum {
  int n = 0;
  LatticeVector i_and;  ///< I_and(S), with I_and(empty) = 0
  LatticeVector i_or;   ///< I_or(S), with I_or(empty) = 0
  double v_empty = 0.0;
  GammaSplit split;
  SpectrumMeta source_meta;

  /// sum_{S != empty} |I_and(S)| + |I_or(S)|
  double l1_objective() const;
  /// max over both branches of |I(S)|
  double max_abs_effect() const;
};

InteractionSpectrum decompose(const MaskedOutputTable& table, const GammaSplit& split);

/// Threshold tau for saliency: either absolute, or relative to the spectrum's
/// largest absolute effect.
struct SaliencyRule {
  enum class Kind { relative, absolute };
  Kind kind = Kind::relative;
  double value = 0.05;

  static SaliencyRule relative(double r) { return {Kind::relative, r}; }
  static SaliencyRule absolute(double v) { return {Kind::absolute, v}; }
  /// Parses "rel:<r>" or "abs:<v>".
  static SaliencyRule parse(const std::string& text);

  double resolve(const InteractionSpectrum& spectrum) const;
  std::string to_string() const;
};

struct SalientSets {
  std::vector<SubsetMask> and_set;
  std::vector<SubsetMask> or_set;

  std::size_t size() const { return and_set.size() + or_set.size(); }
};

/// Masks with |I(S)| > tau (strict), per branch, in ascending mask order.
SalientSets salient_sets(const InteractionSpectrum& spectrum, double tau);

struct SalientEffect {
  SubsetMask set;
  bool is_and = true;
  double effect = 0.0;
};

/// Salient effects of both branches ordered by decreasing |effect|.
std::vector<SalientEffect> ranked_salient_effects(const InteractionSpectrum& spectrum, double tau);

struct MatchReport {
  double max_abs_error = 0.0;
  double mean_abs_error = 0.0;
  SubsetMask worst_mask;
  double scale = 1.0;  ///< max(1, max_T |v(T)|)
};

/// Reconstructs every v(x_T) from the spectrum and compares with the table.
/// With restrict_to_salient only effects with |I| > tau contribute.
MatchReport verify_universal_matching(const InteractionSpectrum& spectrum, const MaskedOutputTable& table,
                                      bool restrict_to_salient = false, double tau = 0.0);

}  // namespace andor
