#pragma once

#include <string>
#include <vector>

#include "andor/lattice.hpp"

namespace andor {

struct TableMeta {
  std::string sample_id;
  int epoch = -1;
  std::string score_tag = "logit";
  std::string baseline_tag = "mean";
  /// Original feature indices of the masked variables (variable i -> variable_ids[i]).
  std::vector<int> variable_ids;

  friend bool operator==(const TableMeta&, const TableMeta&) = default;
};

/// All 2^n outputs v(x_T) of one model on one sample, indexed by the mask of
/// unmasked variables T. values[0] is the fully masked output.
class MaskedOutputTable {
 public:
  MaskedOutputTable() = default;
  MaskedOutputTable(LatticeVector values, TableMeta meta = {});
  MaskedOutputTable(int n, std::vector<double> values, TableMeta meta = {});

  int n() const { return values_.n(); }
  const LatticeVector& values() const { return values_; }
  double operator[](std::size_t mask) const { return values_[mask]; }
  double empty_output() const { return values_[0]; }
  double full_output() const { return values_[full_mask(n())]; }
  const TableMeta& meta() const { return meta_; }
  TableMeta& meta() { return meta_; }

  /// max_T |v(x_T) - v(x_empty)|
  double dynamic_range() const;
  /// max(1, max_T |v(x_T)|), the reference scale for reconstruction tolerances.
  double reconstruction_scale() const;

 private:
  LatticeVector values_;
  TableMeta meta_;
};

}  // namespace andor
