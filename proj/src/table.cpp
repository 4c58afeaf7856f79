#include "andor/table.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace andor {

MaskedOutputTable::MaskedOutputTable(LatticeVector values, TableMeta meta)
    : values_(std::move(values)), meta_(std::move(meta)) {
  if (values_.size() == 0) throw std::invalid_argument("masked output table is empty");
  if (!values_.all_finite()) throw std::invalid_argument("masked output table has non-finite values");
}

MaskedOutputTable::MaskedOutputTable(int n, std::vector<double> values, TableMeta meta)
    : MaskedOutputTable(LatticeVector(n, std::move(values)), std::move(meta)) {}

double MaskedOutputTable::dynamic_range() const {
  const double base = values_[0];
  double m = 0.0;
  for (double v : values_.span()) m = std::max(m, std::abs(v - base));
  return m;
}

double MaskedOutputTable::reconstruction_scale() const { return std::max(1.0, values_.max_abs()); }

}  // namespace andor
