#pragma once

#include <filesystem>
#include <vector>

#include "andor/dynamics.hpp"
#include "andor/io.hpp"
#include "andor/table.hpp"

namespace andor::fixtures {

inline constexpr double kPlantedAmplitude = 5.0;

/// 5 * [[{1,2,3} subset T]] over n = 6.
MaskedOutputTable planted_and();
/// 5 * [[{1,2} meets T]] over n = 6.
MaskedOutputTable planted_or();
/// Constant 2.5 over n = 5.
MaskedOutputTable constant();
/// sum_{i in T} w_i with w_i = 1 + i / 4 over n = 8.
MaskedOutputTable linear_positive();
/// v(T) = f(|T|), f = 0, 1, 2, 1.5, 3 over n = 4: mean gain drops from order 2 to 3.
MaskedOutputTable violating();

/// Mean order traces 5, 4, 3, 2, 1, 2, 3, 4, 5 over epochs 0..8 (one planted
/// AND per epoch), with the loss gap starting to grow at the vertex.
inline constexpr int kVertexEpoch = 4;
struct Series {
  io::SeriesManifest manifest;
  std::vector<MaskedOutputTable> tables;  ///< one per epoch, in manifest order
};
Series v_shaped_series();

/// Writes every fixture under dir in text encoding.
void write_all(const std::filesystem::path& dir);

}  // namespace andor::fixtures
