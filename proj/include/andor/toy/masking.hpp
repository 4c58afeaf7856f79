#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "andor/table.hpp"
#include "andor/toy/network.hpp"

namespace andor::toy {

enum class ScoreDefinition { logit, log_odds };

std::string to_string(ScoreDefinition s);
ScoreDefinition parse_score(const std::string& s);

/// Output score of the ground-truth class.
double score_output(std::span<const double> logits, int label, ScoreDefinition score, bool* clamped = nullptr);

struct EmittedTable {
  MaskedOutputTable table;
  bool clamped = false;  ///< some log-odds value hit the clamp
};

/// For every mask T over the chosen variables, evaluates the network on the
/// sample with chosen variables outside T replaced by their baselines. Other
/// features keep their true values.
EmittedTable emit_masked_table(const ToyNetwork& net, std::span<const double> features,
                               std::span<const double> baselines, std::span<const int> variables, int label,
                               ScoreDefinition score, TableMeta meta = {});

/// Seeded draw of m distinct feature indices out of n, returned sorted.
std::vector<int> choose_variables(int n, int m, std::uint64_t seed);

}  // namespace andor::toy
