#include "andor/toy/masking.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace andor::toy {

namespace {
constexpr double kLogOddsClamp = 700.0;
}

std::string to_string(ScoreDefinition s) { return s == ScoreDefinition::logit ? "logit" : "logodds"; }

ScoreDefinition parse_score(const std::string& s) {
  if (s == "logit") return ScoreDefinition::logit;
  if (s == "logodds") return ScoreDefinition::log_odds;
  throw std::invalid_argument("unknown score definition '" + s + "'");
}

double score_output(std::span<const double> logits, int label, ScoreDefinition score, bool* clamped) {
  if (score == ScoreDefinition::logit) return logits[label];
  double v = log_odds(logits, label);
  if (!std::isfinite(v) || std::abs(v) > kLogOddsClamp) {
    if (clamped) *clamped = true;
    v = std::isnan(v) ? 0.0 : std::clamp(v, -kLogOddsClamp, kLogOddsClamp);
  }
  return v;
}

EmittedTable emit_masked_table(const ToyNetwork& net, std::span<const double> features,
                               std::span<const double> baselines, std::span<const int> variables, int label,
                               ScoreDefinition score, TableMeta meta) {
  const int m = static_cast<int>(variables.size());
  if (m < 1 || m > 12) throw std::invalid_argument("between 1 and 12 variables can be masked");
  if (features.size() != baselines.size() || static_cast<int>(features.size()) != net.shape().inputs) {
    throw std::invalid_argument("feature / baseline width mismatch");
  }
  for (int v : variables) {
    if (v < 0 || v >= static_cast<int>(features.size())) throw std::invalid_argument("masked variable out of range");
  }

  auto ws = net.make_workspace();
  std::vector<double> input(features.begin(), features.end());
  std::vector<double> values(lattice_size(m));
  bool clamped = false;
  for (std::uint32_t mask = 0; mask < values.size(); ++mask) {
    for (int i = 0; i < m; ++i) {
      const int f = variables[i];
      input[f] = ((mask >> i) & 1U) ? features[f] : baselines[f];
    }
    values[mask] = score_output(net.forward(input, ws), label, score, &clamped);
  }
  meta.variable_ids.assign(variables.begin(), variables.end());
  meta.score_tag = to_string(score);
  return {MaskedOutputTable(m, std::move(values), std::move(meta)), clamped};
}

std::vector<int> choose_variables(int n, int m, std::uint64_t seed) {
  if (m < 1 || m > n) throw std::invalid_argument("cannot choose " + std::to_string(m) + " of " + std::to_string(n));
  std::vector<int> all(static_cast<std::size_t>(n));
  std::iota(all.begin(), all.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(all.begin(), all.end(), rng);
  all.resize(static_cast<std::size_t>(m));
  std::sort(all.begin(), all.end());
  return all;
}

}  // namespace andor::toy
