#include "andor/toy/dataset.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <stdexcept>

namespace andor::toy {

std::vector<std::size_t> ToyDataset::indices(Split split) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i].split == split) out.push_back(i);
  }
  return out;
}

std::size_t ToyDataset::count(Split split) const {
  return static_cast<std::size_t>(
      std::count_if(samples.begin(), samples.end(), [&](const Sample& s) { return s.split == split; }));
}

void validate(const DatasetSpec& spec) {
  if (spec.features < 1 || spec.features > 12) throw std::invalid_argument("toy datasets have 1..12 features");
  if (spec.classes < 2) throw std::invalid_argument("toy datasets need at least two classes");
  if (spec.default_class < 0 || spec.default_class >= spec.classes) throw std::invalid_argument("default class out of range");
  if (spec.train_count < 1 || spec.test_count < 0) throw std::invalid_argument("bad sample counts");
  if (!(spec.feature_noise >= 0.0)) throw std::invalid_argument("feature noise must be non-negative");
  if (!(spec.label_noise >= 0.0 && spec.label_noise <= 1.0)) throw std::invalid_argument("label noise must lie in [0, 1]");
  for (const auto& p : spec.patterns) {
    if (p.variables.empty()) throw std::invalid_argument("planted pattern without variables");
    for (int v : p.variables) {
      if (v < 0 || v >= spec.features) {
        throw std::invalid_argument("planted pattern uses variable " + std::to_string(v) + " beyond n=" +
                                    std::to_string(spec.features));
      }
    }
    if (p.target_class < 0 || p.target_class >= spec.classes) throw std::invalid_argument("planted pattern class out of range");
  }
  if (spec.rule == LabelRule::binary_code &&
      (spec.patterns.size() > 8 || spec.classes != (1 << spec.patterns.size()))) {
    throw std::invalid_argument("binary-code labels need classes == 2^patterns");
  }
}

bool pattern_fires(const PlantedPattern& p, std::span<const int> bits) {
  if (p.kind == PatternKind::and_pattern) {
    return std::all_of(p.variables.begin(), p.variables.end(), [&](int v) { return bits[v] != 0; });
  }
  return std::any_of(p.variables.begin(), p.variables.end(), [&](int v) { return bits[v] != 0; });
}

int planted_label(const DatasetSpec& spec, std::span<const int> bits) {
  if (spec.rule == LabelRule::binary_code) {
    int label = 0;
    for (std::size_t j = 0; j < spec.patterns.size(); ++j) {
      if (pattern_fires(spec.patterns[j], bits)) label |= 1 << j;
    }
    return label;
  }
  for (const auto& p : spec.patterns) {
    if (pattern_fires(p, bits)) return p.target_class;
  }
  return spec.default_class;
}

std::vector<double> feature_means(const std::vector<Sample>& samples, int features) {
  std::vector<double> mean(static_cast<std::size_t>(features), 0.0);
  if (samples.empty()) return mean;
  for (const auto& s : samples) {
    for (int i = 0; i < features; ++i) mean[i] += s.features[i];
  }
  for (double& m : mean) m /= static_cast<double>(samples.size());
  return mean;
}

ToyDataset generate_dataset(const DatasetSpec& spec) {
  validate(spec);
  std::mt19937_64 rng(spec.seed);
  std::bernoulli_distribution coin(0.5);
  std::normal_distribution<double> gauss(0.0, 1.0);

  ToyDataset ds;
  ds.spec = spec;
  const int total = spec.train_count + spec.test_count;
  ds.samples.resize(static_cast<std::size_t>(total));
  for (auto& s : ds.samples) {
    s.bits.resize(static_cast<std::size_t>(spec.features));
    s.features.resize(static_cast<std::size_t>(spec.features));
    for (int i = 0; i < spec.features; ++i) {
      s.bits[i] = coin(rng) ? 1 : 0;
      s.features[i] = s.bits[i] + spec.feature_noise * gauss(rng);
    }
    s.category = planted_label(spec, s.bits);
    s.label = s.category;
  }

  std::vector<std::size_t> order(ds.samples.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  for (std::size_t r = 0; r < order.size(); ++r) {
    ds.samples[order[r]].split = r < static_cast<std::size_t>(spec.train_count) ? Split::train : Split::test;
  }

  if (spec.label_noise > 0.0) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<int> other(1, spec.classes - 1);
    for (auto& s : ds.samples) {
      if (s.split != Split::train) continue;
      if (u(rng) < spec.label_noise) s.label = (s.category + other(rng)) % spec.classes;
    }
  }

  ds.baselines = feature_means(ds.samples, spec.features);
  return ds;
}

DatasetSpec default_dataset_spec(std::uint64_t seed) {
  DatasetSpec spec;
  spec.seed = seed;
  spec.features = 10;
  spec.rule = LabelRule::binary_code;
  spec.patterns = {
      {{0, 1}, PatternKind::and_pattern, 0},
      {{2, 3}, PatternKind::or_pattern, 0},
  };
  spec.classes = 4;
  spec.train_count = 100;
  spec.test_count = 400;
  spec.feature_noise = 0.3;
  spec.label_noise = 0.1;
  return spec;
}

}  // namespace andor::toy
