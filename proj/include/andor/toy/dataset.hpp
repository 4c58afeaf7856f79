#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace andor::toy {

enum class PatternKind { and_pattern, or_pattern };

/// A planted pattern fires when all (AND) or any (OR) of its variables are on.
struct PlantedPattern {
  std::vector<int> variables;
  PatternKind kind = PatternKind::and_pattern;
  int target_class = 0;
};

/// first_match: the label is the target class of the first firing pattern, or
/// default_class when none fires.
/// binary_code: pattern j sets bit j of the label, so classes = 2^patterns and
/// target_class is ignored.
enum class LabelRule { first_match, binary_code };

/// Latent bits are Bernoulli(0.5); the observed feature is the bit plus
/// Gaussian noise of standard deviation feature_noise.
struct DatasetSpec {
  int features = 12;
  int classes = 4;
  std::vector<PlantedPattern> patterns;
  LabelRule rule = LabelRule::first_match;
  int default_class = 0;
  int train_count = 200;
  int test_count = 200;
  double feature_noise = 0.1;
  double label_noise = 0.0;  ///< fraction of training samples given a random wrong label
  std::uint64_t seed = 1;
};

enum class Split { train, test };

struct Sample {
  std::vector<double> features;
  int label = 0;     ///< training target (possibly noisy)
  int category = 0;  ///< label produced by the planted rule
  Split split = Split::train;
  std::vector<int> bits;  ///< latent on/off state per feature
};

struct ToyDataset {
  DatasetSpec spec;
  std::vector<Sample> samples;
  std::vector<double> baselines;  ///< per-feature masking value

  std::vector<std::size_t> indices(Split split) const;
  std::size_t count(Split split) const;
};

void validate(const DatasetSpec& spec);
bool pattern_fires(const PlantedPattern& p, std::span<const int> bits);
int planted_label(const DatasetSpec& spec, std::span<const int> bits);

ToyDataset generate_dataset(const DatasetSpec& spec);

/// Per-feature mean over all samples.
std::vector<double> feature_means(const std::vector<Sample>& samples, int features);

/// Ten features; four classes coded by a pairwise AND on features 0, 1 and a
/// pairwise OR on features 2, 3; 100 noisy-label training samples, 400 test
/// samples.
DatasetSpec default_dataset_spec(std::uint64_t seed = 1);

}  // namespace andor::toy
