#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "andor/dynamics.hpp"
#include "andor/sparsifier.hpp"
#include "andor/toy/masking.hpp"
#include "andor/toy/trainer.hpp"

namespace andor::toy {

enum class GammaMode { zero, sparsify };

std::string to_string(GammaMode mode);
GammaMode parse_gamma_mode(const std::string& s);

struct AnalysisConfig {
  int variables = 10;
  GammaMode gamma = GammaMode::sparsify;
  SparsifierConfig sparsifier;
  SaliencyRule tau;
  ScoreDefinition score = ScoreDefinition::logit;
  std::uint64_t variable_seed = 1000;
};

/// Masked variables of a sample, drawn once from (variable_seed, sample index)
/// so that every epoch analyses the same subset.
std::vector<int> sample_variables(const AnalysisConfig& cfg, int features, std::size_t sample_index);

/// One subset for all samples, used where interaction vectors are compared
/// position by position across samples.
std::vector<int> shared_variables(const AnalysisConfig& cfg, int features);

struct SampleAnalysis {
  std::size_t sample_index = 0;
  int epoch = 0;
  MaskedOutputTable table;
  InteractionSpectrum spectrum;
  OrderProfile profile;
  bool clamped = false;
};

/// Table, spectrum and order profile of one sample under the network, scored
/// against the sample's training label.
SampleAnalysis analyze_sample(const ToyNetwork& net, const ToyDataset& data, std::size_t index, int epoch,
                              const AnalysisConfig& cfg);
SampleAnalysis analyze_sample(const ToyNetwork& net, const ToyDataset& data, std::size_t index, int epoch,
                              const AnalysisConfig& cfg, std::span<const int> variables);

/// Mean salient order of the averaged profile of the given samples.
double group_mean_order(const ToyNetwork& net, const ToyDataset& data, std::span<const std::size_t> indices,
                        int epoch, const AnalysisConfig& cfg);

/// Per-order E_c[Jaccard] between train and test category means of the
/// interaction vectors over the shared variables. Uses up to per_category
/// samples from each split whose label agrees with the planted category.
std::vector<OrderSimilarity> toy_generalization_curve(const ToyNetwork& net, const ToyDataset& data,
                                                      const AnalysisConfig& cfg, int per_category,
                                                      Branch branch);

struct ToyRunConfig {
  DatasetSpec data;
  NetworkShape shape;  ///< inputs and outputs follow the dataset
  std::uint64_t network_seed = 11;
  double init_gain = 0.25;
  TrainConfig train;
  AnalysisConfig analysis;
  int analyzed_samples = 20;     ///< training samples tracked across checkpoints
  int similarity_samples = 25;   ///< per category and split, final epoch only
  /// The generalization curve averages vectors across samples, so it uses a
  /// split that is linear in the outputs: gamma = 0, AND branch (a multiple of
  /// the plain Moebius coefficients).
  GammaMode similarity_gamma = GammaMode::zero;
  Branch similarity_branch = Branch::and_branch;
  TransitionConfig transition;
};

/// Default toy configuration with data, network and shuffling seeds derived
/// from one run seed. Checkpoints: every epoch to 16, then every 16th.
ToyRunConfig default_toy_run(std::uint64_t seed = 1);

/// Noise-free binary features and 400 clean training samples, so that a
/// relabeled sample contradicts all of its neighbours.
ToyRunConfig default_noisy_label_run(std::uint64_t seed = 1);
inline constexpr int kDefaultNoisyPerClass = 5;

struct ToyRunResult {
  ToyDataset dataset;
  TrainResult training;
  std::vector<std::size_t> analyzed;                   ///< dataset indices
  std::vector<EpochRecord> series;                     ///< one per checkpoint
  std::vector<std::vector<OrderProfile>> profiles;     ///< [checkpoint][analysed sample]
  PhaseReport phase;
  FusiformCheck fusiform;
  std::vector<OrderSimilarity> generalization;
  double generalization_rank_correlation = 0.0;        ///< Spearman of similarity against order
  bool clamped = false;
};

using SampleSink = std::function<void(const SampleAnalysis&)>;

/// Trains, analyses every checkpoint, detects the phases and measures the
/// final-epoch generalization curve. The sink, if set, sees every analysed sample.
ToyRunResult run_toy(const ToyRunConfig& cfg, const SampleSink& sink = {});

struct NoiseInjection {
  ToyDataset dataset;
  std::vector<std::size_t> relabeled;  ///< ascending dataset indices
  bool ties = false;                   ///< some selection or relabel was decided by a tie
};

/// For each class, the count_per_class training samples whose label gets the
/// lowest softmax probability are relabeled to the highest-scoring other class.
/// Ties go to the lower sample index (or class id) and are flagged.
NoiseInjection inject_label_noise(const ToyDataset& data, const ToyNetwork& model, int count_per_class);

struct NoisyLabelResult {
  NoiseInjection injection;
  TrainResult retrained;
  std::vector<std::size_t> clean;  ///< clean training samples compared against
  double relabeled_mean_order = 0.0;
  double clean_mean_order = 0.0;
};

/// Trains on the noise-free dataset, injects label noise with the trained
/// model, retrains from the same initialisation and compares the final mean
/// salient order of relabeled and clean training samples.
NoisyLabelResult run_noisy_label(const ToyRunConfig& cfg, int count_per_class);

}  // namespace andor::toy
