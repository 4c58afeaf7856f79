#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "andor/toy/dataset.hpp"
#include "andor/toy/network.hpp"

namespace andor::toy {

struct TrainConfig {
  int epochs = 256;
  double learning_rate = 0.05;
  int batch_size = 16;
  std::uint64_t seed = 7;
  /// Epochs at which parameters are retained; epoch 0 is the initial network.
  std::vector<int> checkpoint_epochs;
};

/// Every epoch up to min(32, horizon), then powers of two, then the horizon.
std::vector<int> default_checkpoint_schedule(int horizon);

struct ScheduleStage {
  int until = 0;  ///< last epoch covered by this stage
  int stride = 1;
};

/// Epoch 0, then multiples of each stage's stride up to its end, then the horizon.
std::vector<int> stepped_checkpoint_schedule(int horizon, std::span<const ScheduleStage> stages);

struct EpochLoss {
  int epoch = 0;
  double train_loss = 0.0;
  double test_loss = 0.0;
  double train_accuracy = 0.0;
  double test_accuracy = 0.0;
};

struct Checkpoint {
  int epoch = 0;
  std::vector<double> parameters;
};

struct TrainResult {
  NetworkShape shape;
  std::vector<Checkpoint> checkpoints;
  std::vector<EpochLoss> losses;  ///< epoch 0 (before training) .. last finite epoch
  bool diverged = false;

  /// Checkpoint at exactly this epoch; throws if absent.
  ToyNetwork network_at(int epoch) const;
  ToyNetwork final_network() const;
};

struct Evaluation {
  double loss = 0.0;
  double accuracy = 0.0;
};

Evaluation evaluate(const ToyNetwork& net, const ToyDataset& data, Split split);

/// Plain minibatch SGD on softmax cross-entropy, shuffling the training split
/// with a generator seeded from cfg.seed. A non-finite loss stops training and
/// keeps the checkpoints recorded so far.
TrainResult train(ToyNetwork network, const ToyDataset& data, const TrainConfig& cfg);

/// Mean gradient of the training loss over the whole training split.
std::vector<double> full_batch_gradient(const ToyNetwork& net, const ToyDataset& data);
double full_batch_loss(const ToyNetwork& net, const ToyDataset& data);

}  // namespace andor::toy
