#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace andor::toy {

struct NetworkShape {
  int inputs = 12;
  std::vector<int> hidden{64, 64};
  int outputs = 4;

  friend bool operator==(const NetworkShape&, const NetworkShape&) = default;
};

/// Fully connected rectifier network with a linear output layer. All
/// parameters live in one flat vector: per layer, the row-major weight matrix
/// (outputs x inputs) followed by the bias vector.
class ToyNetwork {
 public:
  /// He-style initialisation: w ~ N(0, init_gain^2 * 2 / fan_in), bias ~ N(0, bias_sd^2).
  ToyNetwork(NetworkShape shape, std::uint64_t seed, double init_gain = 1.0, double bias_sd = 0.0);
  ToyNetwork(NetworkShape shape, std::vector<double> parameters);

  const NetworkShape& shape() const { return shape_; }
  std::span<const double> parameters() const { return params_; }
  std::span<double> parameters() { return params_; }
  std::size_t parameter_count() const { return params_.size(); }

  /// Scratch space for allocation-free forward/backward passes.
  struct Workspace {
    std::vector<std::vector<double>> activations;  ///< post-activation per layer, [0] = input
  };
  Workspace make_workspace() const;

  /// Output logits.
  std::span<const double> forward(std::span<const double> input, Workspace& ws) const;
  std::vector<double> forward(std::span<const double> input) const;

  /// Softmax cross-entropy for one sample; adds d loss / d params into grad.
  double accumulate_gradient(std::span<const double> input, int label, std::span<double> grad, Workspace& ws) const;
  double loss(std::span<const double> input, int label, Workspace& ws) const;

  /// Offset of layer l's weight block in the flat parameter vector.
  std::size_t weight_offset(std::size_t layer) const { return offsets_[layer]; }
  std::size_t layer_count() const { return widths_.size() - 1; }

 private:
  void build_layout();

  NetworkShape shape_;
  std::vector<int> widths_;
  std::vector<std::size_t> offsets_;
  std::vector<double> params_;
};

double softmax_cross_entropy(std::span<const double> logits, int label);
/// log(p / (1 - p)) for the softmax probability of label, computed as
/// z_label - logsumexp_{j != label} z_j.
double log_odds(std::span<const double> logits, int label);

}  // namespace andor::toy
