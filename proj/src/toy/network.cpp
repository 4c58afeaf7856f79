#include "andor/toy/network.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace andor::toy {

namespace {

double log_sum_exp(std::span<const double> z, int skip) {
  double m = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < static_cast<int>(z.size()); ++j) {
    if (j != skip) m = std::max(m, z[j]);
  }
  double s = 0.0;
  for (int j = 0; j < static_cast<int>(z.size()); ++j) {
    if (j != skip) s += std::exp(z[j] - m);
  }
  return m + std::log(s);
}

}  // namespace

double softmax_cross_entropy(std::span<const double> logits, int label) {
  return log_sum_exp(logits, -1) - logits[label];
}

double log_odds(std::span<const double> logits, int label) {
  return logits[label] - log_sum_exp(logits, label);
}

void ToyNetwork::build_layout() {
  if (shape_.inputs < 1 || shape_.outputs < 2) throw std::invalid_argument("network needs >= 1 input and >= 2 outputs");
  if (shape_.hidden.empty() || shape_.hidden.size() > 3) throw std::invalid_argument("network needs 1-3 hidden layers");
  widths_.clear();
  widths_.push_back(shape_.inputs);
  for (int h : shape_.hidden) {
    if (h < 1) throw std::invalid_argument("hidden width must be positive");
    widths_.push_back(h);
  }
  widths_.push_back(shape_.outputs);
  offsets_.clear();
  std::size_t off = 0;
  for (std::size_t l = 0; l + 1 < widths_.size(); ++l) {
    offsets_.push_back(off);
    off += static_cast<std::size_t>(widths_[l + 1]) * (widths_[l] + 1);
  }
  offsets_.push_back(off);
}

ToyNetwork::ToyNetwork(NetworkShape shape, std::uint64_t seed, double init_gain, double bias_sd)
    : shape_(std::move(shape)) {
  build_layout();
  params_.assign(offsets_.back(), 0.0);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (std::size_t l = 0; l + 1 < widths_.size(); ++l) {
    const int in = widths_[l];
    const int out = widths_[l + 1];
    const double sd = init_gain * std::sqrt(2.0 / in);
    double* w = params_.data() + offsets_[l];
    for (int i = 0; i < out * in; ++i) w[i] = sd * gauss(rng);
    double* b = w + out * in;
    for (int i = 0; i < out; ++i) b[i] = bias_sd * gauss(rng);
  }
}

ToyNetwork::ToyNetwork(NetworkShape shape, std::vector<double> parameters)
    : shape_(std::move(shape)), params_(std::move(parameters)) {
  build_layout();
  if (params_.size() != offsets_.back()) throw std::invalid_argument("parameter blob does not match network shape");
}

ToyNetwork::Workspace ToyNetwork::make_workspace() const {
  Workspace ws;
  for (int w : widths_) ws.activations.emplace_back(static_cast<std::size_t>(w), 0.0);
  return ws;
}

std::span<const double> ToyNetwork::forward(std::span<const double> input, Workspace& ws) const {
  if (static_cast<int>(input.size()) != shape_.inputs) throw std::invalid_argument("input width mismatch");
  std::copy(input.begin(), input.end(), ws.activations[0].begin());
  const std::size_t layers = widths_.size() - 1;
  for (std::size_t l = 0; l < layers; ++l) {
    const int in = widths_[l];
    const int out = widths_[l + 1];
    const double* w = params_.data() + offsets_[l];
    const double* b = w + out * in;
    const double* a = ws.activations[l].data();
    double* z = ws.activations[l + 1].data();
    const bool relu = l + 1 < layers;
    for (int o = 0; o < out; ++o) {
      double s = b[o];
      const double* row = w + o * in;
      for (int i = 0; i < in; ++i) s += row[i] * a[i];
      z[o] = relu ? std::max(s, 0.0) : s;
    }
  }
  return ws.activations.back();
}

std::vector<double> ToyNetwork::forward(std::span<const double> input) const {
  Workspace ws = make_workspace();
  auto out = forward(input, ws);
  return {out.begin(), out.end()};
}

double ToyNetwork::loss(std::span<const double> input, int label, Workspace& ws) const {
  return softmax_cross_entropy(forward(input, ws), label);
}

double ToyNetwork::accumulate_gradient(std::span<const double> input, int label, std::span<double> grad,
                                       Workspace& ws) const {
  if (grad.size() != params_.size()) throw std::invalid_argument("gradient buffer size mismatch");
  if (label < 0 || label >= shape_.outputs) throw std::invalid_argument("label out of range");
  const auto logits = forward(input, ws);
  const double loss_value = softmax_cross_entropy(logits, label);

  const std::size_t layers = widths_.size() - 1;
  // delta = d loss / d pre-activation of the current layer
  std::vector<double> delta(logits.size());
  const double lse = log_sum_exp(logits, -1);
  for (std::size_t j = 0; j < logits.size(); ++j) delta[j] = std::exp(logits[j] - lse);
  delta[static_cast<std::size_t>(label)] -= 1.0;

  std::vector<double> prev;
  for (std::size_t l = layers; l-- > 0;) {
    const int in = widths_[l];
    const int out = widths_[l + 1];
    const double* w = params_.data() + offsets_[l];
    double* gw = grad.data() + offsets_[l];
    double* gb = gw + out * in;
    const double* a = ws.activations[l].data();
    for (int o = 0; o < out; ++o) {
      const double d = delta[static_cast<std::size_t>(o)];
      if (d == 0.0) continue;
      double* grow = gw + o * in;
      for (int i = 0; i < in; ++i) grow[i] += d * a[i];
      gb[o] += d;
    }
    if (l == 0) break;
    prev.assign(static_cast<std::size_t>(in), 0.0);
    for (int o = 0; o < out; ++o) {
      const double d = delta[static_cast<std::size_t>(o)];
      if (d == 0.0) continue;
      const double* row = w + o * in;
      for (int i = 0; i < in; ++i) prev[static_cast<std::size_t>(i)] += d * row[i];
    }
    // ReLU derivative from the stored post-activation.
    for (int i = 0; i < in; ++i) {
      if (!(a[i] > 0.0)) prev[static_cast<std::size_t>(i)] = 0.0;
    }
    delta.swap(prev);
  }
  return loss_value;
}

}  // namespace andor::toy
