#include "andor/toy/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace andor::toy {

std::vector<int> default_checkpoint_schedule(int horizon) {
  std::vector<int> out;
  for (int e = 0; e <= std::min(32, horizon); ++e) out.push_back(e);
  for (int e = 64; e < horizon; e *= 2) out.push_back(e);
  if (out.back() != horizon) out.push_back(horizon);
  return out;
}

std::vector<int> stepped_checkpoint_schedule(int horizon, std::span<const ScheduleStage> stages) {
  if (horizon < 0) throw std::invalid_argument("negative training horizon");
  std::vector<int> out{0};
  int start = 0;
  for (const auto& st : stages) {
    if (st.stride < 1) throw std::invalid_argument("schedule stride must be positive");
    const int end = std::min(st.until, horizon);
    for (int e = start + 1; e <= end; ++e) {
      if (e % st.stride == 0) out.push_back(e);
    }
    start = std::max(start, end);
  }
  if (out.back() != horizon) out.push_back(horizon);
  return out;
}

ToyNetwork TrainResult::network_at(int epoch) const {
  for (const auto& c : checkpoints) {
    if (c.epoch == epoch) return ToyNetwork(shape, c.parameters);
  }
  throw std::out_of_range("no checkpoint at epoch " + std::to_string(epoch));
}

ToyNetwork TrainResult::final_network() const {
  if (checkpoints.empty()) throw std::out_of_range("training produced no checkpoints");
  return ToyNetwork(shape, checkpoints.back().parameters);
}

Evaluation evaluate(const ToyNetwork& net, const ToyDataset& data, Split split) {
  auto ws = net.make_workspace();
  Evaluation ev;
  std::size_t count = 0;
  for (const auto& s : data.samples) {
    if (s.split != split) continue;
    const auto logits = net.forward(s.features, ws);
    ev.loss += softmax_cross_entropy(logits, s.label);
    const auto best = std::max_element(logits.begin(), logits.end()) - logits.begin();
    if (best == s.label) ev.accuracy += 1.0;
    ++count;
  }
  if (count > 0) {
    ev.loss /= static_cast<double>(count);
    ev.accuracy /= static_cast<double>(count);
  }
  return ev;
}

std::vector<double> full_batch_gradient(const ToyNetwork& net, const ToyDataset& data) {
  auto ws = net.make_workspace();
  std::vector<double> grad(net.parameter_count(), 0.0);
  std::size_t count = 0;
  for (const auto& s : data.samples) {
    if (s.split != Split::train) continue;
    net.accumulate_gradient(s.features, s.label, grad, ws);
    ++count;
  }
  for (double& g : grad) g /= static_cast<double>(std::max<std::size_t>(count, 1));
  return grad;
}

double full_batch_loss(const ToyNetwork& net, const ToyDataset& data) {
  return evaluate(net, data, Split::train).loss;
}

TrainResult train(ToyNetwork network, const ToyDataset& data, const TrainConfig& cfg) {
  if (cfg.epochs < 0) throw std::invalid_argument("epoch count must be non-negative");
  if (cfg.batch_size < 1) throw std::invalid_argument("batch size must be positive");
  if (!(cfg.learning_rate >= 0.0)) throw std::invalid_argument("learning rate must be non-negative");
  if (network.shape().inputs != data.spec.features || network.shape().outputs != data.spec.classes) {
    throw std::invalid_argument("network shape does not fit the dataset");
  }
  const std::vector<int> schedule =
      cfg.checkpoint_epochs.empty() ? default_checkpoint_schedule(cfg.epochs) : cfg.checkpoint_epochs;
  auto wanted = [&](int e) { return std::find(schedule.begin(), schedule.end(), e) != schedule.end(); };

  TrainResult result;
  result.shape = network.shape();
  auto record = [&](int epoch) {
    const auto tr = evaluate(network, data, Split::train);
    const auto te = evaluate(network, data, Split::test);
    if (!std::isfinite(tr.loss) || !std::isfinite(te.loss)) return false;
    result.losses.push_back({epoch, tr.loss, te.loss, tr.accuracy, te.accuracy});
    if (wanted(epoch)) {
      const auto p = network.parameters();
      result.checkpoints.push_back({epoch, {p.begin(), p.end()}});
    }
    return true;
  };
  if (!record(0)) {
    result.diverged = true;
    return result;
  }

  std::vector<std::size_t> order = data.indices(Split::train);
  std::mt19937_64 rng(cfg.seed);
  auto ws = network.make_workspace();
  std::vector<double> grad(network.parameter_count());
  auto params = network.parameters();

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t stop = std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
      std::fill(grad.begin(), grad.end(), 0.0);
      for (std::size_t i = start; i < stop; ++i) {
        const auto& s = data.samples[order[i]];
        network.accumulate_gradient(s.features, s.label, grad, ws);
      }
      const double scale = cfg.learning_rate / static_cast<double>(stop - start);
      for (std::size_t j = 0; j < params.size(); ++j) params[j] -= scale * grad[j];
    }
    if (!record(epoch)) {
      result.diverged = true;
      break;
    }
  }
  return result;
}

}  // namespace andor::toy
