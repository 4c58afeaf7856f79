#include "andor/toy/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

namespace andor::toy {

std::string to_string(GammaMode mode) { return mode == GammaMode::zero ? "zero" : "sparsify"; }

GammaMode parse_gamma_mode(const std::string& s) {
  if (s == "zero") return GammaMode::zero;
  if (s == "sparsify") return GammaMode::sparsify;
  throw std::invalid_argument("unknown gamma mode '" + s + "' (expected zero or sparsify)");
}

std::vector<int> sample_variables(const AnalysisConfig& cfg, int features, std::size_t sample_index) {
  return choose_variables(features, cfg.variables, cfg.variable_seed + 1 + sample_index);
}

std::vector<int> shared_variables(const AnalysisConfig& cfg, int features) {
  return choose_variables(features, cfg.variables, cfg.variable_seed);
}

SampleAnalysis analyze_sample(const ToyNetwork& net, const ToyDataset& data, std::size_t index, int epoch,
                              const AnalysisConfig& cfg) {
  return analyze_sample(net, data, index, epoch, cfg, sample_variables(cfg, data.spec.features, index));
}

SampleAnalysis analyze_sample(const ToyNetwork& net, const ToyDataset& data, std::size_t index, int epoch,
                              const AnalysisConfig& cfg, std::span<const int> variables) {
  const Sample& s = data.samples.at(index);
  const std::vector<int> vars(variables.begin(), variables.end());
  TableMeta meta;
  meta.sample_id = std::to_string(index);
  meta.epoch = epoch;
  meta.score_tag = to_string(cfg.score);
  meta.variable_ids = vars;
  auto emitted = emit_masked_table(net, s.features, data.baselines, vars, s.label, cfg.score, meta);
  InteractionSpectrum spectrum = cfg.gamma == GammaMode::zero
                                     ? decompose(emitted.table, GammaSplit::zero(emitted.table.n()))
                                     : sparsify(emitted.table, cfg.sparsifier);
  OrderProfile profile = order_profile(spectrum, cfg.tau.resolve(spectrum));
  return {index, epoch, std::move(emitted.table), std::move(spectrum), std::move(profile), emitted.clamped};
}

double group_mean_order(const ToyNetwork& net, const ToyDataset& data, std::span<const std::size_t> indices,
                        int epoch, const AnalysisConfig& cfg) {
  if (indices.empty()) throw std::invalid_argument("empty sample group");
  std::vector<OrderProfile> profiles;
  profiles.reserve(indices.size());
  for (std::size_t i : indices) profiles.push_back(analyze_sample(net, data, i, epoch, cfg).profile);
  return aggregate_epoch(profiles).mean_salient_order;
}

std::vector<OrderSimilarity> toy_generalization_curve(const ToyNetwork& net, const ToyDataset& data,
                                                      const AnalysisConfig& cfg, int per_category,
                                                      Branch branch) {
  if (per_category < 1) throw std::invalid_argument("need at least one sample per category");
  const int n = cfg.variables;
  const auto vars = shared_variables(cfg, data.spec.features);
  // vectors[split][category][k - 1] -> one vector per analysed sample
  std::map<int, std::vector<std::vector<OrderVector>>> by_split[2];
  std::map<int, int> taken[2];
  for (std::size_t i = 0; i < data.samples.size(); ++i) {
    const Sample& s = data.samples[i];
    if (s.label != s.category) continue;
    const int side = s.split == Split::train ? 0 : 1;
    if (taken[side][s.category] >= per_category) continue;
    ++taken[side][s.category];
    const auto a = analyze_sample(net, data, i, -1, cfg, vars);
    auto& per_order = by_split[side][s.category];
    per_order.resize(static_cast<std::size_t>(n));
    for (int k = 1; k <= n; ++k) per_order[k - 1].push_back(vectorize_order(a.spectrum, k, branch));
  }
  std::vector<CategoryMeanVector> means[2];
  for (const auto& [c, per_order] : by_split[0]) {
    if (!by_split[1].count(c)) continue;
    for (int side = 0; side < 2; ++side) {
      const auto& po = by_split[side].at(c);
      for (int k = 1; k <= n; ++k) means[side].push_back(category_mean(po[k - 1], c));
    }
  }
  if (means[0].empty()) throw std::runtime_error("no category has clean samples in both splits");
  return generalization_curve(means[0], means[1]);
}

ToyRunConfig default_toy_run(std::uint64_t seed) {
  ToyRunConfig cfg;
  cfg.data = default_dataset_spec(seed);
  cfg.shape.inputs = cfg.data.features;
  cfg.shape.outputs = cfg.data.classes;
  cfg.network_seed = seed + 10;
  cfg.train.epochs = 256;
  cfg.train.learning_rate = 0.1;
  cfg.train.batch_size = 16;
  cfg.train.seed = seed + 20;
  const ScheduleStage stages[] = {{16, 1}, {256, 16}};
  cfg.train.checkpoint_epochs = stepped_checkpoint_schedule(cfg.train.epochs, stages);
  cfg.analysis.sparsifier.max_iterations = 800;
  return cfg;
}

ToyRunConfig default_noisy_label_run(std::uint64_t seed) {
  ToyRunConfig cfg = default_toy_run(seed);
  cfg.data.feature_noise = 0.0;
  cfg.data.label_noise = 0.0;
  cfg.data.train_count = 400;
  cfg.train.checkpoint_epochs = {cfg.train.epochs};
  return cfg;
}

namespace {

NetworkShape fitted_shape(const ToyRunConfig& cfg) {
  NetworkShape shape = cfg.shape;
  shape.inputs = cfg.data.features;
  shape.outputs = cfg.data.classes;
  return shape;
}

}  // namespace

ToyRunResult run_toy(const ToyRunConfig& cfg, const SampleSink& sink) {
  ToyRunResult out;
  out.dataset = generate_dataset(cfg.data);
  const ToyNetwork init(fitted_shape(cfg), cfg.network_seed, cfg.init_gain);
  out.training = train(init, out.dataset, cfg.train);

  const auto train_idx = out.dataset.indices(Split::train);
  const auto tracked = std::min<std::size_t>(train_idx.size(), static_cast<std::size_t>(cfg.analyzed_samples));
  out.analyzed.assign(train_idx.begin(), train_idx.begin() + static_cast<std::ptrdiff_t>(tracked));
  if (out.analyzed.empty()) throw std::invalid_argument("no training samples to analyse");

  for (const auto& ckpt : out.training.checkpoints) {
    const ToyNetwork net(out.training.shape, ckpt.parameters);
    std::vector<OrderProfile> profiles;
    for (std::size_t i : out.analyzed) {
      auto a = analyze_sample(net, out.dataset, i, ckpt.epoch, cfg.analysis);
      out.clamped = out.clamped || a.clamped;
      if (sink) sink(a);
      profiles.push_back(std::move(a.profile));
    }
    EpochRecord rec;
    rec.epoch = ckpt.epoch;
    rec.aggregate = aggregate_epoch(profiles);
    const auto& loss = out.training.losses.at(static_cast<std::size_t>(ckpt.epoch));
    rec.train_loss = loss.train_loss;
    rec.test_loss = loss.test_loss;
    out.series.push_back(std::move(rec));
    out.profiles.push_back(std::move(profiles));
  }

  out.fusiform = initial_fusiform_check(out.series.front().aggregate);
  out.phase = detect_transition(out.series, cfg.transition);
  AnalysisConfig sim_cfg = cfg.analysis;
  sim_cfg.gamma = cfg.similarity_gamma;
  out.generalization = toy_generalization_curve(out.training.final_network(), out.dataset, sim_cfg,
                                                cfg.similarity_samples, cfg.similarity_branch);
  std::vector<double> ks, sims;
  for (const auto& s : out.generalization) {
    ks.push_back(s.k);
    sims.push_back(s.mean_similarity);
  }
  out.generalization_rank_correlation = spearman_correlation(ks, sims);
  return out;
}

namespace {

std::vector<double> softmax(std::span<const double> logits) {
  const double mx = *std::max_element(logits.begin(), logits.end());
  std::vector<double> p(logits.size());
  double z = 0.0;
  for (std::size_t j = 0; j < logits.size(); ++j) z += p[j] = std::exp(logits[j] - mx);
  for (double& x : p) x /= z;
  return p;
}

}  // namespace

NoiseInjection inject_label_noise(const ToyDataset& data, const ToyNetwork& model, int count_per_class) {
  if (count_per_class < 0) throw std::invalid_argument("count_per_class must be non-negative");
  NoiseInjection out{data, {}, false};
  if (count_per_class == 0) return out;

  struct Candidate {
    std::size_t index;
    double confidence;
    int runner_up;
  };
  std::vector<std::vector<Candidate>> per_class(static_cast<std::size_t>(data.spec.classes));
  auto ws = model.make_workspace();
  for (std::size_t i = 0; i < data.samples.size(); ++i) {
    const Sample& s = data.samples[i];
    if (s.split != Split::train) continue;
    const auto logits = model.forward(s.features, ws);
    const auto p = softmax(logits);
    int runner = -1;
    for (int j = 0; j < static_cast<int>(logits.size()); ++j) {
      if (j == s.label) continue;
      if (runner < 0 || logits[j] > logits[runner]) {
        runner = j;
      } else if (logits[j] == logits[runner]) {
        out.ties = true;
      }
    }
    per_class.at(static_cast<std::size_t>(s.label)).push_back({i, p[s.label], runner});
  }

  for (auto& group : per_class) {
    if (static_cast<std::size_t>(count_per_class) > group.size()) {
      throw std::invalid_argument("count_per_class exceeds the size of a class");
    }
    std::stable_sort(group.begin(), group.end(),
                     [](const Candidate& a, const Candidate& b) { return a.confidence < b.confidence; });
    const auto cut = static_cast<std::size_t>(count_per_class);
    if (cut < group.size() && group[cut - 1].confidence == group[cut].confidence) out.ties = true;
    for (std::size_t r = 0; r < cut; ++r) {
      out.dataset.samples[group[r].index].label = group[r].runner_up;
      out.relabeled.push_back(group[r].index);
    }
  }
  std::sort(out.relabeled.begin(), out.relabeled.end());
  return out;
}

NoisyLabelResult run_noisy_label(const ToyRunConfig& cfg, int count_per_class) {
  DatasetSpec spec = cfg.data;
  spec.label_noise = 0.0;
  const ToyDataset clean_data = generate_dataset(spec);
  const ToyNetwork init(fitted_shape(cfg), cfg.network_seed, cfg.init_gain);
  TrainConfig tc = cfg.train;
  tc.checkpoint_epochs = {tc.epochs};
  const TrainResult first = train(init, clean_data, tc);

  NoisyLabelResult out;
  out.injection = inject_label_noise(clean_data, first.final_network(), count_per_class);
  out.retrained = train(init, out.injection.dataset, tc);
  const ToyNetwork final_net = out.retrained.final_network();
  const int epoch = out.retrained.checkpoints.back().epoch;
  for (std::size_t i : out.injection.dataset.indices(Split::train)) {
    if (!std::binary_search(out.injection.relabeled.begin(), out.injection.relabeled.end(), i)) {
      out.clean.push_back(i);
    }
  }
  if (out.injection.relabeled.empty() || out.clean.empty()) {
    throw std::invalid_argument("label-noise comparison needs both relabeled and clean samples");
  }
  out.relabeled_mean_order =
      group_mean_order(final_net, out.injection.dataset, out.injection.relabeled, epoch, cfg.analysis);
  out.clean_mean_order = group_mean_order(final_net, out.injection.dataset, out.clean, epoch, cfg.analysis);
  return out;
}

}  // namespace andor::toy
