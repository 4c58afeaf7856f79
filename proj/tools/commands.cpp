#include "commands.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <numbers>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "andor/dynamics.hpp"
#include "andor/interaction.hpp"
#include "andor/io.hpp"
#include "andor/lattice.hpp"
#include "andor/metrics.hpp"
#include "andor/parallel.hpp"
#include "andor/sparsifier.hpp"
#include "andor/stability.hpp"
#include "andor/toy/pipeline.hpp"
#include "fixtures.hpp"

#ifndef ANDOR_FIXTURE_DIR
#define ANDOR_FIXTURE_DIR "fixtures"
#endif

namespace andor::cli {

namespace fs = std::filesystem;
using io::format_double;

namespace {

struct CliError : std::runtime_error {
  CliError(int code, const std::string& message) : std::runtime_error(message), code(code) {}
  int code;
};

struct AnalysisOptions {
  std::string gamma = "sparsify";
  std::string tau = "rel:0.05";
  double rho = 0.5;
  int iters = 5000;
  unsigned jobs = 0;

  toy::GammaMode gamma_mode() const { return toy::parse_gamma_mode(gamma); }
  SaliencyRule tau_rule() const {
    try {
      return SaliencyRule::parse(tau);
    } catch (const std::invalid_argument& e) {
      throw CliError(kUsage, std::string("--tau: ") + e.what());
    }
  }
  SparsifierConfig sparsifier() const {
    SparsifierConfig cfg;
    cfg.bound_ratio = rho;
    cfg.max_iterations = iters;
    return cfg;
  }
  InteractionSpectrum extract(const MaskedOutputTable& t) const {
    return gamma_mode() == toy::GammaMode::zero ? decompose(t, GammaSplit::zero(t.n(), rho)) : sparsify(t, sparsifier());
  }
};

void add_analysis_flags(CLI::App* cmd, AnalysisOptions& o, bool with_gamma = true) {
  if (with_gamma) {
    cmd->add_option("--gamma", o.gamma, "AND/OR split: zero or sparsify")
        ->check(CLI::IsMember({"zero", "sparsify"}))
        ->capture_default_str();
    cmd->add_option("--rho", o.rho, "box bound on |gamma_T| relative to the output range")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    cmd->add_option("--iters", o.iters, "sparsifier iteration budget")->check(CLI::PositiveNumber)->capture_default_str();
  }
  cmd->add_option("--tau", o.tau, "saliency threshold rel:<r> or abs:<v>")->capture_default_str();
}

fs::path resolve_out(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv(kOutDirEnv); env && *env) return env;
  return kFallbackOutDir;
}

std::string read_input(const fs::path& p) {
  if (!fs::exists(p)) throw CliError(kMissingFile, "missing file: " + p.string());
  return io::read_file(p);
}

std::string mask_string(SubsetMask s) {
  std::string out = "{";
  for (int i = 0; i < kMaxVariables; ++i) {
    if (!s.contains(i)) continue;
    if (out.size() > 1) out += ',';
    out += std::to_string(i);
  }
  return out + "}";
}

/// Spectrum files are used as they are; table files are decomposed first.
InteractionSpectrum load_spectrum(const fs::path& p, const AnalysisOptions& o) {
  const std::string bytes = read_input(p);
  if (bytes.starts_with("ANDOR-TABLE")) return o.extract(io::decode_table(bytes, p.string()));
  return io::decode_spectrum(bytes, p.string());
}

// ---------------------------------------------------------------- extract

struct ExtractOutcome {
  int code = kOk;
  std::string message;
  std::string row;
  std::string line;
};

int cmd_extract(const std::vector<std::string>& files, const AnalysisOptions& o, const fs::path& out_dir, bool text,
                std::ostream& out, std::ostream& err) {
  const auto rule = o.tau_rule();
  std::set<std::string> stems;
  for (const auto& f : files) {
    if (!stems.insert(fs::path(f).stem().string()).second) {
      throw CliError(kUsage, "two inputs share the output name '" + fs::path(f).stem().string() + ".spec'");
    }
  }
  auto results = parallel_map(files.size(), o.jobs, [&](std::size_t i) {
    ExtractOutcome r;
    const fs::path path = files[i];
    try {
      const auto table = io::decode_table(read_input(path), path.string());
      const auto s = o.extract(table);
      const double tau = rule.resolve(s);
      const auto match = verify_universal_matching(s, table);
      const auto sets = salient_sets(s, tau);
      const auto ranked = ranked_salient_effects(s, tau);
      io::write_spectrum(out_dir / (path.stem().string() + ".spec"), s,
                         text ? io::Encoding::text : io::Encoding::binary);
      std::string top_branch = "none", top_set, top_effect = "0";
      if (!ranked.empty()) {
        top_branch = ranked[0].is_and ? "and" : "or";
        top_set = mask_string(ranked[0].set);
        top_effect = format_double(ranked[0].effect);
      }
      r.row = path.string() + "," + std::to_string(s.n) + "," + o.gamma + "," + format_double(tau) + "," +
              std::to_string(sets.and_set.size()) + "," + std::to_string(sets.or_set.size()) + "," +
              format_double(match.max_abs_error) + "," + top_branch + ",\"" + top_set + "\"," + top_effect + "," +
              format_double(s.l1_objective()) + "\n";
      r.line = path.string() + ": n=" + std::to_string(s.n) + " salient=" + std::to_string(sets.size()) +
               " (and " + std::to_string(sets.and_set.size()) + ", or " + std::to_string(sets.or_set.size()) +
               ") matching_error=" + format_double(match.max_abs_error) +
               (ranked.empty() ? std::string(" top=none") : " top=" + top_branch + top_set + " " + top_effect) + "\n";
    } catch (const CliError& e) {
      r.code = e.code;
      r.message = e.what();
    } catch (const io::FormatError& e) {
      r.code = kBadInput;
      r.message = e.what();
    } catch (const std::exception& e) {
      r.code = kBadInput;
      r.message = path.string() + ": " + e.what();
    }
    return r;
  });
  std::string csv = "# andor-extract v" + std::to_string(io::kCsvVersion) +
                    "\nfile,n,gamma,tau,salient_and,salient_or,max_match_error,top_branch,top_set,top_effect,"
                    "l1_objective\n";
  int code = kOk;
  for (const auto& r : results) {
    if (r.code != kOk) {
      err << "error: " << r.message << "\n";
      if (code == kOk) code = r.code;
      continue;
    }
    csv += r.row;
    out << r.line;
  }
  io::write_file_atomic(out_dir / "extract_summary.csv", csv);
  return code;
}

// ---------------------------------------------------------------- orders

int cmd_orders(const std::vector<std::string>& files, const AnalysisOptions& o, const fs::path& out_dir,
               std::ostream& out) {
  const auto rule = o.tau_rule();
  auto profiles = parallel_map(files.size(), o.jobs, [&](std::size_t i) {
    const auto s = load_spectrum(files[i], o);
    return order_profile(s, rule.resolve(s));
  });
  for (const auto& p : profiles) {
    if (p.n != profiles.front().n) throw CliError(kBadInput, "inputs differ in the number of variables");
  }
  const auto agg = aggregate_epoch(profiles);
  io::write_file_atomic(out_dir / "orders.csv", io::orders_csv(agg));
  out << "samples: " << files.size() << "\nmean_salient_order: " << format_double(agg.mean_salient_order) << "\n";
  return kOk;
}

// ---------------------------------------------------------------- jaccard

std::pair<int, std::string> split_labelled(const std::string& arg) {
  const auto eq = arg.find('=');
  int c = 0;
  if (eq != std::string::npos) {
    auto [p, ec] = std::from_chars(arg.data(), arg.data() + eq, c);
    if (ec == std::errc() && p == arg.data() + eq && eq + 1 < arg.size()) return {c, arg.substr(eq + 1)};
  }
  throw CliError(kUsage, "expected <category>=<file>, got '" + arg + "'");
}

Branch parse_branch(const std::string& s) {
  if (s == "and") return Branch::and_branch;
  if (s == "or") return Branch::or_branch;
  return Branch::sum;
}

int cmd_jaccard(const std::vector<std::string>& train, const std::vector<std::string>& test, const std::string& branch,
                const AnalysisOptions& o, const fs::path& out_dir, std::ostream& out) {
  std::vector<std::pair<int, std::string>> inputs;
  for (const auto& a : train) inputs.push_back(split_labelled(a));
  const std::size_t n_train = inputs.size();
  for (const auto& a : test) inputs.push_back(split_labelled(a));
  auto spectra = parallel_map(inputs.size(), o.jobs, [&](std::size_t i) { return load_spectrum(inputs[i].second, o); });
  const int n = spectra.front().n;
  for (const auto& s : spectra) {
    if (s.n != n) throw CliError(kBadInput, "inputs differ in the number of variables");
  }
  const Branch b = parse_branch(branch);
  std::vector<CategoryMeanVector> means[2];
  std::map<int, std::vector<std::size_t>> groups[2];
  for (std::size_t i = 0; i < inputs.size(); ++i) groups[i < n_train ? 0 : 1][inputs[i].first].push_back(i);
  for (int side = 0; side < 2; ++side) {
    for (const auto& [c, idx] : groups[side]) {
      if (!groups[1 - side].count(c)) {
        throw CliError(kUsage, "category " + std::to_string(c) + " appears in only one split");
      }
      for (int k = 1; k <= n; ++k) {
        std::vector<OrderVector> vs;
        for (std::size_t i : idx) vs.push_back(vectorize_order(spectra[i], k, b));
        means[side].push_back(category_mean(vs, c));
      }
    }
  }
  const auto curve = generalization_curve(means[0], means[1]);
  std::vector<double> ks, sims;
  for (const auto& s : curve) {
    ks.push_back(s.k);
    sims.push_back(s.mean_similarity);
  }
  io::write_file_atomic(out_dir / "similarity.csv", io::similarity_csv(curve));
  out << "categories: " << groups[0].size() << "\nspearman_vs_order: " << format_double(spearman_correlation(ks, sims))
      << "\n";
  return kOk;
}

// ---------------------------------------------------------------- dynamics

io::SeriesManifest load_manifest(const fs::path& p) {
  const std::string text = read_input(p);
  try {
    return io::decode_manifest(text, p.string());
  } catch (const io::FormatError& e) {
    throw CliError(kBadInput, std::string("inconsistent manifest: ") + e.what());
  }
}

int cmd_dynamics(const std::string& manifest_path, const AnalysisOptions& o, const TransitionConfig& tc,
                 const fs::path& out_dir, std::ostream& out) {
  const auto rule = o.tau_rule();
  const auto manifest = load_manifest(manifest_path);
  std::vector<std::vector<MaskedOutputTable>> tables;
  try {
    tables = io::load_series_tables(manifest, fs::path(manifest_path).parent_path());
  } catch (const io::FormatError& e) {
    throw CliError(kBadInput, std::string("inconsistent manifest: ") + e.what());
  }
  std::vector<const MaskedOutputTable*> flat;
  for (const auto& row : tables) {
    for (const auto& t : row) flat.push_back(&t);
  }
  auto profiles = parallel_map(flat.size(), o.jobs, [&](std::size_t i) {
    const auto s = o.extract(*flat[i]);
    return order_profile(s, rule.resolve(s));
  });
  std::vector<EpochRecord> series;
  std::size_t at = 0;
  for (std::size_t e = 0; e < tables.size(); ++e) {
    const std::span<const OrderProfile> group(profiles.data() + at, tables[e].size());
    at += tables[e].size();
    EpochRecord r;
    r.epoch = manifest.epochs[e].epoch;
    r.aggregate = aggregate_epoch(group);
    r.train_loss = manifest.epochs[e].train_loss;
    r.test_loss = manifest.epochs[e].test_loss;
    series.push_back(std::move(r));
  }
  const auto report = detect_transition(series, tc);
  const std::string text = describe(report);
  io::write_file_atomic(out_dir / "phase_report.txt", text);
  io::write_file_atomic(out_dir / "epochs.csv", io::epoch_csv(series));
  out << text;
  return kOk;
}

// ---------------------------------------------------------------- verify

class CheckLog {
 public:
  explicit CheckLog(std::ostream& out) : out_(out) {}
  void record(bool ok, const std::string& name, const std::string& detail) {
    (ok ? passed_ : failed_)++;
    out_ << (ok ? "PASS " : "FAIL ") << name << ": " << detail << "\n";
  }
  int passed() const { return passed_; }
  int failed() const { return failed_; }

 private:
  std::ostream& out_;
  int passed_ = 0;
  int failed_ = 0;
};

std::vector<double> naive_mobius(std::span<const double> f) {
  std::vector<double> g(f.size(), 0.0);
  for (std::uint32_t s = 0; s < f.size(); ++s) {
    for (std::uint32_t t = s;; t = (t - 1) & s) {
      g[s] += ((std::popcount(s) - std::popcount(t)) % 2 ? -1.0 : 1.0) * f[t];
      if (t == 0) break;
    }
  }
  return g;
}

double max_diff(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

MaskedOutputTable random_table(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::vector<double> v(lattice_size(n));
  for (double& x : v) x = g(rng);
  return MaskedOutputTable(n, std::move(v));
}

void check_matching(CheckLog& log, const std::string& name, const MaskedOutputTable& t, const SparsifierConfig& sc) {
  const double scale = t.reconstruction_scale();
  const auto zero = verify_universal_matching(decompose(t, GammaSplit::zero(t.n())), t);
  const auto opt = verify_universal_matching(sparsify(t, sc), t);
  log.record(zero.max_abs_error < 1e-9 * scale && opt.max_abs_error < 1e-9 * scale, "matching " + name,
             "max error " + format_double(zero.max_abs_error) + " (gamma zero), " + format_double(opt.max_abs_error) +
                 " (sparsified), scale " + format_double(scale));
}

void check_roundtrip(CheckLog& log, const std::string& name, const LatticeVector& v) {
  const double d = max_diff(zeta_transform(mobius_transform(v)).span(), v.span());
  log.record(d < 1e-10 * std::max(1.0, v.max_abs()), "roundtrip " + name, "max deviation " + format_double(d));
}

void check_planted(CheckLog& log, const std::string& name, const MaskedOutputTable& t, bool is_and, SubsetMask planted,
                   const SparsifierConfig& sc) {
  const auto s = sparsify(t, sc);
  const double l1 = s.l1_objective();
  const auto ranked = ranked_salient_effects(s, SaliencyRule::relative(0.05).resolve(s));
  double and_mass = 0.0, or_mass = 0.0;
  for (std::size_t m = 1; m < lattice_size(s.n); ++m) {
    and_mass += std::abs(s.i_and[m]);
    or_mass += std::abs(s.i_or[m]);
  }
  const double wrong = is_and ? or_mass : and_mass;
  const bool top_ok = !ranked.empty() && ranked[0].is_and == is_and && ranked[0].set == planted;
  const double floor = fixtures::kPlantedAmplitude;
  log.record(std::abs(l1 - floor) <= 0.05 * floor, "sparsify " + name,
             "L1 " + format_double(l1) + " vs floor " + format_double(floor));
  log.record(top_ok, "top salient " + name,
             ranked.empty() ? std::string("no salient effect")
                            : std::string(ranked[0].is_and ? "and" : "or") + mask_string(ranked[0].set));
  log.record(wrong < 0.05 * (and_mass + or_mass), "wrong branch " + name,
             "mass " + format_double(wrong) + " of " + format_double(and_mass + or_mass));
}

struct VerifyOptions {
  std::string fixtures = ANDOR_FIXTURE_DIR;
  std::uint64_t seed = 1;
  std::uint64_t trials = 100000;
  int random_tables = 20;
};

MaskedOutputTable read_fixture(const fs::path& dir, const std::string& name) {
  const fs::path p = dir / name;
  return io::decode_table(read_input(p), p.string());
}

int cmd_verify(const VerifyOptions& v, const AnalysisOptions& o, std::ostream& out) {
  if (!fs::is_directory(v.fixtures)) throw CliError(kMissingFile, "missing fixture directory: " + v.fixtures);
  CheckLog log(out);
  const auto sc = o.sparsifier();
  const fs::path dir = v.fixtures;

  const std::pair<const char*, MaskedOutputTable> named[] = {
      {"planted_and", read_fixture(dir, "planted_and.tbl")}, {"planted_or", read_fixture(dir, "planted_or.tbl")},
      {"constant", read_fixture(dir, "constant.tbl")},       {"linear_positive", read_fixture(dir, "linear_positive.tbl")},
      {"violating", read_fixture(dir, "violating.tbl")}};
  for (const auto& [name, t] : named) {
    check_matching(log, name, t, sc);
    check_roundtrip(log, name, t.values());
  }

  const auto& constant = named[2].second;
  const auto cs = decompose(constant, GammaSplit::zero(constant.n()));
  log.record(cs.max_abs_effect() == 0.0 && verify_universal_matching(cs, constant).max_abs_error == 0.0,
             "constant spectrum", "largest effect " + format_double(cs.max_abs_effect()));

  check_planted(log, "planted_and", named[0].second, true, make_mask({1, 2, 3}), sc);
  check_planted(log, "planted_or", named[1].second, false, make_mask({1, 2}), sc);

  const auto& lin = named[3].second;
  const auto lc = check_stability_conditions(lin, lin.n(), 1e-9);
  const double p = lc.exponent.value_or(0.0);
  log.record(lc.monotone_gain && lc.polynomial_bound && p >= 0.9 && p <= 1.1, "stability linear_positive",
             std::string("monotone ") + (lc.monotone_gain ? "yes" : "no") + ", exponent " +
                 (lc.exponent ? format_double(p) : "none"));
  const auto& bad = named[4].second;
  const auto bc = check_stability_conditions(bad, bad.n(), 1e-9);
  const bool witness_ok = bc.monotone_witness && *bc.monotone_witness == OrderPair{2, 3};
  log.record(!bc.monotone_gain && witness_ok, "stability violating",
             bc.monotone_witness ? "witness (" + std::to_string(bc.monotone_witness->first) + "," +
                                       std::to_string(bc.monotone_witness->second) + ")"
                                 : std::string("no witness"));

  std::mt19937_64 rng(v.seed);
  double oracle_err = 0.0;
  for (int n = 1; n <= 8; ++n) {
    const auto t = random_table(n, rng);
    oracle_err = std::max(oracle_err, max_diff(mobius_transform(t.values()).span(), naive_mobius(t.values().span())));
  }
  log.record(oracle_err < 1e-10, "mobius oracle n<=8", "max deviation " + format_double(oracle_err));
  check_roundtrip(log, "random n=12", random_table(12, rng).values());
  for (int i = 0; i < v.random_tables; ++i) check_matching(log, "random n=8 #" + std::to_string(i), random_table(8, rng), sc);

  const int n = 10;
  const auto mc = fusiform_monte_carlo(n, 1.0, v.trials, v.seed);
  double worst = 0.0, worst_sym = 0.0;
  int peak = 1;
  for (int k = 1; k <= n; ++k) {
    const double expect = gaussian_strength_expectation(n, k, 1.0).e_pos;
    const auto i = static_cast<std::size_t>(k - 1);
    worst = std::max({worst, std::abs(mc.pos_mean[i] - expect) / expect, std::abs(-mc.neg_mean[i] - expect) / expect});
    const double se = std::hypot(mc.pos_std_err[i], mc.neg_std_err[i]);
    worst_sym = std::max(worst_sym, std::abs(mc.pos_mean[i] + mc.neg_mean[i]) / se);
    if (mc.pos_mean[i] - mc.neg_mean[i] > mc.pos_mean[peak - 1] - mc.neg_mean[peak - 1]) peak = k;
  }
  log.record(worst < 0.02, "fusiform expectation", "worst relative error " + format_double(worst));
  log.record(worst_sym < 4.0, "fusiform symmetry", "worst |pos + neg| / stderr " + format_double(worst_sym));
  log.record(peak == 5, "fusiform peak", "order " + std::to_string(peak));

  out << log.passed() << "/" << (log.passed() + log.failed()) << " checks passed\n";
  return log.failed() == 0 ? kOk : kCheckFailed;
}

// ---------------------------------------------------------------- train-toy

struct ToyOptions {
  std::uint64_t seed = 1;
  int epochs = 256;
  int samples = 20;
  std::string score = "logit";
  int iters = 800;
  int window = 3;
  int noisy_per_class = 0;
  bool text = false;
};

void apply_toy_options(toy::ToyRunConfig& cfg, const ToyOptions& t, const AnalysisOptions& o) {
  if (t.epochs != cfg.train.epochs) {
    cfg.train.epochs = t.epochs;
    const toy::ScheduleStage stages[] = {{16, 1}, {t.epochs, 16}};
    cfg.train.checkpoint_epochs = toy::stepped_checkpoint_schedule(t.epochs, stages);
  }
  cfg.analyzed_samples = t.samples;
  cfg.analysis.score = toy::parse_score(t.score);
  cfg.analysis.gamma = o.gamma_mode();
  cfg.analysis.tau = o.tau_rule();
  cfg.analysis.sparsifier.bound_ratio = o.rho;
  cfg.analysis.sparsifier.max_iterations = t.iters;
  cfg.transition.smooth_window = t.window;
}

std::vector<io::FusiformRow> fusiform_rows(const OrderProfile& p) {
  // Reference curve C(n,k) sd / sqrt(2 pi) with sd matched to the observed total strength.
  double unit = 0.0;
  for (int k = 1; k <= p.n; ++k) unit += 2.0 * gaussian_strength_expectation(p.n, k, 1.0).e_pos;
  const double sd = unit > 0.0 ? p.total_strength() / unit : 0.0;
  std::vector<io::FusiformRow> rows;
  for (int k = 1; k <= p.n; ++k) {
    const auto g = gaussian_strength_expectation(p.n, k, sd);
    rows.push_back({k, g.e_pos, g.e_neg, p.at(k).j_pos, p.at(k).j_neg});
  }
  return rows;
}

std::string table_name(int epoch, std::size_t sample) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "tables/e%04d_s%04zu.tbl", epoch, sample);
  return buf;
}

std::string checkpoint_name(int epoch) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "checkpoints/e%04d.ckpt", epoch);
  return buf;
}

OrderProfile group_profile(const toy::ToyNetwork& net, const toy::ToyDataset& data, std::span<const std::size_t> idx,
                           int epoch, const toy::AnalysisConfig& cfg) {
  std::vector<OrderProfile> ps;
  for (std::size_t i : idx) ps.push_back(toy::analyze_sample(net, data, i, epoch, cfg).profile);
  return aggregate_epoch(ps);
}

int cmd_train_toy(const ToyOptions& t, const AnalysisOptions& o, const fs::path& out_dir, std::ostream& out) {
  auto cfg = toy::default_toy_run(t.seed);
  apply_toy_options(cfg, t, o);
  const auto enc = t.text ? io::Encoding::text : io::Encoding::binary;

  std::map<int, std::vector<io::ManifestEntry>> entries;
  const auto result = toy::run_toy(cfg, [&](const toy::SampleAnalysis& a) {
    const std::string name = table_name(a.epoch, a.sample_index);
    io::write_table(out_dir / name, a.table, enc);
    entries[a.epoch].push_back({a.table.meta().sample_id, name});
  });

  io::SeriesManifest manifest;
  manifest.n = cfg.analysis.variables;
  for (const auto& r : result.series) manifest.epochs.push_back({r.epoch, r.train_loss, r.test_loss, entries.at(r.epoch)});
  io::write_manifest(out_dir / "manifest.json", manifest);
  for (const auto& c : result.training.checkpoints) {
    io::write_file_atomic(out_dir / checkpoint_name(c.epoch),
                          io::encode_checkpoint({result.training.shape, c.epoch, c.parameters}));
  }
  io::write_file_atomic(out_dir / "epochs.csv", io::epoch_csv(result.series));
  io::write_file_atomic(out_dir / "fusiform.csv", io::fusiform_csv(fusiform_rows(result.series.front().aggregate)));
  io::write_file_atomic(out_dir / "similarity.csv", io::similarity_csv(result.generalization));
  const std::string report = describe(result.phase);
  io::write_file_atomic(out_dir / "phase_report.txt", report);

  out << "checkpoints: " << result.series.size() << "\nanalysed_samples: " << result.analyzed.size()
      << "\nfusiform_pass: " << (result.fusiform.pass ? "yes" : "no") << " (peak " << result.fusiform.peak_order
      << ")\n"
      << report << "generalization_spearman: " << format_double(result.generalization_rank_correlation) << "\n";
  if (result.clamped) out << "note: some log-odds scores were clamped\n";

  if (t.noisy_per_class > 0) {
    auto ncfg = toy::default_noisy_label_run(t.seed);
    const int keep_epochs = ncfg.train.epochs;
    apply_toy_options(ncfg, t, o);
    if (t.epochs != keep_epochs) ncfg.train.checkpoint_epochs = {t.epochs};
    const auto noisy = toy::run_noisy_label(ncfg, t.noisy_per_class);
    const auto net = noisy.retrained.final_network();
    const int epoch = noisy.retrained.checkpoints.back().epoch;
    const auto relabeled = group_profile(net, noisy.injection.dataset, noisy.injection.relabeled, epoch, ncfg.analysis);
    const auto clean = group_profile(net, noisy.injection.dataset, noisy.clean, epoch, ncfg.analysis);
    io::write_file_atomic(out_dir / "group_orders.csv", io::group_orders_csv(relabeled, "relabeled", clean, "clean"));
    out << "relabeled_mean_order: " << format_double(noisy.relabeled_mean_order)
        << "\nclean_mean_order: " << format_double(noisy.clean_mean_order) << "\n";
    if (noisy.injection.ties) out << "note: label-noise selection involved ties\n";
  }
  return kOk;
}

// ---------------------------------------------------------------- emit-plots

struct Csv {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

Csv read_csv(const fs::path& p, const std::string& kind) {
  std::istringstream in(read_input(p));
  std::string line;
  const std::string preamble = "# andor-" + kind + " v" + std::to_string(io::kCsvVersion);
  if (!std::getline(in, line) || line != preamble) {
    throw io::FormatError(p.string(), "expected first line '" + preamble + "'");
  }
  Csv csv;
  if (!std::getline(in, line)) throw io::FormatError(p.string(), "missing header row");
  csv.header = split_commas(line);
  while (std::getline(in, line)) {
    auto row = split_commas(line);
    if (row.size() != csv.header.size()) throw io::FormatError(p.string(), "row width differs from the header");
    csv.rows.push_back(std::move(row));
  }
  return csv;
}

int cmd_emit_plots(const std::vector<std::string>& runs, const fs::path& out_dir, std::ostream& out) {
  const std::string v = " v" + std::to_string(io::kCsvVersion) + "\n";
  std::string initial = "# andor-plot-initial-orders" + v + "run,order,expected_pos,expected_neg,empirical_pos,empirical_neg\n";
  std::string dyn = "# andor-plot-order-dynamics" + v + "run,epoch,order,j_pos,j_neg,mean_order,train_loss,test_loss,gap\n";
  std::string gen = "# andor-plot-generalization" + v + "run,order,mean_similarity\n";
  std::string noisy = "# andor-plot-noisy-labels" + v + "run,order,group,j_pos,j_neg\n";
  bool any_noisy = false;
  std::set<std::string> names;
  for (const auto& r : runs) {
    const fs::path dir = r;
    if (!fs::is_directory(dir)) throw CliError(kMissingFile, "missing run directory: " + r);
    const std::string name = fs::path(r).lexically_normal().filename().string().empty()
                                 ? fs::path(r).lexically_normal().parent_path().filename().string()
                                 : fs::path(r).lexically_normal().filename().string();
    if (!names.insert(name).second) throw CliError(kUsage, "two run directories share the name '" + name + "'");

    for (const auto& row : read_csv(dir / "fusiform.csv", "fusiform").rows) {
      initial += name;
      for (const auto& c : row) initial += "," + c;
      initial += "\n";
    }
    const auto epochs = read_csv(dir / "epochs.csv", "epochs");
    const std::size_t n = (epochs.header.size() - 5) / 2;
    for (const auto& row : epochs.rows) {
      for (std::size_t k = 1; k <= n; ++k) {
        dyn += name + "," + row[0] + "," + std::to_string(k) + "," + row[1 + k] + "," + row[1 + n + k] + "," + row[1] +
               "," + row[2 + 2 * n] + "," + row[3 + 2 * n] + "," + row[4 + 2 * n] + "\n";
      }
    }
    for (const auto& row : read_csv(dir / "similarity.csv", "similarity").rows) gen += name + "," + row[0] + "," + row[1] + "\n";
    if (fs::exists(dir / "group_orders.csv")) {
      any_noisy = true;
      const auto g = read_csv(dir / "group_orders.csv", "group-orders");
      const std::string a = g.header[1].substr(0, g.header[1].size() - 6);
      const std::string b = g.header[3].substr(0, g.header[3].size() - 6);
      for (const auto& row : g.rows) {
        noisy += name + "," + row[0] + "," + a + "," + row[1] + "," + row[2] + "\n";
        noisy += name + "," + row[0] + "," + b + "," + row[3] + "," + row[4] + "\n";
      }
    }
  }
  io::write_file_atomic(out_dir / "initial_orders.csv", initial);
  io::write_file_atomic(out_dir / "order_dynamics.csv", dyn);
  io::write_file_atomic(out_dir / "generalization.csv", gen);
  if (any_noisy) io::write_file_atomic(out_dir / "noisy_labels.csv", noisy);
  out << "runs: " << runs.size() << "\nwritten: " << (out_dir / "").string() << "\n";
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"AND-OR interaction analysis of masked model outputs", "andor"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  std::string out_flag;
  AnalysisOptions ao;
  const auto add_out = [&](CLI::App* cmd) {
    cmd->add_option("--out", out_flag, std::string("output directory (default: $") + kOutDirEnv + " or " +
                                           kFallbackOutDir + ")");
  };
  const auto add_jobs = [&](CLI::App* cmd) {
    cmd->add_option("--jobs", ao.jobs, "worker threads (0: one per core)")->capture_default_str();
  };

  std::vector<std::string> files;
  bool text = false;
  auto* extract = app.add_subcommand("extract", "decompose table files into interaction spectra");
  extract->add_option("tables", files, "table files")->required();
  add_analysis_flags(extract, ao);
  add_out(extract);
  add_jobs(extract);
  extract->add_flag("--text", text, "write spectra as text instead of binary");

  auto* orders = app.add_subcommand("orders", "per-order salient strength of spectra or tables");
  orders->add_option("inputs", files, "spectrum or table files")->required();
  add_analysis_flags(orders, ao);
  add_out(orders);
  add_jobs(orders);

  std::vector<std::string> train_inputs, test_inputs;
  std::string branch = "sum";
  auto* jaccard = app.add_subcommand("jaccard", "per-order similarity of train and test category means");
  jaccard->add_option("--train", train_inputs, "<category>=<file>, repeatable")->required();
  jaccard->add_option("--test", test_inputs, "<category>=<file>, repeatable")->required();
  jaccard->add_option("--branch", branch, "and, or or sum")->check(CLI::IsMember({"and", "or", "sum"}))->capture_default_str();
  add_analysis_flags(jaccard, ao);
  add_out(jaccard);
  add_jobs(jaccard);

  std::string manifest;
  TransitionConfig tc;
  auto* dynamics = app.add_subcommand("dynamics", "phase report for an epoch series");
  dynamics->add_option("manifest", manifest, "series manifest (JSON)")->required();
  dynamics->add_option("--window", tc.smooth_window, "moving-average width")->check(CLI::PositiveNumber)->capture_default_str();
  dynamics->add_option("--gap-threshold", tc.gap_threshold, "gap rise threshold relative to the gap range")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  add_analysis_flags(dynamics, ao);
  add_out(dynamics);
  add_jobs(dynamics);

  VerifyOptions vo;
  auto* verify = app.add_subcommand("verify", "run the built-in checks against the bundled fixtures");
  verify->add_option("--fixtures", vo.fixtures, "fixture directory")->capture_default_str();
  verify->add_option("--seed", vo.seed, "seed for random tables and Monte Carlo")->capture_default_str();
  verify->add_option("--trials", vo.trials, "Monte Carlo trials")->check(CLI::PositiveNumber)->capture_default_str();
  verify->add_option("--random-tables", vo.random_tables, "random n = 8 tables for the matching check")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  verify->add_option("--rho", ao.rho, "box bound on |gamma_T|")->check(CLI::NonNegativeNumber)->capture_default_str();
  verify->add_option("--iters", ao.iters, "sparsifier iteration budget")->check(CLI::PositiveNumber)->capture_default_str();

  ToyOptions to;
  auto* train_toy = app.add_subcommand("train-toy", "train the toy model and emit tables, manifest and CSVs");
  train_toy->add_option("--seed", to.seed, "run seed")->capture_default_str();
  train_toy->add_option("--epochs", to.epochs, "training epochs")->check(CLI::Range(3, 1000000))->capture_default_str();
  train_toy->add_option("--samples", to.samples, "training samples tracked")->check(CLI::PositiveNumber)->capture_default_str();
  train_toy->add_option("--score", to.score, "logit or logodds")->check(CLI::IsMember({"logit", "logodds"}))->capture_default_str();
  train_toy->add_option("--gamma", ao.gamma, "AND/OR split: zero or sparsify")
      ->check(CLI::IsMember({"zero", "sparsify"}))
      ->capture_default_str();
  train_toy->add_option("--tau", ao.tau, "saliency threshold rel:<r> or abs:<v>")->capture_default_str();
  train_toy->add_option("--rho", ao.rho, "box bound on |gamma_T|")->check(CLI::NonNegativeNumber)->capture_default_str();
  train_toy->add_option("--iters", to.iters, "sparsifier iteration budget")->check(CLI::PositiveNumber)->capture_default_str();
  train_toy->add_option("--window", to.window, "moving-average width")->check(CLI::PositiveNumber)->capture_default_str();
  train_toy->add_option("--noisy-per-class", to.noisy_per_class, "also run the label-noise experiment")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  train_toy->add_flag("--text", to.text, "write tables as text instead of binary");
  add_out(train_toy);

  std::vector<std::string> runs;
  auto* emit = app.add_subcommand("emit-plots", "merge run CSVs into plot-ready panels");
  emit->add_option("runs", runs, "run directories written by train-toy")->required();
  add_out(emit);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    const fs::path out_dir = resolve_out(out_flag);
    if (extract->parsed()) return cmd_extract(files, ao, out_dir, text, out, err);
    if (orders->parsed()) return cmd_orders(files, ao, out_dir, out);
    if (jaccard->parsed()) return cmd_jaccard(train_inputs, test_inputs, branch, ao, out_dir, out);
    if (dynamics->parsed()) return cmd_dynamics(manifest, ao, tc, out_dir, out);
    if (verify->parsed()) return cmd_verify(vo, ao, out);
    if (train_toy->parsed()) return cmd_train_toy(to, ao, out_dir, out);
    if (emit->parsed()) return cmd_emit_plots(runs, out_dir, out);
  } catch (const CliError& e) {
    err << "error: " << e.what() << "\n";
    return e.code;
  } catch (const io::FormatError& e) {
    err << "error: " << e.what() << "\n";
    return kBadInput;
  } catch (const std::invalid_argument& e) {
    err << "error: invalid argument: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kCheckFailed;
  }
  return kUsage;
}

}  // namespace andor::cli
