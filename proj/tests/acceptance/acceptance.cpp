// One PASS/FAIL line per acceptance criterion. Exit status is nonzero if any fails.

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "andor/dynamics.hpp"
#include "andor/io.hpp"
#include "andor/lattice.hpp"
#include "andor/metrics.hpp"
#include "andor/parallel.hpp"
#include "andor/sparsifier.hpp"
#include "andor/stability.hpp"
#include "andor/toy/pipeline.hpp"
#include "fixtures.hpp"

using namespace andor;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double x) { return io::format_double(x); }

struct Outcome {
  bool pass = false;
  std::string detail;
};

int g_failed = 0;

void report(int id, const std::string& name, const Outcome& o, double secs, double budget) {
  const bool in_time = budget <= 0.0 || secs < budget;
  const bool pass = o.pass && in_time;
  if (!pass) ++g_failed;
  std::ostringstream t;
  t.precision(3);
  t << secs << " s";
  if (budget > 0.0) t << ", budget " << budget << " s";
  std::cout << (pass ? "PASS" : "FAIL") << " [" << id << "] " << name << ": " << o.detail << " (" << t.str() << ")"
            << std::endl;
}

Outcome timed(int id, const std::string& name, double budget, const std::function<Outcome()>& fn) {
  const auto t0 = Clock::now();
  Outcome o;
  try {
    o = fn();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  report(id, name, o, seconds_since(t0), budget);
  return o;
}

MaskedOutputTable gaussian_table(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::vector<double> v(lattice_size(n));
  for (double& x : v) x = g(rng);
  return MaskedOutputTable(n, std::move(v));
}

double max_diff(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

// Direct sums over subsets, O(3^n).
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

std::vector<double> naive_zeta(std::span<const double> f) {
  std::vector<double> g(f.size(), 0.0);
  for (std::uint32_t s = 0; s < f.size(); ++s) {
    for (std::uint32_t t = s;; t = (t - 1) & s) {
      g[s] += f[t];
      if (t == 0) break;
    }
  }
  return g;
}

Outcome universal_matching() {
  std::mt19937_64 rng(101);
  double worst_zero = 0.0, worst_opt = 0.0;
  int ok = 0;
  for (int i = 0; i < 100; ++i) {
    const auto t = gaussian_table(8, rng);
    const double scale = t.reconstruction_scale();
    const double ez = verify_universal_matching(decompose(t, GammaSplit::zero(8)), t).max_abs_error / scale;
    const double eo = verify_universal_matching(sparsify(t), t).max_abs_error / scale;
    worst_zero = std::max(worst_zero, ez);
    worst_opt = std::max(worst_opt, eo);
    if (ez < 1e-9 && eo < 1e-9) ++ok;
  }
  return {ok == 100, std::to_string(ok) + "/100 tables; worst error/scale " + fmt(worst_zero) + " (gamma zero), " +
                         fmt(worst_opt) + " (optimized)"};
}

Outcome transform_correctness() {
  std::mt19937_64 rng(102);
  double worst = 0.0;
  for (int n = 1; n <= 8; ++n) {
    for (int rep = 0; rep < 5; ++rep) {
      const auto v = gaussian_table(n, rng).values();
      worst = std::max(worst, max_diff(mobius_transform(v).span(), naive_mobius(v.span())));
      worst = std::max(worst, max_diff(zeta_transform(v).span(), naive_zeta(v.span())));
    }
  }
  const auto big = gaussian_table(12, rng).values();
  const double rt = std::max(max_diff(zeta_transform(mobius_transform(big)).span(), big.span()),
                             max_diff(mobius_transform(zeta_transform(big)).span(), big.span()));
  return {worst < 1e-10 && rt < 1e-10, "oracle deviation n<=8 " + fmt(worst) + ", round trip n=12 " + fmt(rt)};
}

std::string fusiform_mc_csv(const FusiformEstimate& mc) {
  std::vector<io::FusiformRow> rows;
  for (int k = 1; k <= mc.n; ++k) {
    const auto g = gaussian_strength_expectation(mc.n, k, 1.0);
    rows.push_back({k, g.e_pos, g.e_neg, mc.pos_mean[k - 1], mc.neg_mean[k - 1]});
  }
  return io::fusiform_csv(rows);
}

Outcome fusiform_expectation(std::string& csv) {
  const int n = 10;
  const auto mc = fusiform_monte_carlo(n, 1.0, 100000, 103);
  csv = fusiform_mc_csv(mc);
  double worst = 0.0, worst_sym = 0.0;
  std::vector<double> strength;
  for (int k = 1; k <= n; ++k) {
    const double e = gaussian_strength_expectation(n, k, 1.0).e_pos;
    worst = std::max({worst, std::abs(mc.pos_mean[k - 1] - e) / e, std::abs(-mc.neg_mean[k - 1] - e) / e});
    const double se = std::hypot(mc.pos_std_err[k - 1], mc.neg_std_err[k - 1]);
    worst_sym = std::max(worst_sym, std::abs(mc.pos_mean[k - 1] + mc.neg_mean[k - 1]) / se);
    strength.push_back(mc.pos_mean[k - 1] - mc.neg_mean[k - 1]);
  }
  const int peak = static_cast<int>(std::max_element(strength.begin(), strength.end()) - strength.begin()) + 1;
  bool unimodal = true;
  for (int k = 1; k < n; ++k) {
    if (k < peak && strength[k] < strength[k - 1]) unimodal = false;
    if (k >= peak && strength[k] > strength[k - 1]) unimodal = false;
  }
  return {worst < 0.02 && worst_sym < 4.0 && unimodal && peak == 5,
          "worst relative error " + fmt(worst) + ", worst |pos+neg|/stderr " + fmt(worst_sym) + ", peak " +
              std::to_string(peak) + (unimodal ? ", unimodal" : ", not unimodal")};
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

struct PlantedResult {
  bool pass = false;
  double l1 = 0.0;
  double wrong_fraction = 0.0;
  std::string top;
};

PlantedResult planted(const MaskedOutputTable& t, bool is_and, SubsetMask set) {
  const auto s = sparsify(t);
  double and_mass = 0.0, or_mass = 0.0;
  for (std::size_t m = 1; m < lattice_size(s.n); ++m) {
    and_mass += std::abs(s.i_and[m]);
    or_mass += std::abs(s.i_or[m]);
  }
  const auto ranked = ranked_salient_effects(s, SaliencyRule::relative(0.05).resolve(s));
  PlantedResult r;
  r.l1 = s.l1_objective();
  r.wrong_fraction = (is_and ? or_mass : and_mass) / (and_mass + or_mass);
  r.top = ranked.empty() ? "none" : std::string(ranked[0].is_and ? "and" : "or") + mask_string(ranked[0].set);
  const double floor = fixtures::kPlantedAmplitude;
  r.pass = std::abs(r.l1 - floor) <= 0.05 * floor && !ranked.empty() && ranked[0].is_and == is_and &&
           ranked[0].set == set && r.wrong_fraction < 0.05;
  return r;
}

Outcome planted_sparsifier() {
  std::string detail;
  bool pass = true;
  const std::tuple<const char*, MaskedOutputTable, bool, SubsetMask> cases[] = {
      {"and", fixtures::planted_and(), true, make_mask({1, 2, 3})},
      {"or", fixtures::planted_or(), false, make_mask({1, 2})}};
  for (const auto& [name, t, is_and, set] : cases) {
    const auto t0 = Clock::now();
    const auto r = planted(t, is_and, set);
    const double secs = seconds_since(t0);
    pass = pass && r.pass && secs < 60.0;
    if (!detail.empty()) detail += "; ";
    detail += std::string(name) + ": L1 " + fmt(r.l1) + ", top " + r.top + ", wrong branch " +
              fmt(100.0 * r.wrong_fraction) + "%, " + fmt(std::round(secs * 1000.0) / 1000.0) + " s";
  }
  return {pass, detail};
}

Outcome stability() {
  const fs::path dir = ANDOR_FIXTURE_DIR;
  const auto lin = io::read_table(dir / "linear_positive.tbl");
  const auto bad = io::read_table(dir / "violating.tbl");
  const auto lc = check_stability_conditions(lin, lin.n(), 1e-9);
  const auto bc = check_stability_conditions(bad, bad.n(), 1e-9);
  const double p = lc.exponent.value_or(-1.0);
  const bool lin_ok = lc.monotone_gain && lc.polynomial_bound && p >= 0.9 && p <= 1.1;
  const bool bad_ok = !bc.monotone_gain && bc.monotone_witness && *bc.monotone_witness == OrderPair{2, 3};
  std::string witness = "none";
  if (bc.monotone_witness) {
    witness = "(" + std::to_string(bc.monotone_witness->first) + "," + std::to_string(bc.monotone_witness->second) + ")";
  }
  return {lin_ok && bad_ok, std::string("linear: monotone ") + (lc.monotone_gain ? "yes" : "no") + ", bound " +
                                (lc.polynomial_bound ? "yes" : "no") + ", p " + fmt(p) + "; violating: witness " +
                                witness};
}

// ---------------------------------------------------------------- toy runs

struct SeedOutcome {
  std::uint64_t seed = 0;
  bool fusiform_ok = false;
  int peak = 0;
  double phase1 = 0.0;
  double phase2 = 0.0;
  std::optional<int> transition;
  std::optional<int> offset;
  int total_epochs = 0;
  double spearman = 0.0;
  double relabeled_order = 0.0;
  double clean_order = 0.0;
  double toy_seconds = 0.0;
  double noisy_seconds = 0.0;
  std::map<std::string, std::string> csv;

  bool two_phase_ok() const {
    return fusiform_ok && peak >= 4 && peak <= 6 && phase1 <= 0.0 && phase2 >= 0.0 && offset &&
           std::abs(*offset) <= 0.1 * total_epochs;
  }
};

SeedOutcome run_seed(std::uint64_t seed) {
  SeedOutcome s;
  s.seed = seed;
  auto t0 = Clock::now();
  const auto r = toy::run_toy(toy::default_toy_run(seed));
  s.toy_seconds = seconds_since(t0);
  s.fusiform_ok = r.fusiform.pass;
  s.peak = r.fusiform.peak_order;
  s.phase1 = r.phase.phase1_trend;
  s.phase2 = r.phase.phase2_trend;
  s.transition = r.phase.transition_epoch;
  s.offset = r.phase.alignment_offset;
  s.total_epochs = r.phase.total_epochs;
  s.spearman = r.generalization_rank_correlation;
  s.csv["initial_orders.csv"] = io::orders_csv(r.series.front().aggregate);
  s.csv["epochs.csv"] = io::epoch_csv(r.series);
  s.csv["similarity.csv"] = io::similarity_csv(r.generalization);

  t0 = Clock::now();
  const auto noisy = toy::run_noisy_label(toy::default_noisy_label_run(seed), toy::kDefaultNoisyPerClass);
  s.noisy_seconds = seconds_since(t0);
  s.relabeled_order = noisy.relabeled_mean_order;
  s.clean_order = noisy.clean_mean_order;
  s.csv["noisy_labels.csv"] = "# andor-noisy-labels v1\nrelabeled,clean,relabeled_mean_order,clean_mean_order\n" +
                              std::to_string(noisy.injection.relabeled.size()) + "," +
                              std::to_string(noisy.clean.size()) + "," + fmt(noisy.relabeled_mean_order) + "," +
                              fmt(noisy.clean_mean_order) + "\n";
  return s;
}

std::string opt_str(const std::optional<int>& x) { return x ? std::to_string(*x) : "none"; }

fs::path output_dir() {
  const char* env = std::getenv("ANDOR_OUT_DIR");
  return fs::path(env && *env ? env : "acceptance_out");
}

}  // namespace

int main() {
  std::cout.setf(std::ios::unitbuf);
  const fs::path out_dir = output_dir();
  fs::create_directories(out_dir);

  timed(1, "universal matching, 100 tables n=8", 10.0, universal_matching);
  timed(2, "transform correctness", 30.0, transform_correctness);
  std::string mc_csv;
  timed(3, "fusiform expectation, n=10, 1e5 trials", 60.0, [&] { return fusiform_expectation(mc_csv); });
  io::write_file_atomic(out_dir / "fusiform_mc.csv", mc_csv);
  timed(4, "sparsifier on planted AND / OR", 0.0, planted_sparsifier);

  // Criteria 5-7 share one training run per seed.
  const std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  const auto t_toy = Clock::now();
  std::vector<SeedOutcome> runs;
  std::string toy_error;
  try {
    runs = parallel_map(seeds.size(), default_worker_count(), [&](std::size_t i) { return run_seed(seeds[i]); });
  } catch (const std::exception& e) {
    toy_error = e.what();
  }
  const double toy_wall = seconds_since(t_toy);
  double toy_total = 0.0, noisy_total = 0.0;
  for (const auto& r : runs) {
    toy_total += r.toy_seconds;
    noisy_total += r.noisy_seconds;
    for (const auto& [name, text] : r.csv) {
      io::write_file_atomic(out_dir / ("seed" + std::to_string(r.seed)) / name, text);
    }
  }
  if (!toy_error.empty()) {
    const Outcome o{false, "exception: " + toy_error};
    report(5, "two-phase dynamics", o, toy_wall, 900.0);
    report(6, "generalization ordering", o, 0.0, 0.0);
    report(7, "noisy-label effect", o, 0.0, 900.0);
  } else {
    int two_phase = 0, ordering = 0, noisy = 0;
    std::string d5, d6, d7;
    for (const auto& r : runs) {
      two_phase += r.two_phase_ok();
      ordering += r.spearman < -0.5;
      noisy += r.relabeled_order > r.clean_order;
      const std::string tag = (d5.empty() ? "" : "; ") + std::string("seed ") + std::to_string(r.seed) + " ";
      d5 += tag + (r.two_phase_ok() ? "ok" : "no") + " (fusiform " + (r.fusiform_ok ? "pass" : "fail") + " peak " +
            std::to_string(r.peak) + ", trends " + fmt(r.phase1) + "/" + fmt(r.phase2) + ", transition " +
            opt_str(r.transition) + ", offset " + opt_str(r.offset) + " of " + std::to_string(r.total_epochs) + ")";
      d6 += tag + fmt(r.spearman);
      d7 += tag + fmt(r.relabeled_order) + " vs " + fmt(r.clean_order);
    }
    report(5, "two-phase dynamics", {two_phase >= 4, std::to_string(two_phase) + "/5 seeds; " + d5}, toy_total, 900.0);
    report(6, "generalization ordering", {ordering >= 4, std::to_string(ordering) + "/5 seeds with rho_s < -0.5; " + d6},
           0.0, 0.0);
    report(7, "noisy-label effect",
           {noisy >= 4, std::to_string(noisy) + "/5 seeds with relabeled > clean mean order; " + d7}, noisy_total,
           900.0);
  }

  timed(8, "stability conditions", 0.0, stability);

  timed(9, "determinism of criteria 3-7 outputs", 0.0, [&]() -> Outcome {
    if (runs.empty()) return {false, "no toy run to repeat"};
    std::string mc_again;
    fusiform_expectation(mc_again);
    const auto again =
        parallel_map(seeds.size(), default_worker_count(), [&](std::size_t i) { return run_seed(seeds[i]); });
    std::vector<std::string> differ;
    std::size_t compared = 1;
    if (mc_again != mc_csv) differ.push_back("fusiform_mc.csv");
    for (std::size_t i = 0; i < runs.size(); ++i) {
      for (const auto& [name, text] : runs[i].csv) {
        ++compared;
        if (again[i].csv.at(name) != text) differ.push_back("seed" + std::to_string(runs[i].seed) + "/" + name);
      }
    }
    std::string detail = std::to_string(compared) + " CSV outputs compared over " + std::to_string(runs.size()) +
                         " seeds";
    for (const auto& d : differ) detail += ", differs: " + d;
    return {differ.empty(), detail};
  });

  std::cout << (9 - g_failed) << "/9 criteria passed; outputs in " << out_dir.string() << std::endl;
  return g_failed == 0 ? 0 : 1;
}
