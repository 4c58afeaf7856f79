#include "andor/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <stdexcept>

namespace andor {

namespace {

double pairwise_sum(std::span<const double> x) {
  if (x.size() <= 8) {
    double s = 0.0;
    for (double v : x) s += v;
    return s;
  }
  const std::size_t half = x.size() / 2;
  return pairwise_sum(x.first(half)) + pairwise_sum(x.subspan(half));
}

std::vector<double> average_ranks(std::span<const double> x) {
  std::vector<std::size_t> idx(x.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> rank(x.size());
  std::size_t i = 0;
  while (i < idx.size()) {
    std::size_t j = i;
    while (j + 1 < idx.size() && x[idx[j + 1]] == x[idx[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t t = i; t <= j; ++t) rank[idx[t]] = r;
    i = j + 1;
  }
  return rank;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

double OrderProfile::total_strength() const {
  double t = 0.0;
  for (const auto& o : orders) t += o.j_pos - o.j_neg;
  return t;
}

void OrderProfile::refresh_mean_order() {
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < orders.size(); ++i) {
    const double s = orders[i].j_pos - orders[i].j_neg;
    num += static_cast<double>(i + 1) * s;
    den += s;
  }
  mean_salient_order = den > 0.0 ? num / den : 0.0;
}

OrderProfile order_profile(const InteractionSpectrum& spectrum, double tau) {
  if (tau < 0.0) throw std::invalid_argument("saliency threshold must be non-negative");
  OrderProfile p;
  p.n = spectrum.n;
  p.orders.assign(static_cast<std::size_t>(spectrum.n), {});
  auto add = [&](std::uint32_t m, double effect) {
    if (!(std::abs(effect) > tau)) return;
    auto& o = p.orders[static_cast<std::size_t>(std::popcount(m) - 1)];
    if (effect > 0.0) o.j_pos += effect; else o.j_neg += effect;
    o.salient_count += 1.0;
  };
  for (std::uint32_t m = 1; m < spectrum.i_and.size(); ++m) {
    add(m, spectrum.i_and[m]);
    add(m, spectrum.i_or[m]);
  }
  p.refresh_mean_order();
  return p;
}

OrderVector vectorize_order(const InteractionSpectrum& spectrum, int k, Branch branch) {
  if (k < 1 || k > spectrum.n) throw std::invalid_argument("order k=" + std::to_string(k) + " outside [1, n]");
  OrderVector v;
  v.n = spectrum.n;
  v.k = k;
  for (SubsetMask s : subsets_of_order(spectrum.n, k)) {
    double x = 0.0;
    if (branch != Branch::or_branch) x += spectrum.i_and[s];
    if (branch != Branch::and_branch) x += spectrum.i_or[s];
    v.values.push_back(x);
  }
  return v;
}

double jaccard_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("jaccard: vectors differ in length");
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double ap = std::max(a[i], 0.0), an = std::max(-a[i], 0.0);
    const double bp = std::max(b[i], 0.0), bn = std::max(-b[i], 0.0);
    num += std::min(ap, bp) + std::min(an, bn);
    den += std::max(ap, bp) + std::max(an, bn);
  }
  return den > 0.0 ? num / den : 1.0;
}

double jaccard_similarity(const OrderVector& a, const OrderVector& b) {
  if (a.n != b.n || a.k != b.k) throw std::invalid_argument("jaccard: vectors of different (n, k)");
  return jaccard_similarity(std::span<const double>(a.values), std::span<const double>(b.values));
}

CategoryMeanVector category_mean(std::span<const OrderVector> vectors, int category) {
  if (vectors.empty()) throw std::invalid_argument("category mean of zero samples");
  const int n = vectors.front().n;
  const int k = vectors.front().k;
  const std::size_t d = vectors.front().values.size();
  for (const auto& v : vectors) {
    if (v.n != n || v.k != k || v.values.size() != d) throw std::invalid_argument("category mean: mixed vector shapes");
  }
  CategoryMeanVector out;
  out.k = k;
  out.category = category;
  out.sample_count = vectors.size();
  out.mean.n = n;
  out.mean.k = k;
  out.mean.values.resize(d);
  std::vector<double> column(vectors.size());
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t i = 0; i < vectors.size(); ++i) column[i] = vectors[i].values[j];
    out.mean.values[j] = pairwise_sum(column) / static_cast<double>(vectors.size());
  }
  return out;
}

std::vector<OrderSimilarity> generalization_curve(std::span<const CategoryMeanVector> train,
                                                  std::span<const CategoryMeanVector> test) {
  std::map<std::pair<int, int>, const CategoryMeanVector*> test_index;
  for (const auto& t : test) {
    if (!test_index.emplace(std::pair{t.k, t.category}, &t).second) {
      throw std::invalid_argument("duplicate test category mean for order " + std::to_string(t.k));
    }
  }
  if (train.size() != test.size()) throw std::invalid_argument("train and test category means do not pair up");
  std::map<int, std::pair<double, std::size_t>> by_order;
  for (const auto& tr : train) {
    auto it = test_index.find({tr.k, tr.category});
    if (it == test_index.end()) {
      throw std::invalid_argument("no test mean for order " + std::to_string(tr.k) + ", category " +
                                  std::to_string(tr.category));
    }
    auto& acc = by_order[tr.k];
    acc.first += jaccard_similarity(tr.mean, it->second->mean);
    acc.second += 1;
    test_index.erase(it);
  }
  std::vector<OrderSimilarity> out;
  for (const auto& [k, acc] : by_order) out.push_back({k, acc.first / static_cast<double>(acc.second), acc.second});
  return out;
}

double spearman_correlation(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("spearman: need two equal-length series");
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  const double m = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    mx += rx[i];
    my += ry[i];
  }
  mx /= m;
  my /= m;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / i;
  return std::round(r);
}

GaussianStrength gaussian_strength_expectation(int n, int k, double sd) {
  if (!(sd >= 0.0)) throw std::invalid_argument("standard deviation must be non-negative");
  if (k < 1 || k > n) throw std::invalid_argument("order k outside [1, n]");
  // E[max(X,0)] = P(X>0) E[|X|] = 0.5 * sd * sqrt(2/pi)
  const double per_term = 0.5 * sd * std::sqrt(2.0 / std::numbers::pi);
  const double e = binomial(n, k) * per_term;
  return {e, -e};
}

FusiformEstimate fusiform_monte_carlo(int n, double sd, std::uint64_t trials, std::uint64_t seed) {
  check_variable_count(n);
  if (trials < 1) throw std::invalid_argument("monte carlo needs at least one trial");
  if (!(sd >= 0.0)) throw std::invalid_argument("standard deviation must be non-negative");

  std::vector<double> sum_pos(n, 0.0), sum_neg(n, 0.0), sq_pos(n, 0.0), sq_neg(n, 0.0);
  std::vector<double> pos(n), neg(n);
  const std::size_t size = lattice_size(n);
  std::vector<int> order(size);
  for (std::size_t m = 0; m < size; ++m) order[m] = std::popcount(static_cast<std::uint32_t>(m));

  for (std::uint64_t t = 0; t < trials; ++t) {
    std::mt19937_64 rng(splitmix64(seed ^ splitmix64(t)));
    std::normal_distribution<double> draw(0.0, sd);
    std::fill(pos.begin(), pos.end(), 0.0);
    std::fill(neg.begin(), neg.end(), 0.0);
    for (std::size_t m = 1; m < size; ++m) {
      const double x = sd > 0.0 ? draw(rng) : 0.0;
      if (x > 0.0) pos[order[m] - 1] += x; else neg[order[m] - 1] += x;
    }
    for (int k = 0; k < n; ++k) {
      sum_pos[k] += pos[k];
      sum_neg[k] += neg[k];
      sq_pos[k] += pos[k] * pos[k];
      sq_neg[k] += neg[k] * neg[k];
    }
  }

  FusiformEstimate out;
  out.n = n;
  out.trials = trials;
  const double m = static_cast<double>(trials);
  for (int k = 0; k < n; ++k) {
    const double mp = sum_pos[k] / m, mn = sum_neg[k] / m;
    out.pos_mean.push_back(mp);
    out.neg_mean.push_back(mn);
    const double vp = trials > 1 ? std::max(0.0, (sq_pos[k] - m * mp * mp) / (m - 1)) : 0.0;
    const double vn = trials > 1 ? std::max(0.0, (sq_neg[k] - m * mn * mn) / (m - 1)) : 0.0;
    out.pos_std_err.push_back(std::sqrt(vp / m));
    out.neg_std_err.push_back(std::sqrt(vn / m));
  }
  return out;
}

}  // namespace andor
