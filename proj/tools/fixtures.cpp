#include "fixtures.hpp"

#include <bit>
#include <cstdio>
#include <string>

namespace andor::fixtures {

namespace {

template <typename F>
MaskedOutputTable tabulate(int n, const std::string& sample, F f) {
  std::vector<double> v(lattice_size(n));
  for (std::uint32_t m = 0; m < v.size(); ++m) v[m] = f(m);
  TableMeta meta;
  meta.sample_id = sample;
  meta.epoch = 0;
  meta.score_tag = "synthetic";
  meta.baseline_tag = "none";
  for (int i = 0; i < n; ++i) meta.variable_ids.push_back(i);
  return MaskedOutputTable(n, std::move(v), std::move(meta));
}

}  // namespace

MaskedOutputTable planted_and() {
  const auto s = make_mask({1, 2, 3});
  return tabulate(6, "planted_and", [&](std::uint32_t m) { return s.is_subset_of(SubsetMask{m}) ? kPlantedAmplitude : 0.0; });
}

MaskedOutputTable planted_or() {
  const auto s = make_mask({1, 2});
  return tabulate(6, "planted_or", [&](std::uint32_t m) { return s.intersects(SubsetMask{m}) ? kPlantedAmplitude : 0.0; });
}

MaskedOutputTable constant() {
  return tabulate(5, "constant", [](std::uint32_t) { return 2.5; });
}

MaskedOutputTable linear_positive() {
  return tabulate(8, "linear_positive", [](std::uint32_t m) {
    double v = 0.0;
    for (int i = 0; i < 8; ++i) {
      if ((m >> i) & 1U) v += 1.0 + i / 4.0;
    }
    return v;
  });
}

MaskedOutputTable violating() {
  static constexpr double f[] = {0.0, 1.0, 2.0, 1.5, 3.0};
  return tabulate(4, "violating", [](std::uint32_t m) { return f[std::popcount(m)]; });
}

Series v_shaped_series() {
  static constexpr int orders[] = {5, 4, 3, 2, 1, 2, 3, 4, 5};
  static constexpr double train_loss[] = {1.40, 1.00, 0.70, 0.50, 0.40, 0.32, 0.26, 0.21, 0.17};
  static constexpr double test_loss[] = {1.50, 1.10, 0.80, 0.60, 0.50, 0.60, 0.75, 0.95, 1.20};
  Series s;
  s.manifest.n = 6;
  for (int e = 0; e < 9; ++e) {
    std::uint32_t planted = full_mask(orders[e]);
    auto t = tabulate(6, "v", [&](std::uint32_t m) { return (planted & ~m) == 0 ? kPlantedAmplitude : 0.0; });
    t.meta().epoch = e;
    char name[32];
    std::snprintf(name, sizeof name, "tables/e%04d_v.tbl", e);
    s.manifest.epochs.push_back({e, train_loss[e], test_loss[e], {{"v", name}}});
    s.tables.push_back(std::move(t));
  }
  return s;
}

void write_all(const std::filesystem::path& dir) {
  const auto text = io::Encoding::text;
  io::write_table(dir / "planted_and.tbl", planted_and(), text);
  io::write_table(dir / "planted_or.tbl", planted_or(), text);
  io::write_table(dir / "constant.tbl", constant(), text);
  io::write_table(dir / "linear_positive.tbl", linear_positive(), text);
  io::write_table(dir / "violating.tbl", violating(), text);
  const auto series = v_shaped_series();
  const auto root = dir / "v_series";
  for (std::size_t i = 0; i < series.tables.size(); ++i) {
    io::write_table(root / series.manifest.epochs[i].tables[0].path, series.tables[i], text);
  }
  io::write_manifest(root / "manifest.json", series.manifest);
}

}  // namespace andor::fixtures
