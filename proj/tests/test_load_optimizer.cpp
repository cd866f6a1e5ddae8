#include <doctest.h>

#include <cmath>

#include "beamspace/dipole_array.hpp"
#include "beamspace/load_optimizer.hpp"

using namespace beamspace;

namespace {

const PortNetwork& small_net() {
  static const PortNetwork net =
      build_network(default_dipole_array(kDesignFrequency, {1.7e9, 1.8e9, 1.95e9, 2.1e9, 2.2e9}), make_grid(12, 24));
  return net;
}

ChannelConfig channel() {
  ChannelConfig c;
  c.snr_db = 10.0;
  c.n_channels = 60;
  c.n_noise = 16;
  c.seed = 17;
  return c;
}

}  // namespace

TEST_CASE("reactance grids") {
  const auto g = ReactanceGrid::uniform(-400, 400, 5);
  CHECK(g.x1_values == std::vector<double>{-400, -200, 0, 200, 400});
  const auto r = g.refined(1);
  CHECK(r.x1_values.size() == 9);
  CHECK(r.x1_values[1] == -300.0);
  CHECK(ReactanceGrid::standard().size() == 41u * 41u);
  ReactanceGrid bad{{1, 0}, {0}};
  CHECK_THROWS(bad.validate());
}

TEST_CASE("sweep map is swap symmetric and diagonal cells carry one stream") {
  const auto res = sweep(small_net(), 1.95e9, ReactanceGrid::uniform(-400, 400, 7), channel());
  const std::size_t n = 7;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) CHECK(res.capacity_at(i, j) == res.capacity_at(j, i));
    CHECK(res.capacity_at(i, i) <= 1.0 + 3.0 * res.std_error[i * n + i]);
  }
  // The argmax is a real maximum of the map.
  for (double c : res.capacity) CHECK(c <= res.best.capacity);
}

TEST_CASE("sweep is thread-count independent") {
  SweepOptions one, four;
  four.threads = 4;
  const auto a = sweep(small_net(), 1.8e9, ReactanceGrid::uniform(-300, 300, 4), channel(), one);
  const auto b = sweep(small_net(), 1.8e9, ReactanceGrid::uniform(-300, 300, 4), channel(), four);
  CHECK(a.capacity == b.capacity);
  CHECK(a.best.i1 == b.best.i1);
  CHECK(a.best.i2 == b.best.i2);
}

TEST_CASE("per-frequency optimum dominates any fixed load on the grid") {
  const auto grid = ReactanceGrid::uniform(-400, 400, 5);
  const auto results = optimize_band(small_net(), small_net().frequencies, grid, channel());
  for (const auto& r : results) {
    for (std::size_t c = 0; c < r.capacity.size(); ++c) CHECK(r.best.capacity >= r.capacity[c]);
  }
}

TEST_CASE("sub-band quantization: monotone in k, k=1 equals exhaustive scan, k=n picks each optimum") {
  const auto grid = ReactanceGrid::uniform(-400, 400, 5);
  const auto results = optimize_band(small_net(), small_net().frequencies, grid, channel());
  const std::size_t n = results.size();
  double prev = -1.0;
  for (std::size_t k = 1; k <= n; ++k) {
    const auto plan = subband_quantize(results, k);
    CHECK(plan.segments.size() == k);
    CHECK(plan.segments.front().first == 0);
    CHECK(plan.segments.back().last == n - 1);
    for (std::size_t s = 1; s < k; ++s) CHECK(plan.segments[s].first == plan.segments[s - 1].last + 1);
    CHECK(plan.worst_case_capacity() >= prev);
    prev = plan.worst_case_capacity();
  }
  double exhaustive = -1.0;
  for (const auto& cand : results) {
    double worst = 10.0;
    for (const auto& r : results) worst = std::min(worst, r.capacity_at(cand.best.i1, cand.best.i2));
    exhaustive = std::max(exhaustive, worst);
  }
  CHECK(subband_quantize(results, 1).worst_case_capacity() == exhaustive);
  double min_opt = 10.0;
  for (const auto& r : results) min_opt = std::min(min_opt, r.best.capacity);
  CHECK(subband_quantize(results, n).worst_case_capacity() == min_opt);
  CHECK_THROWS(subband_quantize(results, 0));
  CHECK_THROWS(subband_quantize(results, n + 1));
}

TEST_CASE("coarse grid optimum never beats the fine grid that contains it") {
  const auto coarse = ReactanceGrid::uniform(-400, 400, 5);
  const auto fine = coarse.refined(1);
  const auto a = sweep(small_net(), 1.95e9, coarse, channel());
  const auto b = sweep(small_net(), 1.95e9, fine, channel());
  CHECK(b.best.capacity >= a.best.capacity);
}

TEST_CASE("contour export and plateau fraction") {
  const auto res = sweep(small_net(), 1.95e9, ReactanceGrid::uniform(-400, 400, 5), channel());
  const auto c = export_contour(res);
  CHECK(c.rows.size() == 25);
  CHECK(c.plateau_fraction > 0.0);
  CHECK(c.plateau_fraction <= 1.0);
}

TEST_CASE("series resistance costs capacity at the optimum") {
  SweepOptions lossy;
  lossy.series_resistance = 20.0;
  const auto grid = ReactanceGrid::uniform(-400, 400, 5);
  const auto a = sweep(small_net(), 1.95e9, grid, channel());
  const auto b = sweep(small_net(), 1.95e9, grid, channel(), lossy);
  CHECK(b.best.capacity <= a.best.capacity + 3.0 * a.best.std_error);
}
