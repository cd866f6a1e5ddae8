#include "beamspace/load_optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "beamspace/error.hpp"
#include "beamspace/parallel.hpp"

namespace beamspace {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double usable(double c) { return std::isnan(c) ? kNegInf : c; }

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> v(n);
  if (n == 1) {
    v[0] = lo;
    return v;
  }
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return v;
}

std::vector<double> insert_midpoints(const std::vector<double>& v) {
  std::vector<double> out;
  out.reserve(2 * v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i > 0) out.push_back(0.5 * (v[i - 1] + v[i]));
    out.push_back(v[i]);
  }
  return out;
}

}  // namespace

ReactanceGrid ReactanceGrid::uniform(double lo, double hi, std::size_t n) {
  if (n < 1 || !(hi > lo || n == 1)) throw std::invalid_argument("reactance grid: need n >= 1 and hi > lo");
  const auto v = linspace(lo, hi, n);
  return {v, v};
}

ReactanceGrid ReactanceGrid::refined(unsigned levels) const {
  ReactanceGrid g = *this;
  for (unsigned l = 0; l < levels; ++l) {
    g.x1_values = insert_midpoints(g.x1_values);
    g.x2_values = insert_midpoints(g.x2_values);
  }
  return g;
}

void ReactanceGrid::validate() const {
  for (const auto* axis : {&x1_values, &x2_values}) {
    if (axis->empty()) throw std::invalid_argument("reactance grid: empty axis");
    for (std::size_t i = 1; i < axis->size(); ++i) {
      if (!((*axis)[i] > (*axis)[i - 1])) throw std::invalid_argument("reactance grid: axes must be strictly increasing");
    }
  }
}

LoadEvaluation evaluate_loads(const PortNetwork& net, double f, const LoadState& state, const ChannelConfig& cfg,
                              const SweepOptions& opts) {
  if (!net.has_patterns()) throw std::invalid_argument("evaluate_loads: network has no port patterns");
  // The two states are mirror images only for a symmetric network; the
  // caller decides whether that holds, so no symmetry gate here.
  const DrivenSolution g1 = reduce_loaded(net, f, state, opts.active_port);
  const DrivenSolution g2 = reduce_loaded(net, f, state.swapped(), opts.active_port);
  const BasisPair basis = basis_from_states(g1.pattern, g2.pattern);
  const CapacityEstimate cap = ergodic_capacity(tx_correlation(basis), cfg);
  LoadEvaluation ev;
  ev.capacity = cap.bits_per_symbol;
  ev.std_error = cap.std_error;
  ev.return_loss_db = return_loss_db(g1);
  ev.imbalance_db = imbalance_db(basis);
  ev.p_g1 = g1.p_rad;
  ev.p_b1 = basis.p_b1;
  ev.p_b2 = basis.p_b2;
  return ev;
}

SweepResult sweep(const PortNetwork& net, double f, const ReactanceGrid& grid, const ChannelConfig& cfg,
                  const SweepOptions& opts) {
  grid.validate();
  cfg.validate();
  if (opts.series_resistance < 0.0) throw std::invalid_argument("sweep: series resistance must be non-negative");
  const std::size_t n1 = grid.x1_values.size();
  const std::size_t n2 = grid.x2_values.size();

  SweepResult res;
  res.frequency = net.frequencies.at(net.frequency_index(f));
  res.grid = grid;
  res.capacity.assign(n1 * n2, std::numeric_limits<double>::quiet_NaN());
  res.std_error.assign(n1 * n2, std::numeric_limits<double>::quiet_NaN());
  res.return_loss_db.assign(n1 * n2, std::numeric_limits<double>::quiet_NaN());
  res.masked.assign(n1 * n2, 0);
  std::vector<std::optional<double>> imbalance(n1 * n2);

  SweepOptions cell_opts = opts;
  cell_opts.threads = 1;
  parallel_for(n1 * n2, opts.threads, [&](std::size_t cell) {
    const double x1 = grid.x1_values[cell / n2];
    const double x2 = grid.x2_values[cell % n2];
    try {
      const auto ev =
          evaluate_loads(net, res.frequency, LoadState::reactive(x1, x2, opts.series_resistance), cfg, cell_opts);
      res.capacity[cell] = ev.capacity;
      res.std_error[cell] = ev.std_error;
      res.return_loss_db[cell] = ev.return_loss_db;
      imbalance[cell] = ev.imbalance_db;
    } catch (const NumericalError&) {
      res.masked[cell] = 1;
    }
  });

  std::optional<std::size_t> best;
  for (std::size_t cell = 0; cell < n1 * n2; ++cell) {
    if (res.masked[cell]) continue;
    if (!best) {
      best = cell;
      continue;
    }
    const double c = res.capacity[cell];
    const double cb = res.capacity[*best];
    if (c > cb || (c == cb && res.return_loss_db[cell] > res.return_loss_db[*best])) best = cell;
  }
  if (!best) throw NumericalError("sweep: every load pair is degenerate at " + std::to_string(f) + " Hz");
  const std::size_t b = *best;
  res.best = {b / n2,
              b % n2,
              grid.x1_values[b / n2],
              grid.x2_values[b % n2],
              res.capacity[b],
              res.std_error[b],
              res.return_loss_db[b],
              imbalance[b]};
  return res;
}

std::vector<SweepResult> optimize_band(const PortNetwork& net, const std::vector<double>& frequencies,
                                       const ReactanceGrid& grid, const ChannelConfig& cfg, const SweepOptions& opts) {
  if (frequencies.empty()) throw std::invalid_argument("optimize_band: empty frequency list");
  std::vector<SweepResult> out;
  out.reserve(frequencies.size());
  for (double f : frequencies) out.push_back(sweep(net, f, grid, cfg, opts));
  return out;
}

double SubBandPlan::worst_case_capacity() const {
  double w = std::numeric_limits<double>::infinity();
  for (const auto& s : segments) w = std::min(w, s.worst_case_capacity);
  return segments.empty() ? kNegInf : w;
}

SubBandPlan subband_quantize(const std::vector<SweepResult>& results, std::size_t k) {
  const std::size_t n = results.size();
  if (k == 0) throw std::invalid_argument("subband_quantize: k must be >= 1");
  if (k > n) throw std::invalid_argument("subband_quantize: k exceeds the number of frequencies");
  for (std::size_t i = 1; i < n; ++i) {
    if (!(results[i].frequency > results[i - 1].frequency)) {
      throw std::invalid_argument("subband_quantize: results must be sorted by increasing frequency");
    }
    if (!(results[i].grid == results[0].grid)) throw std::invalid_argument("subband_quantize: results use different grids");
  }

  // Candidate pairs: per-frequency optima, first occurrence order.
  std::vector<std::pair<std::size_t, std::size_t>> candidates;
  for (const auto& r : results) {
    const std::pair<std::size_t, std::size_t> c{r.best.i1, r.best.i2};
    if (std::find(candidates.begin(), candidates.end(), c) == candidates.end()) candidates.push_back(c);
  }
  const std::size_t nc = candidates.size();
  std::vector<std::vector<double>> cap(nc, std::vector<double>(n));
  for (std::size_t c = 0; c < nc; ++c) {
    for (std::size_t f = 0; f < n; ++f) cap[c][f] = usable(results[f].capacity_at(candidates[c].first, candidates[c].second));
  }

  // seg[s][e]: best candidate minimum over frequencies s..e.
  std::vector<std::vector<double>> seg_value(n, std::vector<double>(n, kNegInf));
  std::vector<std::vector<std::size_t>> seg_choice(n, std::vector<std::size_t>(n, 0));
  for (std::size_t c = 0; c < nc; ++c) {
    for (std::size_t s = 0; s < n; ++s) {
      double running = std::numeric_limits<double>::infinity();
      for (std::size_t e = s; e < n; ++e) {
        running = std::min(running, cap[c][e]);
        if (running > seg_value[s][e]) {
          seg_value[s][e] = running;
          seg_choice[s][e] = c;
        }
      }
    }
  }

  // dp[m][e]: best band minimum covering 0..e with m + 1 segments.
  std::vector<std::vector<double>> dp(k, std::vector<double>(n, kNegInf));
  std::vector<std::vector<std::size_t>> split(k, std::vector<std::size_t>(n, 0));
  for (std::size_t e = 0; e < n; ++e) dp[0][e] = seg_value[0][e];
  for (std::size_t m = 1; m < k; ++m) {
    for (std::size_t e = m; e < n; ++e) {
      for (std::size_t s = m; s <= e; ++s) {
        const double v = std::min(dp[m - 1][s - 1], seg_value[s][e]);
        if (v > dp[m][e] || (dp[m][e] == kNegInf && s == m)) {
          dp[m][e] = v;
          split[m][e] = s;
        }
      }
    }
  }

  SubBandPlan plan;
  std::size_t e = n - 1;
  for (std::size_t m = k; m-- > 0;) {
    const std::size_t s = m == 0 ? 0 : split[m][e];
    const auto& cand = candidates[seg_choice[s][e]];
    SubBandSegment segment;
    segment.first = s;
    segment.last = e;
    segment.f_low = s == 0 ? results.front().frequency : 0.5 * (results[s - 1].frequency + results[s].frequency);
    segment.f_high = e + 1 == n ? results.back().frequency : 0.5 * (results[e].frequency + results[e + 1].frequency);
    segment.x1 = results[0].grid.x1_values[cand.first];
    segment.x2 = results[0].grid.x2_values[cand.second];
    segment.worst_case_capacity = seg_value[s][e];
    plan.segments.push_back(segment);
    if (s == 0) break;
    e = s - 1;
  }
  std::reverse(plan.segments.begin(), plan.segments.end());
  return plan;
}

ContourExport export_contour(const SweepResult& result) {
  ContourExport out;
  const std::size_t n2 = result.grid.x2_values.size();
  double best = kNegInf;
  std::size_t valid = 0;
  for (std::size_t cell = 0; cell < result.capacity.size(); ++cell) {
    out.rows.push_back({result.grid.x1_values[cell / n2], result.grid.x2_values[cell % n2], result.capacity[cell]});
    if (!result.masked[cell] && !std::isnan(result.capacity[cell])) {
      best = std::max(best, result.capacity[cell]);
      ++valid;
    }
  }
  if (valid == 0) return out;
  std::size_t plateau = 0;
  for (std::size_t cell = 0; cell < result.capacity.size(); ++cell) {
    if (!result.masked[cell] && result.capacity[cell] >= 0.95 * best) ++plateau;
  }
  out.plateau_fraction = static_cast<double>(plateau) / static_cast<double>(valid);
  return out;
}

}  // namespace beamspace
