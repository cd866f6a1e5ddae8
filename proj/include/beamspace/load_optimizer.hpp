#pragma once

// Reactance-pair search for maximum BPSK capacity: per-frequency 2-D sweeps,
// band-wide optimal-load curves and quantization of the band into a few
// fixed load pairs.

#include <array>
#include <optional>
#include <vector>

#include "beamspace/capacity.hpp"
#include "beamspace/network.hpp"

namespace beamspace {

struct ReactanceGrid {
  std::vector<double> x1_values;
  std::vector<double> x2_values;

  /// n x n samples evenly spread over [lo, hi] for both ports.
  static ReactanceGrid uniform(double lo, double hi, std::size_t n);
  /// Default search domain, X in [-400, 400] ohm on a 41 x 41 grid.
  static ReactanceGrid standard() { return uniform(-400.0, 400.0, 41); }

  /// Insert midpoints `levels` times along both axes; original nodes are kept.
  ReactanceGrid refined(unsigned levels) const;

  std::size_t size() const noexcept { return x1_values.size() * x2_values.size(); }
  bool symmetric() const noexcept { return x1_values == x2_values; }
  /// Throws std::invalid_argument unless both axes are nonempty and strictly increasing.
  void validate() const;
  bool operator==(const ReactanceGrid&) const = default;
};

struct SweepOptions {
  /// Uniform series resistance added to every reactive load (ohm).
  double series_resistance = 0.0;
  std::size_t active_port = 0;
  unsigned threads = 1;
};

/// Figures of merit of one load pair (X1 on passive port 1, X2 on port 2).
struct LoadEvaluation {
  double capacity = 0.0;
  double std_error = 0.0;
  double return_loss_db = 0.0;
  std::optional<double> imbalance_db;
  double p_g1 = 0.0;
  double p_b1 = 0.0;
  double p_b2 = 0.0;
};

/// Reduce both mirrored states, form the basis and estimate capacity. Uses
/// cfg.seed unchanged, so every load pair sees the same channel draws.
LoadEvaluation evaluate_loads(const PortNetwork& net, double f, const LoadState& state, const ChannelConfig& cfg,
                              const SweepOptions& opts = {});

struct SweepBest {
  std::size_t i1 = 0;
  std::size_t i2 = 0;
  double x1 = 0.0;
  double x2 = 0.0;
  double capacity = 0.0;
  double std_error = 0.0;
  double return_loss_db = 0.0;
  std::optional<double> imbalance_db;
};

struct SweepResult {
  double frequency = 0.0;
  ReactanceGrid grid;
  /// Row-major, x1 index outer. Masked (singular) cells hold NaN.
  std::vector<double> capacity;
  std::vector<double> std_error;
  std::vector<double> return_loss_db;
  std::vector<unsigned char> masked;
  SweepBest best;

  double capacity_at(std::size_t i1, std::size_t i2) const { return capacity[i1 * grid.x2_values.size() + i2]; }
};

/// Evaluate every grid cell with common random numbers and record the
/// argmax. Ties go to the higher return loss, then to the lowest
/// (x1 index, x2 index). Singular load blocks mask their cell.
SweepResult sweep(const PortNetwork& net, double f, const ReactanceGrid& grid, const ChannelConfig& cfg,
                  const SweepOptions& opts = {});

std::vector<SweepResult> optimize_band(const PortNetwork& net, const std::vector<double>& frequencies,
                                       const ReactanceGrid& grid, const ChannelConfig& cfg, const SweepOptions& opts = {});

struct SubBandSegment {
  double f_low = 0.0;
  double f_high = 0.0;
  std::size_t first = 0;  ///< first frequency index (inclusive)
  std::size_t last = 0;   ///< last frequency index (inclusive)
  double x1 = 0.0;
  double x2 = 0.0;
  double worst_case_capacity = 0.0;
};

struct SubBandPlan {
  std::vector<SubBandSegment> segments;
  double worst_case_capacity() const;
};

/// Split the swept frequencies into exactly k contiguous segments, each
/// served by one load pair drawn from the per-frequency optima, maximizing
/// the band-wide minimum capacity. Segment edges sit halfway between
/// neighbouring samples. Throws std::invalid_argument for k == 0, k larger
/// than the frequency count, unsorted results or differing grids.
SubBandPlan subband_quantize(const std::vector<SweepResult>& results, std::size_t k);

struct ContourExport {
  /// (x1, x2, capacity) per cell, row-major.
  std::vector<std::array<double, 3>> rows;
  /// Fraction of unmasked cells with capacity >= 95% of the maximum.
  double plateau_fraction = 0.0;
};

ContourExport export_contour(const SweepResult& result);

}  // namespace beamspace
