#pragma once

// Ergodic mutual information of two BPSK streams sent over the two basis
// patterns through a Kronecker-correlated Rayleigh channel to two
// uncorrelated receive antennas.

#include <Eigen/Dense>
#include <cstdint>
#include <optional>

#include "beamspace/pattern.hpp"

namespace beamspace {

using Matrix2c = Eigen::Matrix2cd;

/// Transmit SNR is total transmit power over the noise variance at one
/// receive antenna.
struct ChannelConfig {
  double snr_db = 10.0;
  std::size_t n_channels = 1000;
  std::size_t n_noise = 100;
  std::uint64_t seed = 1;

  /// Throws std::invalid_argument for zero counts or a non-finite SNR.
  void validate() const;
};

/// Gram matrix of the basis patterns. It is not trace-normalized: the trace
/// is p_b1 + p_b2, so efficiency and imbalance reach the capacity.
struct TxCorrelation {
  Matrix2c r = Matrix2c::Identity();

  /// Throws NumericalError unless Hermitian (1e-12) and PSD (eigenvalues
  /// >= -1e-12, both relative to max(1, trace)).
  void validate() const;
  static TxCorrelation identity() { return {}; }
};

struct CapacityEstimate {
  double bits_per_symbol = 0.0;
  double std_error = 0.0;
  ChannelConfig config;
};

TxCorrelation tx_correlation(const BasisPair& basis);

/// Principal square root of a 2x2 Hermitian PSD matrix (closed form).
Matrix2c psd_sqrt(const Matrix2c& r);

/// I(x; y) in bits for x uniform on {+-1}^2 and y = H x + n with
/// n ~ CN(0, noise_var I), averaged over n_noise noise draws from `seed`.
double bpsk_mutual_information(const Matrix2c& h, double noise_var, std::size_t n_noise, std::uint64_t seed);

struct ErgodicOptions {
  unsigned threads = 1;
  /// Optional fixed matrix applied on the receive side (H -> U H); only used
  /// to probe invariances.
  std::optional<Matrix2c> receive_transform;
};

/// Average MI over n_channels draws of H = sqrt(snr/2) H_w r^{1/2}. Each
/// realization's channel and noise come from derive_seed(seed, {index}), so
/// the estimate is independent of thread count and identical draws are
/// shared by every caller using the same seed.
CapacityEstimate ergodic_capacity(const TxCorrelation& r_tx, const ChannelConfig& cfg, const ErgodicOptions& opts = {});

/// Ideal 2x2 reference: ergodic_capacity with r_tx = I.
CapacityEstimate ideal_reference(const ChannelConfig& cfg, const ErgodicOptions& opts = {});

}  // namespace beamspace
