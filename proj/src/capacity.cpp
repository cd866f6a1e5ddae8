#include "beamspace/capacity.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <stdexcept>

#include "beamspace/error.hpp"
#include "beamspace/parallel.hpp"
#include "beamspace/rng.hpp"

namespace beamspace {

namespace {

using Vector2c = Eigen::Vector2cd;

// Constellation points (+-1, +-1) indexed by two bits.
const std::array<Eigen::Vector2d, 4> kPoints = {Eigen::Vector2d(1, 1), Eigen::Vector2d(1, -1), Eigen::Vector2d(-1, 1),
                                                Eigen::Vector2d(-1, -1)};

struct PairTable {
  // The six unordered pairs (k < j) and their received differences.
  std::array<int, 6> k{};
  std::array<int, 6> j{};
  std::array<Vector2c, 6> d;
  std::array<double, 6> d_norm{};
};

PairTable pair_table(const Matrix2c& h, double noise_var) {
  PairTable t;
  int p = 0;
  for (int k = 0; k < 4; ++k) {
    for (int j = k + 1; j < 4; ++j, ++p) {
      t.k[p] = k;
      t.j[p] = j;
      t.d[p] = h * (kPoints[k] - kPoints[j]).cast<cplx>();
      t.d_norm[p] = t.d[p].squaredNorm() / noise_var;
    }
  }
  return t;
}

cplx complex_normal(std::mt19937_64& eng, std::normal_distribution<double>& nd) {
  const double re = nd(eng);
  const double im = nd(eng);
  return {re * 0.70710678118654752440, im * 0.70710678118654752440};
}

// Shared kernel; noise is drawn from `eng` with variance noise_var.
double mi_kernel(const Matrix2c& h, double noise_var, std::size_t n_noise, std::mt19937_64& eng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  const PairTable t = pair_table(h, noise_var);
  const double sigma = std::sqrt(noise_var);
  double acc = 0.0;
  for (std::size_t m = 0; m < n_noise; ++m) {
    const Vector2c n(sigma * complex_normal(eng, nd), sigma * complex_normal(eng, nd));
    // sums[k] = sum_j exp((|n|^2 - |d_kj + n|^2)/noise_var), j = k contributing 1.
    std::array<double, 4> sums = {1.0, 1.0, 1.0, 1.0};
    for (int p = 0; p < 6; ++p) {
      const double cross = 2.0 * (t.d[p].dot(n)).real() / noise_var;  // dot() conjugates d
      sums[t.k[p]] += std::exp(-t.d_norm[p] - cross);
      sums[t.j[p]] += std::exp(-t.d_norm[p] + cross);
    }
    acc += std::log2(sums[0]) + std::log2(sums[1]) + std::log2(sums[2]) + std::log2(sums[3]);
  }
  return 2.0 - acc / (4.0 * static_cast<double>(n_noise));
}

// Pick the representative of {R, D R D}, D = diag(1, -1). Both give the same
// ergodic capacity (H_w D ~ H_w, D permutes the constellation), so swapped
// load states evaluate on bitwise-identical inputs.
Matrix2c canonical(const Matrix2c& r) {
  Matrix2c c = r;
  const cplx off = r(0, 1);
  const bool flip = off.real() < 0.0 || (off.real() == 0.0 && off.imag() < 0.0);
  cplx use = flip ? -off : off;
  if (use.real() == 0.0) use.real(0.0);
  if (use.imag() == 0.0) use.imag(0.0);
  c(0, 1) = use;
  c(1, 0) = std::conj(use);
  c(0, 0) = r(0, 0).real();
  c(1, 1) = r(1, 1).real();
  return c;
}

}  // namespace

void ChannelConfig::validate() const {
  if (n_channels < 1 || n_noise < 1) throw std::invalid_argument("channel config: n_channels and n_noise must be >= 1");
  if (!std::isfinite(snr_db)) throw std::invalid_argument("channel config: snr_db must be finite");
}

void TxCorrelation::validate() const {
  const double scale = std::max(1.0, std::abs(r.trace()));
  if ((r - r.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale) throw NumericalError("tx correlation is not Hermitian");
  Eigen::SelfAdjointEigenSolver<Matrix2c> es(r);
  if (es.eigenvalues().minCoeff() < -1e-12 * scale) throw NumericalError("tx correlation is not positive semidefinite");
}

TxCorrelation tx_correlation(const BasisPair& basis) {
  TxCorrelation t;
  t.r(0, 0) = basis.p_b1;
  t.r(1, 1) = basis.p_b2;
  t.r(0, 1) = basis.cross_corr;
  t.r(1, 0) = std::conj(basis.cross_corr);
  return t;
}

Matrix2c psd_sqrt(const Matrix2c& r) {
  // sqrt(R) = (R + s I) / t with s = sqrt(det R), t = sqrt(tr R + 2 s).
  const double det = std::max(0.0, (r(0, 0) * r(1, 1) - r(0, 1) * r(1, 0)).real());
  const double s = std::sqrt(det);
  const double tr = r(0, 0).real() + r(1, 1).real();
  const double t = std::sqrt(std::max(0.0, tr + 2.0 * s));
  if (t == 0.0) return Matrix2c::Zero();
  Matrix2c out = r;
  out(0, 0) += s;
  out(1, 1) += s;
  return out / t;
}

double bpsk_mutual_information(const Matrix2c& h, double noise_var, std::size_t n_noise, std::uint64_t seed) {
  if (!(noise_var > 0.0)) throw std::invalid_argument("bpsk_mutual_information: noise_var must be positive");
  if (n_noise < 1) throw std::invalid_argument("bpsk_mutual_information: n_noise must be >= 1");
  std::mt19937_64 eng(seed);
  return mi_kernel(h, noise_var, n_noise, eng);
}

CapacityEstimate ergodic_capacity(const TxCorrelation& r_tx, const ChannelConfig& cfg, const ErgodicOptions& opts) {
  cfg.validate();
  r_tx.validate();
  const Matrix2c root = psd_sqrt(canonical(r_tx.r));
  const double amp = std::sqrt(std::pow(10.0, cfg.snr_db / 10.0) / 2.0);

  std::vector<double> samples(cfg.n_channels);
  parallel_for(cfg.n_channels, opts.threads, [&](std::size_t idx) {
    std::mt19937_64 eng(derive_seed(cfg.seed, {idx}));
    std::normal_distribution<double> nd(0.0, 1.0);
    Matrix2c hw;
    for (int r = 0; r < 2; ++r) {
      for (int c = 0; c < 2; ++c) hw(r, c) = complex_normal(eng, nd);
    }
    if (opts.receive_transform) hw = (*opts.receive_transform) * hw;
    const Matrix2c h = amp * hw * root;
    samples[idx] = mi_kernel(h, 1.0, cfg.n_noise, eng);
  });

  double mean = 0.0;
  for (double s : samples) mean += s;
  mean /= static_cast<double>(samples.size());
  double var = 0.0;
  for (double s : samples) var += (s - mean) * (s - mean);
  const double n = static_cast<double>(samples.size());
  CapacityEstimate est;
  est.bits_per_symbol = std::clamp(mean, 0.0, 2.0);
  est.std_error = samples.size() > 1 ? std::sqrt(var / (n - 1.0) / n) : 0.0;
  est.config = cfg;
  return est;
}

CapacityEstimate ideal_reference(const ChannelConfig& cfg, const ErgodicOptions& opts) {
  return ergodic_capacity(TxCorrelation::identity(), cfg, opts);
}

}  // namespace beamspace
