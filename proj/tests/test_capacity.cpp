#include <doctest.h>

#include <cmath>

#include "beamspace/capacity.hpp"
#include "beamspace/error.hpp"
#include "oracles.hpp"

using namespace beamspace;

namespace {
ChannelConfig cfg(double snr, std::size_t nch = 300, std::size_t nn = 64, std::uint64_t seed = 3) {
  ChannelConfig c;
  c.snr_db = snr;
  c.n_channels = nch;
  c.n_noise = nn;
  c.seed = seed;
  return c;
}
}  // namespace

TEST_CASE("noiseless identity channel carries two bits") {
  CHECK(std::abs(bpsk_mutual_information(Matrix2c::Identity() * 100.0, 1.0, 50, 1) - 2.0) < 1e-3);
}

TEST_CASE("rank-one deterministic channel equals the scalar BPSK oracle") {
  for (double snr_db : {0.0, 5.0, 10.0}) {
    const double g = std::pow(10.0, snr_db / 10.0);
    Matrix2c h = Matrix2c::Zero();
    h(0, 0) = std::sqrt(g) * cplx(0.6, 0.8);
    CHECK(std::abs(bpsk_mutual_information(h, 1.0, 20000, 9) - oracle::bpsk_awgn_capacity(g)) < 0.01);
  }
}

TEST_CASE("single-stream ergodic capacity equals the Rayleigh oracle") {
  TxCorrelation r;
  r.r = Matrix2c::Zero();
  r.r(0, 0) = 1.0;
  for (double snr_db : {0.0, 10.0}) {
    const auto est = ergodic_capacity(r, cfg(snr_db, 3000, 64));
    const double ref = oracle::bpsk_rayleigh2_capacity(std::pow(10.0, snr_db / 10.0) / 2.0);
    CHECK(std::abs(est.bits_per_symbol - ref) < 4.0 * est.std_error + 0.005);
    CHECK(est.bits_per_symbol <= 1.0);
  }
}

TEST_CASE("ideal reference saturates and grows with SNR") {
  CHECK(std::abs(ideal_reference(cfg(30.0, 200, 32)).bits_per_symbol - 2.0) < 0.02);
  double prev = 0.0;
  for (double snr : {0.0, 5.0, 10.0, 15.0, 20.0}) {
    const double c = ideal_reference(cfg(snr)).bits_per_symbol;
    CHECK(c >= prev);
    prev = c;
  }
  CHECK(std::abs(ideal_reference(cfg(20.0, 400, 64)).bits_per_symbol - 2.0) < 0.05);
}

TEST_CASE("estimates are deterministic and thread-count independent") {
  TxCorrelation r;
  r.r << 1.2, cplx(0.1, 0.2), cplx(0.1, -0.2), 0.6;
  const auto a = ergodic_capacity(r, cfg(10.0), {1, {}});
  const auto b = ergodic_capacity(r, cfg(10.0), {4, {}});
  CHECK(a.bits_per_symbol == b.bits_per_symbol);
  CHECK(a.std_error == b.std_error);
  CHECK(ergodic_capacity(r, cfg(10.0, 300, 64, 4)).bits_per_symbol != a.bits_per_symbol);
}

TEST_CASE("sign-flipped correlation gives bitwise-identical capacity") {
  TxCorrelation r, d;
  r.r << 1.2, cplx(0.3, 0.2), cplx(0.3, -0.2), 0.6;
  d.r << 1.2, cplx(-0.3, -0.2), cplx(-0.3, 0.2), 0.6;
  CHECK(ergodic_capacity(r, cfg(10.0)).bits_per_symbol == ergodic_capacity(d, cfg(10.0)).bits_per_symbol);
}

TEST_CASE("a unitary receive rotation leaves capacity statistically unchanged") {
  Matrix2c u;
  const double s = std::sqrt(0.5);
  u << s, cplx(0, s), cplx(0, s), s;
  ErgodicOptions opt;
  opt.receive_transform = u;
  const auto a = ideal_reference(cfg(10.0, 800, 64));
  const auto b = ideal_reference(cfg(10.0, 800, 64), opt);
  CHECK(std::abs(a.bits_per_symbol - b.bits_per_symbol) < 4.0 * (a.std_error + b.std_error));
}

TEST_CASE("correlated or lossy transmitters fall below the ideal reference") {
  TxCorrelation r;
  r.r << 0.7, 0.5, 0.5, 0.7;
  const auto c = ergodic_capacity(r, cfg(10.0, 500));
  const auto i = ideal_reference(cfg(10.0, 500));
  CHECK(c.bits_per_symbol < i.bits_per_symbol + 2.0 * (c.std_error + i.std_error));
}

TEST_CASE("psd square root") {
  Matrix2c r;
  r << 2.0, cplx(0.5, 0.5), cplx(0.5, -0.5), 1.0;
  const Matrix2c s = psd_sqrt(r);
  CHECK((s * s - r).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((s - s.adjoint()).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(psd_sqrt(Matrix2c::Zero()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("invalid inputs") {
  TxCorrelation bad;
  bad.r << 1.0, 0.0, 0.0, -1.0;
  CHECK_THROWS_AS(bad.validate(), NumericalError);
  bad.r << 1.0, 0.5, 0.2, 1.0;
  CHECK_THROWS_AS(bad.validate(), NumericalError);
  CHECK_THROWS_AS(ergodic_capacity(TxCorrelation::identity(), cfg(10.0, 0)), std::invalid_argument);
  CHECK_THROWS_AS(bpsk_mutual_information(Matrix2c::Identity(), 0.0, 10, 1), std::invalid_argument);
}
