#include "beamspace/waveform.hpp"

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <mutex>
#include <nlohmann/json.hpp>
#include <numbers>
#include <random>
#include <stdexcept>

#include "beamspace/error.hpp"

namespace beamspace {

namespace {

constexpr double kPi = std::numbers::pi;

// The FFTW planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

double rrc_value(double t, double beta) {
  if (t == 0.0) return 1.0 - beta + 4.0 * beta / kPi;
  if (beta > 0.0 && std::abs(std::abs(4.0 * beta * t) - 1.0) < 1e-12) {
    const double a = kPi / (4.0 * beta);
    return beta / std::numbers::sqrt2 * ((1.0 + 2.0 / kPi) * std::sin(a) + (1.0 - 2.0 / kPi) * std::cos(a));
  }
  const double num = std::sin(kPi * t * (1.0 - beta)) + 4.0 * beta * t * std::cos(kPi * t * (1.0 + beta));
  const double den = kPi * t * (1.0 - (4.0 * beta * t) * (4.0 * beta * t));
  return num / den;
}

}  // namespace

void PulseShape::validate() const {
  if (!(rolloff >= 0.0 && rolloff <= 1.0)) throw std::invalid_argument("pulse shape: rolloff must lie in [0, 1]");
  if (span < 1 || sps < 1) throw std::invalid_argument("pulse shape: span and sps must be >= 1");
}

std::vector<double> rrc_taps(const PulseShape& shape) {
  shape.validate();
  const std::size_t n = shape.span * shape.sps + 1;
  const std::size_t centre = n / 2;
  std::vector<double> taps(n);
  for (std::size_t i = 0; i <= centre; ++i) {
    const double t = (static_cast<double>(i) - static_cast<double>(centre)) / static_cast<double>(shape.sps);
    taps[i] = rrc_value(t, shape.rolloff);
    taps[n - 1 - i] = taps[i];
  }
  double energy = 0.0;
  for (double v : taps) energy += v * v;
  const double scale = 1.0 / std::sqrt(energy);
  for (double& v : taps) v *= scale;
  return taps;
}

std::vector<LinkState> state_sequence(std::span<const int> s1, std::span<const int> s2) {
  if (s1.size() != s2.size()) throw std::invalid_argument("state_sequence: streams differ in length");
  std::vector<LinkState> out(s1.size());
  for (std::size_t k = 0; k < s1.size(); ++k) {
    if ((s1[k] != 1 && s1[k] != -1) || (s2[k] != 1 && s2[k] != -1)) {
      throw std::invalid_argument("state_sequence: symbols must be +1 or -1");
    }
    out[k] = s1[k] * s2[k] > 0 ? LinkState::two : LinkState::one;
  }
  return out;
}

std::size_t state_transitions(std::span<const LinkState> states) {
  std::size_t n = 0;
  for (std::size_t k = 1; k < states.size(); ++k) n += states[k] != states[k - 1] ? 1 : 0;
  return n;
}

double state_preserving_fraction(std::span<const LinkState> states) {
  if (states.size() < 2) return 1.0;
  const double pairs = static_cast<double>(states.size() - 1);
  return (pairs - static_cast<double>(state_transitions(states))) / pairs;
}

StateValues state_values(const VectorPattern& g1, const VectorPattern& g2, double theta, double phi, Polarization pol) {
  if (!compatible(g1, g2)) throw std::invalid_argument("state_values: patterns do not share a grid");
  const std::size_t node = g1.grid->nearest_node(theta, phi);
  if (pol == Polarization::theta) return {g1.e_theta[node], g2.e_theta[node]};
  return {g1.e_phi[node], g2.e_phi[node]};
}

Envelope multiplex_timeseries(std::span<const int> s1, std::span<const int> s2, const StateValues& values,
                              const PulseShape& shape, const TransitionProfile& profile, double symbol_rate) {
  if (!(symbol_rate > 0.0)) throw std::invalid_argument("multiplex: symbol rate must be positive");
  const auto states = state_sequence(s1, s2);
  if (states.empty()) throw std::invalid_argument("multiplex: empty symbol streams");
  const double symbol_period = 1.0 / symbol_rate;
  if (profile.kind == TransitionKind::raised_cosine_ramp && !(profile.duration >= 0.0 && profile.duration < symbol_period)) {
    throw std::invalid_argument("multiplex: ramp duration must be shorter than a symbol period");
  }

  const auto taps = rrc_taps(shape);
  const std::size_t sps = shape.sps;
  const std::size_t n_sym = states.size();
  const std::size_t n_out = n_sym * sps + taps.size() - 1;

  Envelope env;
  env.fs = symbol_rate * static_cast<double>(sps);
  env.samples.assign(n_out, cplx{});
  env.gain.assign(n_out, cplx{});
  env.switch_events = state_transitions(states);

  std::vector<double> shaped(n_out, 0.0);
  for (std::size_t k = 0; k < n_sym; ++k) {
    const double a = static_cast<double>(s1[k]);
    const std::size_t base = k * sps;
    for (std::size_t i = 0; i < taps.size(); ++i) shaped[base + i] += a * taps[i];
  }

  const auto value = [&](LinkState s) { return s == LinkState::one ? values.state_one : values.state_two; };
  const double delay = static_cast<double>(taps.size() / 2);
  const double sps_d = static_cast<double>(sps);
  const double ramp = profile.kind == TransitionKind::raised_cosine_ramp ? profile.duration * env.fs : 0.0;

  for (std::size_t n = 0; n < n_out; ++n) {
    const double t = static_cast<double>(n);
    // Symbol k owns [k sps + delay - sps/2, (k + 1) sps + delay - sps/2).
    const double pos = (t - delay + 0.5 * sps_d) / sps_d;
    const auto k = static_cast<std::ptrdiff_t>(std::floor(pos));
    const std::size_t kc = static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(k, 0, static_cast<std::ptrdiff_t>(n_sym) - 1));
    cplx g = value(states[kc]);
    if (ramp > 0.0) {
      // Nearest interior boundary b_j between symbols j - 1 and j.
      const auto j = static_cast<std::ptrdiff_t>(std::llround(pos));
      if (j >= 1 && j < static_cast<std::ptrdiff_t>(n_sym)) {
        const auto ju = static_cast<std::size_t>(j);
        const double boundary = static_cast<double>(ju) * sps_d + delay - 0.5 * sps_d;
        const double offset = t - boundary;
        if (states[ju] != states[ju - 1] && std::abs(offset) < 0.5 * ramp) {
          const double w = 0.5 * (1.0 - std::cos(kPi * (offset + 0.5 * ramp) / ramp));
          g = (1.0 - w) * value(states[ju - 1]) + w * value(states[ju]);
        }
      }
    }
    env.gain[n] = g;
    env.samples[n] = shaped[n] * g;
  }
  return env;
}

SpectrumEstimate psd_estimate(std::span<const cplx> y, double fs, std::size_t segment_length, double overlap) {
  if (segment_length < 2) throw std::invalid_argument("psd_estimate: segment length must be >= 2");
  if (segment_length > y.size()) throw std::invalid_argument("psd_estimate: segment longer than the signal");
  if (!(overlap >= 0.0 && overlap < 1.0)) throw std::invalid_argument("psd_estimate: overlap must lie in [0, 1)");
  if (!(fs > 0.0)) throw std::invalid_argument("psd_estimate: sample rate must be positive");

  const std::size_t L = segment_length;
  const std::size_t step = std::max<std::size_t>(1, L - static_cast<std::size_t>(std::floor(overlap * static_cast<double>(L))));
  const std::size_t n_seg = (y.size() - L) / step + 1;

  std::vector<double> window(L);
  double w_sum = 0.0;
  double w_sq = 0.0;
  for (std::size_t i = 0; i < L; ++i) {
    window[i] = 0.5 - 0.5 * std::cos(2.0 * kPi * static_cast<double>(i) / static_cast<double>(L));
    w_sum += window[i];
    w_sq += window[i] * window[i];
  }

  auto* buf = reinterpret_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * L));
  if (buf == nullptr) throw std::bad_alloc();
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft_1d(static_cast<int>(L), buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
  }

  std::vector<double> acc(L, 0.0);
  for (std::size_t s = 0; s < n_seg; ++s) {
    const std::size_t start = s * step;
    for (std::size_t i = 0; i < L; ++i) {
      const cplx v = y[start + i] * window[i];
      buf[i][0] = v.real();
      buf[i][1] = v.imag();
    }
    fftw_execute(plan);
    for (std::size_t i = 0; i < L; ++i) acc[i] += buf[i][0] * buf[i][0] + buf[i][1] * buf[i][1];
  }
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  fftw_free(buf);

  SpectrumEstimate est;
  est.freqs.resize(L);
  est.psd_db.resize(L);
  const double norm = 1.0 / (fs * w_sq * static_cast<double>(n_seg));
  std::vector<double> density(L);
  // Reorder bins so frequencies ascend from -fs/2.
  const std::size_t half = L / 2;
  for (std::size_t i = 0; i < L; ++i) {
    const std::size_t bin = (i + L - half) % L;
    const double f_index = static_cast<double>(i) - static_cast<double>(half);
    est.freqs[i] = f_index * fs / static_cast<double>(L);
    density[i] = acc[bin] * norm;
  }
  double peak = 0.0;
  for (double d : density) peak = std::max(peak, d);
  const double floor = std::numeric_limits<double>::min();
  for (std::size_t i = 0; i < L; ++i) est.psd_db[i] = 10.0 * std::log10(std::max(density[i], floor) / std::max(peak, floor));
  est.peak_db = 10.0 * std::log10(std::max(peak, floor));
  est.resolution_bandwidth = fs * w_sq / (w_sum * w_sum);
  return est;
}

double oob_power_ratio(const SpectrumEstimate& spec, double band_edge) {
  if (spec.freqs.size() < 2) throw std::invalid_argument("oob_power_ratio: empty spectrum");
  const double nyquist = -spec.freqs.front();
  if (!(band_edge >= 0.0) || band_edge >= nyquist) throw std::invalid_argument("oob_power_ratio: band edge beyond Nyquist");
  double total = 0.0;
  double outside = 0.0;
  for (std::size_t i = 0; i < spec.freqs.size(); ++i) {
    const double p = std::pow(10.0, spec.psd_db[i] / 10.0);
    total += p;
    if (std::abs(spec.freqs[i]) > band_edge) outside += p;
  }
  if (total <= 0.0) throw std::invalid_argument("oob_power_ratio: spectrum carries no power");
  const double ratio_db = outside > 0.0 ? 10.0 * std::log10(outside / total) : -std::numeric_limits<double>::infinity();
  return ratio_db < kOobFloorDb ? -std::numeric_limits<double>::infinity() : ratio_db;
}

std::vector<int> random_bpsk(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 eng(seed);
  std::vector<int> out(n);
  for (auto& s : out) s = (eng() >> 63) != 0 ? 1 : -1;
  return out;
}

void write_envelope(const std::filesystem::path& path, const Envelope& env) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IngestionError(path.string() + ": cannot open for writing");
  for (const cplx& v : env.samples) {
    for (double part : {v.real(), v.imag()}) {
      auto bits = std::bit_cast<std::uint64_t>(part);
      if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
      char bytes[8];
      std::memcpy(bytes, &bits, 8);
      out.write(bytes, 8);
    }
  }
  nlohmann::json side = {{"fs", env.fs}, {"length", env.samples.size()}, {"format", "float64 little-endian interleaved I/Q"}};
  std::ofstream js(path.string() + ".json");
  js << side.dump(2) << "\n";
}

}  // namespace beamspace
