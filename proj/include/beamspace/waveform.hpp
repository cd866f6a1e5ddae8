#pragma once

// Time-domain simulation of two BPSK streams multiplexed by pattern
// switching: RRC shaping of the driven stream, load-state sequence from
// s2/s1, transition profiles and Welch PSD estimation.

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "beamspace/pattern.hpp"

namespace beamspace {

struct PulseShape {
  double rolloff = 0.5;
  std::size_t span = 16;  ///< symbols
  std::size_t sps = 16;   ///< samples per symbol

  void validate() const;
};

/// span * sps + 1 taps, evenly symmetric, unit energy.
std::vector<double> rrc_taps(const PulseShape& shape);

enum class TransitionKind { rectangular, raised_cosine_ramp };

struct TransitionProfile {
  TransitionKind kind = TransitionKind::rectangular;
  /// Ramp length in seconds, centred on the symbol boundary; 0 for rectangular.
  double duration = 0.0;

  static TransitionProfile rectangular() { return {}; }
  static TransitionProfile ramp(double seconds) { return {TransitionKind::raised_cosine_ramp, seconds}; }
};

/// State I radiates G1 (s2/s1 = -1), state II radiates G2 (s2/s1 = +1).
enum class LinkState : std::uint8_t { one, two };

/// Throws std::invalid_argument on length mismatch or symbols other than +-1.
std::vector<LinkState> state_sequence(std::span<const int> s1, std::span<const int> s2);

/// Number of adjacent symbol pairs whose state differs.
std::size_t state_transitions(std::span<const LinkState> states);

/// Fraction of symbol transitions that keep the state.
double state_preserving_fraction(std::span<const LinkState> states);

/// Complex pattern value radiated towards the observer in each state.
struct StateValues {
  cplx state_one;
  cplx state_two;
};

enum class Polarization { theta, phi };

/// Values of G1 and G2 at the grid node nearest to (theta, phi) (radians).
StateValues state_values(const VectorPattern& g1, const VectorPattern& g2, double theta, double phi,
                         Polarization pol = Polarization::theta);

struct Envelope {
  std::vector<cplx> samples;
  /// Pattern gain g(t) applied to the shaped stream.
  std::vector<cplx> gain;
  double fs = 0.0;
  std::size_t switch_events = 0;
};

/// y(t) = x1(t) g(t): x1 is the RRC-shaped s1 (full convolution), g blends
/// the state values. Symbol k's state holds from half a symbol before to half
/// a symbol after its pulse peak; ramps blend linearly between the two
/// complex values with a raised-cosine weight centred on the boundary.
Envelope multiplex_timeseries(std::span<const int> s1, std::span<const int> s2, const StateValues& values,
                              const PulseShape& shape, const TransitionProfile& profile, double symbol_rate);

struct SpectrumEstimate {
  /// Baseband offsets in Hz, ascending from -fs/2.
  std::vector<double> freqs;
  /// dB relative to the peak bin.
  std::vector<double> psd_db;
  /// Absolute density of the peak bin in dB (units^2/Hz).
  double peak_db = 0.0;
  /// Equivalent noise bandwidth of the window.
  double resolution_bandwidth = 0.0;
};

/// Welch averaged periodogram with a periodic Hann window. `overlap` is a
/// fraction in [0, 1). Throws std::invalid_argument for a segment longer
/// than the signal or shorter than 2.
SpectrumEstimate psd_estimate(std::span<const cplx> y, double fs, std::size_t segment_length, double overlap = 0.5);

/// Ratios below this are reported as -infinity (zero out-of-band power).
inline constexpr double kOobFloorDb = -200.0;

/// Power beyond +-band_edge over total power, in dB. Throws
/// std::invalid_argument when band_edge is beyond Nyquist.
double oob_power_ratio(const SpectrumEstimate& spec, double band_edge);

/// Independent random +-1 symbols.
std::vector<int> random_bpsk(std::size_t n, std::uint64_t seed);

/// Little-endian interleaved float64 I/Q plus a JSON sidecar (<path>.json)
/// holding fs and length.
void write_envelope(const std::filesystem::path& path, const Envelope& env);

}  // namespace beamspace
