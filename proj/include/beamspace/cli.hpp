#pragma once

// Batch front-end: JSON run configs in, plot-ready CSV/JSON out.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "beamspace/capacity.hpp"
#include "beamspace/dipole_array.hpp"
#include "beamspace/imported_antenna.hpp"
#include "beamspace/load_optimizer.hpp"
#include "beamspace/network.hpp"
#include "beamspace/waveform.hpp"

namespace beamspace::cli {

inline constexpr const char* kArtifactName = "beamspace";
inline constexpr const char* kVersion = BEAMSPACE_VERSION;

struct WaveformConfig {
  double symbol_rate = 500e3;
  PulseShape shape{0.5, 16, 16};
  std::size_t symbols = 1u << 14;
  std::size_t segment = 4096;
  double overlap = 0.5;
  std::vector<double> ramp_fractions{0.0, 0.1, 0.25, 0.5};
  double theta_deg = 90.0;
  double phi_deg = 0.0;
  double band_edge = 500e3;
  bool dump_envelope = false;
};

struct SweepConfig {
  double x_min = -400.0;
  double x_max = 400.0;
  std::size_t points = 41;
  unsigned refine = 0;
  double series_resistance = 0.0;
  std::vector<std::size_t> subbands{1, 2, 3};
  /// Extra fixed load pairs evaluated next to the optimum (diode fixture by default).
  std::vector<LoadState> fixed_loads{diode_fixture()};
};

/// Validated run configuration. Exactly one antenna source; the seed is
/// mandatory and never defaulted from a clock.
struct RunConfig {
  std::optional<DipoleArraySpec> analytic;
  std::optional<ImportedAntenna> imported;
  std::size_t n_theta = kDefaultThetaNodes;
  std::size_t n_phi = kDefaultPhiNodes;
  /// Analysis frequencies; empty means every antenna frequency.
  std::vector<double> frequencies;
  LoadState loads = diode_fixture();
  std::vector<double> snr_db{10.0, 20.0};
  std::size_t n_channels = 500;
  std::size_t n_noise = 64;
  bool ideal = false;
  SweepConfig sweep;
  WaveformConfig waveform;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  /// Effective configuration (input plus seed), echoed into sidecars.
  nlohmann::json echo;
};

/// Parse and validate. `base_dir` resolves relative file paths. A sidecar
/// written by a previous run is accepted in place of a config. Throws
/// ConfigError with a field-level message.
RunConfig parse_config(const nlohmann::json& input, std::optional<std::uint64_t> seed_override,
                       const std::filesystem::path& base_dir = ".");

/// Build or ingest the configured antenna.
PortNetwork load_antenna(const RunConfig& cfg);

/// Each command writes its files plus a <file>.json sidecar and returns the
/// written paths.
std::vector<std::filesystem::path> cmd_model(const RunConfig& cfg, const std::filesystem::path& out);
std::vector<std::filesystem::path> cmd_analyze(const RunConfig& cfg, const std::filesystem::path& out);
std::vector<std::filesystem::path> cmd_capacity(const RunConfig& cfg, const std::filesystem::path& out);
std::vector<std::filesystem::path> cmd_optimize(const RunConfig& cfg, const std::filesystem::path& out);
std::vector<std::filesystem::path> cmd_spectrum(const RunConfig& cfg, const std::filesystem::path& out);

/// Full entry point. Exit codes: 0 ok, 1 config, 2 ingestion, 3 numerical
/// degeneracy, 4 internal.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace beamspace::cli
