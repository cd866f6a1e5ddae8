#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "beamspace/network.hpp"

namespace beamspace {

/// How imported pattern samples are scaled.
enum class PatternNormalization {
  /// |e|^2 integrates to radiated watts per unit peak port current (the
  /// convention written by this library).
  watts,
  /// r * E in volts per unit peak port current; divided by sqrt(2 eta0).
  volts,
};

struct ImportedAntenna {
  std::filesystem::path touchstone_path;
  /// One pattern CSV per port, in port order.
  std::vector<std::filesystem::path> pattern_paths;
  PatternNormalization normalization = PatternNormalization::watts;
};

PatternNormalization parse_normalization(const std::string& name);
const char* normalization_name(PatternNormalization n);

/// Read S-parameters and per-port patterns into a PortNetwork. Throws
/// IngestionError on malformed files, port-count or frequency mismatches and
/// grid mismatches across ports.
PortNetwork load_imported(const ImportedAntenna& source);

/// Write `net` as <stem>.sNp plus <stem>_port<k>.csv into `dir`; returns the
/// description that load_imported reads back.
ImportedAntenna write_network_files(const PortNetwork& net, const std::filesystem::path& dir,
                                    const std::string& stem = "antenna");

}  // namespace beamspace
