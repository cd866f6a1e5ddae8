#pragma once

// Touchstone v1 (.sNp) reading and writing for S-parameter data.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "beamspace/network.hpp"

namespace beamspace {

enum class TouchstoneFormat { ri, ma, db };

struct TouchstoneData {
  std::size_t ports = 0;
  /// Frequencies in Hz.
  std::vector<double> frequencies;
  std::vector<ComplexMatrix> s;
  double z_ref = 50.0;
  /// Unit and number format used when the data was read (and the defaults
  /// for writing).
  std::string unit = "Hz";
  TouchstoneFormat format = TouchstoneFormat::ri;
};

/// Parse a Touchstone v1 stream for an `ports`-port network (1..4).
/// Throws IngestionError naming the offending line.
TouchstoneData read_touchstone(std::istream& in, std::size_t ports, const std::string& source = "<stream>");

/// Port count is taken from the .sNp extension.
TouchstoneData read_touchstone(const std::filesystem::path& path);

/// Numbers are written with 17 significant digits, so RI data read back is
/// bit-identical (frequencies too when unit is Hz).
void write_touchstone(std::ostream& out, const TouchstoneData& data);
void write_touchstone(const std::filesystem::path& path, const TouchstoneData& data);

/// Convert S data to impedance matrices (one per frequency).
std::vector<ComplexMatrix> touchstone_to_z(const TouchstoneData& data);
/// S data of a network's Z matrices in RI format, unit Hz.
TouchstoneData touchstone_from_network(const PortNetwork& net);

}  // namespace beamspace
