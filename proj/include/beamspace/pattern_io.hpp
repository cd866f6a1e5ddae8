#pragma once

// Pattern-grid CSV files: header
//   freq_hz,theta_deg,phi_deg,re_etheta,im_etheta,re_ephi,im_ephi
// rows ordered by frequency, then theta, then phi. One file per port.

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "beamspace/pattern.hpp"

namespace beamspace {

inline constexpr const char* kPatternCsvHeader = "freq_hz,theta_deg,phi_deg,re_etheta,im_etheta,re_ephi,im_ephi";

/// One block per frequency; every pattern must be on the same grid.
void write_pattern_csv(std::ostream& out, std::span<const VectorPattern> per_frequency);
void write_pattern_csv(const std::filesystem::path& path, std::span<const VectorPattern> per_frequency);

/// Returns one pattern per frequency, all sharing one reconstructed grid.
/// Throws IngestionError naming the offending row (1-based line number).
std::vector<VectorPattern> read_pattern_csv(std::istream& in, const std::string& source = "<stream>");
std::vector<VectorPattern> read_pattern_csv(const std::filesystem::path& path);

}  // namespace beamspace
