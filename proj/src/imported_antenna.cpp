#include "beamspace/imported_antenna.hpp"

#include <cmath>
#include <sstream>

#include "beamspace/dipole_array.hpp"
#include "beamspace/error.hpp"
#include "beamspace/pattern_io.hpp"
#include "beamspace/touchstone.hpp"

namespace beamspace {

PatternNormalization parse_normalization(const std::string& name) {
  if (name == "watts") return PatternNormalization::watts;
  if (name == "volts") return PatternNormalization::volts;
  throw ConfigError("unknown pattern normalization '" + name + "' (expected 'watts' or 'volts')");
}

const char* normalization_name(PatternNormalization n) {
  return n == PatternNormalization::volts ? "volts" : "watts";
}

PortNetwork load_imported(const ImportedAntenna& source) {
  const TouchstoneData ts = read_touchstone(source.touchstone_path);
  if (source.pattern_paths.size() != ts.ports) {
    throw IngestionError(source.touchstone_path.string() + ": " + std::to_string(ts.ports) + "-port network needs " +
                         std::to_string(ts.ports) + " pattern files, got " + std::to_string(source.pattern_paths.size()));
  }

  PortNetwork net;
  net.frequencies = ts.frequencies;
  net.z_ref = ts.z_ref;
  try {
    net.z_matrices = touchstone_to_z(ts);
  } catch (const NumericalError& e) {
    throw IngestionError(source.touchstone_path.string() + ": " + e.what());
  }

  const double scale = source.normalization == PatternNormalization::volts ? 1.0 / std::sqrt(2.0 * kEta0) : 1.0;
  std::vector<std::vector<VectorPattern>> per_port;
  for (const auto& path : source.pattern_paths) {
    auto patterns = read_pattern_csv(path);
    if (patterns.size() != net.frequencies.size()) {
      throw IngestionError(path.string() + ": " + std::to_string(patterns.size()) + " frequencies, Touchstone has " +
                           std::to_string(net.frequencies.size()));
    }
    for (std::size_t fi = 0; fi < patterns.size(); ++fi) {
      const double f = net.frequencies[fi];
      if (std::abs(patterns[fi].frequency - f) > 1e-9 * f) {
        throw IngestionError(path.string() + ": frequency " + std::to_string(patterns[fi].frequency) +
                             " Hz does not match Touchstone frequency " + std::to_string(f) + " Hz");
      }
      patterns[fi].frequency = f;
      if (scale != 1.0) patterns[fi] = scaled(patterns[fi], scale);
    }
    if (!per_port.empty() && !(*patterns.front().grid == *per_port.front().front().grid)) {
      throw IngestionError(path.string() + ": pattern grid differs from " + source.pattern_paths.front().string());
    }
    if (!per_port.empty()) {
      // Share one grid object across ports.
      for (auto& p : patterns) p.grid = per_port.front().front().grid;
    }
    per_port.push_back(std::move(patterns));
  }

  net.port_patterns.resize(net.frequencies.size());
  for (std::size_t fi = 0; fi < net.frequencies.size(); ++fi) {
    for (auto& port : per_port) net.port_patterns[fi].push_back(std::move(port[fi]));
  }

  std::ostringstream prov;
  prov << "imported: " << source.touchstone_path.string();
  for (const auto& p : source.pattern_paths) prov << ", " << p.string();
  prov << " (" << normalization_name(source.normalization) << ")";
  net.provenance = prov.str();

  try {
    net.validate();
  } catch (const std::invalid_argument& e) {
    throw IngestionError(std::string("imported network: ") + e.what());
  }
  return net;
}

ImportedAntenna write_network_files(const PortNetwork& net, const std::filesystem::path& dir, const std::string& stem) {
  ImportedAntenna out;
  const std::size_t n = net.port_count();
  out.touchstone_path = dir / (stem + ".s" + std::to_string(n) + "p");
  write_touchstone(out.touchstone_path, touchstone_from_network(net));
  for (std::size_t k = 0; k < n && net.has_patterns(); ++k) {
    std::vector<VectorPattern> per_freq;
    for (const auto& set : net.port_patterns) per_freq.push_back(set[k]);
    const auto path = dir / (stem + "_port" + std::to_string(k) + ".csv");
    write_pattern_csv(path, per_freq);
    out.pattern_paths.push_back(path);
  }
  return out;
}

}  // namespace beamspace
