#pragma once

// Analytic model of a symmetric three-element parallel thin-dipole parasitic
// array: induced-EMF impedances and closed-form element patterns.

#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "beamspace/network.hpp"
#include "beamspace/pattern.hpp"

namespace beamspace {

inline constexpr double kSpeedOfLight = 299792458.0;
/// Free-space wave impedance mu0 * c.
inline constexpr double kEta0 = 376.730313668;

/// Centre element (port 0, driven) at x = 0; parasitics at x = +spacing
/// (port 1) and x = -spacing (port 2). All elements are z-directed.
struct DipoleArraySpec {
  double element_length = 0.0;
  /// Parasitic element length; 0 means "same as element_length".
  double parasitic_length = 0.0;
  double wire_radius = 0.0;
  double spacing = 0.0;
  std::vector<double> frequencies;

  double parasitic_or_element_length() const noexcept {
    return parasitic_length > 0.0 ? parasitic_length : element_length;
  }

  /// Throws std::invalid_argument on hard violations; returns soft warnings
  /// (thin-wire validity, radius above lambda/100 at the highest frequency).
  std::vector<std::string> validate() const;
};

void to_json(nlohmann::json& j, const DipoleArraySpec& spec);
void from_json(const nlohmann::json& j, DipoleArraySpec& spec);

inline constexpr double kDesignFrequency = 1.95e9;

/// Defaults scaled to `f0`: 0.48 lambda elements, 0.25 lambda spacing,
/// 1e-3 lambda radius. An empty frequency list becomes {f0}.
DipoleArraySpec default_dipole_array(double f0 = kDesignFrequency, std::vector<double> frequencies = {});

/// One z-directed dipole of the general builder.
struct DipoleElement {
  double length = 0.0;
  double x = 0.0;
};

/// Induced-EMF impedance between two parallel side-by-side dipoles with
/// sinusoidal currents, referred to their base (feed) currents. For the self
/// term pass the wire radius as `distance`.
cplx induced_emf_impedance(double wavenumber, double length_a, double length_b, double distance);

/// Mutual (i != j) or self (i == j) impedance of the spec's array.
cplx mutual_impedance(const DipoleArraySpec& spec, std::size_t i, std::size_t j, double f);

/// Pattern of element k per unit base current, normalized so the squared
/// magnitude integrates to radiated watts (peak phasors).
VectorPattern element_pattern(const DipoleArraySpec& spec, std::size_t k, const GridPtr& grid, double f);

VectorPattern element_pattern(const DipoleElement& element, const GridPtr& grid, double f);

PortNetwork build_network(const DipoleArraySpec& spec, const GridPtr& grid = make_grid(kDefaultThetaNodes, kDefaultPhiNodes));

/// Arbitrary parallel dipoles along x; used for perturbation studies.
PortNetwork build_network(const std::vector<DipoleElement>& elements, double wire_radius,
                          const std::vector<double>& frequencies, const GridPtr& grid);

std::vector<DipoleElement> elements_of(const DipoleArraySpec& spec);

}  // namespace beamspace
