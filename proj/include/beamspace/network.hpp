#pragma once

// N-port impedance algebra and reduction of a loaded multi-port antenna to
// its single driven port.

#include <Eigen/Dense>
#include <complex>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "beamspace/pattern.hpp"

namespace beamspace {

using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

/// S = (Z - z_ref I)(Z + z_ref I)^-1. Throws NumericalError when
/// (Z + z_ref I) is singular.
ComplexMatrix z_to_s(const ComplexMatrix& z, double z_ref);
/// Z = z_ref (I + S)(I - S)^-1. Throws NumericalError when (I - S) is singular.
ComplexMatrix s_to_z(const ComplexMatrix& s, double z_ref);

/// Per-frequency impedance matrices plus embedded port patterns. Port
/// patterns are radiated by unit (peak) port current with every other port
/// open-circuited, scaled so that |pattern|^2 integrates to watts.
struct PortNetwork {
  std::vector<double> frequencies;
  std::vector<ComplexMatrix> z_matrices;
  /// port_patterns[f][k]; may be empty when only circuit data is available.
  std::vector<std::vector<VectorPattern>> port_patterns;
  double z_ref = 50.0;
  /// Free-form provenance string (generator parameters or source files).
  std::string provenance;

  std::size_t port_count() const;
  /// Index of an exactly listed frequency (nearest sample within 1e-9
  /// relative). Throws std::invalid_argument if absent.
  std::size_t frequency_index(double f) const;
  bool has_patterns() const noexcept { return !port_patterns.empty(); }

  /// Throws std::invalid_argument on shape or reciprocity violations
  /// (symmetry tolerance 1e-9 relative).
  void validate() const;
};

/// Complex terminations of the passive ports, in passive-port order (the
/// active port removed).
struct LoadState {
  std::vector<cplx> loads;

  /// Throws std::invalid_argument when any Re(load) < 0.
  void validate() const;
  LoadState swapped() const;

  static LoadState reactive(double x1, double x2, double series_resistance = 0.0) {
    return LoadState{{cplx(series_resistance, x1), cplx(series_resistance, x2)}};
  }
};

/// Forward-biased and reverse-biased p-i-n diode impedances measured at
/// 1.95 GHz.
inline constexpr cplx kDiodeForward{1.9, 17.0};
inline constexpr cplx kDiodeReverse{35.4, -407.0};
inline LoadState diode_fixture() { return LoadState{{kDiodeForward, kDiodeReverse}}; }

struct DrivenSolution {
  double frequency = 0.0;
  cplx z_in{};
  cplx gamma{};
  /// All port currents for unit active-port current.
  ComplexVector port_currents;
  /// Radiated field for unit incident power; empty grid when the network
  /// has no patterns.
  VectorPattern pattern;
  /// Fractions of incident power. p_rad is the quadrature power of
  /// `pattern` when the network carries patterns, otherwise the circuit
  /// balance 1 - |gamma|^2 - p_load.
  double p_rad = 0.0;
  double p_load = 0.0;
  double p_mismatch = 0.0;
};

/// Condition number above which the passive block counts as singular.
inline constexpr double kMaxLoadBlockCondition = 1e12;

/// Terminate every port except `active_port` with `loads` and solve for the
/// driven-port response at the sampled frequency `f`.
DrivenSolution reduce_loaded(const PortNetwork& net, double f, const LoadState& loads, std::size_t active_port = 0);

/// -20 log10|gamma|; +infinity for a perfect match.
double return_loss_db(const DrivenSolution& sol);

enum class SymmetryCheck { enforce, skip };

/// Largest tolerated exchange asymmetry before state_pair refuses a network.
inline constexpr double kExchangeSymmetryTolerance = 1e-9;

/// Solve a load state and its port-exchanged twin. Throws std::invalid_argument
/// unless state_b is state_a with the two passive loads exchanged; with
/// SymmetryCheck::enforce, throws NumericalError when the network itself is
/// not exchange-symmetric (the two states would then not be mirror images).
std::pair<DrivenSolution, DrivenSolution> state_pair(const PortNetwork& net, double f, const LoadState& state_a,
                                                     const LoadState& state_b, std::size_t active_port = 0,
                                                     SymmetryCheck check = SymmetryCheck::enforce);

/// Relative asymmetry of the network under exchange of the two passive
/// ports (max entry deviation of P Z P from Z over max |Z|).
double exchange_asymmetry(const PortNetwork& net, std::size_t f_index, std::size_t active_port = 0);

}  // namespace beamspace
