#pragma once

// Far-field patterns sampled on a spherical product grid, plus the basis
// construction used for beam-space multiplexing.

#include <complex>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace beamspace {

using cplx = std::complex<double>;

/// Gauss-Legendre in cos(theta) times a uniform periodic phi axis.
///
/// Samples are stored row-major, theta outer and phi inner. The phi axis
/// starts at -pi with an even number of nodes, so phi -> pi - phi maps the
/// node set onto itself and mirroring is an exact permutation.
class SphericalGrid {
 public:
  /// Gauss-Legendre theta nodes. Throws std::invalid_argument for
  /// n_theta < 2, n_phi < 2 or odd n_phi.
  static SphericalGrid gauss_legendre(std::size_t n_theta, std::size_t n_phi);

  /// Arbitrary strictly increasing theta nodes in (0, pi). If they coincide
  /// with the Gauss-Legendre nodes of the same order (within 1e-9 rad) the
  /// Gauss-Legendre weights are used, otherwise each node gets the cos(theta)
  /// band between its neighbouring midpoints.
  static SphericalGrid from_theta_nodes(std::vector<double> theta_nodes, std::size_t n_phi);

  std::size_t n_theta() const noexcept { return theta_.size(); }
  std::size_t n_phi() const noexcept { return phi_.size(); }
  std::size_t size() const noexcept { return weights_.size(); }

  std::span<const double> theta_nodes() const noexcept { return theta_; }
  std::span<const double> phi_nodes() const noexcept { return phi_; }
  /// Steradians per node, row-major.
  std::span<const double> weights() const noexcept { return weights_; }

  std::size_t index(std::size_t i_theta, std::size_t i_phi) const noexcept {
    return i_theta * phi_.size() + i_phi;
  }

  /// Index of the node at pi - phi.
  std::size_t mirror_phi_index(std::size_t i_phi) const noexcept {
    const std::size_t n = phi_.size();
    return (n / 2 + n - i_phi) % n;
  }

  /// Nearest node to a direction (radians); phi is wrapped first.
  std::size_t nearest_node(double theta, double phi) const;

  double integrate(std::span<const double> values) const;

  bool operator==(const SphericalGrid& other) const = default;

 private:
  SphericalGrid(std::vector<double> theta, std::vector<double> theta_weights, std::size_t n_phi);

  std::vector<double> theta_;
  std::vector<double> phi_;
  std::vector<double> weights_;
};

using GridPtr = std::shared_ptr<const SphericalGrid>;

GridPtr make_grid(std::size_t n_theta, std::size_t n_phi);

/// Default analysis grid.
inline constexpr std::size_t kDefaultThetaNodes = 64;
inline constexpr std::size_t kDefaultPhiNodes = 128;

/// Complex (E_theta, E_phi) samples at one frequency. The normalization is
/// whatever the producer declares; patterns emitted by the network module are
/// scaled so that power() is the fraction of incident power radiated.
struct VectorPattern {
  GridPtr grid;
  std::vector<cplx> e_theta;
  std::vector<cplx> e_phi;
  double frequency = 0.0;

  static VectorPattern zeros(GridPtr grid, double frequency);

  /// Throws std::invalid_argument if samples are not congruent with the grid
  /// or any sample is non-finite.
  void validate() const;
};

enum class MirrorConvention {
  /// Both components remapped by phi -> pi - phi.
  scalar_remap,
  /// Remap plus sign flip of the phi component (reflection of a vector field
  /// in the phi = +-90 deg plane).
  physical,
};

/// True when both patterns live on the same grid (by identity or value) and
/// frequency.
bool compatible(const VectorPattern& a, const VectorPattern& b) noexcept;

/// Sum over nodes of (a_theta conj(b_theta) + a_phi conj(b_phi)) * weight.
cplx inner_product(const VectorPattern& a, const VectorPattern& b);

double power(const VectorPattern& p);

VectorPattern mirror(const VectorPattern& p, MirrorConvention convention = MirrorConvention::physical);

/// sum_k coeffs[k] * patterns[k]; all patterns must be compatible.
VectorPattern linear_combination(std::span<const VectorPattern> patterns, std::span<const cplx> coeffs);

VectorPattern scaled(const VectorPattern& p, cplx factor);

struct BasisPair {
  VectorPattern b1;
  VectorPattern b2;
  double p_b1 = 0.0;
  double p_b2 = 0.0;
  cplx cross_corr{};

  /// |cross_corr| / sqrt(p_b1 p_b2), or 0 when either power vanishes.
  double normalized_cross_correlation() const noexcept;
};

/// b1 = (g2 + g1)/sqrt(2), b2 = (g2 - g1)/sqrt(2).
BasisPair basis_from_states(const VectorPattern& g1, const VectorPattern& g2);

/// (s1 b1 + s2 b2)/sqrt(2); (1, 1) gives g2 and (1, -1) gives g1.
VectorPattern synthesize_total(const BasisPair& basis, cplx s1, cplx s2);

/// |10 log10(p_b1/p_b2)| in dB; empty when either basis power is zero.
std::optional<double> imbalance_db(const BasisPair& basis);

}  // namespace beamspace
