#include "beamspace/pattern.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "beamspace/error.hpp"

namespace beamspace {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInvSqrt2 = 0.70710678118654752440;

// Gauss-Legendre nodes on [-1, 1] by Newton iteration on P_n, ascending.
void gauss_legendre_nodes(std::size_t n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  const std::size_t half = (n + 1) / 2;
  for (std::size_t i = 0; i < half; ++i) {
    double z = std::cos(kPi * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        const double jj = static_cast<double>(j);
        p0 = ((2.0 * jj + 1.0) * z * p1 - jj * p2) / (jj + 1.0);
      }
      dp = static_cast<double>(n) * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    // Recompute the derivative at the converged node for the weight.
    double p0 = 1.0;
    double p1 = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double p2 = p1;
      p1 = p0;
      const double jj = static_cast<double>(j);
      p0 = ((2.0 * jj + 1.0) * z * p1 - jj * p2) / (jj + 1.0);
    }
    dp = static_cast<double>(n) * (z * p0 - p1) / (z * z - 1.0);
    const double weight = 2.0 / ((1.0 - z * z) * dp * dp);
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = weight;
    w[n - 1 - i] = weight;
  }
  if (n % 2 == 1) x[n / 2] = 0.0;
}

void require_compatible(const VectorPattern& a, const VectorPattern& b, const char* op) {
  if (!compatible(a, b)) {
    throw std::invalid_argument(std::string(op) + ": patterns do not share a grid and frequency");
  }
}

}  // namespace

SphericalGrid::SphericalGrid(std::vector<double> theta, std::vector<double> theta_weights, std::size_t n_phi)
    : theta_(std::move(theta)) {
  const double dphi = 2.0 * kPi / static_cast<double>(n_phi);
  phi_.resize(n_phi);
  for (std::size_t j = 0; j < n_phi; ++j) phi_[j] = -kPi + static_cast<double>(j) * dphi;
  weights_.resize(theta_.size() * n_phi);
  for (std::size_t i = 0; i < theta_.size(); ++i) {
    for (std::size_t j = 0; j < n_phi; ++j) weights_[i * n_phi + j] = theta_weights[i] * dphi;
  }
}

SphericalGrid SphericalGrid::gauss_legendre(std::size_t n_theta, std::size_t n_phi) {
  if (n_theta < 2 || n_phi < 2) throw std::invalid_argument("make_grid: need n_theta >= 2 and n_phi >= 2");
  if (n_phi % 2 != 0) {
    throw std::invalid_argument("make_grid: n_phi must be even so that phi -> pi - phi permutes nodes");
  }
  std::vector<double> x;
  std::vector<double> w;
  gauss_legendre_nodes(n_theta, x, w);
  // x ascending means theta descending; flip so theta ascends.
  std::vector<double> theta(n_theta);
  std::vector<double> tw(n_theta);
  for (std::size_t i = 0; i < n_theta; ++i) {
    theta[i] = std::acos(x[n_theta - 1 - i]);
    tw[i] = w[n_theta - 1 - i];
  }
  return SphericalGrid(std::move(theta), std::move(tw), n_phi);
}

SphericalGrid SphericalGrid::from_theta_nodes(std::vector<double> theta_nodes, std::size_t n_phi) {
  const std::size_t n = theta_nodes.size();
  if (n < 2 || n_phi < 2 || n_phi % 2 != 0) {
    throw std::invalid_argument("grid: need >= 2 theta nodes and an even number (>= 2) of phi nodes");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!(theta_nodes[i] > 0.0 && theta_nodes[i] < kPi)) {
      throw std::invalid_argument("grid: theta nodes must lie strictly inside (0, pi)");
    }
    if (i > 0 && !(theta_nodes[i] > theta_nodes[i - 1])) {
      throw std::invalid_argument("grid: theta nodes must be strictly increasing");
    }
  }
  SphericalGrid gl = gauss_legendre(n, n_phi);
  bool is_gl = true;
  for (std::size_t i = 0; i < n && is_gl; ++i) is_gl = std::abs(gl.theta_[i] - theta_nodes[i]) < 1e-9;
  if (is_gl) return gl;

  std::vector<double> tw(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double lo = i == 0 ? 0.0 : 0.5 * (theta_nodes[i - 1] + theta_nodes[i]);
    const double hi = i + 1 == n ? kPi : 0.5 * (theta_nodes[i] + theta_nodes[i + 1]);
    tw[i] = std::cos(lo) - std::cos(hi);
  }
  return SphericalGrid(std::move(theta_nodes), std::move(tw), n_phi);
}

std::size_t SphericalGrid::nearest_node(double theta, double phi) const {
  const double wrapped = phi - 2.0 * kPi * std::floor((phi + kPi) / (2.0 * kPi));
  std::size_t it = 0;
  for (std::size_t i = 1; i < theta_.size(); ++i) {
    if (std::abs(theta_[i] - theta) < std::abs(theta_[it] - theta)) it = i;
  }
  const double dphi = 2.0 * kPi / static_cast<double>(phi_.size());
  const auto ip = static_cast<std::size_t>(std::llround((wrapped + kPi) / dphi)) % phi_.size();
  return index(it, ip);
}

double SphericalGrid::integrate(std::span<const double> values) const {
  if (values.size() != weights_.size()) throw std::invalid_argument("integrate: sample count does not match grid");
  double acc = 0.0;
  for (std::size_t k = 0; k < values.size(); ++k) acc += values[k] * weights_[k];
  return acc;
}

GridPtr make_grid(std::size_t n_theta, std::size_t n_phi) {
  return std::make_shared<const SphericalGrid>(SphericalGrid::gauss_legendre(n_theta, n_phi));
}

VectorPattern VectorPattern::zeros(GridPtr grid, double frequency) {
  VectorPattern p;
  const std::size_t n = grid->size();
  p.grid = std::move(grid);
  p.e_theta.assign(n, cplx{});
  p.e_phi.assign(n, cplx{});
  p.frequency = frequency;
  return p;
}

void VectorPattern::validate() const {
  if (!grid) throw std::invalid_argument("pattern: missing grid");
  if (e_theta.size() != grid->size() || e_phi.size() != grid->size()) {
    throw std::invalid_argument("pattern: sample arrays are not congruent with the grid");
  }
  const auto finite = [](const cplx& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); };
  if (!std::all_of(e_theta.begin(), e_theta.end(), finite) || !std::all_of(e_phi.begin(), e_phi.end(), finite)) {
    throw std::invalid_argument("pattern: non-finite sample");
  }
}

bool compatible(const VectorPattern& a, const VectorPattern& b) noexcept {
  if (!a.grid || !b.grid) return false;
  if (a.frequency != b.frequency) return false;
  return a.grid == b.grid || *a.grid == *b.grid;
}

cplx inner_product(const VectorPattern& a, const VectorPattern& b) {
  require_compatible(a, b, "inner_product");
  const auto w = a.grid->weights();
  double re = 0.0;
  double im = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) {
    const cplx t = a.e_theta[k] * std::conj(b.e_theta[k]) + a.e_phi[k] * std::conj(b.e_phi[k]);
    re += t.real() * w[k];
    im += t.imag() * w[k];
  }
  return {re, im};
}

double power(const VectorPattern& p) {
  const auto w = p.grid->weights();
  double acc = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) acc += (std::norm(p.e_theta[k]) + std::norm(p.e_phi[k])) * w[k];
  return acc;
}

VectorPattern mirror(const VectorPattern& p, MirrorConvention convention) {
  const SphericalGrid& g = *p.grid;
  if (g.n_phi() % 2 != 0) throw std::invalid_argument("mirror: grid is not closed under phi -> pi - phi");
  VectorPattern out = VectorPattern::zeros(p.grid, p.frequency);
  const double sign = convention == MirrorConvention::physical ? -1.0 : 1.0;
  for (std::size_t i = 0; i < g.n_theta(); ++i) {
    for (std::size_t j = 0; j < g.n_phi(); ++j) {
      const std::size_t src = g.index(i, g.mirror_phi_index(j));
      const std::size_t dst = g.index(i, j);
      out.e_theta[dst] = p.e_theta[src];
      out.e_phi[dst] = sign * p.e_phi[src];
    }
  }
  return out;
}

VectorPattern linear_combination(std::span<const VectorPattern> patterns, std::span<const cplx> coeffs) {
  if (patterns.empty() || patterns.size() != coeffs.size()) {
    throw std::invalid_argument("linear_combination: need matching, nonempty pattern and coefficient lists");
  }
  for (std::size_t k = 1; k < patterns.size(); ++k) require_compatible(patterns[0], patterns[k], "linear_combination");
  VectorPattern out = VectorPattern::zeros(patterns[0].grid, patterns[0].frequency);
  for (std::size_t k = 0; k < patterns.size(); ++k) {
    const cplx c = coeffs[k];
    const auto& src = patterns[k];
    for (std::size_t n = 0; n < out.e_theta.size(); ++n) {
      out.e_theta[n] += c * src.e_theta[n];
      out.e_phi[n] += c * src.e_phi[n];
    }
  }
  return out;
}

VectorPattern scaled(const VectorPattern& p, cplx factor) {
  VectorPattern out = p;
  for (auto& v : out.e_theta) v *= factor;
  for (auto& v : out.e_phi) v *= factor;
  return out;
}

double BasisPair::normalized_cross_correlation() const noexcept {
  if (p_b1 <= 0.0 || p_b2 <= 0.0) return 0.0;
  return std::abs(cross_corr) / std::sqrt(p_b1 * p_b2);
}

BasisPair basis_from_states(const VectorPattern& g1, const VectorPattern& g2) {
  require_compatible(g1, g2, "basis_from_states");
  BasisPair basis;
  basis.b1 = VectorPattern::zeros(g1.grid, g1.frequency);
  basis.b2 = VectorPattern::zeros(g1.grid, g1.frequency);
  for (std::size_t n = 0; n < g1.e_theta.size(); ++n) {
    basis.b1.e_theta[n] = (g2.e_theta[n] + g1.e_theta[n]) * kInvSqrt2;
    basis.b1.e_phi[n] = (g2.e_phi[n] + g1.e_phi[n]) * kInvSqrt2;
    basis.b2.e_theta[n] = (g2.e_theta[n] - g1.e_theta[n]) * kInvSqrt2;
    basis.b2.e_phi[n] = (g2.e_phi[n] - g1.e_phi[n]) * kInvSqrt2;
  }
  basis.p_b1 = power(basis.b1);
  basis.p_b2 = power(basis.b2);
  basis.cross_corr = inner_product(basis.b1, basis.b2);
  return basis;
}

VectorPattern synthesize_total(const BasisPair& basis, cplx s1, cplx s2) {
  require_compatible(basis.b1, basis.b2, "synthesize_total");
  VectorPattern out = VectorPattern::zeros(basis.b1.grid, basis.b1.frequency);
  for (std::size_t n = 0; n < out.e_theta.size(); ++n) {
    out.e_theta[n] = (s1 * basis.b1.e_theta[n] + s2 * basis.b2.e_theta[n]) * kInvSqrt2;
    out.e_phi[n] = (s1 * basis.b1.e_phi[n] + s2 * basis.b2.e_phi[n]) * kInvSqrt2;
  }
  return out;
}

std::optional<double> imbalance_db(const BasisPair& basis) {
  if (!(basis.p_b1 > 0.0) || !(basis.p_b2 > 0.0)) return std::nullopt;
  return std::abs(10.0 * std::log10(basis.p_b1 / basis.p_b2));
}

}  // namespace beamspace
