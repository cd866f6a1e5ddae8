#include "beamspace/network.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "beamspace/error.hpp"

namespace beamspace {

namespace {

void require_square(const ComplexMatrix& m, const char* op) {
  if (m.rows() != m.cols() || m.rows() == 0) throw std::invalid_argument(std::string(op) + ": matrix must be square");
}

double condition_number(const ComplexMatrix& m) {
  Eigen::JacobiSVD<ComplexMatrix> svd(m);
  const auto& sv = svd.singularValues();
  const double smin = sv(sv.size() - 1);
  if (!(smin > 0.0)) return std::numeric_limits<double>::infinity();
  return sv(0) / smin;
}

std::vector<std::size_t> passive_ports(std::size_t n, std::size_t active) {
  std::vector<std::size_t> idx;
  for (std::size_t k = 0; k < n; ++k) {
    if (k != active) idx.push_back(k);
  }
  return idx;
}

}  // namespace

ComplexMatrix z_to_s(const ComplexMatrix& z, double z_ref) {
  require_square(z, "z_to_s");
  if (!(z_ref > 0.0)) throw std::invalid_argument("z_to_s: reference impedance must be positive");
  const auto n = z.rows();
  const ComplexMatrix eye = ComplexMatrix::Identity(n, n);
  const ComplexMatrix denom = z + z_ref * eye;
  if (condition_number(denom) > kMaxLoadBlockCondition) throw NumericalError("z_to_s: (Z + z_ref I) is singular");
  // S = (Z - R)(Z + R)^-1, evaluated as the transpose solve of (Z + R)^T S^T = (Z - R)^T.
  return denom.transpose().partialPivLu().solve((z - z_ref * eye).transpose()).transpose();
}

ComplexMatrix s_to_z(const ComplexMatrix& s, double z_ref) {
  require_square(s, "s_to_z");
  if (!(z_ref > 0.0)) throw std::invalid_argument("s_to_z: reference impedance must be positive");
  const auto n = s.rows();
  const ComplexMatrix eye = ComplexMatrix::Identity(n, n);
  const ComplexMatrix denom = eye - s;
  if (condition_number(denom) > kMaxLoadBlockCondition) throw NumericalError("s_to_z: (I - S) is singular");
  return z_ref * denom.transpose().partialPivLu().solve((eye + s).transpose()).transpose();
}

std::size_t PortNetwork::port_count() const {
  return z_matrices.empty() ? 0 : static_cast<std::size_t>(z_matrices.front().rows());
}

std::size_t PortNetwork::frequency_index(double f) const {
  for (std::size_t i = 0; i < frequencies.size(); ++i) {
    if (std::abs(frequencies[i] - f) <= 1e-9 * std::abs(f)) return i;
  }
  throw std::invalid_argument("network: frequency " + std::to_string(f) + " Hz is not sampled");
}

void PortNetwork::validate() const {
  if (frequencies.empty()) throw std::invalid_argument("network: no frequencies");
  if (z_matrices.size() != frequencies.size()) throw std::invalid_argument("network: one Z matrix per frequency required");
  if (!(z_ref > 0.0)) throw std::invalid_argument("network: reference impedance must be positive");
  const auto n = z_matrices.front().rows();
  for (std::size_t i = 0; i < z_matrices.size(); ++i) {
    const auto& z = z_matrices[i];
    if (z.rows() != n || z.cols() != n) throw std::invalid_argument("network: Z matrices must share one square shape");
    const double scale = std::max(z.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
    if ((z - z.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale) {
      throw std::invalid_argument("network: Z matrix at index " + std::to_string(i) + " is not reciprocal");
    }
  }
  if (!port_patterns.empty()) {
    if (port_patterns.size() != frequencies.size()) throw std::invalid_argument("network: pattern sets per frequency missing");
    for (std::size_t i = 0; i < port_patterns.size(); ++i) {
      const auto& set = port_patterns[i];
      if (set.size() != static_cast<std::size_t>(n)) throw std::invalid_argument("network: one pattern per port required");
      for (const auto& p : set) {
        p.validate();
        if (!compatible(p, set.front())) throw std::invalid_argument("network: port patterns must share one grid");
        if (p.frequency != frequencies[i]) throw std::invalid_argument("network: pattern frequency mismatch");
      }
    }
  }
}

void LoadState::validate() const {
  for (std::size_t k = 0; k < loads.size(); ++k) {
    if (loads[k].real() < 0.0 || !std::isfinite(loads[k].real()) || !std::isfinite(loads[k].imag())) {
      throw std::invalid_argument("load state: port " + std::to_string(k) + " is not a passive termination");
    }
  }
}

LoadState LoadState::swapped() const {
  LoadState out = *this;
  std::reverse(out.loads.begin(), out.loads.end());
  return out;
}

DrivenSolution reduce_loaded(const PortNetwork& net, double f, const LoadState& loads, std::size_t active_port) {
  const std::size_t fi = net.frequency_index(f);
  const ComplexMatrix& z = net.z_matrices[fi];
  const std::size_t n = static_cast<std::size_t>(z.rows());
  if (active_port >= n) throw std::invalid_argument("reduce_loaded: active port out of range");
  if (loads.loads.size() + 1 != n) {
    throw std::invalid_argument("reduce_loaded: expected " + std::to_string(n - 1) + " passive loads");
  }
  loads.validate();

  const auto passive = passive_ports(n, active_port);
  const auto np = static_cast<Eigen::Index>(passive.size());
  ComplexMatrix zpp(np, np);
  ComplexVector zpa(np);
  for (Eigen::Index r = 0; r < np; ++r) {
    zpa(r) = z(static_cast<Eigen::Index>(passive[r]), static_cast<Eigen::Index>(active_port));
    for (Eigen::Index c = 0; c < np; ++c) {
      zpp(r, c) = z(static_cast<Eigen::Index>(passive[r]), static_cast<Eigen::Index>(passive[c]));
    }
    zpp(r, r) += loads.loads[static_cast<std::size_t>(r)];
  }

  DrivenSolution sol;
  sol.frequency = net.frequencies[fi];
  ComplexVector ip(np);
  if (np > 0) {
    if (condition_number(zpp) > kMaxLoadBlockCondition) {
      throw NumericalError("reduce_loaded: loaded passive block is singular (resonant load degeneracy)");
    }
    if (np == 2) {
      // Cramer's rule: exchanging the two loads of an exchange-symmetric
      // network then permutes the currents bitwise.
      const cplx det = zpp(0, 0) * zpp(1, 1) - zpp(0, 1) * zpp(1, 0);
      ip(0) = -(zpp(1, 1) * zpa(0) - zpp(0, 1) * zpa(1)) / det;
      ip(1) = -(-zpp(1, 0) * zpa(0) + zpp(0, 0) * zpa(1)) / det;
    } else {
      ip = -zpp.partialPivLu().solve(zpa);
    }
  }

  const auto a = static_cast<Eigen::Index>(active_port);
  cplx coupled{};
  for (Eigen::Index r = 0; r < np; ++r) coupled += z(a, static_cast<Eigen::Index>(passive[r])) * ip(r);
  const cplx z_in = z(a, a) + coupled;
  sol.z_in = z_in;
  sol.gamma = (z_in - net.z_ref) / (z_in + net.z_ref);

  sol.port_currents = ComplexVector::Zero(static_cast<Eigen::Index>(n));
  sol.port_currents(a) = 1.0;
  for (Eigen::Index r = 0; r < np; ++r) sol.port_currents(static_cast<Eigen::Index>(passive[r])) = ip(r);

  // Incident power of the wave that produces unit port current:
  // a = (V + z_ref I) / (2 sqrt(z_ref)), P_inc = |a|^2 / 2.
  const double p_inc = std::norm(z_in + net.z_ref) / (8.0 * net.z_ref);
  const double scale = 1.0 / std::sqrt(p_inc);

  sol.p_mismatch = std::norm(sol.gamma);
  double p_load = 0.0;
  for (Eigen::Index r = 0; r < np; ++r) {
    p_load += 0.5 * std::norm(scale * ip(r)) * loads.loads[static_cast<std::size_t>(r)].real();
  }
  sol.p_load = p_load;

  if (net.has_patterns()) {
    std::vector<cplx> coeffs(n);
    for (std::size_t k = 0; k < n; ++k) coeffs[k] = scale * sol.port_currents(static_cast<Eigen::Index>(k));
    sol.pattern = linear_combination(net.port_patterns[fi], coeffs);
    sol.p_rad = power(sol.pattern);
  } else {
    sol.p_rad = 1.0 - sol.p_mismatch - sol.p_load;
  }
  return sol;
}

double return_loss_db(const DrivenSolution& sol) {
  const double mag = std::abs(sol.gamma);
  if (mag == 0.0) return std::numeric_limits<double>::infinity();
  return -20.0 * std::log10(mag);
}

double exchange_asymmetry(const PortNetwork& net, std::size_t f_index, std::size_t active_port) {
  const ComplexMatrix& z = net.z_matrices.at(f_index);
  const auto passive = passive_ports(static_cast<std::size_t>(z.rows()), active_port);
  if (passive.size() != 2) throw std::invalid_argument("exchange_asymmetry: needs exactly two passive ports");
  // Permutation exchanging the two passive ports.
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(z.rows()));
  for (std::size_t k = 0; k < perm.size(); ++k) perm[k] = static_cast<Eigen::Index>(k);
  std::swap(perm[passive[0]], perm[passive[1]]);
  double worst = 0.0;
  for (Eigen::Index r = 0; r < z.rows(); ++r) {
    for (Eigen::Index c = 0; c < z.cols(); ++c) {
      worst = std::max(worst, std::abs(z(r, c) - z(perm[static_cast<std::size_t>(r)], perm[static_cast<std::size_t>(c)])));
    }
  }
  const double scale = std::max(z.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
  return worst / scale;
}

std::pair<DrivenSolution, DrivenSolution> state_pair(const PortNetwork& net, double f, const LoadState& state_a,
                                                     const LoadState& state_b, std::size_t active_port,
                                                     SymmetryCheck check) {
  if (state_a.loads.size() != 2 || state_b.loads != state_a.swapped().loads) {
    throw std::invalid_argument("state_pair: state_b must be state_a with the two passive loads exchanged");
  }
  if (check == SymmetryCheck::enforce) {
    const double asym = exchange_asymmetry(net, net.frequency_index(f), active_port);
    if (asym > kExchangeSymmetryTolerance) {
      throw NumericalError("state_pair: network is not symmetric under passive-port exchange (relative asymmetry " +
                           std::to_string(asym) + ")");
    }
  }
  return {reduce_loaded(net, f, state_a, active_port), reduce_loaded(net, f, state_b, active_port)};
}

}  // namespace beamspace
