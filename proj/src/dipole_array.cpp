#include "beamspace/dipole_array.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "beamspace/special_functions.hpp"

namespace beamspace {

namespace {

constexpr double kPi = std::numbers::pi;

// F(u) = Ci(k u) - j Si(k u), an antiderivative of exp(-j k u)/u.
cplx log_exp_integral(double k, double u) {
  const auto sc = sine_cosine_integrals(k * u);
  return {sc.ci, -sc.si};
}

// u = R + s and v = R - s with R = sqrt(d^2 + s^2), each evaluated without
// cancellation.
double r_plus(double d, double s) {
  const double r = std::hypot(d, s);
  return s >= 0.0 ? r + s : d * d / (r - s);
}
double r_minus(double d, double s) {
  const double r = std::hypot(d, s);
  return s <= 0.0 ? r - s : d * d / (r + s);
}

// int_0^h2 sin(k (h2 - z)) exp(-j k R)/R dz with R = sqrt(d^2 + (z - c)^2).
cplx segment_integral(double k, double h2, double c, double d) {
  const cplx j(0.0, 1.0);
  const cplx fu = log_exp_integral(k, r_plus(d, h2 - c)) - log_exp_integral(k, r_plus(d, -c));
  const cplx fv = log_exp_integral(k, r_minus(d, h2 - c)) - log_exp_integral(k, r_minus(d, -c));
  return (std::exp(j * (k * (h2 - c))) * fu + std::exp(-j * (k * (h2 - c))) * fv) / (2.0 * j);
}

}  // namespace

std::vector<std::string> DipoleArraySpec::validate() const {
  if (!(element_length > 0.0)) throw std::invalid_argument("dipole array: element_length must be positive");
  if (parasitic_length < 0.0) throw std::invalid_argument("dipole array: parasitic_length must be non-negative");
  if (!(wire_radius > 0.0)) throw std::invalid_argument("dipole array: wire_radius must be positive");
  if (!(spacing > 2.0 * wire_radius)) throw std::invalid_argument("dipole array: spacing must exceed twice the wire radius");
  if (frequencies.empty()) throw std::invalid_argument("dipole array: at least one frequency required");
  double f_max = 0.0;
  for (double f : frequencies) {
    if (!(f > 0.0)) throw std::invalid_argument("dipole array: frequencies must be positive");
    f_max = std::max(f_max, f);
  }
  std::vector<std::string> warnings;
  const double lambda_min = kSpeedOfLight / f_max;
  if (wire_radius > lambda_min / 100.0) {
    std::ostringstream os;
    os << "wire radius " << wire_radius << " m exceeds lambda/100 at " << f_max << " Hz; thin-wire model is approximate";
    warnings.push_back(os.str());
  }
  return warnings;
}

void to_json(nlohmann::json& j, const DipoleArraySpec& spec) {
  j = nlohmann::json{{"element_length", spec.element_length},
                     {"wire_radius", spec.wire_radius},
                     {"spacing", spec.spacing},
                     {"frequencies", spec.frequencies}};
  if (spec.parasitic_length > 0.0) j["parasitic_length"] = spec.parasitic_length;
}

void from_json(const nlohmann::json& j, DipoleArraySpec& spec) {
  j.at("element_length").get_to(spec.element_length);
  j.at("wire_radius").get_to(spec.wire_radius);
  j.at("spacing").get_to(spec.spacing);
  j.at("frequencies").get_to(spec.frequencies);
  spec.parasitic_length = j.value("parasitic_length", 0.0);
}

DipoleArraySpec default_dipole_array(double f0, std::vector<double> frequencies) {
  const double lambda = kSpeedOfLight / f0;
  DipoleArraySpec spec;
  spec.element_length = 0.48 * lambda;
  spec.wire_radius = 1e-3 * lambda;
  spec.spacing = 0.25 * lambda;
  spec.frequencies = frequencies.empty() ? std::vector<double>{f0} : std::move(frequencies);
  return spec;
}

cplx induced_emf_impedance(double k, double length_a, double length_b, double distance) {
  // Near-zone E_z of a sinusoidal-current dipole of half-length ha:
  //   E_z = -j eta/(4 pi) I_m [e^{-jkR1}/R1 + e^{-jkR2}/R2 - 2 cos(k ha) e^{-jkr}/r]
  // integrated against the sinusoidal current of the second dipole.
  const double ha = 0.5 * length_a;
  const double hb = 0.5 * length_b;
  const cplx integral = 2.0 * (segment_integral(k, hb, ha, distance) + segment_integral(k, hb, -ha, distance) -
                               2.0 * std::cos(k * ha) * segment_integral(k, hb, 0.0, distance));
  const cplx z_loop = cplx(0.0, kEta0 / (4.0 * kPi)) * integral;
  return z_loop / (std::sin(k * ha) * std::sin(k * hb));
}

std::vector<DipoleElement> elements_of(const DipoleArraySpec& spec) {
  const double lp = spec.parasitic_or_element_length();
  return {{spec.element_length, 0.0}, {lp, spec.spacing}, {lp, -spec.spacing}};
}

cplx mutual_impedance(const DipoleArraySpec& spec, std::size_t i, std::size_t j, double f) {
  const auto elements = elements_of(spec);
  if (i >= elements.size() || j >= elements.size()) throw std::invalid_argument("mutual_impedance: port out of range");
  const double k = 2.0 * kPi * f / kSpeedOfLight;
  // Fixed argument order keeps Z_ij and Z_ji bitwise identical.
  const auto& a = elements[std::min(i, j)];
  const auto& b = elements[std::max(i, j)];
  const double d = i == j ? spec.wire_radius : std::abs(a.x - b.x);
  return induced_emf_impedance(k, a.length, b.length, d);
}

VectorPattern element_pattern(const DipoleElement& element, const GridPtr& grid, double f) {
  const double k = 2.0 * kPi * f / kSpeedOfLight;
  const double h = 0.5 * element.length;
  const double norm = std::sqrt(kEta0 / (8.0 * kPi * kPi)) / std::sin(k * h);
  VectorPattern p = VectorPattern::zeros(grid, f);
  const auto theta = grid->theta_nodes();
  const auto phi = grid->phi_nodes();
  for (std::size_t it = 0; it < theta.size(); ++it) {
    const double st = std::sin(theta[it]);
    const double ct = std::cos(theta[it]);
    const double shape = st == 0.0 ? 0.0 : (std::cos(k * h * ct) - std::cos(k * h)) / st;
    for (std::size_t ip = 0; ip < phi.size(); ++ip) {
      const double phase = k * element.x * st * std::cos(phi[ip]);
      p.e_theta[grid->index(it, ip)] = cplx(0.0, norm * shape) * std::polar(1.0, phase);
    }
  }
  return p;
}

VectorPattern element_pattern(const DipoleArraySpec& spec, std::size_t k, const GridPtr& grid, double f) {
  const auto elements = elements_of(spec);
  if (k >= elements.size()) throw std::invalid_argument("element_pattern: port out of range");
  return element_pattern(elements[k], grid, f);
}

PortNetwork build_network(const std::vector<DipoleElement>& elements, double wire_radius,
                          const std::vector<double>& frequencies, const GridPtr& grid) {
  const std::size_t n = elements.size();
  PortNetwork net;
  net.frequencies = frequencies;
  for (double f : frequencies) {
    const double k = 2.0 * kPi * f / kSpeedOfLight;
    ComplexMatrix z(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i; j < n; ++j) {
        const double d = i == j ? wire_radius : std::abs(elements[i].x - elements[j].x);
        const cplx zij = induced_emf_impedance(k, elements[i].length, elements[j].length, d);
        z(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = zij;
        z(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = zij;
      }
    }
    net.z_matrices.push_back(std::move(z));
    std::vector<VectorPattern> patterns;
    patterns.reserve(n);
    for (const auto& e : elements) patterns.push_back(element_pattern(e, grid, f));
    net.port_patterns.push_back(std::move(patterns));
  }
  std::ostringstream os;
  os.precision(17);
  os << "analytic dipole array:";
  for (const auto& e : elements) os << " (L=" << e.length << ", x=" << e.x << ")";
  os << " radius=" << wire_radius;
  net.provenance = os.str();
  return net;
}

PortNetwork build_network(const DipoleArraySpec& spec, const GridPtr& grid) {
  spec.validate();
  return build_network(elements_of(spec), spec.wire_radius, spec.frequencies, grid);
}

}  // namespace beamspace
