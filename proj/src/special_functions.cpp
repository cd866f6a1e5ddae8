#include "beamspace/special_functions.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace beamspace {

namespace {

constexpr double kEuler = 0.57721566490153286061;
constexpr double kSeriesLimit = 2.0;

SineCosineIntegrals series(double x) {
  // Si = sum (-1)^k x^(2k+1) / ((2k+1)(2k+1)!),
  // Ci = gamma + ln x + sum_{k>=1} (-1)^k x^(2k) / (2k (2k)!).
  double si = 0.0;
  double ci = 0.0;
  double term = x;  // x^(2k+1)/(2k+1)! with sign
  for (int k = 0; k < 60; ++k) {
    const double n = 2.0 * k + 1.0;
    si += term / n;
    // Advance to x^(2k+2)/(2k+2)! for the Ci term.
    const double even = -term * x / (n + 1.0);
    ci += even / (n + 1.0);
    term = even * x / (n + 2.0);
    if (std::abs(term) < 1e-18 * std::abs(si) && std::abs(even) < 1e-18) break;
  }
  return {si, kEuler + std::log(x) + ci};
}

SineCosineIntegrals continued_fraction(double x) {
  // Modified Lentz evaluation of E1(ix) = -Ci(x) + i (Si(x) - pi/2).
  using c = std::complex<double>;
  constexpr double tiny = std::numeric_limits<double>::min() * 1e10;
  c b(1.0, x);
  c cc(1.0 / tiny, 0.0);
  c d = 1.0 / b;
  c h = d;
  for (int i = 1; i < 1000; ++i) {
    const double a = -static_cast<double>(i) * static_cast<double>(i);
    b += 2.0;
    d = 1.0 / (a * d + b);
    cc = b + a / cc;
    const c del = cc * d;
    h *= del;
    if (std::abs(del.real() - 1.0) + std::abs(del.imag()) < 1e-16) break;
  }
  h *= c(std::cos(x), -std::sin(x));
  return {std::numbers::pi / 2.0 + h.imag(), -h.real()};
}

}  // namespace

SineCosineIntegrals sine_cosine_integrals(double x) {
  if (!(x > 0.0)) throw std::invalid_argument("cosine integral is undefined for x <= 0");
  return x < kSeriesLimit ? series(x) : continued_fraction(x);
}

double sine_integral(double x) {
  if (x == 0.0) return 0.0;
  const double s = sine_cosine_integrals(std::abs(x)).si;
  return x < 0.0 ? -s : s;
}

double cosine_integral(double x) { return sine_cosine_integrals(x).ci; }

}  // namespace beamspace
