#pragma once

namespace beamspace {

struct SineCosineIntegrals {
  double si = 0.0;
  double ci = 0.0;
};

/// Sine integral Si(x); odd in x.
double sine_integral(double x);

/// Cosine integral Ci(x) = -int_x^inf cos(t)/t dt. Throws
/// std::invalid_argument for x <= 0.
double cosine_integral(double x);

/// Both at once (x > 0). Power series below 2, continued fraction for
/// E1(ix) above; both accurate to about 1e-15 absolute.
SineCosineIntegrals sine_cosine_integrals(double x);

}  // namespace beamspace
