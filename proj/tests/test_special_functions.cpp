#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "beamspace/special_functions.hpp"
#include "oracles.hpp"

using namespace beamspace;

TEST_CASE("Si and Ci agree with direct quadrature") {
  for (double x : {1e-6, 0.01, 0.3, 1.0, 1.99, 2.0, 2.01, 3.7, 7.5, 12.0, 25.0, 60.0}) {
    CAPTURE(x);
    CHECK(std::abs(sine_integral(x) - oracle::si(x)) < 1e-10);
    CHECK(std::abs(cosine_integral(x) - oracle::ci(x)) < 1e-10);
    const auto both = sine_cosine_integrals(x);
    CHECK(both.si == sine_integral(x));
    CHECK(both.ci == cosine_integral(x));
  }
}

TEST_CASE("Si is odd and vanishes at zero") {
  CHECK(sine_integral(0.0) == 0.0);
  for (double x : {0.5, 3.0, 40.0}) CHECK(sine_integral(-x) == -sine_integral(x));
}

TEST_CASE("Si tends to pi/2 and Ci to zero for large arguments") {
  CHECK(std::abs(sine_integral(1e6) - oracle::kPi / 2.0) < 1e-5);
  CHECK(std::abs(cosine_integral(1e6)) < 1e-5);
}

TEST_CASE("Ci rejects non-positive arguments") {
  CHECK_THROWS_AS(cosine_integral(0.0), std::invalid_argument);
  CHECK_THROWS_AS(cosine_integral(-1.0), std::invalid_argument);
}
