#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>
#include <sstream>

#include "beamspace/dipole_array.hpp"
#include "beamspace/error.hpp"
#include "beamspace/imported_antenna.hpp"
#include "beamspace/network.hpp"
#include "beamspace/touchstone.hpp"
#include "oracles.hpp"

using namespace beamspace;

namespace {

PortNetwork circuit_only(const ComplexMatrix& z) {
  PortNetwork net;
  net.frequencies = {1e9};
  net.z_matrices = {z};
  return net;
}

double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST_CASE("Z to S and back") {
  std::mt19937_64 eng(11);
  for (int n = 1; n <= 4; ++n) {
    const auto z = oracle::random_passive(eng, n);
    const auto s = z_to_s(z, 50.0);
    CHECK((s_to_z(s, 50.0) - z).cwiseAbs().maxCoeff() < 1e-9 * z.cwiseAbs().maxCoeff());
    // Passive networks have |S| below one in the spectral norm.
    Eigen::JacobiSVD<ComplexMatrix> svd(s);
    CHECK(svd.singularValues()(0) < 1.0);
  }
}

TEST_CASE("S of a matched load is zero and of an open circuit is one") {
  ComplexMatrix z(1, 1);
  z(0, 0) = 50.0;
  CHECK(std::abs(z_to_s(z, 50.0)(0, 0)) < 1e-15);
  ComplexMatrix s(1, 1);
  s(0, 0) = 1.0;
  CHECK_THROWS_AS(s_to_z(s, 50.0), NumericalError);
}

TEST_CASE("reduce_loaded matches the full linear solve on random passive 3-ports") {
  std::mt19937_64 eng(2024);
  std::uniform_real_distribution<double> ur(0.0, 100.0), ux(-400.0, 400.0);
  for (int trial = 0; trial < 50; ++trial) {
    const auto z = oracle::random_passive(eng, 3);
    const LoadState loads{{cplx(ur(eng), ux(eng)), cplx(ur(eng), ux(eng))}};
    const auto net = circuit_only(z);
    for (int active = 0; active < 3; ++active) {
      const auto sol = reduce_loaded(net, 1e9, loads, static_cast<std::size_t>(active));
      const auto ref = oracle::full_solve(z, loads.loads, active);
      CHECK(rel(sol.z_in, ref.z_in) < 1e-12);
      for (int k = 0; k < 3; ++k) CHECK(rel(sol.port_currents(k), ref.currents(k)) < 1e-12);
      // Circuit-only bookkeeping closes by construction.
      CHECK(std::abs(sol.p_rad + sol.p_load + sol.p_mismatch - 1.0) < 1e-12);
    }
  }
}

TEST_CASE("singular loaded block is reported as a numerical error") {
  ComplexMatrix z(3, 3);
  z << cplx(50, 0), cplx(0, 10), cplx(0, 10), cplx(0, 10), cplx(0, 30), cplx(0, 0), cplx(0, 10), cplx(0, 0), cplx(0, 30);
  const auto net = circuit_only(z);
  CHECK_THROWS_AS(reduce_loaded(net, 1e9, LoadState::reactive(-30.0, 5.0)), NumericalError);
}

TEST_CASE("load validation") {
  const auto net = circuit_only(ComplexMatrix::Identity(3, 3) * 50.0);
  CHECK_THROWS_AS(reduce_loaded(net, 1e9, LoadState{{cplx(-1, 0), cplx(0, 0)}}), std::invalid_argument);
  CHECK_THROWS_AS(reduce_loaded(net, 1e9, LoadState{{cplx(1, 0)}}), std::invalid_argument);
  CHECK_THROWS_AS(reduce_loaded(net, 2e9, LoadState::reactive(0, 0)), std::invalid_argument);
}

TEST_CASE("return loss is infinite for a perfect match") {
  ComplexMatrix z(1, 1);
  z(0, 0) = 50.0;
  const auto sol = reduce_loaded(circuit_only(z), 1e9, LoadState{});
  CHECK(std::isinf(return_loss_db(sol)));
}

TEST_CASE("swapped loads on the symmetric array permute currents exactly") {
  const auto spec = default_dipole_array(kDesignFrequency, {1.95e9});
  const auto net = build_network(spec, make_grid(8, 16));
  const auto [a, b] = state_pair(net, 1.95e9, diode_fixture(), diode_fixture().swapped());
  CHECK(a.z_in == b.z_in);
  CHECK(a.port_currents(1) == b.port_currents(2));
  CHECK(a.port_currents(2) == b.port_currents(1));
  CHECK(return_loss_db(a) == return_loss_db(b));
}

TEST_CASE("state_pair refuses asymmetric networks and mismatched states") {
  std::mt19937_64 eng(5);
  auto net = circuit_only(oracle::random_passive(eng, 3));
  CHECK_THROWS_AS(state_pair(net, 1e9, diode_fixture(), diode_fixture().swapped()), NumericalError);
  CHECK_NOTHROW(state_pair(net, 1e9, diode_fixture(), diode_fixture().swapped(), 0, SymmetryCheck::skip));
  CHECK_THROWS_AS(state_pair(net, 1e9, diode_fixture(), diode_fixture()), std::invalid_argument);
}

TEST_CASE("Touchstone RI round trip is value-exact") {
  const auto spec = default_dipole_array(kDesignFrequency, {1.7e9, 1.95e9, 2.2e9});
  const auto net = build_network(spec, make_grid(4, 8));
  const auto ts = touchstone_from_network(net);
  std::stringstream ss;
  write_touchstone(ss, ts);
  const auto back = read_touchstone(ss, 3);
  CHECK(back.frequencies == ts.frequencies);
  for (std::size_t i = 0; i < ts.s.size(); ++i) CHECK(back.s[i] == ts.s[i]);
}

TEST_CASE("Touchstone parser handles formats, units and comments") {
  std::stringstream ma;
  ma << "! comment\n# MHz S MA R 50\n100 0.5 90 ! trailing\n200 1 0\n";
  const auto d = read_touchstone(ma, 1);
  REQUIRE(d.frequencies.size() == 2);
  CHECK(d.frequencies[0] == 100e6);
  CHECK(std::abs(d.s[0](0, 0) - cplx(0, 0.5)) < 1e-15);

  std::stringstream db;
  db << "# GHz S DB R 75\n1 -6.0205999132796239 180\n";
  const auto e = read_touchstone(db, 1);
  CHECK(e.z_ref == 75.0);
  CHECK(std::abs(e.s[0](0, 0) - cplx(-0.5, 0)) < 1e-12);

  // Two-port data is column-major: S11 S21 S12 S22.
  std::stringstream two;
  two << "# Hz S RI R 50\n1 0.1 0 0.2 0 0.3 0 0.4 0\n";
  const auto t = read_touchstone(two, 2);
  CHECK(t.s[0](1, 0) == cplx(0.2, 0));
  CHECK(t.s[0](0, 1) == cplx(0.3, 0));
}

TEST_CASE("Touchstone errors name the line") {
  std::stringstream bad;
  bad << "# GHz S RI R 50\n1 0.1 x\n";
  try {
    read_touchstone(bad, 1);
    FAIL("expected an error");
  } catch (const IngestionError& e) {
    CHECK(std::string(e.what()).find("line") != std::string::npos);
  }
  std::stringstream short_data;
  short_data << "# GHz S RI R 50\n1 0.1 0 0.2\n";
  CHECK_THROWS_AS(read_touchstone(short_data, 2), IngestionError);
}

TEST_CASE("imported antenna reproduces the analytic network") {
  const auto dir = std::filesystem::temp_directory_path() / "beamspace_import_test";
  std::filesystem::create_directories(dir);
  const auto spec = default_dipole_array(kDesignFrequency, {1.8e9, 1.95e9});
  const auto net = build_network(spec, make_grid(8, 16));
  const auto src = write_network_files(net, dir, "ant");
  const auto back = load_imported(src);
  CHECK(back.port_count() == 3);
  CHECK(back.frequencies == net.frequencies);
  for (std::size_t i = 0; i < net.frequencies.size(); ++i) {
    CHECK((back.z_matrices[i] - net.z_matrices[i]).cwiseAbs().maxCoeff() < 1e-9 * net.z_matrices[i].cwiseAbs().maxCoeff());
    CHECK(back.port_patterns[i][1].e_theta == net.port_patterns[i][1].e_theta);
  }
  const auto a = reduce_loaded(net, 1.95e9, diode_fixture());
  const auto b = reduce_loaded(back, 1.95e9, diode_fixture());
  CHECK(std::abs(a.p_rad - b.p_rad) < 1e-9);

  ImportedAntenna broken = src;
  broken.pattern_paths.pop_back();
  CHECK_THROWS_AS(load_imported(broken), IngestionError);
  std::filesystem::remove_all(dir);
}
