#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "beamspace/capacity.hpp"
#include "beamspace/cli.hpp"
#include "beamspace/dipole_array.hpp"
#include "beamspace/error.hpp"
#include "beamspace/imported_antenna.hpp"
#include "beamspace/load_optimizer.hpp"
#include "beamspace/network.hpp"
#include "beamspace/special_functions.hpp"
#include "beamspace/waveform.hpp"

namespace py = pybind11;
using namespace beamspace;

namespace {

LoadState to_loads(const std::vector<cplx>& loads) { return LoadState{loads}; }

ChannelConfig channel(double snr_db, std::size_t n_channels, std::size_t n_noise, std::uint64_t seed) {
  ChannelConfig c;
  c.snr_db = snr_db;
  c.n_channels = n_channels;
  c.n_noise = n_noise;
  c.seed = seed;
  return c;
}

py::dict solution_dict(const DrivenSolution& s) {
  py::dict d;
  d["frequency"] = s.frequency;
  d["z_in"] = s.z_in;
  d["gamma"] = s.gamma;
  d["return_loss_db"] = return_loss_db(s);
  d["port_currents"] = Eigen::VectorXcd(s.port_currents);
  d["p_rad"] = s.p_rad;
  d["p_load"] = s.p_load;
  d["p_mismatch"] = s.p_mismatch;
  return d;
}

py::array_t<double> capacity_map(const SweepResult& r) {
  const auto n1 = static_cast<py::ssize_t>(r.grid.x1_values.size());
  const auto n2 = static_cast<py::ssize_t>(r.grid.x2_values.size());
  py::array_t<double> out({n1, n2});
  std::copy(r.capacity.begin(), r.capacity.end(), out.mutable_data());
  return out;
}

}  // namespace

PYBIND11_MODULE(_beamspace, m) {
  m.doc() = "Beam-space MIMO simulation of a switched parasitic dipole array";
  m.attr("__version__") = BEAMSPACE_VERSION;

  auto base = py::register_exception<Error>(m, "BeamspaceError");
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<IngestionError>(m, "IngestionError", base.ptr());
  py::register_exception<NumericalError>(m, "NumericalError", base.ptr());

  m.attr("DESIGN_FREQUENCY") = kDesignFrequency;
  m.attr("DIODE_FORWARD") = kDiodeForward;
  m.attr("DIODE_REVERSE") = kDiodeReverse;

  m.def("sine_integral", &sine_integral, py::arg("x"));
  m.def("cosine_integral", &cosine_integral, py::arg("x"));
  m.def("induced_emf_impedance", &induced_emf_impedance, py::arg("wavenumber"), py::arg("length_a"),
        py::arg("length_b"), py::arg("distance"));

  py::class_<DipoleArraySpec>(m, "DipoleArraySpec")
      .def(py::init<>())
      .def_readwrite("element_length", &DipoleArraySpec::element_length)
      .def_readwrite("parasitic_length", &DipoleArraySpec::parasitic_length)
      .def_readwrite("wire_radius", &DipoleArraySpec::wire_radius)
      .def_readwrite("spacing", &DipoleArraySpec::spacing)
      .def_readwrite("frequencies", &DipoleArraySpec::frequencies)
      .def("validate", &DipoleArraySpec::validate);
  m.def("default_dipole_array", &default_dipole_array, py::arg("f0") = kDesignFrequency,
        py::arg("frequencies") = std::vector<double>{});

  py::class_<PortNetwork>(m, "PortNetwork")
      .def_readonly("frequencies", &PortNetwork::frequencies)
      .def_readonly("z_matrices", &PortNetwork::z_matrices)
      .def_readonly("z_ref", &PortNetwork::z_ref)
      .def_readonly("provenance", &PortNetwork::provenance)
      .def_property_readonly("port_count", &PortNetwork::port_count)
      .def_property_readonly("has_patterns", &PortNetwork::has_patterns);

  m.def(
      "build_network",
      [](const DipoleArraySpec& spec, std::size_t n_theta, std::size_t n_phi) {
        return build_network(spec, make_grid(n_theta, n_phi));
      },
      py::arg("spec"), py::arg("n_theta") = kDefaultThetaNodes, py::arg("n_phi") = kDefaultPhiNodes);
  m.def(
      "load_imported",
      [](const std::filesystem::path& touchstone, const std::vector<std::filesystem::path>& patterns,
         const std::string& normalization) {
        return load_imported({touchstone, patterns, parse_normalization(normalization)});
      },
      py::arg("touchstone"), py::arg("patterns") = std::vector<std::filesystem::path>{},
      py::arg("normalization") = "watts");
  m.def(
      "write_network_files",
      [](const PortNetwork& net, const std::filesystem::path& dir, const std::string& stem) {
        const auto src = write_network_files(net, dir, stem);
        return py::make_tuple(src.touchstone_path, src.pattern_paths);
      },
      py::arg("network"), py::arg("directory"), py::arg("stem") = "antenna");

  m.def(
      "reduce_loaded",
      [](const PortNetwork& net, double f, const std::vector<cplx>& loads, std::size_t active_port) {
        return solution_dict(reduce_loaded(net, f, to_loads(loads), active_port));
      },
      py::arg("network"), py::arg("frequency"), py::arg("loads"), py::arg("active_port") = 0);

  m.def(
      "analyze_states",
      [](const PortNetwork& net, double f, const std::vector<cplx>& loads) {
        const auto s = to_loads(loads);
        const auto [a, b] = state_pair(net, f, s, s.swapped());
        const auto basis = basis_from_states(a.pattern, b.pattern);
        py::dict d;
        d["state_one"] = solution_dict(a);
        d["state_two"] = solution_dict(b);
        d["p_g1"] = power(a.pattern);
        d["p_g2"] = power(b.pattern);
        d["p_b1"] = basis.p_b1;
        d["p_b2"] = basis.p_b2;
        d["cross_correlation"] = basis.normalized_cross_correlation();
        d["imbalance_db"] = imbalance_db(basis);
        d["tx_correlation"] = Matrix2c(tx_correlation(basis).r);
        return d;
      },
      py::arg("network"), py::arg("frequency"), py::arg("loads"));

  m.def(
      "bpsk_mutual_information",
      [](const Matrix2c& h, double noise_var, std::size_t n_noise, std::uint64_t seed) {
        return bpsk_mutual_information(h, noise_var, n_noise, seed);
      },
      py::arg("h"), py::arg("noise_var"), py::arg("n_noise"), py::arg("seed"));
  m.def(
      "ergodic_capacity",
      [](const Matrix2c& r_tx, double snr_db, std::size_t n_channels, std::size_t n_noise, std::uint64_t seed,
         unsigned threads) {
        const auto est = ergodic_capacity(TxCorrelation{r_tx}, channel(snr_db, n_channels, n_noise, seed), {threads, {}});
        return py::make_tuple(est.bits_per_symbol, est.std_error);
      },
      py::arg("r_tx"), py::arg("snr_db"), py::arg("n_channels") = 1000, py::arg("n_noise") = 100, py::arg("seed") = 1,
      py::arg("threads") = 1);
  m.def(
      "ideal_reference",
      [](double snr_db, std::size_t n_channels, std::size_t n_noise, std::uint64_t seed, unsigned threads) {
        const auto est = ideal_reference(channel(snr_db, n_channels, n_noise, seed), {threads, {}});
        return py::make_tuple(est.bits_per_symbol, est.std_error);
      },
      py::arg("snr_db"), py::arg("n_channels") = 1000, py::arg("n_noise") = 100, py::arg("seed") = 1,
      py::arg("threads") = 1);

  py::class_<SweepResult>(m, "SweepResult")
      .def_readonly("frequency", &SweepResult::frequency)
      .def_property_readonly("x1_values", [](const SweepResult& r) { return r.grid.x1_values; })
      .def_property_readonly("x2_values", [](const SweepResult& r) { return r.grid.x2_values; })
      .def_property_readonly("capacity", &capacity_map)
      .def_property_readonly("best", [](const SweepResult& r) {
        py::dict d;
        d["x1"] = r.best.x1;
        d["x2"] = r.best.x2;
        d["capacity"] = r.best.capacity;
        d["std_error"] = r.best.std_error;
        d["return_loss_db"] = r.best.return_loss_db;
        d["imbalance_db"] = r.best.imbalance_db;
        return d;
      });

  m.def(
      "optimize_band",
      [](const PortNetwork& net, const std::vector<double>& freqs, const std::vector<double>& reactances, double snr_db,
         std::size_t n_channels, std::size_t n_noise, std::uint64_t seed, double series_resistance, unsigned threads) {
        SweepOptions so;
        so.series_resistance = series_resistance;
        so.threads = threads;
        return optimize_band(net, freqs, ReactanceGrid{reactances, reactances}, channel(snr_db, n_channels, n_noise, seed), so);
      },
      py::arg("network"), py::arg("frequencies"), py::arg("reactances"), py::arg("snr_db") = 10.0,
      py::arg("n_channels") = 200, py::arg("n_noise") = 32, py::arg("seed") = 1, py::arg("series_resistance") = 0.0,
      py::arg("threads") = 1);
  m.def(
      "subband_quantize",
      [](const std::vector<SweepResult>& results, std::size_t k) {
        const auto plan = subband_quantize(results, k);
        py::list segs;
        for (const auto& s : plan.segments) {
          py::dict d;
          d["f_low"] = s.f_low;
          d["f_high"] = s.f_high;
          d["first"] = s.first;
          d["last"] = s.last;
          d["x1"] = s.x1;
          d["x2"] = s.x2;
          d["worst_case_capacity"] = s.worst_case_capacity;
          segs.append(d);
        }
        return segs;
      },
      py::arg("results"), py::arg("k"));

  m.def(
      "rrc_taps",
      [](double rolloff, std::size_t span, std::size_t sps) { return rrc_taps({rolloff, span, sps}); },
      py::arg("rolloff") = 0.5, py::arg("span") = 16, py::arg("sps") = 16);
  m.def("random_bpsk", &random_bpsk, py::arg("n"), py::arg("seed"));
  m.def(
      "state_preserving_fraction",
      [](const std::vector<int>& s1, const std::vector<int>& s2) { return state_preserving_fraction(state_sequence(s1, s2)); },
      py::arg("s1"), py::arg("s2"));
  m.def(
      "multiplex_timeseries",
      [](const std::vector<int>& s1, const std::vector<int>& s2, cplx state_one, cplx state_two, double symbol_rate,
         double ramp_seconds, double rolloff, std::size_t span, std::size_t sps) {
        const auto profile = ramp_seconds > 0.0 ? TransitionProfile::ramp(ramp_seconds) : TransitionProfile::rectangular();
        const auto env = multiplex_timeseries(s1, s2, {state_one, state_two}, {rolloff, span, sps}, profile, symbol_rate);
        py::dict d;
        d["samples"] = py::array_t<cplx>(static_cast<py::ssize_t>(env.samples.size()), env.samples.data());
        d["fs"] = env.fs;
        d["switch_events"] = env.switch_events;
        return d;
      },
      py::arg("s1"), py::arg("s2"), py::arg("state_one"), py::arg("state_two"), py::arg("symbol_rate"),
      py::arg("ramp_seconds") = 0.0, py::arg("rolloff") = 0.5, py::arg("span") = 16, py::arg("sps") = 16);

  py::class_<SpectrumEstimate>(m, "SpectrumEstimate")
      .def_readonly("freqs", &SpectrumEstimate::freqs)
      .def_readonly("psd_db", &SpectrumEstimate::psd_db)
      .def_readonly("peak_db", &SpectrumEstimate::peak_db)
      .def_readonly("resolution_bandwidth", &SpectrumEstimate::resolution_bandwidth);
  m.def(
      "psd_estimate",
      [](py::array_t<cplx, py::array::c_style | py::array::forcecast> y, double fs, std::size_t segment, double overlap) {
        return psd_estimate(std::span<const cplx>(y.data(), static_cast<std::size_t>(y.size())), fs, segment, overlap);
      },
      py::arg("y"), py::arg("fs"), py::arg("segment_length"), py::arg("overlap") = 0.5);
  m.def("oob_power_ratio", &oob_power_ratio, py::arg("spectrum"), py::arg("band_edge"));

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::vector<const char*> argv{"beamspace"};
        for (const auto& a : args) argv.push_back(a.c_str());
        std::ostringstream out, err;
        const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"));
}
