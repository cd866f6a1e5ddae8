import math

import numpy as np
import pytest

import beamspace as bs


@pytest.fixture(scope="module")
def network():
    spec = bs.default_dipole_array(bs.DESIGN_FREQUENCY, [1.85e9, 1.95e9, 2.05e9])
    return bs.build_network(spec, 16, 32)


def test_special_functions():
    assert bs.sine_integral(0.0) == 0.0
    assert math.isclose(bs.sine_integral(1e6), math.pi / 2, abs_tol=1e-5)
    with pytest.raises(ValueError):
        bs.cosine_integral(0.0)


def test_half_wave_self_impedance():
    z = bs.induced_emf_impedance(2 * math.pi, 0.5, 0.5, 1e-5)
    assert abs(z - complex(73.1, 42.5)) / abs(complex(73.1, 42.5)) < 0.02


def test_network_and_states(network):
    assert network.port_count == 3
    z = np.asarray(network.z_matrices[1])
    assert np.allclose(z, z.T)
    sol = bs.reduce_loaded(network, 1.95e9, bs.DIODE_LOADS)
    assert abs(sol["p_rad"] + sol["p_load"] + sol["p_mismatch"] - 1.0) < 0.01
    s = bs.analyze_states(network, 1.95e9, bs.DIODE_LOADS)
    assert s["cross_correlation"] < 1e-10
    assert math.isclose(s["p_b1"] + s["p_b2"], 2 * s["p_g1"], rel_tol=1e-12)
    assert s["state_one"]["z_in"] == s["state_two"]["z_in"]


def test_capacity():
    c30, _ = bs.ideal_reference(30.0, 200, 32, 1)
    assert abs(c30 - 2.0) < 0.02
    one, _ = bs.ergodic_capacity(np.diag([1.0, 0.0]).astype(complex), 10.0, 200, 32, 1)
    assert one <= 1.0
    with pytest.raises(bs.NumericalError):
        bs.ergodic_capacity(np.diag([1.0, -1.0]).astype(complex), 10.0, 10, 4, 1)


def test_optimizer(network):
    res = bs.optimize_band(network, network.frequencies, [-400.0, -100.0, 200.0], n_channels=20, n_noise=8)
    cap = res[0].capacity
    assert cap.shape == (3, 3)
    assert np.array_equal(cap, cap.T)
    plans = [bs.subband_quantize(res, k) for k in (1, 2, 3)]
    worst = [min(s["worst_case_capacity"] for s in p) for p in plans]
    assert worst == sorted(worst)


def test_waveform():
    taps = np.asarray(bs.rrc_taps())
    assert taps.size == 257 and math.isclose(float(np.sum(taps**2)), 1.0, rel_tol=1e-12)
    a, b = bs.random_bpsk(20000, 1), bs.random_bpsk(20000, 2)
    assert abs(bs.state_preserving_fraction(a, b) - 0.5) < 0.02
    env = bs.multiplex_timeseries(a[:2048], b[:2048], 1 + 0j, 1j, 500e3)
    spec = bs.psd_estimate(env["samples"], env["fs"], 4096)
    assert bs.oob_power_ratio(spec, 500e3) < 0.0


def test_cli_errors(tmp_path):
    code, _, err = bs.run_cli(["analyze", "--config", str(tmp_path / "missing.json")])
    assert code == 1 and "config" in err
