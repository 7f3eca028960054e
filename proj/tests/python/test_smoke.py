import cmath
import math

import pytest

import tqm


def test_hydrogen_estimate():
    b = tqm.bound_state_estimate(0.511e6, -13.6)
    assert abs(b["delta_E_eV"] - 3728.0) < 1.0
    assert abs(b["delta_t_as"] - 0.1766) < 1e-3


def test_packet_and_moments():
    p = tqm.AxisPacket(tqm.AxisKind.SPACE, 0.0, 1.0, 1.0, 1.0)
    mean, unc = p.moments(2.0)
    assert mean == pytest.approx(2.0)
    assert unc == pytest.approx(math.sqrt(0.5 * (1 + 4.0)))
    assert abs(p.momentum(0.0, 1.0)) == pytest.approx(abs(p.momentum(5.0, 1.0)))


def test_toa_variances_add():
    m, v = 1.0, 0.1
    sp = tqm.AxisPacket(tqm.AxisKind.SPACE, 0.0, m * v, 200.0, m)
    tp = tqm.AxisPacket(tqm.AxisKind.TIME, 0.0, m, 37.0, m)
    r = tqm.toa_tqm(tp, sp, 2000.0, 201)
    assert r["sigma_total"] ** 2 == pytest.approx(r["sigma_bar"] ** 2 + r["sigma_tilde"] ** 2)
    assert len(r["tau"]) == len(r["rho"]) == 201
    assert tqm.toa_sqm(sp, 2000.0)["sigma_tilde"] == 0.0


def test_rescale_and_sweep():
    s, t, d = tqm.absorption_rescale(1.0, 1.0, 1.0, 1.0, 1.0)
    assert (s, t, d) == pytest.approx((0.5, 0.5, 8.0))
    rows = tqm.slit_sweep([1.0, 10.0, 100.0])
    assert rows[0][2] > rows[-1][2]
    assert rows[0][1] < rows[-1][1]


def test_loop_and_kernel():
    assert abs(tqm.loop_tau([1.5, 0.0, 0.0, 0.0], 2.0, 1.0, 0.5)) == pytest.approx(1.0 / (9.0 * 4.0))
    assert tqm.loop_omega([1.5, 0.0, 0.0, 0.0], 0.0, 1.0, 0.5) == pytest.approx(0.0)
    assert tqm.zero_d_kernel(2, 0.7, 1.3) == pytest.approx(cmath.exp(-1j * 1.3 * 0.7))


def test_errors_map_to_python():
    with pytest.raises(ValueError):
        tqm.convert_units(1.0, "eV", "parsec")
    with pytest.raises(ArithmeticError):
        tqm.loop_tau([1.0, 0.0, 0.0, 0.0], 0.0, 1.0, 1.0)


def test_run_experiment():
    doc = tqm.run_experiment("exchange", mu=0.6)
    assert doc["metadata"]["parameters"]["mu"] == 0.6
    r = doc["results"]
    assert r["momentum_out"] == pytest.approx(r["momentum_in"])
    assert "maxent" in tqm.experiment_names()
    with pytest.raises(ValueError):
        tqm.run_experiment("exchange", bogus=1)


def test_wavelet_roundtrip():
    # smallest default scale is 1/64, which needs 8 samples across it
    dt = 1.0 / 512
    t = [-20.0 + i * dt for i in range(40 * 512 + 1)]
    f = [cmath.exp(-x * x / 2 + 1j * x) for x in t]
    back = tqm.wavelet_roundtrip(f, t[0], dt)
    num = math.sqrt(sum(abs(a - b) ** 2 for a, b in zip(f, back)))
    den = math.sqrt(sum(abs(a) ** 2 for a in f))
    assert num / den < 1e-3
