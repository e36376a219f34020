import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hypercube_lsi import curves
from hypercube_lsi.curves import LN2, b1, bp, cfun, cprime, h, h_inv, solve_y

PS = [-1.0, 0.5, 1.5, 2.0, 3.0, 4.0]


def test_entropy_function(oracle):
    assert h(0.5) == LN2 and h(0.0) == 0.0
    assert h(0.25) == pytest.approx(oracle["h_0.25"], rel=1e-15)
    assert curves.binary_conv(0.3, 0.0) == pytest.approx(0.3)
    assert curves.binary_conv(0.3, 0.5) == pytest.approx(0.5)
    assert curves.binary_conv(0.2, 0.3) == pytest.approx(0.38)


@given(st.floats(1e-300, 0.5))
def test_inversion_round_trip(y):
    x = LN2 - h(y)
    back = solve_y(x)
    assert math.isclose(LN2 - h(back), x, rel_tol=1e-12, abs_tol=1e-15)


@given(st.floats(0.0, LN2))
def test_h_inv(z):
    assert math.isclose(h(h_inv(z)), z, rel_tol=1e-12, abs_tol=1e-15)


def test_vector_inversion_matches_scalar():
    xs = np.linspace(0, LN2, 2001)
    assert np.max(np.abs(solve_y(xs) - np.array([solve_y(float(x)) for x in xs]))) < 1e-15


def test_curve_values(oracle):
    x = oracle["x_y0.25"]
    assert b1(x) == pytest.approx(oracle["b1_y0.25"], rel=1e-13)
    assert b1(x) == pytest.approx(0.25 * math.log(3), rel=1e-13)
    assert bp(2, x) == pytest.approx(oracle["b2_y0.25"], rel=1e-13)
    assert cfun(x) == pytest.approx(oracle["C_y0.25"], rel=1e-13)
    assert b1(0.5) == pytest.approx(oracle["b1_0.5"], rel=1e-13)
    assert b1(0.05) == pytest.approx(oracle["b1_0.05"], rel=1e-13)
    assert bp(-1, 0.4) == pytest.approx(oracle["bp_-1_0.4"], rel=1e-13)
    assert bp(0.5, 0.4) == pytest.approx(oracle["bp_0.5_0.4"], rel=1e-13)
    assert bp(3, 0.4) == pytest.approx(oracle["bp_3_0.4"], rel=1e-13)
    assert bp(4, 0.6) == pytest.approx(oracle["bp_4_0.6"], rel=1e-13)
    assert cfun(0.3) == pytest.approx(oracle["C_0.3"], rel=1e-13)
    assert cprime(0.3) == pytest.approx(oracle["Cprime_0.3"], rel=1e-10)
    assert cprime(0.6) == pytest.approx(oracle["Cprime_0.6"], rel=1e-10)


def test_endpoints():
    assert b1(0.0) == 0.0 and b1(LN2) == math.inf
    assert bp(2, 0.0) == 0.0 and bp(2, LN2) == 0.5
    assert bp(0.5, LN2) == math.inf
    assert cfun(0.0) == 2.0
    assert cfun(LN2) == pytest.approx(2 / LN2, rel=1e-15)
    assert cprime(LN2) == math.inf


def test_cprime_series_joins_chain_rule():
    assert cprime(1e-3 * (1 - 1e-9)) == pytest.approx(cprime(1e-3 * (1 + 1e-9)), rel=1e-9)
    assert cprime(0.0) == pytest.approx(1 / 3)


def test_alpha_slope():
    assert curves.alpha_p(2) == 0.5
    d = 1e-6
    assert bp(2, d) / d == pytest.approx(curves.alpha_p(2), rel=1e-4)


@pytest.mark.parametrize("p", PS)
def test_duality(p):
    q = p / (p - 1)
    xs = np.linspace(0, LN2, 500, endpoint=False)
    assert np.max(np.abs(bp(p, xs) - bp(q, xs))) < 1e-12


@pytest.mark.parametrize("p", PS)
def test_shape(p):
    xs = np.linspace(0, LN2, 4000, endpoint=p > 1)
    b = bp(p, xs)
    assert b[0] == 0 and np.all(b >= 0)
    assert np.all(np.diff(b) > 0)
    assert np.all(np.diff(b, 2) >= -1e-12)


@pytest.mark.parametrize("p", [0.5, 3.0, 4.0, 2.0])
def test_stroock_varopoulos(p):
    rep = curves.sv_compare(p, np.linspace(0, LN2, 3000))
    assert rep.passed
    if p == 2:
        assert rep.min_slack_b2 == 0


def test_phi_inverts_bp():
    for p in (0.5, 2.0, 3.0):
        for x in (0.05, 0.3, 0.6):
            assert curves.phi_p(p, bp(p, x)) == pytest.approx(x, abs=1e-12)
    assert curves.phi_p(2, 10.0) == LN2


def test_plsi_equality_family():
    for y in (0.1, 0.3, 0.45):
        for p in (-1.0, 0.5, 1.0, 2.0, 3.0):
            f = np.array([(2 * y) ** (1 / p), (2 - 2 * y) ** (1 / p)])
            assert abs(curves.verify_plsi(f, p)) < 1e-10


def test_plsi_constant():
    for p in (-1.0, 0.5, 1.0, 3.0):
        assert curves.verify_plsi(np.ones(8), p) == pytest.approx(0, abs=1e-15)


@given(st.integers(0, 2**32 - 1), st.sampled_from([-1.0, 0.5, 1.0, 2.0, 3.0]))
def test_plsi_random(seed, p):
    f = np.random.default_rng(seed).exponential(size=16) + 1e-3
    assert curves.verify_plsi(f, p) >= -1e-9


def test_samples_serialization():
    s = curves.sample("b1", 100)
    assert len(s.xs) == 100 and s.xs[0] == 0 and s.ys[0] == 0
    back = curves.CurveSamples.from_json(s.to_json())
    assert np.array_equal(back.ys, s.ys)
    assert s.to_csv().count("\n") == 101
    with pytest.raises(ValueError):
        curves.sample("bp", 10)


def test_domain_errors():
    with pytest.raises(ValueError):
        bp(1, 0.1)
    with pytest.raises(ValueError):
        b1(-0.1)
    with pytest.raises(ValueError):
        b1(0.7)


def test_tensorization():
    f1 = np.array([0.7, 1.9])
    for p in (-1.0, 0.5, 1.0, 2.0, 3.0):
        assert curves.verify_plsi(np.kron(np.kron(f1, f1), np.kron(f1, f1)), p) == \
            pytest.approx(curves.verify_plsi(f1, p), abs=1e-10)


def test_cprime_central_differences():
    for x in np.linspace(0.002, 0.68, 25):
        d = 1e-6
        fd = (cfun(x + d) - cfun(x - d)) / (2 * d)
        assert cprime(x) == pytest.approx(fd, rel=1e-6)
