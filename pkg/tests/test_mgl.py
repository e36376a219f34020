import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hypercube_lsi import cube, mgl
from hypercube_lsi.curves import LN2, b1, h

TS = np.linspace(0, 3, 31)


def test_closed_form_values(oracle):
    assert mgl.mgl_bound(0.5, 0.2) == pytest.approx(oracle["mgl_t0.5_x0.2"], rel=1e-12)
    assert mgl.mgl_bound(1.0, 0.6) == pytest.approx(oracle["mgl_t1_x0.6"], rel=1e-12)
    assert mgl.mgl_bound(2.0, 0.05) == pytest.approx(oracle["mgl_t2_x0.05"], rel=1e-12)
    assert LN2 - mgl.mgl_m(0.5, 0.2) == pytest.approx(oracle["mgl_t0.5_x0.2"], rel=1e-9)


def test_closed_form_limits():
    for x in (0.0, 0.2, 0.5, LN2):
        assert mgl.mgl_bound(0.0, x) == pytest.approx(x, abs=1e-15)
    assert mgl.mgl_bound(50.0, 0.3) < 1e-15


def test_ode_matches_closed_form():
    for r0 in (0.05, 0.3, 0.6):
        ode = mgl.ode_decay(r0, TS)
        assert np.max(np.abs(ode - mgl.mgl_bound(TS, r0))) < 1e-6


def test_ode_vectorized():
    r0 = np.array([0.1, 0.4])
    out = mgl.ode_decay(r0, [0, 0.5, 1])
    assert out.shape == (3, 2)
    assert out[2, 1] == pytest.approx(mgl.ode_decay(0.4, [0, 0.5, 1])[2], rel=1e-14)


def test_small_start_linearizes():
    ts = np.linspace(0, 1, 11)
    rho = mgl.ode_decay(1e-4, ts)
    assert np.allclose(rho / (1e-4 * np.exp(-2 * ts)), 1, rtol=0.05)


def test_closed_form_solves_ode():
    x = LN2 - h(0.25)
    for t in (0.2, 1.0, 2.0):
        d = 1e-5
        slope = (mgl.mgl_bound(t + d, x) - mgl.mgl_bound(t - d, x)) / (2 * d)
        assert abs(slope + b1(mgl.mgl_bound(t, x))) < 1e-6


def test_psi():
    assert mgl.psi(0.0) == 2.0
    assert mgl.psi(0.3) == pytest.approx(b1(0.3) / 0.3)


def test_product_functions_are_tight():
    f = cube.product_function(np.array([0.5, 1.5]), 6)
    tr = mgl.verify_mgl(f, TS)
    assert abs(tr.margins[0]) < 1e-10
    # the bound is attained along the whole trajectory for products
    assert np.max(np.abs(tr.margins)) < 1e-10
    assert tr.passed


def test_ball_indicator_strict():
    tr = mgl.verify_mgl(cube.ball_indicator(8, 2), TS)
    assert tr.passed and np.all(tr.margins[1:] > 0)


def test_constant():
    tr = mgl.verify_mgl(np.ones(16), TS)
    assert np.all(tr.rhos == 0) and np.allclose(tr.bound, 0)


@given(st.integers(0, 2**32 - 1), st.sampled_from([3, 5, 7]))
def test_random_functions_obey_bound(seed, n):
    f = np.random.default_rng(seed).random(1 << n)
    assert mgl.verify_mgl(f, TS[::3], ode=False).passed


def test_trace_outputs():
    tr = mgl.verify_mgl(cube.ball_indicator(4, 1), [0, 1])
    assert tr.to_csv().splitlines()[0] == "t,rho,bound,ode_bound"
    assert '"pass": true' in tr.to_json()


def test_guards():
    with pytest.raises(ValueError):
        mgl.ode_decay(LN2, [0, 1])
    with pytest.raises(ValueError):
        mgl.mgl_bound(-1, 0.1)
    with pytest.raises(ValueError):
        mgl.ode_decay(0.1, [1, 0.5])


def test_entropy_trace_nonincreasing(rng):
    for _ in range(10):
        rho = mgl.entropy_trace(rng.random(64) ** 3, TS)
        assert np.all(np.diff(rho) <= 1e-15)


def test_psi_nondecreasing():
    xs = np.linspace(0, LN2, 2000, endpoint=False)
    assert np.all(np.diff(mgl.psi(xs)) >= -1e-12)
