import itertools
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hypercube_lsi import cube, gf2
from hypercube_lsi.gf2 import Gf2Matrix


def mats(kmax=6, nmax=12):
    return st.tuples(st.integers(0, 2**32 - 1), st.integers(1, kmax), st.integers(1, nmax)) \
        .filter(lambda t: t[1] <= t[2]) \
        .map(lambda t: Gf2Matrix.random(t[1], t[2], np.random.default_rng(t[0])))


def test_basic_linear_algebra():
    assert gf2.rank(Gf2Matrix.identity(5)) == 5
    rep = Gf2Matrix.from_bits(["11111"])
    dual = gf2.nullspace(rep)
    assert dual.k == 4
    assert all(bin(int(c)).count("1") % 2 == 0 for c in gf2.span(dual))
    assert len(gf2.span(dual)) == 16


@given(st.integers(0, 2**32 - 1), st.integers(1, 8), st.integers(1, 20))
def test_double_dual(seed, k, n):
    M = Gf2Matrix.random(k, n, np.random.default_rng(seed), full_rank=False)
    dd = gf2.nullspace(gf2.nullspace(M))
    assert gf2.rank(M) == dd.k == gf2.rank(gf2.stack(M, dd))
    assert gf2.rank(M) + gf2.nullspace(M).k == n


def test_parse_matrix():
    M = gf2.parse_matrix("# generator\n1100\n\n0110\n")
    assert (M.k, M.n) == (2, 4) and M.rows == (0b0011, 0b0110)
    assert gf2.parse_matrix(M.to_text()) == M
    for bad in ("", "10\n1", "12"):
        with pytest.raises(gf2.Gf2Error):
            gf2.parse_matrix(bad)


@given(mats())
def test_basis_length(M):
    for i, row in enumerate(M.rows):
        assert gf2.basis_length(M, row) == 1
    assert gf2.basis_length(M, 0) == 0
    rng = np.random.default_rng(M.rows[0])
    x = int(rng.integers(0, 1 << M.k))
    assert gf2.basis_length(M, gf2.encode(M, x)) == bin(x).count("1")


@given(mats())
def test_profile_matches_enumeration(M):
    prof = gf2.weight_profile(M)
    pairs = gf2.all_pairs(M)
    for w in range(1, M.k + 1):
        assert prof[w] == min(c for a, c in pairs if a == w)
    assert sorted(gf2.code_pairs(M)) == pairs
    dr = gf2.d_r_table(M)
    assert np.all(np.diff(dr[1:]) >= 0)
    assert dr[1] == min(c for _, c in pairs)


def test_d_r_examples():
    padded = Gf2Matrix(3, 6, (1, 2, 4))
    assert gf2.d_r(padded, 1) == 1
    assert gf2.d_r(Gf2Matrix.from_bits(["11111"]), 1) == 5


@given(mats())
def test_pareto_front(M):
    front = gf2.pareto_front(M)
    pairs = gf2.all_pairs(M)
    for w, c in front:
        assert not any(a >= w and b <= c and (a, b) != (w, c) for a, b in pairs)
    for a, b in pairs:
        assert any(w >= a and c <= b for w, c in front)


def test_rates(oracle):
    assert gf2.delta_lp1(1.0) == pytest.approx(0, abs=1e-12)
    assert gf2.delta_lp1(1e-12) == pytest.approx(0.5, abs=1e-5)
    assert gf2.h2_inv(0.5) == pytest.approx(oracle["h2_inv_0.5bits"], rel=1e-12)
    assert gf2.delta_lp1(0.5) == pytest.approx(oracle["delta_lp1_0.5bits"], rel=1e-12)
    assert gf2.h2(0.11) == pytest.approx(0.4999, abs=1e-3)


@given(mats(kmax=7, nmax=14), st.floats(0.05, 0.4), st.floats(0.0, 0.2))
def test_map_and_code_searches_agree(M, rp, slack):
    if not rp < M.k / M.n:
        return
    assert gf2.map_witness_search(M, rp, slack).found == gf2.code_witness_search(M, rp, slack).found


def test_search_guards():
    M = Gf2Matrix.identity(4)
    with pytest.raises(ValueError):
        gf2.map_witness_search(M, 1.0, 0.1)


def test_lemma_flat_spectrum():
    M = Gf2Matrix.random(5, 9, np.random.default_rng(2))
    delta = np.zeros(1 << 9)
    delta[0] = 1
    for r in range(6):
        rep = gf2.lemma_ratio(delta, M, r)
        want = sum(math.comb(5, j) for j in range(r + 1)) / 32
        assert rep.ratio_direct == pytest.approx(want) and rep.agreement < 1e-12
    assert gf2.lemma_ratio(delta, M, 5).ratio_direct == pytest.approx(1)


@given(st.integers(0, 2**32 - 1), st.integers(1, 10), st.integers(0, 4))
def test_lemma_two_paths(seed, k, extra):
    rng = np.random.default_rng(seed)
    n = min(14, k + extra)
    M = Gf2Matrix.random(k, n, rng)
    m = min(5, 1 << n)
    f = np.zeros(1 << n)
    f[rng.permutation(1 << n)[:m]] = rng.standard_normal(m)
    for r in range(k + 1):
        assert gf2.lemma_ratio(f, M, r).agreement < 1e-10


def test_pushforward_spectrum(rng):
    M = Gf2Matrix.random(4, 7, rng)
    f = rng.standard_normal(128)
    g = gf2.pushforward(f, M)
    fh, gh = cube.wht(f), cube.wht(g)
    for a in range(16):
        assert gh[a] == pytest.approx(fh[gf2.encode(M, a)])


def test_cayley_eigenvalues(rng):
    M = Gf2Matrix.random(4, 9, rng)
    cols = M.columns()
    for a in range(16):
        chi = cube.character(4, a)
        lam = 9 - 2 * bin(gf2.encode(M, a)).count("1")
        assert np.allclose(gf2.cayley_apply(chi, cols), lam * chi)


def test_identity_cayley_is_cube_adjacency(rng):
    n = 6
    h = rng.standard_normal(1 << n)
    assert np.allclose(gf2.cayley_apply(h, Gf2Matrix.identity(n).columns()), cube.laplacian(h) + n * h)


def test_method1_identity_matches_ball():
    from hypercube_lsi.uncertainty import ball_eigen
    M = Gf2Matrix.identity(10)
    rep = gf2.code_method1_check(M, 0.5)
    assert rep.passed
    assert rep.rayleigh_hb == pytest.approx(ball_eigen(10, rep.radius)[0], rel=1e-12)


@pytest.mark.parametrize("seed", range(5))
def test_method1_random(seed):
    M = Gf2Matrix.random(7, 14, np.random.default_rng(seed))
    rep = gf2.code_method1_check(M, 0.25)
    assert rep.passed
    assert rep.rows[0]["rayleigh"] <= 14 - 2 * gf2.d_r(M, 1) + 1e-9


def test_analyze_reports():
    rep = gf2.analyze(Gf2Matrix.identity(4), [0.3], 0.05)
    assert rep.to_dict()["d_r"]["1"] == 1
    deficient = Gf2Matrix.from_bits(["1100", "0110", "1010"])
    rep = gf2.analyze(deficient)
    assert rep.M.k == 2 and rep.warnings
    assert rep.front_csv().startswith("message_weight,codeword_weight\n")


def test_guards():
    with pytest.raises(gf2.Gf2Error):
        gf2.weight_profile(Gf2Matrix(25, 30, tuple(1 << i for i in range(25))))
    with pytest.raises(gf2.Gf2Error):
        gf2.lemma_ratio(np.ones(4), Gf2Matrix.from_bits(["11", "11"]), 1)
