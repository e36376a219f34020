"""Exact function-space primitives on the Boolean cube {0,1}^n.

A function is a float64 vector of length 2**n. Bit j of the index is
coordinate j (little-endian). Expectations are under the uniform measure.
The Walsh-Fourier transform is the unnormalized counting sum

    fhat(w) = sum_x (-1)^{<w,x>} f(x),

so Parseval reads ``sum fhat**2 == 2**n * sum f**2``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from ._backend import kernels

MAX_DIM = 24


class DimensionError(ValueError):
    """Raised for vectors whose length is not 2**n with 1 <= n <= MAX_DIM."""


def dim_of(values) -> int:
    size = len(values)
    n = size.bit_length() - 1
    if size < 2 or (1 << n) != size:
        raise DimensionError(f"length {size} is not 2**n with n >= 1")
    if n > MAX_DIM:
        raise DimensionError(f"n = {n} exceeds the dense guard n <= {MAX_DIM}")
    return n


def as_values(f) -> np.ndarray:
    """Coerce a CubeFunction, Spectrum or array-like to a validated float64 vector."""
    if isinstance(f, (CubeFunction, Spectrum)):
        return f.values
    a = np.ascontiguousarray(f, dtype=np.float64)
    if a.ndim != 1:
        raise DimensionError("expected a one-dimensional vector")
    dim_of(a)
    if not np.all(np.isfinite(a)):
        raise ValueError("function values must be finite")
    return a


@dataclass(frozen=True)
class CubeFunction:
    """Real function on {0,1}^n stored densely in index order."""

    n: int
    values: np.ndarray

    def __post_init__(self):
        v = np.ascontiguousarray(self.values, dtype=np.float64)
        if len(v) != 1 << self.n or dim_of(v) != self.n:
            raise DimensionError(f"expected {1 << self.n} values, got {len(v)}")
        if not np.all(np.isfinite(v)):
            raise ValueError("function values must be finite")
        object.__setattr__(self, "values", v)

    @classmethod
    def of(cls, values) -> "CubeFunction":
        v = np.ascontiguousarray(values, dtype=np.float64)
        return cls(dim_of(v), v)


@dataclass(frozen=True)
class Spectrum:
    """Walsh-Fourier coefficients indexed by frequency mask."""

    n: int
    values: np.ndarray

    def __post_init__(self):
        v = np.ascontiguousarray(self.values, dtype=np.float64)
        if len(v) != 1 << self.n or dim_of(v) != self.n:
            raise DimensionError(f"expected {1 << self.n} coefficients, got {len(v)}")
        object.__setattr__(self, "values", v)


def popcounts(n: int) -> np.ndarray:
    """Hamming weight of every index 0 .. 2**n - 1."""
    return np.bitwise_count(np.arange(1 << n, dtype=np.uint64)).astype(np.int64)


def character(n: int, omega: int) -> np.ndarray:
    """chi_omega(x) = (-1)^{<omega, x>} as a vector."""
    x = np.arange(1 << n, dtype=np.uint64)
    return 1.0 - 2.0 * (np.bitwise_count(x & np.uint64(omega)) & 1)


def wht(f) -> np.ndarray:
    """Forward transform, unnormalized."""
    a = as_values(f).copy()
    return kernels.fwht_inplace(a)


def iwht(s) -> np.ndarray:
    """Inverse of :func:`wht`: ``f(x) = 2**-n sum_w (-1)^{<w,x>} s(w)``."""
    a = as_values(s).copy()
    kernels.fwht_inplace(a)
    a *= 1.0 / len(a)
    return a


def mean(f) -> float:
    return float(np.mean(as_values(f)))


def inner(f, g) -> float:
    """(f, g) = E[f g]."""
    return float(np.mean(as_values(f) * as_values(g)))


def lp_norm(f, p: float) -> float:
    """E[|f|^p]^(1/p) for p in (0, inf]; computed in log space for large p."""
    a = np.abs(as_values(f))
    if p == math.inf:
        return float(a.max())
    if not p > 0:
        raise ValueError("p must be positive")
    if p <= 50:
        return float(np.mean(a ** p) ** (1.0 / p))
    return math.exp(log_lp_norm(a, p))


def log_lp_norm(f, p: float) -> float:
    """ln ||f||_p, stable for large p and tiny values."""
    a = np.abs(as_values(f))
    if p == math.inf:
        return math.log(a.max()) if a.max() > 0 else -math.inf
    with np.errstate(divide="ignore"):
        la = np.log(a)
    if not np.any(a > 0):
        return -math.inf
    return float((logsumexp(p * la) - math.log(len(a))) / p)


def _check_nonneg(a: np.ndarray):
    if np.any(a < 0):
        raise ValueError("entropy requires a nonnegative function")
    if not np.any(a > 0):
        raise ValueError("entropy of the zero function is undefined")


def entropy(f) -> float:
    """Ent(f) = E[f ln(f / E f)] with 0 ln 0 = 0."""
    a = as_values(f)
    _check_nonneg(a)
    m = a.mean()
    pos = a[a > 0]
    val = float(np.sum(pos * np.log(pos / m)) / len(a))
    return max(val, 0.0)


def entropy_ratio(f, r: float) -> float:
    """Ent(f^r) / E[f^r]."""
    if not r > 0:
        raise ValueError("r must be positive")
    a = as_values(f)
    _check_nonneg(a)
    g = a ** r
    return entropy(g) / float(g.mean())


def laplacian(f) -> np.ndarray:
    """(Delta f)(x) = sum over neighbours y of f(y) - f(x)."""
    return kernels.laplacian(as_values(f))


def dirichlet(f, g) -> float:
    """E_n(f, g) = -(1/2) (Delta f, g)."""
    a, b = as_values(f), as_values(g)
    if len(a) != len(b):
        raise DimensionError("dimension mismatch")
    return float(-0.5 * np.mean(laplacian(a) * b))


def heat(f, t: float) -> np.ndarray:
    """T_t f, applying the one-coordinate kernel of flip probability (1 - e^-t)/2 to every coordinate.

    Keeps nonnegative inputs exactly nonnegative (no cancellation).
    """
    if t < 0:
        raise ValueError("t must be nonnegative")
    a = as_values(f).copy()
    q = -math.expm1(-t) / 2.0
    return kernels.heat_inplace(a, 1.0 - q, q)


def heat_spectral(f, t: float) -> np.ndarray:
    """T_t f through the Fourier multiplier e^{-t|w|}."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    a = as_values(f)
    n = dim_of(a)
    return iwht(wht(a) * np.exp(-t * popcounts(n)))


def heat_kernel(n: int, t: float) -> np.ndarray:
    """Lambda_t(z) = (1 - e^-t)^|z| (1 + e^-t)^(n - |z|), unnormalized."""
    w = popcounts(n)
    return (-math.expm1(-t)) ** w * (1.0 + math.exp(-t)) ** (n - w)


def heat_by_kernel(f, t: float) -> np.ndarray:
    """T_t f as the averaged convolution 2^-n sum_y Lambda_t(x+y) f(y); dense O(4^n), n <= 12."""
    a = as_values(f)
    n = dim_of(a)
    if n > 12:
        raise DimensionError("dense convolution limited to n <= 12")
    lam = heat_kernel(n, t)
    x = np.arange(1 << n)
    return lam[x[:, None] ^ x[None, :]] @ a / (1 << n)


def support_count(f) -> int:
    return int(np.count_nonzero(as_values(f)))


def log_support_rate(f) -> float:
    """(1/n) ln(2^n / |supp f|)."""
    a = as_values(f)
    n = dim_of(a)
    k = support_count(a)
    if k == 0:
        raise ValueError("zero function has empty support")
    return (n * math.log(2) - math.log(k)) / n


def indicator(n: int, members) -> np.ndarray:
    f = np.zeros(1 << n)
    f[np.asarray(list(members), dtype=np.int64)] = 1.0
    return f


def ball_indicator(n: int, r: int) -> np.ndarray:
    return (popcounts(n) <= r).astype(np.float64)


def product_function(f1, n: int) -> np.ndarray:
    """f(x) = prod_k f1(x_k) for a two-point f1 = (f1(0), f1(1))."""
    f1 = np.asarray(f1, dtype=np.float64)
    w = popcounts(n)
    return f1[0] ** (n - w) * f1[1] ** w


def function_from_text(text: str) -> CubeFunction:
    """Read JSON {"n": int, "values": [...]} or plain text with one value per line."""
    body = text.strip()
    if body.startswith("{"):
        import json

        d = json.loads(body)
        f = CubeFunction.of(d["values"])
        if "n" in d and int(d["n"]) != f.n:
            raise DimensionError(f"declared n = {d['n']} but {len(f.values)} values given")
        return f
    vals = [float(line) for line in body.splitlines() if line.strip() and not line.startswith("#")]
    return CubeFunction.of(vals)


def function_to_json(f) -> str:
    from .serialize import dumps

    a = as_values(f)
    return dumps({"n": dim_of(a), "values": a})
