"""Closed-form curves of the nonlinear log-Sobolev inequalities on the cube.

Every curve is a function of x = ln 2 - h(y), the normalized entropy of the
two-point function (2y, 2 - 2y). Internally x is inverted to y in (0, 1/2]
by bisection, working with s = 1/2 - y when y is close to 1/2 and with y
itself when y is small, so both ends of [0, ln 2] stay accurate.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import cube, serialize

LN2 = math.log(2.0)
BISECT_ITERS = 80
_PRE_BISECT = 12
_NEWTON_ITERS = 6
_LOG_BISECT = 24
_LOG_FLOOR = -740.0

_SERIES_TERMS = 10


def _kl_s(s: float) -> float:
    """ln 2 - h(1/2 - s) for s in [0, 1/4]."""
    u = 2.0 * s
    if u < 0.1:
        u2 = u * u
        acc, p = 0.0, u2
        for k in range(1, _SERIES_TERMS + 1):
            acc += p / (2 * k * (2 * k - 1))
            p *= u2
        return acc
    return 0.5 * ((1.0 - u) * math.log1p(-u) + (1.0 + u) * math.log1p(u))


def _kl_y(y: float) -> float:
    """ln 2 - h(y) for y in [0, 1/4]."""
    head = y * math.log(2.0 * y) if y > 0 else 0.0
    return head + (1.0 - y) * (LN2 + math.log1p(-y))


_KL_QUARTER = _kl_s(0.25)


def _kl_s_arr(s):
    u = 2.0 * s
    u2 = u * u
    series = np.zeros_like(u)
    p = u2.copy()
    for k in range(1, _SERIES_TERMS + 1):
        series += p / (2 * k * (2 * k - 1))
        p *= u2
    with np.errstate(invalid="ignore", divide="ignore"):
        closed = 0.5 * ((1.0 - u) * np.log1p(-u) + (1.0 + u) * np.log1p(u))
    return np.where(u < 0.1, series, closed)


def _kl_y_arr(y):
    with np.errstate(invalid="ignore", divide="ignore"):
        head = np.where(y > 0, y * np.log(2.0 * np.where(y > 0, y, 1.0)), 0.0)
    return head + (1.0 - y) * (LN2 + np.log1p(-y))


def _check_x(x, upper=LN2):
    if not (0.0 <= x <= upper) or math.isnan(x):
        raise ValueError(f"argument {x!r} outside [0, ln 2]")


def _param(x: float):
    """Return (y, s, ln 2y, ln 2(1-y)) with ln 2 - h(y) = x.

    A few bisection steps, then Newton. Both branches are convex, and Newton
    started on the far side of the root converges monotonically.
    """
    _check_x(x)
    if x == 0.0:
        return 0.5, 0.0, 0.0, 0.0
    if x >= LN2:
        return 0.0, 0.5, -math.inf, LN2
    if x <= _KL_QUARTER:
        lo, hi = 0.0, min(0.25, math.sqrt(x))
        for _ in range(_PRE_BISECT):
            mid = 0.5 * (lo + hi)
            if _kl_s(mid) < x:
                lo = mid
            else:
                hi = mid
        s = hi
        for _ in range(BISECT_ITERS):
            step = (_kl_s(s) - x) / (math.log1p(2 * s) - math.log1p(-2 * s))
            if not step > 0:
                break
            s -= step
            if step <= 1e-17 * s:
                break
        return 0.5 - s, s, math.log1p(-2.0 * s), math.log1p(2.0 * s)
    # bisect on ln 2y so that y down to 1e-300 stays reachable
    lo, hi = _LOG_FLOOR, math.log(0.5)
    for _ in range(_LOG_BISECT):
        mid = 0.5 * (lo + hi)
        if _kl_y(0.5 * math.exp(mid)) > x:
            lo = mid
        else:
            hi = mid
    y = 0.5 * math.exp(lo)
    for _ in range(BISECT_ITERS):
        step = (_kl_y(y) - x) / (LN2 + math.log1p(-y) - math.log(2 * y))
        if not step > 0:
            break
        y += step
        if step <= 1e-17 * y:
            break
    return y, 0.5 - y, math.log(2.0 * y), LN2 + math.log1p(-y)


def _param_arr(x):
    x = np.asarray(x, dtype=np.float64)
    if np.any(~(x >= 0)) or np.any(x > LN2):
        raise ValueError("argument outside [0, ln 2]")
    small = x <= _KL_QUARTER
    # s-branch, approached from above
    lo = np.zeros_like(x)
    hi = np.minimum(0.25, np.sqrt(x))
    for _ in range(_PRE_BISECT):
        mid = 0.5 * (lo + hi)
        up = _kl_s_arr(mid) < x
        lo = np.where(up, mid, lo)
        hi = np.where(up, hi, mid)
    s = hi
    for _ in range(_NEWTON_ITERS):
        with np.errstate(invalid="ignore", divide="ignore"):
            step = (_kl_s_arr(s) - x) / (np.log1p(2 * s) - np.log1p(-2 * s))
        s = np.where(step > 0, s - step, s)
    s_small = np.where(x == 0, 0.0, s)
    # y-branch, approached from below, bisecting on ln 2y first
    lo = np.full_like(x, _LOG_FLOOR)
    hi = np.full_like(x, math.log(0.5))
    for _ in range(_LOG_BISECT):
        mid = 0.5 * (lo + hi)
        up = _kl_y_arr(0.5 * np.exp(mid)) > x
        lo = np.where(up, mid, lo)
        hi = np.where(up, hi, mid)
    y = 0.5 * np.exp(lo)
    for _ in range(_NEWTON_ITERS):
        with np.errstate(invalid="ignore", divide="ignore"):
            step = (_kl_y_arr(y) - x) / (LN2 + np.log1p(-y) - np.log(2 * y))
        y = np.where(step > 0, y + step, y)
    y_big = np.where(x >= LN2, 0.0, y)
    y = np.where(small, 0.5 - s_small, y_big)
    s = np.where(small, s_small, 0.5 - y_big)
    with np.errstate(divide="ignore"):
        ly = np.where(small, np.log1p(-2.0 * s_small), np.log(2.0 * y_big))
    lz = np.where(small, np.log1p(2.0 * s_small), LN2 + np.log1p(-y_big))
    return y, s, ly, lz


def _vectorize(scalar_fn, array_fn):
    def wrapper(x, *args):
        if np.ndim(x) == 0:
            return scalar_fn(float(x), *args)
        return array_fn(np.asarray(x, dtype=np.float64), *args)
    wrapper.__name__ = scalar_fn.__name__.lstrip("_")
    wrapper.__doc__ = scalar_fn.__doc__
    return wrapper


# ---------------------------------------------------------------- scalars

def h(y):
    """Binary entropy in nats, 0 ln 0 = 0."""
    y = np.asarray(y, dtype=np.float64)
    if np.any((y < 0) | (y > 1)):
        raise ValueError("h is defined on [0, 1]")
    with np.errstate(divide="ignore", invalid="ignore"):
        a = np.where(y > 0, -y * np.log(np.where(y > 0, y, 1.0)), 0.0)
        b = np.where(y < 1, -(1 - y) * np.log1p(-np.where(y < 1, y, 0.0)), 0.0)
    out = a + b
    return float(out) if out.ndim == 0 else out


def solve_y(x):
    """y in [0, 1/2] with ln 2 - h(y) = x."""
    if np.ndim(x) == 0:
        return _param(float(x))[0]
    return _param_arr(x)[0]


def h_inv(z):
    """Inverse of h on [0, 1/2]: [0, ln 2] -> [0, 1/2]."""
    z = np.asarray(z, dtype=np.float64)
    if np.any((z < 0) | (z > LN2)):
        raise ValueError("h_inv is defined on [0, ln 2]")
    return solve_y(LN2 - z if z.ndim else float(LN2 - z))


def binary_conv(a, b):
    """a * b = (1 - a) b + (1 - b) a."""
    for v in (a, b):
        if np.any((np.asarray(v) < 0) | (np.asarray(v) > 1)):
            raise ValueError("binary convolution is defined on [0, 1]")
    return (1 - a) * b + (1 - b) * a


def divergence_from_half(y):
    """ln 2 - h(y), accurate near y = 1/2."""
    y = np.asarray(y, dtype=np.float64)
    yy = np.minimum(y, 1 - y)
    out = np.where(yy >= 0.25, _kl_s_arr(0.5 - yy), _kl_y_arr(np.minimum(yy, 0.25)))
    return float(out) if out.ndim == 0 else out


def divergence_at_offset(s):
    """ln 2 - h(1/2 - s) for s in [0, 1/2]; accurate for small s."""
    s = np.asarray(s, dtype=np.float64)
    if np.any((s < 0) | (s > 0.5)):
        raise ValueError("offset outside [0, 1/2]")
    y = 0.5 - s
    out = np.where(s <= 0.25, _kl_s_arr(np.minimum(s, 0.25)), _kl_y_arr(np.clip(y, 0.0, 0.25)))
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------- curves

def _b1(x: float) -> float:
    """b_1(ln 2 - h(y)) = (1/2 - y) ln((1 - y)/y); +inf at x = ln 2."""
    y, s, ly, lz = _param(x)
    if y == 0.0:
        return math.inf
    return s * (lz - ly)


def _b1_arr(x):
    y, s, ly, lz = _param_arr(x)
    with np.errstate(invalid="ignore"):
        return np.where(y == 0.0, np.inf, s * (lz - ly))


b1 = _vectorize(_b1, _b1_arr)


def _check_p(p):
    if p == 0 or p == 1:
        raise ValueError("b_p is defined for p not in {0, 1}")


def _bp_core(p, ly, lz):
    a = 1.0 / p
    sgn = 1.0 if p > 1 else -1.0
    if np.ndim(ly) == 0:
        A = a * ly + (1 - a) * lz if not math.isinf(ly) else (-math.inf if a > 0 else math.inf)
        B = (1 - a) * ly + a * lz if not math.isinf(ly) else (-math.inf if a < 1 else math.inf)
        return -0.25 * sgn * (math.expm1(A) + math.expm1(B))
    with np.errstate(invalid="ignore", over="ignore"):
        finite = np.isfinite(ly)
        A = np.where(finite, a * ly + (1 - a) * lz, -np.inf if a > 0 else np.inf)
        B = np.where(finite, (1 - a) * ly + a * lz, -np.inf if a < 1 else np.inf)
        return -0.25 * sgn * (np.expm1(A) + np.expm1(B))


def bp(p: float, x):
    """b_p(ln 2 - h(y)) = sgn(p-1)/2 (1 - y^(1/p)(1-y)^(1-1/p) - y^(1-1/p)(1-y)^(1/p)).

    Returns +inf at x = ln 2 when p < 1.
    """
    _check_p(p)
    if np.ndim(x) == 0:
        _, _, ly, lz = _param(float(x))
        return float(_bp_core(p, ly, lz))
    _, _, ly, lz = _param_arr(x)
    return _bp_core(p, ly, lz)


def alpha_p(p: float) -> float:
    """Best linear LSI constant 2(p-1)/p^2; |alpha_p| is the slope of b_p at 0."""
    return 2.0 * (p - 1.0) / (p * p)


def _four_b2(y, s):
    # 2 - 4 sqrt(y(1-y)), written to avoid cancellation near y = 1/2
    if s < 0.25:
        return 8.0 * s * s / (1.0 + math.sqrt(1.0 - 4.0 * s * s))
    return 2.0 - 4.0 * math.sqrt(y * (1.0 - y))


def _cfun(x: float) -> float:
    """C(x) = 4 b_2(x) / x with C(0) = 2."""
    _check_x(x)
    if x == 0.0:
        return 2.0
    y, s, _, _ = _param(x)
    return _four_b2(y, s) / x


def _cfun_arr(x):
    y, s, _, _ = _param_arr(x)
    with np.errstate(invalid="ignore", divide="ignore"):
        n4 = np.where(s < 0.25, 8.0 * s * s / (1.0 + np.sqrt(np.maximum(1.0 - 4.0 * s * s, 0.0))),
                      2.0 - 4.0 * np.sqrt(y * (1.0 - y)))
        return np.where(x == 0.0, 2.0, n4 / np.where(x == 0.0, 1.0, x))


cfun = _vectorize(_cfun, _cfun_arr)

# Taylor coefficients of C'(x) at 0
_CPRIME_SERIES = (1 / 3, 22 / 45, 829 / 1260, 12457 / 14175, 58831 / 49896)
_CPRIME_SERIES_CUTOFF = 1e-3


def _cprime(x: float) -> float:
    """dC/dx by the chain rule through y; series near x = 0, +inf at x = ln 2."""
    _check_x(x)
    if x < _CPRIME_SERIES_CUTOFF:
        return sum(c * x ** i for i, c in enumerate(_CPRIME_SERIES))
    y, s, ly, lz = _param(x)
    if y == 0.0:
        return math.inf
    num = _four_b2(y, s)
    dnum = 4.0 * s / math.sqrt(y * (1.0 - y))
    dx = lz - ly
    return (dnum * x - num * dx) / (x * x * dx)


cprime = _vectorize(_cprime, lambda x: np.array([_cprime(float(v)) for v in x]))


def phi_p(p: float, z: float) -> float:
    """Concave inverse of b_p (constant ln 2 beyond the range of b_p), by bisection."""
    if z < 0:
        raise ValueError("phi_p is defined on [0, inf)")
    top = bp(p, LN2) if p != 1 else math.inf
    if z >= top:
        return LN2
    lo, hi = 0.0, LN2
    f = b1 if p == 1 else (lambda v: bp(p, v))
    for _ in range(BISECT_ITERS):
        mid = 0.5 * (lo + hi)
        if f(mid) < z:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------- checks

def plsi_sides(f, p: float):
    """Return (lhs, arg) of the tensorized p-LSI.

    lhs = sgn(p-1) (1/n) E(f, f^(p-1)) / E[f^p]   (E(f, ln f)/E[f] when p = 1)
    arg = (1/n) Ent(f^p) / E[f^p]
    """
    a = cube.as_values(f)
    n = cube.dim_of(a)
    if p == 0:
        raise ValueError("p = 0 is excluded")
    if np.any(a < 0):
        raise ValueError("f must be nonnegative")
    if p <= 1 and np.any(a <= 0):
        raise ValueError("f must be strictly positive for p <= 1")
    if p == 1:
        lhs = cube.dirichlet(a, np.log(a)) / (n * a.mean())
        arg = cube.entropy(a) / (n * a.mean())
    else:
        g = a ** p
        ep = g.mean()
        lhs = math.copysign(1.0, p - 1) * cube.dirichlet(a, a ** (p - 1)) / (n * ep)
        arg = cube.entropy(g) / (n * ep)
    return lhs, min(arg, LN2)


def verify_plsi(f, p: float) -> float:
    """Margin lhs - b_p(arg); nonnegative (up to rounding) when the inequality holds."""
    lhs, arg = plsi_sides(f, p)
    bound = b1(arg) if p == 1 else bp(p, arg)
    return lhs - bound


@dataclass
class SVReport:
    p: float
    min_slack_b2: float
    min_slack_b1: float | None
    worst_x: float

    @property
    def passed(self) -> bool:
        ok = self.min_slack_b2 >= -1e-12
        if self.min_slack_b1 is not None:
            ok = ok and self.min_slack_b1 >= -1e-12
        return ok

    def to_dict(self):
        return {"p": self.p, "min_slack_b2": self.min_slack_b2,
                "min_slack_b1": self.min_slack_b1, "worst_x": self.worst_x,
                "pass": self.passed}


def sv_compare(p: float, xs) -> SVReport:
    """Pointwise comparisons b_p >= 4|p-1|/p^2 b_2 and, for p < 1, b_p >= (1-p)/p^2 b_1."""
    _check_p(p)
    xs = np.asarray(xs, dtype=np.float64)
    xs = xs[xs < LN2] if p < 1 else xs
    b = bp(p, xs)
    slack2 = b - 4 * abs(p - 1) / (p * p) * bp(2, xs)
    slack1 = None
    worst = float(xs[np.argmin(slack2)])
    if p < 1:
        s1 = b - (1 - p) / (p * p) * b1(xs)
        slack1 = float(s1.min())
    return SVReport(p, float(slack2.min()), slack1, worst)


# ---------------------------------------------------------------- samples

@dataclass
class CurveSamples:
    name: str
    xs: np.ndarray
    ys: np.ndarray
    params: dict = field(default_factory=dict)
    xlabel: str = "x"
    ylabel: str = "y"

    def __post_init__(self):
        self.xs = np.asarray(self.xs, dtype=np.float64)
        self.ys = np.asarray(self.ys, dtype=np.float64)
        if self.xs.shape != self.ys.shape:
            raise ValueError("xs and ys differ in length")
        if len(self.xs) > 1 and not np.all(np.diff(self.xs) > 0):
            raise ValueError("xs must be strictly increasing")

    def to_dict(self):
        return {"name": self.name, "params": self.params,
                "xs": self.xs, "ys": self.ys}

    def to_json(self) -> str:
        return serialize.dumps(self.to_dict())

    def to_csv(self) -> str:
        return serialize.csv_text([self.xlabel, self.ylabel], [self.xs, self.ys])

    @classmethod
    def from_json(cls, text: str) -> "CurveSamples":
        d = serialize.loads(text)
        return cls(d["name"], d["xs"], d["ys"], d.get("params", {}))


def sample(kind: str, points: int = 1000, p: float | None = None) -> CurveSamples:
    """Sample b1, bp or C on an even x-grid over [0, ln 2] (b1 and p < 1 stop short of ln 2)."""
    if points < 2:
        raise ValueError("need at least two points")
    open_end = kind == "b1" or (kind == "bp" and p is not None and p < 1)
    xs = np.linspace(0.0, LN2, points, endpoint=not open_end)
    if kind == "b1":
        return CurveSamples("b1", xs, b1(xs), {"points": points})
    if kind == "bp":
        if p is None:
            raise ValueError("bp needs p")
        return CurveSamples("bp", xs, bp(p, xs), {"p": p, "points": points})
    if kind == "C":
        return CurveSamples("C", xs, cfun(xs), {"points": points})
    raise ValueError(f"unknown curve {kind!r}")
