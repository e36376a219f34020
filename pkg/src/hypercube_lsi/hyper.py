"""Hypercontractivity exponents for functions with small support.

All theoretical curves depend on (p0, rho0) only, where rho0 lower-bounds
(1/n) ln(||f||_p0 / ||f||_1). For an indicator of a set of size 2^(nR),
rho0 = (1 - 1/p0)(1 - R) ln 2 exactly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import cube, serialize
from .curves import LN2, bp, cfun, cprime
from .mgl import ODE_STEP, _grid, rk4_on_grid

METHODS = ("ode", "hcc-closed", "hcc-firm", "bonami", "generic")
SIMPSON_STEP = 1e-3
NORM_TOL = 1e-9


@dataclass
class HCCurve:
    p0: float
    rho0: float
    ts: np.ndarray
    ps: np.ndarray
    method: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        self.ts = np.asarray(self.ts, dtype=np.float64)
        self.ps = np.asarray(self.ps, dtype=np.float64)

    def at(self, t: float) -> float:
        i = np.searchsorted(self.ts, t)
        if i < len(self.ts) and self.ts[i] == t:
            return float(self.ps[i])
        raise KeyError(f"t = {t} is not on the grid")

    def to_dict(self):
        return {"p0": self.p0, "rho0": self.rho0, "method": self.method,
                "ts": self.ts, "ps": self.ps}

    def to_json(self) -> str:
        return serialize.dumps(self.to_dict())

    def to_csv(self) -> str:
        return serialize.csv_text(["t", "p"], [self.ts, self.ps])


def rho0_from_rate(p0: float, R: float) -> float:
    """(1 - 1/p0)(1 - R) ln 2 for a support of size 2^(nR)."""
    if not 0 <= R <= 1:
        raise ValueError("R must lie in [0, 1]")
    _check_p0(p0)
    return (1 - 1 / p0) * (1 - R) * LN2


def rho0_of(f, p0: float) -> float:
    """(1/n) ln(||f||_p0 / ||f||_1)."""
    a = cube.as_values(f)
    if np.any(a < 0) or not np.any(a > 0):
        raise ValueError("f must be nonnegative and nonzero")
    n = cube.dim_of(a)
    return max(0.0, (cube.log_lp_norm(a, p0) - cube.log_lp_norm(a, 1.0)) / n)


def _check_p0(p0):
    if not p0 > 1 or math.isinf(p0):
        raise ValueError("p0 must lie in (1, inf)")


def _check_rho0(p0, rho0):
    _check_p0(p0)
    top = (1 - 1 / p0) * LN2
    if not 0 <= rho0 < top:
        raise ValueError(f"rho0 must lie in [0, {top:.17g})")


def x0_of(p0: float, rho0: float) -> float:
    return min(rho0 * p0 / (p0 - 1), LN2)


def bonami(p0: float, t):
    """1 + (p0 - 1) e^(2t)."""
    _check_p0(p0)
    t = np.asarray(t, dtype=np.float64)
    if np.any(t < 0):
        raise ValueError("t must be nonnegative")
    out = 1 + (p0 - 1) * np.exp(2 * t)
    return float(out) if out.ndim == 0 else out


def bonami_curve(p0: float, tgrid) -> HCCurve:
    ts = _grid(tgrid)
    return HCCurve(p0, 0.0, ts, bonami(p0, ts), "bonami")


def hc_ode(p0: float, rho0: float, tgrid) -> HCCurve:
    """Solve u' = C(rho0 (1 + e^-u)), u(0) = ln(p0 - 1) and return p = 1 + e^u."""
    _check_rho0(p0, rho0)
    ts = _grid(tgrid)

    def field_(u):
        arg = rho0 * (1.0 + math.exp(-u))
        # u never decreases, so arg never exceeds x0 <= ln 2 beyond rounding
        assert arg <= LN2 * (1 + 1e-12), arg
        return cfun(min(arg, LN2))

    us = rk4_on_grid(field_, math.log(p0 - 1), ts, ODE_STEP)
    return HCCurve(p0, rho0, ts, 1.0 + np.exp(us), "ode")


def hc_taylor(p0: float, rho0: float):
    """(p'(0), p''(0)) of the ODE curve."""
    _check_rho0(p0, rho0)
    x0 = x0_of(p0, rho0)
    c, dc = cfun(x0), cprime(x0)
    return (p0 - 1) * c, (p0 - 1) * (c * c - dc * c * x0 / p0)


def _rho_tilde(rho0, s):
    # 2 rho0 - ln(2 / (1 + e^-2s))
    return 2 * rho0 + np.log1p(np.exp(-2 * s)) - LN2


def _clamp_time(rho0: float) -> float:
    """s* with rho~(s*) = 0; the integrand is exactly C(0) = 2 afterwards."""
    return -0.5 * math.log(2 * math.exp(-2 * rho0) - 1)


def hc_closed_p2(rho0: float, tgrid) -> HCCurve:
    """p(t) = 1 + exp(int_0^t C(max(rho~(s), 0)) ds), p0 = 2.

    Composite Simpson up to the clamp time s*, where the integrand has a kink,
    and the exact value 2 (t - s*) beyond it.
    """
    _check_rho0(2.0, rho0)
    ts = _grid(tgrid)
    s_star = _clamp_time(rho0)
    smooth = np.minimum(ts, s_star)
    nodes, weights, owner = [], [], []
    prev = 0.0
    for i, t in enumerate(smooth):
        gap = t - prev
        if gap > 0:
            m = max(2, 2 * math.ceil(gap / (2 * SIMPSON_STEP) - 1e-9))
            hh = gap / m
            w = np.ones(m + 1)
            w[1:-1:2] = 4
            w[2:-1:2] = 2
            nodes.append(prev + hh * np.arange(m + 1))
            weights.append(w * hh / 3)
            owner.append(np.full(m + 1, i))
        prev = t
    integral = np.zeros(len(ts))
    if nodes:
        s = np.concatenate(nodes)
        vals = cfun(np.clip(_rho_tilde(rho0, s), 0.0, LN2))
        np.add.at(integral, np.concatenate(owner), np.concatenate(weights) * vals)
    total = np.cumsum(integral) + 2.0 * np.maximum(ts - s_star, 0.0)
    return HCCurve(2.0, rho0, ts, 1.0 + np.exp(total), "hcc-closed")


def hc_firm(rho0: float, t):
    """1 + exp(C(x0) t - C'(x0) t^2 / 2), x0 = 2 rho0."""
    _check_rho0(2.0, rho0)
    t = np.asarray(t, dtype=np.float64)
    if np.any(t < 0):
        raise ValueError("t must be nonnegative")
    x0 = x0_of(2.0, rho0)
    out = 1 + np.exp(cfun(x0) * t - cprime(x0) * t * t / 2)
    return float(out) if out.ndim == 0 else out


def hc_firm_curve(rho0: float, tgrid) -> HCCurve:
    ts = _grid(tgrid)
    return HCCurve(2.0, rho0, ts, hc_firm(rho0, ts), "hcc-firm")


def firm_bonami_crossing(rho0: float) -> float:
    """Time after which the firm estimate drops below Bonami's curve (p0 = 2)."""
    _check_rho0(2.0, rho0)
    x0 = x0_of(2.0, rho0)
    d = cprime(x0)
    return math.inf if d == 0 else 2 * (cfun(x0) - 2) / d


def hc_generic(p0: float, rho0: float, tgrid, bfun=None) -> HCCurve:
    """RK4 for p' = p (p - 1) / rho0 * b(p, p rho0 / (p - 1)).

    ``bfun(p, x)`` is any lower curve for the p-LSI; no default is implied.
    The choice b = bp is the sharp one on the cube.
    """
    if bfun is None:
        raise ValueError("hc_generic needs an explicit bfun(p, x)")
    _check_rho0(p0, rho0)
    if rho0 == 0:
        raise ValueError("the generic field is singular at rho0 = 0")
    ts = _grid(tgrid)

    def field_(p):
        return p * (p - 1) / rho0 * bfun(p, min(p * rho0 / (p - 1), LN2))

    ps = rk4_on_grid(field_, float(p0), ts, ODE_STEP)
    return HCCurve(p0, rho0, ts, ps, "generic", {"bfun": getattr(bfun, "__name__", "custom")})


def large_time_bound(rho0: float) -> float:
    """ln(1 / (e^rho0 - 1)): beyond this time ||T_t f||_inf <= ||f||_p0."""
    if not rho0 > 0:
        raise ValueError("rho0 must be positive")
    return -math.log(math.expm1(rho0))


@dataclass
class HCReport:
    ts: np.ndarray
    ps: np.ndarray
    log_lhs: np.ndarray
    log_rhs: float
    rho0_f: float
    rho0_curve: float
    method: str
    tol: float = NORM_TOL

    @property
    def margins(self) -> np.ndarray:
        """Relative slack ||f||_p0 / ||T_t f||_p(t) - 1 per grid time."""
        return np.expm1(self.log_rhs - self.log_lhs)

    @property
    def passed(self) -> bool:
        return bool(np.all(self.margins >= -self.tol))

    def to_dict(self):
        return {"method": self.method, "rho0_f": self.rho0_f, "rho0_curve": self.rho0_curve,
                "ts": self.ts, "ps": self.ps, "margins": self.margins, "pass": self.passed}


def hc_verify(f, p0: float, curve: HCCurve) -> HCReport:
    """Check ||T_t f||_p(t) <= ||f||_p0 on the curve's grid."""
    a = cube.as_values(f)
    if np.any(a < 0):
        raise ValueError("f must be nonnegative")
    r_f = rho0_of(a, p0)
    if curve.method not in ("bonami",) and curve.rho0 > r_f + 1e-12:
        raise ValueError(f"curve built with rho0 = {curve.rho0} exceeds the function's {r_f}")
    if curve.p0 != p0:
        raise ValueError("curve and check use different p0")
    rhs = cube.log_lp_norm(a, p0)
    lhs = np.array([cube.log_lp_norm(cube.heat(a, t), p) for t, p in zip(curve.ts, curve.ps)])
    return HCReport(curve.ts, curve.ps, lhs, rhs, r_f, curve.rho0, curve.method)


def exponent_trajectory(f, p0: float, tgrid, tol: float = NORM_TOL) -> np.ndarray:
    """For each t, the p with ||T_t f||_p = ||f||_p0 (inf once the sup norm is already below)."""
    a = cube.as_values(f)
    if np.any(a < 0):
        raise ValueError("f must be nonnegative")
    if np.ptp(a) == 0:
        raise ValueError("constant f has no finite exponent curve")
    _check_p0(p0)
    target = cube.log_lp_norm(a, p0)
    out = []
    for t in _grid(tgrid):
        if t == 0:
            out.append(float(p0))
            continue
        g = cube.heat(a, t)
        if cube.log_lp_norm(g, math.inf) <= target:
            out.append(math.inf)
            continue
        lo = float(p0)
        hi = bonami(p0, t) * math.e ** 10
        while cube.log_lp_norm(g, hi) < target:
            lo, hi = hi, hi * 2
        while hi - lo > tol * max(1.0, lo):
            mid = 0.5 * (lo + hi)
            if cube.log_lp_norm(g, mid) < target:
                lo = mid
            else:
                hi = mid
        out.append(0.5 * (lo + hi))
    return np.array(out)


def inner_l2_floor(f, t: float) -> tuple[float, float]:
    """(||T_t f||_2^2, ((1 + e^-2t)/2)^n ||f||_2^2) for nonnegative f."""
    a = cube.as_values(f)
    if np.any(a < 0):
        raise ValueError("f must be nonnegative")
    n = cube.dim_of(a)
    g = cube.heat(a, t)
    return float(np.mean(g * g)), float(((1 + math.exp(-2 * t)) / 2) ** n * np.mean(a * a))


def sup_norm_check(f, p0: float) -> tuple[float, float, float]:
    """(threshold time, ||T_t f||_inf there, ||f||_p0) with rho0 taken from f."""
    r = rho0_of(f, p0)
    t = large_time_bound(r)
    a = cube.as_values(f)
    return t, float(cube.heat(a, max(t, 0.0)).max()), cube.lp_norm(a, p0)


__all__ = [
    "HCCurve", "HCReport", "bonami", "bonami_curve", "hc_ode", "hc_taylor", "hc_closed_p2",
    "hc_firm", "hc_firm_curve", "firm_bonami_crossing", "hc_generic", "hc_verify",
    "large_time_bound", "exponent_trajectory", "inner_l2_floor", "sup_norm_check",
    "rho0_from_rate", "rho0_of", "x0_of", "bp",
]
