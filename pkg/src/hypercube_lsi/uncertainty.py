"""Uncertainty principle on F_2^n: subsets, Fourier projections and angles.

V_S is the space of functions supported on S and V^_Sigma the space of
functions whose spectrum lives on Sigma. The cosine of the angle between
them is the top singular value of the cross-Gram matrix
M[x, w] = 2^(-n/2) (-1)^<w, x>, x in S, w in Sigma.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.special import gammaln, logsumexp

from . import cube, serialize
from .curves import LN2, h
from .gf2 import Gf2Matrix, intersection_dim, nullspace, rank, rref, span
from .seeds import DEFAULT_SEED, rng_for

SIZE_GUARD = 1 << 20
CRITICAL_TOL = 1e-12


# ---------------------------------------------------------------- subsets

@dataclass(frozen=True)
class SubsetSpec:
    kind: str
    n: int
    members: tuple = ()
    radius: int | None = None
    basis: Gf2Matrix | None = None

    def __post_init__(self):
        if self.n < 1 or self.n > cube.MAX_DIM:
            raise ValueError("n out of range")
        if self.kind == "explicit":
            m = tuple(sorted(set(int(v) for v in self.members)))
            if any(v < 0 or v >> self.n for v in m):
                raise ValueError("explicit member out of range")
            if not m:
                raise ValueError("empty subset")
            object.__setattr__(self, "members", m)
        elif self.kind == "ball":
            if self.radius is None or not 0 <= self.radius <= self.n:
                raise ValueError("ball radius must lie in [0, n]")
        elif self.kind == "linear":
            if self.basis is None or self.basis.n != self.n:
                raise ValueError("linear spec needs an n-column basis")
            object.__setattr__(self, "basis", rref(self.basis))
        else:
            raise ValueError(f"unknown subset kind {self.kind!r}")

    @classmethod
    def explicit(cls, n, members):
        return cls("explicit", n, tuple(members))

    @classmethod
    def ball(cls, n, r):
        return cls("ball", n, radius=int(r))

    @classmethod
    def linear(cls, n, basis: Gf2Matrix | None = None):
        if basis is None:
            basis = Gf2Matrix(0, n, ())
        return cls("linear", n, basis=basis)

    @classmethod
    def full(cls, n):
        return cls.ball(n, n)

    def elements(self) -> np.ndarray:
        if self.kind == "explicit":
            return np.array(self.members, dtype=np.int64)
        if self.kind == "ball":
            return np.flatnonzero(cube.popcounts(self.n) <= self.radius).astype(np.int64)
        return span(self.basis)

    @property
    def size(self) -> int:
        if self.kind == "explicit":
            return len(self.members)
        if self.kind == "ball":
            return sum(math.comb(self.n, i) for i in range(self.radius + 1))
        return 1 << rank(self.basis)

    def mask(self) -> np.ndarray:
        out = np.zeros(1 << self.n, dtype=bool)
        out[self.elements()] = True
        return out

    def to_text(self) -> str:
        if self.kind == "explicit":
            return "explicit: " + ",".join(str(v) for v in self.members) + "\n"
        if self.kind == "ball":
            return f"ball: {self.radius}\n"
        return "linear:\n" + self.basis.to_text()


def parse_subset(text: str, n: int) -> SubsetSpec:
    """Read 'explicit: m1,m2,...', 'ball: r' or 'linear:' followed by 0/1 rows."""
    body = text.strip()
    m = re.match(r"^(explicit|ball|linear)\s*:\s*(.*)$", body, re.S)
    if not m:
        raise ValueError("subset must start with explicit:, ball: or linear:")
    kind, rest = m.group(1), m.group(2).strip()
    if kind == "explicit":
        items = [s for s in re.split(r"[,\s]+", rest) if s]
        if not items:
            raise ValueError("empty explicit subset")
        return SubsetSpec.explicit(n, [int(s, 0) for s in items])
    if kind == "ball":
        return SubsetSpec.ball(n, int(rest))
    rows = [s for s in re.split(r"[,\s]+", rest) if s]
    if not rows:
        return SubsetSpec.linear(n)
    if any(len(r) != n for r in rows):
        raise ValueError(f"linear rows must have {n} characters")
    return SubsetSpec.linear(n, Gf2Matrix.from_bits(rows))


# ---------------------------------------------------------------- projections

def _band_mask(n, band) -> np.ndarray:
    if isinstance(band, SubsetSpec):
        if band.n != n:
            raise ValueError("band dimension differs")
        return band.mask()
    w = cube.popcounts(n)
    if callable(band):
        return np.asarray(band(w), dtype=bool)
    return w == int(band)


def fourier_project(f, band) -> np.ndarray:
    """Keep f^ on a band: an exact weight a, a predicate on |w|, or a SubsetSpec of frequencies."""
    a = cube.as_values(f)
    n = cube.dim_of(a)
    s = cube.wht(a)
    s[~_band_mask(n, band)] = 0
    return cube.iwht(s)


def project_le(f, r: int) -> np.ndarray:
    return fourier_project(f, lambda w: w <= r)


# ---------------------------------------------------------------- angles

@dataclass
class AngleReport:
    cos_angle: float
    method: str
    dims: tuple
    left: np.ndarray | None = None
    right: np.ndarray | None = None
    extra: dict = field(default_factory=dict)

    def to_dict(self):
        d = {"cos_angle": self.cos_angle, "method": self.method, "dims": list(self.dims)}
        d.update(self.extra)
        return d

    def to_json(self) -> str:
        return serialize.dumps(self.to_dict())


def cross_gram(S: SubsetSpec, Sigma: SubsetSpec) -> np.ndarray:
    xs = S.elements().astype(np.uint64)
    ws = Sigma.elements().astype(np.uint64)
    if len(xs) * len(ws) > SIZE_GUARD:
        raise ValueError(f"cross-Gram matrix {len(xs)} x {len(ws)} exceeds the size guard")
    par = np.bitwise_count(xs[:, None] & ws[None, :]) & 1
    return (1.0 - 2.0 * par) * 2.0 ** (-S.n / 2)


def cos_angle(S: SubsetSpec, Sigma: SubsetSpec, keep_vectors: bool = False) -> AngleReport:
    if S.n != Sigma.n:
        raise ValueError("dimension mismatch")
    M = cross_gram(S, Sigma)
    if keep_vectors:
        u, s, vt = np.linalg.svd(M)
        return AngleReport(float(s[0]), "svd", M.shape, u[:, 0], vt[0])
    s = np.linalg.svd(M, compute_uv=False)
    return AngleReport(float(s[0]), "svd", M.shape)


def cos_angle_linear(S: SubsetSpec, Sigma: SubsetSpec) -> AngleReport:
    """sqrt(|Sigma cap S^perp| / |S^perp|) for linear S and Sigma."""
    if S.kind != "linear" or Sigma.kind != "linear":
        raise ValueError("both subsets must be linear")
    if S.n != Sigma.n:
        raise ValueError("dimension mismatch")
    dual = nullspace(S.basis)
    a = intersection_dim(Sigma.basis, dual)
    b = dual.k
    return AngleReport(2.0 ** ((a - b) / 2), "linear-formula", (S.size, Sigma.size),
                       extra={"dim_intersection": a, "dim_dual": b})


def function_of_vector(S: SubsetSpec, u: np.ndarray) -> np.ndarray:
    """Embed coefficients on S into a full cube vector."""
    f = np.zeros(1 << S.n)
    f[S.elements()] = u
    return f


# ---------------------------------------------------------------- regimes

@dataclass
class BallCondition:
    regime: str
    margin: float
    margin_alt: float

    def to_dict(self):
        return {"regime": self.regime, "margin": self.margin, "margin_alt": self.margin_alt}


def ball_condition(rho1: float, rho2: float) -> BallCondition:
    """(1 - 2 rho1)^2 + (1 - 2 rho2)^2 - 1 and its equivalent 1 - 2 sqrt(rho1 (1 - rho1)) - 2 rho2."""
    for r in (rho1, rho2):
        if not 0 <= r <= 0.5:
            raise ValueError("radii fractions must lie in [0, 1/2]")
    m1 = (1 - 2 * rho1) ** 2 + (1 - 2 * rho2) ** 2 - 1
    m2 = 1 - 2 * math.sqrt(rho1 * (1 - rho1)) - 2 * rho2
    if abs(m1) <= CRITICAL_TOL or abs(m2) <= CRITICAL_TOL:
        regime = "critical"
    else:
        if (m1 > 0) != (m2 > 0):
            raise ArithmeticError("equivalent forms disagree in sign")
        regime = "positive" if m1 > 0 else "negative"
    return BallCondition(regime, m1, m2)


def concentration_report(f, S: SubsetSpec, Sigma: SubsetSpec) -> tuple[float, float]:
    """(||f 1_S||^2 / ||f||^2, sum_{w in Sigma} f^^2 / sum f^^2)."""
    a = cube.as_values(f)
    tot = float(a @ a)
    if tot == 0:
        raise ValueError("zero function")
    e = a[S.elements()]
    s = cube.wht(a)
    se = s[Sigma.elements()]
    return float(e @ e) / tot, float(se @ se) / float(s @ s)


# ---------------------------------------------------------------- converse witness

def _log_binom(n, j):
    return gammaln(n + 1) - gammaln(j + 1) - gammaln(n - j + 1)


def _radial_tail(n, log_ratio, rho):
    """sum_{j > rho n} C(n,j) q^j / sum_j C(n,j) q^j, with log q given."""
    j = np.arange(n + 1)
    with np.errstate(invalid="ignore"):
        lw = _log_binom(n, j) + np.where(j > 0, j * log_ratio, 0.0)
    cut = math.floor(rho * n + 1e-9)
    if cut >= n:
        return 0.0
    return float(np.exp(logsumexp(lw[cut + 1:]) - logsumexp(lw)))


@dataclass
class WitnessTails:
    n: int
    alpha: float
    beta: float
    tail1: float
    tail2: float

    @property
    def cos_lower(self) -> float:
        """1 - tail1 - tail2 bounds the cosine from below for the two balls."""
        return 1.0 - self.tail1 - self.tail2

    def to_dict(self):
        return {"n": self.n, "alpha": self.alpha, "beta": self.beta, "tail1": self.tail1,
                "tail2": self.tail2, "cos_lower": self.cos_lower}


def witness_alpha(n: int, alpha: float, rho1: float, rho2: float) -> WitnessTails:
    """Tail energies of f(x) = alpha^|x| outside B_{rho1 n}, and of f^ outside B_{rho2 n}.

    f^(w) = (1 + alpha)^n beta^|w| with beta = (1 - alpha)/(1 + alpha); both sums are radial.
    """
    if abs(alpha) == 1:
        raise ValueError("alpha = +-1 is excluded")
    beta = (1 - alpha) / (1 + alpha)
    with np.errstate(divide="ignore"):
        la = 2 * math.log(abs(alpha)) if alpha != 0 else -math.inf
        lb = 2 * math.log(abs(beta)) if beta != 0 else -math.inf
    return WitnessTails(n, alpha, beta, _radial_tail(n, la, rho1), _radial_tail(n, lb, rho2))


def witness_dense(n: int, alpha: float, rho1: float, rho2: float) -> tuple[float, float]:
    """Same tails computed on the cube (small n)."""
    w = cube.popcounts(n)
    f = float(alpha) ** w
    fh = cube.wht(f)
    t1 = float(np.sum(f[w > rho1 * n + 1e-9] ** 2) / np.sum(f ** 2))
    t2 = float(np.sum(fh[w > rho2 * n + 1e-9] ** 2) / np.sum(fh ** 2))
    return t1, t2


def choose_alpha(rho1: float, rho2: float) -> float:
    """alpha in (0, 1) equalizing the gaps rho1 - a^2/(1+a^2) and rho2 - b^2/(1+b^2)."""
    def gap(a):
        b = (1 - a) / (1 + a)
        return (rho1 - a * a / (1 + a * a)) - (rho2 - b * b / (1 + b * b))

    lo, hi = 0.0, 1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if gap(mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------- balls

def krawtchouk(n: int, k: int, x: int) -> int:
    """K_k(x) = sum_j (-1)^j C(x, j) C(n - x, k - j)."""
    if not (0 <= k <= n and 0 <= x <= n):
        raise ValueError("need 0 <= k, x <= n")
    return sum((-1) ** j * math.comb(x, j) * math.comb(n - x, k - j) for j in range(k + 1))


def subcube_witness(n: int, r1: int) -> np.ndarray:
    """Indicator of {x : bits r1..n-1 of x are zero}."""
    x = np.arange(1 << n)
    return ((x >> r1) == 0).astype(np.float64)


@dataclass
class BallVerdict:
    n: int
    r1: int
    r2: int
    predicted_full: bool
    cos_angle: float | None
    witness_fractions: tuple | None

    @property
    def consistent(self) -> bool:
        if self.predicted_full:
            ok = self.witness_fractions is not None and min(self.witness_fractions) >= 1 - 1e-12
            if self.cos_angle is not None:
                ok = ok and self.cos_angle >= 1 - 1e-9
            return ok
        return self.cos_angle is not None and self.cos_angle < 1 - 1e-9

    def to_dict(self):
        return {"n": self.n, "r1": self.r1, "r2": self.r2, "predicted_full": self.predicted_full,
                "cos_angle": self.cos_angle,
                "witness_fractions": list(self.witness_fractions) if self.witness_fractions else None,
                "consistent": self.consistent}


def ball_proposition(n: int, r1: int, r2: int, svd_max_n: int = 10) -> BallVerdict:
    """cos = 1 between the two balls iff r1 + r2 >= n; witness or SVD confirms."""
    if not (0 <= r1 <= n and 0 <= r2 <= n):
        raise ValueError("radii must lie in [0, n]")
    S, Sig = SubsetSpec.ball(n, r1), SubsetSpec.ball(n, r2)
    full = r1 + r2 >= n
    frac = None
    if full:
        frac = concentration_report(subcube_witness(n, r1), S, Sig)
    cosv = None
    if n <= svd_max_n and S.size * Sig.size <= SIZE_GUARD:
        cosv = cos_angle(S, Sig).cos_angle
    return BallVerdict(n, r1, r2, full, cosv, frac)


def ball_eigen(n: int, r: int) -> tuple[float, np.ndarray]:
    """Top eigenpair of the cube adjacency restricted to B_r, via the radial tridiagonal.

    The returned vector v is normalized and nonnegative; the cube function is
    g(y) = v_|y| / sqrt(C(n, |y|)).
    """
    if not 0 <= r <= n:
        raise ValueError("radius must lie in [0, n]")
    if r == 0:
        return 0.0, np.ones(1)
    j = np.arange(r)
    off = np.sqrt((j + 1.0) * (n - j))
    w, v = eigh_tridiagonal(np.zeros(r + 1), off, select="i", select_range=(r, r))
    vec = v[:, 0]
    vec = vec * np.sign(vec[np.argmax(np.abs(vec))])
    return float(w[0]), np.abs(vec)


def radial_to_cube(n: int, prof) -> np.ndarray:
    prof = np.asarray(prof, dtype=np.float64)
    w = cube.popcounts(n)
    scale = np.array([math.sqrt(math.comb(n, i)) for i in range(n + 1)])
    out = np.zeros(1 << n)
    inside = w < len(prof)
    out[inside] = prof[w[inside]] / scale[w[inside]]
    return out


# ---------------------------------------------------------------- entropic

def hirschmann_check(f) -> float:
    """n ln 2 - [Ent(f^2)/E f^2 + Ent(f^^2)/E f^^2]."""
    a = cube.as_values(f)
    n = cube.dim_of(a)
    if not np.any(a != 0):
        raise ValueError("f must be nonzero")
    return n * LN2 - cube.entropy_ratio(a * a, 1.0) - cube.entropy_ratio(cube.wht(a) ** 2, 1.0)


def cardinality_bound(E1: float, E2: float, n: int) -> float:
    """Upper bound on theta^2 = cos^2 for |S| = e^(n E1), |Sigma| = e^(n E2)."""
    if not (0 <= E1 < LN2 and 0 <= E2 < LN2):
        raise ValueError("E1, E2 must lie in [0, ln 2)")
    delta = LN2 - E1 - E2
    if delta <= 0:
        raise ValueError("need E1 + E2 < ln 2")
    return 1 - (delta - LN2 / n) / (LN2 - max(E1, E2))


# ---------------------------------------------------------------- forward sweep

def bc3_sides(f, a: int, t: float, p: float) -> tuple[float, float, float]:
    """(||Pi_a f||^2, e^(at) (T_t f, f), e^(at) ||f||_q ||T_t f||_p) with 1/p + 1/q = 1."""
    x = cube.as_values(f)
    pa = fourier_project(x, a)
    tf = cube.heat(x, t)
    q = p / (p - 1)
    e = math.exp(a * t)
    return float(np.mean(pa * pa)), e * float(np.mean(tf * x)), e * cube.lp_norm(x, q) * cube.lp_norm(tf, p)


def analytic_band_bound(n: int, rho1: float, r: int, tmax: float = 3.0, dt: float = 0.01) -> float:
    """sqrt of sum_{a <= r} min_t exp(a t - n (ln 2 - h(rho1)) (1/2 - 1/p(t))), capped at 1."""
    from .hyper import hc_ode
    gap = LN2 - h(rho1)
    ts = np.arange(0.0, tmax + dt / 2, dt)
    ps = hc_ode(2.0, gap / 2, ts).ps
    decay = -n * gap * (0.5 - 1.0 / ps)
    total = 0.0
    for a in range(r + 1):
        total += float(np.exp(np.min(a * ts + decay)))
    return min(1.0, math.sqrt(total))


@dataclass
class SweepReport:
    rho1: float
    rho2: float
    ns: list
    sizes: list
    radii: list
    max_ratio: list
    max_cos: list
    bound: list
    slope: float
    slope_cos: float
    seed: int

    def to_dict(self):
        return {"rho1": self.rho1, "rho2": self.rho2, "ns": self.ns, "support_sizes": self.sizes,
                "radii": self.radii, "max_ratio": self.max_ratio, "max_cos": self.max_cos,
                "analytic_bound": self.bound, "fit_slope": self.slope,
                "fit_slope_cos": self.slope_cos, "seed": self.seed}


def support_size(n: int, rho1: float) -> int:
    return max(1, math.floor(math.exp(n * h(rho1))))


def uncert_sweep(ns, rho1: float, rho2: float, trials: int, seed: int = DEFAULT_SEED) -> SweepReport:
    """Random supports of size floor(e^(n h(rho1))) against the ball B_{floor(rho2 n)}.

    For each n, max over trials of ||Pi_{<=r} f|| / ||f|| for random Gaussian f on the
    support (max_ratio), and of the exact cosine for that support (max_cos).
    """
    ns = [int(v) for v in ns]
    sizes, radii, ratios, coss, bounds = [], [], [], [], []
    for n in ns:
        m = support_size(n, rho1)
        r = math.floor(rho2 * n + 1e-9)
        Sig = SubsetSpec.ball(n, r)
        best_ratio = best_cos = 0.0
        for trial in range(trials):
            rng = rng_for(seed, n, trial)
            members = rng.permutation(1 << n)[:m]
            f = np.zeros(1 << n)
            f[members] = rng.standard_normal(m)
            if not np.any(f):
                continue
            low = project_le(f, r)
            best_ratio = max(best_ratio, math.sqrt(float(low @ low) / float(f @ f)))
            best_cos = max(best_cos, cos_angle(SubsetSpec.explicit(n, members), Sig).cos_angle)
        sizes.append(m)
        radii.append(r)
        ratios.append(best_ratio)
        coss.append(best_cos)
        bounds.append(analytic_band_bound(n, rho1, r))
    slope = float(np.polyfit(ns, np.log(ratios), 1)[0]) if len(ns) > 1 else math.nan
    slope_cos = float(np.polyfit(ns, np.log(coss), 1)[0]) if len(ns) > 1 else math.nan
    return SweepReport(rho1, rho2, ns, sizes, radii, ratios, coss, bounds, slope, slope_cos, seed)


__all__ = [
    "SubsetSpec", "parse_subset", "fourier_project", "project_le", "AngleReport", "cross_gram",
    "cos_angle", "cos_angle_linear", "ball_condition", "concentration_report", "witness_alpha",
    "witness_dense", "choose_alpha", "krawtchouk", "subcube_witness", "ball_proposition",
    "ball_eigen", "radial_to_cube", "hirschmann_check", "cardinality_bound", "bc3_sides",
    "analytic_band_bound", "uncert_sweep", "support_size",
]
