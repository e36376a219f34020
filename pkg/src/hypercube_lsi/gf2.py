"""Linear algebra over GF(2) and the weight/uncertainty tools for linear codes.

A matrix is a tuple of Python ints, one per row; bit j of a row is column j.
Messages x in F_2^k are ints as well, and encoding is xM = XOR of the rows
selected by the bits of x. Rates are in bits throughout.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import cube, serialize
from ._backend import kernels
from .curves import LN2, h_inv

MAX_ENUM_K = 24
MAX_SPECTRAL_K = 14
MAX_KERNEL_N = 64


class Gf2Error(ValueError):
    pass


@dataclass(frozen=True)
class Gf2Matrix:
    k: int
    n: int
    rows: tuple

    def __post_init__(self):
        rows = tuple(int(r) for r in self.rows)
        if len(rows) != self.k:
            raise Gf2Error(f"expected {self.k} rows, got {len(rows)}")
        if self.n < 1:
            raise Gf2Error("need at least one column")
        for r in rows:
            if r < 0 or r >> self.n:
                raise Gf2Error("row has bits beyond column n")
        object.__setattr__(self, "rows", rows)

    @classmethod
    def from_bits(cls, bits) -> "Gf2Matrix":
        """From a k x n 0/1 array (or list of 0/1 strings)."""
        bits = [[int(c) for c in (row.strip() if isinstance(row, str) else row)] for row in bits]
        if not bits:
            raise Gf2Error("empty matrix")
        n = len(bits[0])
        rows = []
        for row in bits:
            if len(row) != n or any(c not in (0, 1) for c in row):
                raise Gf2Error("rows must be equal-length 0/1 strings")
            rows.append(sum(1 << j for j, c in enumerate(row) if c))
        return cls(len(rows), n, tuple(rows))

    @classmethod
    def identity(cls, k: int) -> "Gf2Matrix":
        return cls(k, k, tuple(1 << i for i in range(k)))

    @classmethod
    def random(cls, k: int, n: int, rng, full_rank: bool = True) -> "Gf2Matrix":
        if k == 0:
            return cls(0, n, ())
        if full_rank and k > n:
            raise Gf2Error("a full-rank k x n matrix needs k <= n")
        while True:
            bits = rng.integers(0, 2, size=(k, n))
            m = cls.from_bits(bits)
            if not full_rank or rank(m) == k:
                return m

    def to_bits(self) -> np.ndarray:
        out = np.zeros((self.k, self.n), dtype=np.uint8)
        for i, r in enumerate(self.rows):
            for j in range(self.n):
                out[i, j] = (r >> j) & 1
        return out

    def to_text(self) -> str:
        return "".join("".join(str(b) for b in row) + "\n" for row in self.to_bits())

    def column(self, j: int) -> int:
        """Column j as an element of F_2^k (bit i = entry (i, j))."""
        return sum(((r >> j) & 1) << i for i, r in enumerate(self.rows))

    def columns(self) -> list[int]:
        return [self.column(j) for j in range(self.n)]


def parse_matrix(text: str) -> Gf2Matrix:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        raise Gf2Error("no rows in generator text")
    return Gf2Matrix.from_bits(lines)


def weight(v: int) -> int:
    return int(v).bit_count()


def encode(M: Gf2Matrix, x: int) -> int:
    if x < 0 or x >> M.k:
        raise Gf2Error("message has bits beyond k")
    c = 0
    i = 0
    while x:
        if x & 1:
            c ^= M.rows[i]
        x >>= 1
        i += 1
    return c


def _eliminate(rows, n):
    """Reduced row echelon form; returns (rows, pivot columns)."""
    rows = list(rows)
    pivots = []
    r = 0
    for col in range(n):
        bit = 1 << col
        piv = next((i for i in range(r, len(rows)) if rows[i] & bit), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        for i in range(len(rows)):
            if i != r and rows[i] & bit:
                rows[i] ^= rows[r]
        pivots.append(col)
        r += 1
        if r == len(rows):
            break
    return rows[:r], pivots


def rref(M: Gf2Matrix) -> Gf2Matrix:
    rows, _ = _eliminate(M.rows, M.n)
    return Gf2Matrix(len(rows), M.n, tuple(rows))


def rank(M: Gf2Matrix) -> int:
    return len(_eliminate(M.rows, M.n)[0])


def nullspace(M: Gf2Matrix) -> Gf2Matrix:
    """Basis (rows) of {v : M v = 0}, i.e. the dual of the row space."""
    rows, pivots = _eliminate(M.rows, M.n)
    free = [j for j in range(M.n) if j not in set(pivots)]
    basis = []
    for f in free:
        v = 1 << f
        for row, p in zip(rows, pivots):
            if (row >> f) & 1:
                v |= 1 << p
        basis.append(v)
    return Gf2Matrix(len(basis), M.n, tuple(basis))


def stack(A: Gf2Matrix, B: Gf2Matrix) -> Gf2Matrix:
    if A.n != B.n:
        raise Gf2Error("column counts differ")
    return Gf2Matrix(A.k + B.k, A.n, A.rows + B.rows)


def intersection_dim(A: Gf2Matrix, B: Gf2Matrix) -> int:
    """dim(rowspace A cap rowspace B) = rank A + rank B - rank [A; B]."""
    return rank(A) + rank(B) - rank(stack(A, B))


def span(M: Gf2Matrix) -> np.ndarray:
    """All 2^rank elements of the row space, as sorted int64 masks."""
    basis = rref(M).rows
    if len(basis) > MAX_ENUM_K:
        raise Gf2Error("span too large to enumerate")
    out = np.zeros(1, dtype=np.int64)
    for b in basis:
        out = np.concatenate([out, out ^ b])
    return np.sort(out)


def require_full_rank(M: Gf2Matrix):
    if rank(M) != M.k:
        raise Gf2Error("matrix is rank deficient")


def basis_length(M: Gf2Matrix, c: int) -> int:
    """|c|_v: weight of the unique x with xM = c."""
    require_full_rank(M)
    # eliminate on rows augmented with their message tags (bits n..n+k-1)
    aug = [r | (1 << (M.n + i)) for i, r in enumerate(M.rows)]
    mask = (1 << M.n) - 1
    rows, pivots = _eliminate(aug, M.n)
    x = 0
    rem = c
    for row, p in zip(rows, pivots):
        if (rem >> p) & 1:
            rem ^= row & mask
            x ^= row >> M.n
    if rem:
        raise Gf2Error("vector is not in the code")
    return weight(x)


# ---------------------------------------------------------------- weights

def weight_profile(M: Gf2Matrix) -> np.ndarray:
    """Entry w: min |xM| over messages with |x| = w (entry 0 is 0)."""
    if M.k > MAX_ENUM_K:
        raise Gf2Error(f"enumeration limited to k <= {MAX_ENUM_K}")
    if M.n > MAX_KERNEL_N:
        raise Gf2Error(f"enumeration kernel limited to n <= {MAX_KERNEL_N}")
    rows = np.array(M.rows, dtype=np.uint64)
    return np.asarray(kernels.gf2_weight_profile(rows, M.n), dtype=np.int64)


def d_r_table(M: Gf2Matrix) -> np.ndarray:
    """Entry r (1..k): d_r = min{|xM| : |x| >= r}; entry 0 repeats d_1."""
    prof = weight_profile(M)
    tail = np.minimum.accumulate(prof[::-1])[::-1]
    tail[0] = tail[1] if M.k >= 1 else 0
    return tail


def d_r(M: Gf2Matrix, r: int) -> int:
    if not 1 <= r <= M.k:
        raise Gf2Error("r must lie in [1, k]")
    return int(d_r_table(M)[r])


def pareto_front(M: Gf2Matrix) -> list[tuple[int, int]]:
    """Pairs (|x|, |xM|), x != 0, not dominated by a pair with larger-or-equal |x| and smaller-or-equal |xM|."""
    prof = weight_profile(M)
    front = []
    best = math.inf
    for w in range(M.k, 0, -1):
        if prof[w] < best:
            front.append((w, int(prof[w])))
            best = prof[w]
    return front[::-1]


def all_pairs(M: Gf2Matrix) -> list[tuple[int, int]]:
    """Every (|x|, |xM|) pair, sorted; by direct encoding (small k)."""
    return sorted((weight(x), weight(encode(M, x))) for x in range(1, 1 << M.k))


def code_pairs(M: Gf2Matrix) -> list[tuple[int, int]]:
    """Every (|c|_v, |c|) for nonzero codewords c, with |c|_v found by elimination."""
    require_full_rank(M)
    words = span(M)
    return sorted((basis_length(M, int(c)), weight(int(c))) for c in words if c)


# ---------------------------------------------------------------- bounds

def h2(p):
    """Binary entropy in bits."""
    p = np.asarray(p, dtype=np.float64)
    with np.errstate(divide="ignore", invalid="ignore"):
        a = np.where(p > 0, -p * np.log2(np.where(p > 0, p, 1.0)), 0.0)
        b = np.where(p < 1, -(1 - p) * np.log2(np.where(p < 1, 1 - p, 1.0)), 0.0)
    out = a + b
    return float(out) if out.ndim == 0 else out


def h2_inv(bits: float) -> float:
    """rho in [0, 1/2] with h2(rho) = bits; the single bits-to-nats conversion site."""
    if not 0 <= bits <= 1:
        raise ValueError("rate must lie in [0, 1] bits")
    return float(h_inv(bits * LN2))


def delta_lp1(Rbits: float) -> float:
    """1/2 - sqrt(rho (1 - rho)) with h2(rho) = Rbits."""
    if not 0 < Rbits <= 1:
        raise ValueError("rate must lie in (0, 1] bits")
    rho = h2_inv(Rbits)
    return 0.5 - math.sqrt(rho * (1 - rho))


@dataclass
class WitnessVerdict:
    found: bool
    rprime: float
    slack: float
    weight_cap: float
    message_floor: float
    best_pair: tuple | None
    margins: tuple | None

    def to_dict(self):
        return {"found": self.found, "rprime": self.rprime, "slack": self.slack,
                "codeword_weight_cap": self.weight_cap, "message_weight_floor": self.message_floor,
                "best_pair": list(self.best_pair) if self.best_pair else None,
                "margins": list(self.margins) if self.margins else None}


def _targets(k, n, Rprime, slack):
    R = k / n
    if not 0 < Rprime < R:
        raise ValueError(f"need 0 < R' < R = {R}")
    return n * (delta_lp1(Rprime) + slack), k * (delta_lp1(Rprime / R) - slack)


def _best(pairs, cap, floor):
    best, margins = None, None
    for w, c in pairs:
        if w >= max(floor, 1) and c <= cap:
            m = (cap - c, w - floor)
            if best is None or m > margins:
                best, margins = (w, c), m
    return best, margins


def map_witness_search(M: Gf2Matrix, Rprime: float, slack: float) -> WitnessVerdict:
    """Is there x != 0 with |xM|/n <= dLP1(R') + slack and |x|/k >= dLP1(R'/R) - slack?"""
    cap, floor = _targets(M.k, M.n, Rprime, slack)
    prof = weight_profile(M)
    best, margins = _best(((w, int(prof[w])) for w in range(1, M.k + 1)), cap, floor)
    return WitnessVerdict(best is not None, Rprime, slack, cap, floor, best, margins)


def code_witness_search(M: Gf2Matrix, Rprime: float, slack: float) -> WitnessVerdict:
    """The same question asked of codewords c and their basis lengths |c|_v."""
    cap, floor = _targets(M.k, M.n, Rprime, slack)
    best, margins = _best(code_pairs(M), cap, floor)
    return WitnessVerdict(best is not None, Rprime, slack, cap, floor, best, margins)


# ---------------------------------------------------------------- spectra

def _project_all(M: Gf2Matrix) -> np.ndarray:
    """y -> My for every y in F_2^n, as ints in F_2^k."""
    ys = np.arange(1 << M.n, dtype=np.uint64)
    out = np.zeros(1 << M.n, dtype=np.int64)
    for i, r in enumerate(M.rows):
        out |= (np.bitwise_count(ys & np.uint64(r)).astype(np.int64) & 1) << i
    return out


def _message_codewords(M: Gf2Matrix) -> np.ndarray:
    """alpha -> alpha M for every alpha in F_2^k."""
    words = np.zeros(1, dtype=np.int64)
    for r in M.rows:
        words = np.concatenate([words, words ^ r])
    return words


def pushforward(f, M: Gf2Matrix) -> np.ndarray:
    """g(x) = sum over y with My = x of f(y); then g^(alpha) = f^(alpha M)."""
    a = cube.as_values(f)
    if cube.dim_of(a) != M.n:
        raise Gf2Error("function and matrix dimensions differ")
    g = np.zeros(1 << M.k)
    np.add.at(g, _project_all(M), a)
    return g


@dataclass
class LemmaReport:
    ratio_direct: float
    ratio_reduced: float
    support: int
    rho1: float | None
    rho2: float
    hypotheses: dict

    @property
    def agreement(self) -> float:
        return abs(self.ratio_direct - self.ratio_reduced)

    def to_dict(self):
        return {"ratio_direct": self.ratio_direct, "ratio_reduced": self.ratio_reduced,
                "agreement": self.agreement, "support": self.support, "rho1": self.rho1,
                "rho2": self.rho2, "hypotheses": self.hypotheses}


def lemma_ratio(f, M: Gf2Matrix, r: int) -> LemmaReport:
    """sum_{w in C, |w|_v <= r} f^(w)^2 / sum_{w in C} f^(w)^2, computed two ways."""
    require_full_rank(M)
    if M.k > MAX_SPECTRAL_K or M.n > cube.MAX_DIM:
        raise Gf2Error("spectral paths limited to k <= 14")
    if not 0 <= r <= M.k:
        raise Gf2Error("r must lie in [0, k]")
    a = cube.as_values(f)
    fh = cube.wht(a)
    low = cube.popcounts(M.k) <= r
    e = fh[_message_codewords(M)] ** 2
    total = e.sum()
    if total == 0:
        raise ValueError("f has no spectral mass on the code")
    direct = float(e[low].sum() / total)
    gh = cube.wht(pushforward(a, M)) ** 2
    reduced = float(gh[low].sum() / gh.sum())
    # hypotheses in the lemma's parameterization
    A = int(np.count_nonzero(a))
    k = M.k
    log_a = math.log2(A) / k
    rho1 = h2_inv(log_a) if log_a <= 1 else None
    rho2 = h2_inv(min(1.0, math.log2(math.comb(k, r)) / k))
    from .uncertainty import ball_condition  # local: uncertainty imports this module
    hyp = {"k_ge_log2_support": k >= math.log2(A)}
    if rho1 is not None:
        bc = ball_condition(rho1, rho2)
        hyp.update(ball_regime=bc.regime, ball_margin=bc.margin)
    return LemmaReport(direct, reduced, A, rho1, rho2, hyp)


def cayley_apply(h, cols) -> np.ndarray:
    """(A h)(z) = sum_i h(z + c_i) on F_2^k."""
    h = np.asarray(h, dtype=np.float64)
    z = np.arange(len(h))
    out = np.zeros_like(h)
    for c in cols:
        out += h[z ^ c]
    return out


def band_below(h, r: int) -> np.ndarray:
    """Pi_{<r} h: keep the Fourier modes of weight < r."""
    a = cube.as_values(h)
    k = cube.dim_of(a)
    s = cube.wht(a)
    s[cube.popcounts(k) >= r] = 0
    return cube.iwht(s)


@dataclass
class Method1Report:
    n: int
    k: int
    rprime: float
    radius: int
    lambda_b: float
    rayleigh_hb: float
    rows: list = field(default_factory=list)
    tol: float = 1e-9

    @property
    def passed(self) -> bool:
        ok = self.rayleigh_hb >= self.lambda_b - self.tol * max(1.0, self.n)
        for row in self.rows:
            ok = ok and row["rayleigh"] <= row["n_minus_2dr"] + self.tol * max(1.0, self.n)
            ok = ok and row["rayleigh_num"] >= row["lower_num"] - self.tol * max(1.0, self.n)
        return ok

    def to_dict(self):
        return {"n": self.n, "k": self.k, "rprime": self.rprime, "radius": self.radius,
                "lambda_b": self.lambda_b, "rayleigh_hb": self.rayleigh_hb,
                "rows": self.rows, "pass": self.passed}


def code_method1_check(M: Gf2Matrix, Rprime: float, rs=None) -> Method1Report:
    """Push the ball eigenvector through y -> My and test the Rayleigh-quotient bounds.

    The pushforward is h_B(z) = sqrt(sum_{My = z} g_B(y)^2), which keeps the l2 norm
    and cannot lower the Cayley quadratic form.
    """
    from .uncertainty import ball_eigen, radial_to_cube  # local: avoids an import cycle
    require_full_rank(M)
    if M.k > MAX_SPECTRAL_K:
        raise Gf2Error("spectral paths limited to k <= 14")
    if M.n > 20:
        raise Gf2Error("dense pushforward limited to n <= 20")
    if not 0 < Rprime <= 1:
        raise ValueError("R' must lie in (0, 1] bits")
    radius = int(math.floor(h2_inv(Rprime) * M.n))
    lam, prof = ball_eigen(M.n, radius)
    g = radial_to_cube(M.n, prof)
    hb = np.zeros(1 << M.k)
    np.add.at(hb, _project_all(M), g * g)
    hb = np.sqrt(hb)
    cols = M.columns()
    norm2 = float(hb @ hb)
    ray_hb = float(cayley_apply(hb, cols) @ hb) / norm2
    dr = d_r_table(M)
    rows = []
    for r in (range(1, M.k + 1) if rs is None else rs):
        low = band_below(hb, r)
        hh = hb - low
        leak = float(low @ low) / norm2
        hn = float(hh @ hh)
        num = float(cayley_apply(hh, cols) @ hh)
        rows.append({
            "r": int(r), "d_r": int(dr[r]), "n_minus_2dr": M.n - 2 * int(dr[r]),
            "rayleigh": num / hn if hn > 0 else -math.inf,
            "rayleigh_num": num, "lower_num": lam * norm2 - M.n * leak * norm2,
            "leakage": leak,
        })
    return Method1Report(M.n, M.k, Rprime, radius, lam, ray_hb, rows)


# ---------------------------------------------------------------- report

@dataclass
class CodeReport:
    M: Gf2Matrix
    profile: np.ndarray
    front: list
    d_r: np.ndarray
    witnesses: list
    warnings: list = field(default_factory=list)

    def to_dict(self):
        k, n = self.M.k, self.M.n
        return {
            "k": k, "n": n, "R": k / n,
            "weight_profile": [[w, int(self.profile[w])] for w in range(1, k + 1)],
            "pareto_front": [list(p) for p in self.front],
            "d_r": {str(r): int(self.d_r[r]) for r in range(1, k + 1)},
            "witnesses": self.witnesses,
            "warnings": self.warnings,
        }

    def to_json(self) -> str:
        return serialize.dumps(self.to_dict())

    def front_csv(self) -> str:
        xs = [p[0] for p in self.front]
        cs = [p[1] for p in self.front]
        return serialize.csv_text(["message_weight", "codeword_weight"], [xs, cs])


def analyze(M: Gf2Matrix, rprimes=(), slack: float = 0.0) -> CodeReport:
    """Full report; a rank-deficient generator is first reduced to a basis of its image."""
    warnings = []
    r = rank(M)
    if r < M.k:
        warnings.append(f"generator has rank {r} < {M.k}; using a basis of its row space")
        M = rref(M)
    if M.k == 0:
        raise Gf2Error("generator has rank 0")
    prof = weight_profile(M)
    wit = []
    for rp in rprimes:
        v = map_witness_search(M, rp, slack)
        wit.append(v.to_dict())
    return CodeReport(M, prof, pareto_front(M), d_r_table(M), wit, warnings)
