"""Command-line front end.

Exit codes: 0 all checks pass, 1 some margin fell below tolerance, 2 bad usage
or input. JSON output is {"config": ..., "result": ...}; CSV output starts
with a single '# config: {...}' comment line.
"""
from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import cube, curves, gf2, hyper, mgl, serialize, uncertainty
from ._backend import BACKEND
from .seeds import DEFAULT_SEED, ordered_map, rng_for

CURVE_KINDS = ("b1", "bp", "C", "mgl", "hc-ode", "hc-closed", "hc-firm", "bonami")
SUITES = ("lsi", "mgl", "hc", "uncertainty", "coding")
TOL = 1e-9


class UsageError(Exception):
    pass


def parse_grid(text: str) -> np.ndarray:
    try:
        start, stop, step = (float(v) for v in text.split(":"))
    except ValueError as exc:
        raise UsageError(f"--t expects start:stop:step, got {text!r}") from exc
    if not (step > 0 and stop >= start >= 0) or not all(map(math.isfinite, (start, stop, step))):
        raise UsageError("--t needs 0 <= start <= stop and step > 0")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return start + step * np.arange(count)


def _emit(args, config: dict, result, csv_text: str | None = None) -> str:
    if args.format == "csv":
        if csv_text is None:
            raise UsageError(f"{args.command} has no CSV form")
        out = "# config: " + json.dumps(config, sort_keys=True) + "\n" + csv_text
    else:
        out = serialize.dumps({"config": config, "result": result})
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)
    return out


def _config(args, **extra) -> dict:
    keep = {k: v for k, v in vars(args).items() if k not in ("func", "out") and v is not None}
    keep.update(extra)
    return keep


def _need(args, *names):
    for name in names:
        if getattr(args, name) is None:
            raise UsageError(f"--{name.replace('_', '-')} is required here")


# ---------------------------------------------------------------- curves

def cmd_curves(args) -> int:
    kind = args.kind
    ts = parse_grid(args.t) if args.t else parse_grid("0:2:0.01")
    if kind in ("b1", "bp", "C"):
        if args.points < 2:
            raise UsageError("--points must be at least 2")
        if kind == "bp":
            _need(args, "p")
            if args.p in (0, 1):
                raise UsageError("bp needs p outside {0, 1}")
        samples = curves.sample(kind, args.points, args.p)
        cfg = _config(args)
        cfg.pop("t", None)
    else:
        cfg = _config(args, t=args.t or "0:2:0.01")
        if kind == "mgl":
            _need(args, "rho0")
            ys = mgl.mgl_bound(ts, args.rho0)
            samples = curves.CurveSamples("mgl", ts, ys, {"rho0": args.rho0}, "t", "rho_bound")
        elif kind == "hc-ode":
            _need(args, "p0", "rho0")
            c = hyper.hc_ode(args.p0, args.rho0, ts)
            samples = curves.CurveSamples("hc-ode", ts, c.ps, {"p0": args.p0, "rho0": args.rho0}, "t", "p")
        elif kind == "hc-closed":
            _need(args, "rho0")
            c = hyper.hc_closed_p2(args.rho0, ts)
            samples = curves.CurveSamples("hc-closed", ts, c.ps, {"p0": 2.0, "rho0": args.rho0}, "t", "p")
        elif kind == "hc-firm":
            _need(args, "rho0")
            samples = curves.CurveSamples("hc-firm", ts, hyper.hc_firm(args.rho0, ts),
                                          {"p0": 2.0, "rho0": args.rho0}, "t", "p")
        else:
            p0 = 2.0 if args.p0 is None else args.p0
            samples = curves.CurveSamples("bonami", ts, hyper.bonami(p0, ts), {"p0": p0}, "t", "p")
    _emit(args, cfg, samples.to_dict(), samples.to_csv())
    return 0


# ---------------------------------------------------------------- verify

def _random_positive(rng, n):
    return rng.exponential(size=1 << n) + 1e-3


def _suite_lsi(args):
    n, p = args.n or 6, 2.0 if args.p is None else args.p
    if p == 0:
        raise UsageError("p = 0 is excluded")
    trials = args.trials or 1000

    def one(i):
        f = _random_positive(rng_for(args.seed, n, i), n)
        return curves.verify_plsi(f, p)

    margins = np.array(ordered_map(one, range(trials)))
    return {"n": n, "p": p, "trials": trials, "min_margin": float(margins.min()),
            "worst_trial": int(margins.argmin())}, bool(margins.min() >= -TOL)


def _suite_mgl(args):
    n = args.n or 8
    trials = args.trials or 100
    ts = parse_grid(args.t or "0:3:0.1")
    if args.infile:
        with open(args.infile, encoding="utf-8") as fh:
            funcs = [cube.function_from_text(fh.read()).values]
    else:
        funcs = [rng_for(args.seed, n, i).random(1 << n) for i in range(trials)]
    traces = ordered_map(lambda f: mgl.verify_mgl(f, ts, ode=False), funcs)
    margins = np.array([t.margins.min() for t in traces])
    return {"n": int(cube.dim_of(funcs[0])), "trials": len(funcs), "min_margin": float(margins.min()),
            "worst_trial": int(margins.argmin())}, bool(margins.min() >= -TOL)


def _suite_hc(args):
    n = args.n or 8
    R = 0.5 if args.rate is None else args.rate
    p0 = 2.0 if args.p0 is None else args.p0
    trials = args.trials or 50
    ts = parse_grid(args.t or "0:2:0.05")
    rho0 = hyper.rho0_from_rate(p0, R) if args.rho0 is None else args.rho0
    curve = hyper.hc_ode(p0, rho0, ts)
    size = max(1, math.floor(2 ** (n * R) + 1e-9))

    def one(i):
        rng = rng_for(args.seed, n, i)
        f = np.zeros(1 << n)
        f[rng.permutation(1 << n)[:size]] = 1.0
        return hyper.hc_verify(f, p0, curve).margins.min()

    margins = np.array(ordered_map(one, range(trials)))
    return {"n": n, "rate": R, "p0": p0, "rho0": rho0, "support": size, "trials": trials,
            "min_margin": float(margins.min()), "worst_trial": int(margins.argmin())}, \
        bool(margins.min() >= -TOL)


def _suite_uncertainty(args):
    n = args.n or 8
    rho1 = 0.05 if args.rho1 is None else args.rho1
    rho2 = 0.25 if args.rho2 is None else args.rho2
    trials = args.trials or 50
    ts = parse_grid(args.t or "0:1:0.1")
    m = uncertainty.support_size(n, rho1)
    r = math.floor(rho2 * n + 1e-9)
    ps = hyper.hc_ode(2.0, (curves.LN2 - curves.h(rho1)) / 2, ts).ps
    Sig = uncertainty.SubsetSpec.ball(n, r)

    def one(i):
        rng = rng_for(args.seed, n, i)
        members = rng.permutation(1 << n)[:m]
        f = np.zeros(1 << n)
        f[members] = rng.standard_normal(m)
        S = uncertainty.SubsetSpec.explicit(n, members)
        cos2 = uncertainty.cos_angle(S, Sig).cos_angle ** 2
        frac = uncertainty.concentration_report(f, S, Sig)[1]
        worst = cos2 - frac
        for a in range(n + 1):
            for t, p in zip(ts, ps):
                lhs, mid, rhs = uncertainty.bc3_sides(f, a, t, p)
                worst = min(worst, mid - lhs, rhs - mid)
        return min(worst, uncertainty.hirschmann_check(f))

    margins = np.array(ordered_map(one, range(trials)))
    return {"n": n, "rho1": rho1, "rho2": rho2, "support": m, "radius": r, "trials": trials,
            "regime": uncertainty.ball_condition(rho1, rho2).regime,
            "min_margin": float(margins.min()), "worst_trial": int(margins.argmin())}, \
        bool(margins.min() >= -TOL)


def _suite_coding(args):
    k = args.k or 7
    n = args.n or 14
    if not 1 <= k <= min(n, gf2.MAX_SPECTRAL_K):
        raise UsageError("coding suite needs 1 <= k <= min(n, 14)")
    rp = 0.25 if args.rprime is None else args.rprime
    slack = 0.1 if args.slack is None else args.slack
    trials = args.trials or 50

    def one(i):
        rng = rng_for(args.seed, k, n, i)
        M = gf2.Gf2Matrix.random(k, n, rng)
        dr = gf2.d_r_table(M)
        ok = bool(np.all(np.diff(dr[1:]) >= 0))
        front = gf2.pareto_front(M)
        ok = ok and all(dr[w] <= c for w, c in front)
        vm = gf2.map_witness_search(M, rp, slack)
        vc = gf2.code_witness_search(M, rp, slack)
        ok = ok and vm.found == vc.found
        f = np.zeros(1 << n)
        f[rng.permutation(1 << n)[: 1 << max(1, k // 2)]] = rng.standard_normal(1 << max(1, k // 2))
        lr = gf2.lemma_ratio(f, M, max(1, k // 4))
        ok = ok and lr.agreement <= 1e-10
        return ok, vm.found, lr.agreement

    rows = ordered_map(one, range(trials))
    identities = all(r[0] for r in rows)
    return {"k": k, "n": n, "rprime": rp, "slack": slack, "trials": trials,
            "witness_rate": sum(r[1] for r in rows) / trials,
            "max_lemma_disagreement": max(r[2] for r in rows),
            "identities_hold": identities}, identities


def cmd_verify(args) -> int:
    if args.n is not None and not 1 <= args.n <= 16:
        raise UsageError("--n must lie in [1, 16] for verification suites")
    if args.trials is not None and args.trials < 1:
        raise UsageError("--trials must be positive")
    suite = {"lsi": _suite_lsi, "mgl": _suite_mgl, "hc": _suite_hc,
             "uncertainty": _suite_uncertainty, "coding": _suite_coding}[args.suite]
    result, ok = suite(args)
    result["pass"] = ok
    _emit(args, _config(args, backend=BACKEND), result)
    return 0 if ok else 1


# ---------------------------------------------------------------- angle / code

def _read_spec(text: str, n: int) -> uncertainty.SubsetSpec:
    if text.startswith("@"):
        with open(text[1:], encoding="utf-8") as fh:
            text = fh.read()
    return uncertainty.parse_subset(text, n)


def cmd_angle(args) -> int:
    _need(args, "n", "S", "Sigma")
    S = _read_spec(args.S, args.n)
    Sig = _read_spec(args.Sigma, args.n)
    result = {"S": S.to_text().strip(), "Sigma": Sig.to_text().strip()}
    svd = uncertainty.cos_angle(S, Sig)
    result["svd"] = svd.to_dict()
    if S.kind == "linear" and Sig.kind == "linear":
        lin = uncertainty.cos_angle_linear(S, Sig)
        result["linear_formula"] = lin.to_dict()
        result["difference"] = abs(svd.cos_angle - lin.cos_angle)
    _emit(args, _config(args), result)
    return 0


def cmd_code(args) -> int:
    _need(args, "infile")
    with open(args.infile, encoding="utf-8") as fh:
        M = gf2.parse_matrix(fh.read())
    if M.k > gf2.MAX_ENUM_K:
        raise UsageError(f"k = {M.k} exceeds the enumeration guard {gf2.MAX_ENUM_K}")
    rps = [] if args.rprime is None else [args.rprime]
    report = gf2.analyze(M, rps, args.slack or 0.0)
    for w in report.warnings:
        print(f"warning: {w}", file=sys.stderr)
    _emit(args, _config(args), report.to_dict(), report.front_csv())
    return 0


# ---------------------------------------------------------------- parser

def _common(p):
    p.add_argument("--n", type=int)
    p.add_argument("--p", type=float)
    p.add_argument("--p0", type=float)
    p.add_argument("--rho0", type=float)
    p.add_argument("--rho1", type=float)
    p.add_argument("--rho2", type=float)
    p.add_argument("--rprime", type=float)
    p.add_argument("--slack", type=float)
    p.add_argument("--rate", type=float, help="support rate R in bits")
    p.add_argument("--k", type=int)
    p.add_argument("--t", help="time grid start:stop:step")
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--in", dest="infile")
    p.add_argument("--out")
    p.add_argument("--format", choices=("json", "csv"), default="json")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hypercube-lsi", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("curves", help="sample an analytic curve")
    p.add_argument("kind", choices=CURVE_KINDS)
    p.add_argument("--points", type=int, default=1000)
    _common(p)
    p.set_defaults(func=cmd_curves)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("suite", choices=SUITES)
    _common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("angle", help="cosine of the angle between V_S and the spectral space of Sigma")
    p.add_argument("--S", required=True, help="subset spec or @file")
    p.add_argument("--Sigma", required=True, help="subset spec or @file")
    _common(p)
    p.set_defaults(func=cmd_angle)

    p = sub.add_parser("code", help="analyze a generator matrix file")
    _common(p)
    p.set_defaults(func=cmd_code)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
