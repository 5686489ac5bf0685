"""Command-line front end: period reports, solution grids and verification suites.

Exit codes: 0 all checks pass, 1 a check failed, 2 invalid input,
3 numerical failure, 4 the monodromy data is not solvable.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import n3m1
from . import schlesinger as sc
from .curve import make_curve, sheeted_point
from .errors import BadArity, NumericalError, SolvabilityViolation, ValidationError, ZnCoverError
from .kernels import KernelContext, fay_residual
from .periods import lattice_residual, period_matrix, rauch_derivative, table_characteristics
from .theta import ThetaParams, theta
from .rh import build_monodromy, jump_residuals, monodromy_of_solution, solve_Y

SUITES = ("jumps", "monodromy", "schlesinger", "thomae", "fay", "n3m1")

DEFAULT_TOLS = {
    "symmetry": 1e-9,
    "structure": 1e-8,
    "table": 1e-8,
    "rauch": 1e-6,
    "jump": 1e-8,
    "normalization": 1e-10,
    "monodromy": 1e-7,
    "trace": 1e-10,
    "eigen": 1e-6,
    "schlesinger": 1e-5,
    "canonical": 1e-10,
    "thomae": 1e-8,
    "fay": 1e-7,
    "decompose": 1e-10,
    "roundtrip": 1e-8,
    "goursat": 1e-10,
    "halphen": 1e-8,
    "jacobi": 1e-8,
    "tau": 1e-8,
}


# ---------------------------------------------------------------- config

def _cx(v, name):
    if isinstance(v, (int, float)):
        return complex(v)
    if isinstance(v, (list, tuple)) and len(v) == 2:
        return complex(float(v[0]), float(v[1]))
    raise ValidationError(f"{name}: complex numbers are [re, im] pairs")


@dataclass
class RunConfig:
    N: int
    m: int
    lambdas: list
    c: list
    d: list
    lambda0: complex
    tolerances: dict = field(default_factory=dict)
    eval_points: list = field(default_factory=list)

    @classmethod
    def from_dict(cls, raw: dict) -> "RunConfig":
        try:
            N, m = int(raw["N"]), int(raw["m"])
            lambdas = [_cx(v, "lambdas") for v in raw["lambdas"]]
            lambda0 = _cx(raw["lambda0"], "lambda0")
        except KeyError as exc:
            raise ValidationError(f"missing config field {exc}") from None
        g = (N - 1) * m
        c = [_cx(v, "c") for v in raw.get("c", [[1, 0]] * g)]
        d = [_cx(v, "d") for v in raw.get("d", [[1, 0]] * g)]
        if len(lambdas) != 2 * m + 1:
            raise BadArity(f"need 2m+1 = {2 * m + 1} finite branch points, got {len(lambdas)}")
        if len(c) != g or len(d) != g:
            raise BadArity(f"need (N-1)m = {g} constants c and d")
        tols = dict(DEFAULT_TOLS)
        tols.update({k: float(v) for k, v in raw.get("tolerances", {}).items()})
        pts = [_cx(v, "eval_points") for v in raw.get("eval_points", [])]
        return cls(N, m, lambdas, c, d, lambda0, tols, pts)

    def curve(self):
        return make_curve(self.N, self.lambdas)

    def monodromy(self):
        return build_monodromy(self.N, self.m, self.c, self.d)


def load_config(path) -> RunConfig:
    try:
        raw = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ValidationError(f"cannot read config: {exc}") from None
    return RunConfig.from_dict(raw)


# ---------------------------------------------------------------- reports

class Report:
    def __init__(self, command: str):
        self.command = command
        self.checks = []
        self.data = {}

    def check(self, name: str, value: float, tol: float):
        value = float(value)
        self.checks.append({"check": name, "value": value, "tol": tol, "pass": bool(value < tol)})

    @property
    def ok(self) -> bool:
        return all(c["pass"] for c in self.checks)

    def to_json(self) -> dict:
        return {"command": self.command, "pass": self.ok, "checks": self.checks, "data": self.data}

    def text(self) -> str:
        lines = [f"{self.command}: {'PASS' if self.ok else 'FAIL'}"]
        for c in self.checks:
            flag = "pass" if c["pass"] else "FAIL"
            lines.append(f"  {flag}  {c['check']:<36} {c['value']:.3e}  (tol {c['tol']:.0e})")
        return "\n".join(lines)


def _enc(x):
    x = np.asarray(x)
    if np.iscomplexobj(x):
        return np.stack([x.real, x.imag], axis=-1).tolist()
    return x.tolist()


def _upper_points(curve, lambda0, rng, n):
    """Points well inside C_+ around the branch points."""
    pts = curve.points
    span = curve.span()
    out = []
    while len(out) < n:
        x = rng.uniform(pts.real.min() - 0.3 * span, pts.real.max() + 0.3 * span)
        h = float(curve.contour_height(x)) + rng.uniform(0.15, 1.0) * span
        lam = complex(x, h)
        if np.min(np.abs(lam - pts)) > 0.1 * curve.min_gap() and abs(lam - lambda0) > 0.05 * span:
            out.append(lam)
    return out


# ---------------------------------------------------------------- commands

def cmd_periods(cfg: RunConfig, checks=()) -> Report:
    rep = Report("periods")
    tol = cfg.tolerances
    curve = cfg.curve()
    pd = period_matrix(curve)
    rep.check("Pi symmetric", pd.symmetry_error(), tol["symmetry"])
    rep.check("-min eig Im Pi", -pd.min_imag_eig(), 0.0)
    rep.check("Pi from period blocks", np.max(np.abs(pd.structured_Pi() - pd.Pi)), tol["structure"])
    table = [table_characteristics(curve, k) for k in range(1, len(curve.points) + 1)]
    for k, ch in enumerate(table, 1):
        rep.check(f"[U_{k}] table vs Abel map", lattice_residual(pd, pd.U[k - 1], ch), tol["table"])
    if curve.N == 3 and curve.m == 1:
        T = n3m1.periods_n3m1(*curve.points).T
        rep.check("Pi = [[2T, T], [T, 2T]]", np.max(np.abs(pd.Pi - n3m1.riemann_matrix(T))), tol["structure"])
        rep.data["T"] = _enc(T)
    if "rauch" in checks:
        h = 1e-4
        for i in range(1, len(curve.points) + 1):
            e = np.zeros(len(curve.points))
            e[i - 1] = h
            Pp = period_matrix(make_curve(curve.N, curve.points + e)).Pi
            Pm = period_matrix(make_curve(curve.N, curve.points - e)).Pi
            fd = (Pp - Pm) / (2 * h)
            rep.check(f"Rauch dPi/dlam_{i} vs FD", np.max(np.abs(fd - rauch_derivative(pd, i))), tol["rauch"])
    rep.data.update({
        "Pi": _enc(pd.Pi),
        "A_blocks": _enc(pd.A_blocks),
        "B_blocks": _enc(pd.B_blocks),
        "K_inf": _enc(pd.K_inf),
        "U_table": [{"eps": _enc(ch.eps.real), "delta": _enc(ch.delta.real)} for ch in table],
    })
    return rep


def cmd_solve(cfg: RunConfig, eval_points=None, grid_path=None) -> Report:
    rep = Report("solve")
    curve = cfg.curve()
    sol = solve_Y(curve, cfg.monodromy(), cfg.lambda0)
    pts = list(eval_points if eval_points is not None else cfg.eval_points)
    rows = []
    grid = []
    for lam in pts:
        Y = sol.Y(lam)
        grid.append(_enc(Y))
        for r in range(curve.N):
            for s in range(curve.N):
                rows.append([lam.real, lam.imag, f"{r + 1}{s + 1}", Y[r, s].real, Y[r, s].imag])
    rep.check("Y(lambda0) = 1", np.max(np.abs(sol.Y(cfg.lambda0) - np.eye(curve.N))), cfg.tolerances["normalization"])
    sd = sc.a_matrices_closed(sol)
    tau = sc.tau(sol)
    rep.data.update({
        "points": _enc(np.array(pts)),
        "Y": grid,
        "A": _enc(np.array(sd.A)),
        "A_inf": _enc(sd.A_inf),
        "tau": _enc(tau.value),
        "characteristics": {"eps": _enc(sol.chars.eps), "delta": _enc(sol.chars.delta),
                            "branch": "principal logarithm of c, d"},
    })
    if grid_path is not None:
        with open(grid_path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["lambda_re", "lambda_im", "entry", "re", "im"])
            w.writerows(rows)
    return rep


def _suite_jumps(cfg, rep, rng):
    sol = solve_Y(cfg.curve(), cfg.monodromy(), cfg.lambda0)
    res = jump_residuals(sol, 10)
    for k, r in enumerate(res):
        rep.check(f"jump on piece {k}", r, cfg.tolerances["jump"])
    rep.check("Y(lambda0) = 1", np.max(np.abs(sol.Y(cfg.lambda0) - np.eye(cfg.N))), cfg.tolerances["normalization"])


def _suite_monodromy(cfg, rep, rng):
    sol = solve_Y(cfg.curve(), cfg.monodromy(), cfg.lambda0)
    mono = sol.monodromy
    n = len(sol.curve.points)
    for k in range(1, n + 2):
        M = monodromy_of_solution(sol, k)
        target = mono.M[k - 1]
        name = "infinity" if k == n + 1 else str(k)
        rep.check(f"monodromy at {name}", np.max(np.abs(M - target)) / np.max(np.abs(target)),
                  cfg.tolerances["monodromy"])


def _suite_schlesinger(cfg, rep, rng):
    tol = cfg.tolerances
    mono = cfg.monodromy()
    sol = solve_Y(cfg.curve(), mono, cfg.lambda0)
    sd = sc.a_matrices_closed(sol)
    rep.check("trace A_k", sd.trace_error(), tol["trace"])
    rep.check("spectrum A_k = sigma", sd.eigen_error(), tol["eigen"])
    rep.check("A_inf = -sum A_k", sd.sum_error(), tol["trace"])
    if np.allclose(mono.c, 1) and np.allclose(mono.d, 1):
        can = sc.canonical_a_matrices(cfg.N, cfg.m)
        rep.check("canonical A_k", max(np.max(np.abs(a - b)) for a, b in zip(sd.A, can)), tol["canonical"])
    res = sc.schlesinger_residual(sol.curve.points, cfg.N, mono, cfg.lambda0)
    rep.check("Schlesinger equations (FD)", res, tol["schlesinger"])


def _suite_thomae(cfg, rep, rng):
    rep.check("Thomae relative error", sc.thomae_check(cfg.curve()), cfg.tolerances["thomae"])


def _suite_fay(cfg, rep, rng):
    curve = cfg.curve()
    mono = cfg.monodromy()
    sol = solve_Y(curve, mono, cfg.lambda0)
    ctx = KernelContext(sol.periods, sol.params)
    pts = _upper_points(curve, cfg.lambda0, rng, 8)
    worst = 0.0
    for i in range(4):
        P = sheeted_point(curve, pts[2 * i], 1 + i % curve.N)
        Q = sheeted_point(curve, pts[2 * i + 1], 1 + (i + 1) % curve.N)
        worst = max(worst, fay_residual(ctx, P, Q, sol.chars))
    rep.check("Fay identity", worst, cfg.tolerances["fay"])


def _suite_n3m1(cfg, rep, rng):
    if cfg.N != 3 or cfg.m != 1:
        raise ValidationError("the n3m1 suite needs N = 3, m = 1")
    _n3m1_checks(cfg, rep, rng)


def _n3m1_checks(cfg, rep, rng):
    tol = cfg.tolerances
    curve = cfg.curve()
    data = n3m1.periods_n3m1(*curve.points)
    T = data.T
    pd = period_matrix(curve)
    rep.data["T"] = _enc(T)
    rep.data["t"] = _enc(data.t)
    rep.data["p"] = _enc(data.p)
    rep.check("Pi = [[2T, T], [T, 2T]]", np.max(np.abs(pd.Pi - data.Pi)), tol["structure"])
    params = ThetaParams(data.Pi)
    worst = 0.0
    for _ in range(20):
        z = rng.normal(size=2) + 0.3j * rng.normal(size=2)
        ch = (rng.uniform(-1, 1, 2), rng.uniform(-1, 1, 2))
        ref = theta(z, params, ch)
        worst = max(worst, abs(n3m1.decompose_theta(z, ch, T) - ref) / abs(ref))
    rep.check("theta splitting", worst, tol["decompose"])
    rep.check("t(T(t)) roundtrip", abs(n3m1.t_of_T(T) - data.t), tol["roundtrip"])
    rep.check("t from p", abs(n3m1.t_of_p(data.p) - data.t), tol["roundtrip"])
    rep.check("Goursat identity", n3m1.goursat_check(data.t).residual, tol["goursat"])
    hal = n3m1.halphen_check(T)
    rep.check("Halphen system", hal.halphen_residual, tol["halphen"])
    rep.check("Schwarz equation", hal.schwarzian_residual, tol["halphen"])
    mono = build_monodromy(3, 1, cfg.c, cfg.d)
    sol = solve_Y(curve, mono, cfg.lambda0, periods=pd)
    jac = n3m1.jacobi_solution(curve.points, cfg.c, cfg.d, cfg.lambda0, periods=pd)
    worst = 0.0
    for lam in _upper_points(curve, cfg.lambda0, rng, 5):
        for lam_ in (lam, lam.conjugate()):
            if curve.region(lam_, tol=1e-6) == 0:
                continue
            A, B = jac.Y(lam_), sol.Y(lam_)
            worst = max(worst, np.max(np.abs(A - B)) / np.max(np.abs(B)))
    rep.check("Jacobi-theta Y vs generic Y", worst, tol["jacobi"])
    t1 = n3m1.tau_n3m1(curve.points, cfg.c, cfg.d)
    t2 = sc.tau(sol).value
    rep.check("Jacobi-theta tau vs generic tau", n3m1.tau_distance(t1, t2), tol["tau"])


SUITE_FUNCS = {
    "jumps": _suite_jumps,
    "monodromy": _suite_monodromy,
    "schlesinger": _suite_schlesinger,
    "thomae": _suite_thomae,
    "fay": _suite_fay,
    "n3m1": _suite_n3m1,
}


def cmd_verify(cfg: RunConfig, suite: str, seed: int = 0) -> Report:
    if suite not in SUITE_FUNCS:
        raise ValidationError(f"unknown suite {suite!r}; choose from {', '.join(SUITES)}")
    rep = Report(f"verify {suite}")
    SUITE_FUNCS[suite](cfg, rep, np.random.default_rng(seed))
    return rep


def demo_config(seed: int = 0) -> RunConfig:
    rng = np.random.default_rng(seed)
    t = rng.uniform(0.25, 0.75)
    lams = [[0.0, 0.0], [float(t), float(rng.uniform(-0.1, 0.1))], [1.0, 0.0]]
    ph = rng.uniform(-0.6, 0.6, 4)
    mod = rng.uniform(0.7, 1.4, 4)
    cd = [[float(r * np.cos(a)), float(r * np.sin(a))] for r, a in zip(mod, ph)]
    return RunConfig.from_dict({"N": 3, "m": 1, "lambdas": lams, "c": cd[:2], "d": cd[2:],
                                "lambda0": [0.5, 0.7]})


def cmd_demo_n3m1(seed: int = 0, cfg: RunConfig | None = None) -> Report:
    cfg = cfg or demo_config(seed)
    rep = Report("demo-n3m1")
    _n3m1_checks(cfg, rep, np.random.default_rng(seed))
    rep.data["lambdas"] = _enc(np.array(cfg.lambdas))
    return rep


# ---------------------------------------------------------------- entry point

def _parse_tols(items):
    out = {}
    for item in items or []:
        name, sep, val = item.partition("=")
        if not sep:
            raise ValidationError(f"--tol expects NAME=VALUE, got {item!r}")
        try:
            out[name] = float(val)
        except ValueError:
            raise ValidationError(f"--tol {name}: {val!r} is not a number") from None
    return out


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration")
    common.add_argument("--out", help="write the JSON report here")
    common.add_argument("--tol", action="append", metavar="NAME=VALUE", help="override a tolerance")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--json", action="store_true", help="print the JSON report instead of a table")
    common.add_argument("--check", action="append", default=[], metavar="NAME", help="extra checks (periods: rauch)")

    p = argparse.ArgumentParser(prog="zncover", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("periods", parents=[common], help="period matrix and characteristic tables")
    s = sub.add_parser("solve", parents=[common], help="evaluate Y on points, with A_k and tau")
    s.add_argument("--grid", help="CSV grid of Y entries")
    v = sub.add_parser("verify", parents=[common], help="run a verification suite")
    v.add_argument("suite", choices=SUITES)
    sub.add_parser("demo-n3m1", parents=[common], help="end-to-end run of the genus-2 trigonal case")
    return p


def _run(args) -> Report:
    tols = _parse_tols(args.tol)
    cfg = None
    if args.config:
        cfg = load_config(args.config)
    elif args.command != "demo-n3m1":
        raise ValidationError("--config is required")
    if cfg is not None:
        cfg.tolerances.update(tols)
    if args.command == "periods":
        return cmd_periods(cfg, args.check)
    if args.command == "solve":
        return cmd_solve(cfg, grid_path=args.grid)
    if args.command == "verify":
        return cmd_verify(cfg, args.suite, args.seed)
    if cfg is None:
        cfg = demo_config(args.seed)
        cfg.tolerances.update(tols)
    return cmd_demo_n3m1(args.seed, cfg)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        rep = _run(args)
    except SolvabilityViolation as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (NumericalError, ZnCoverError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    if args.out:
        Path(args.out).write_text(json.dumps(rep.to_json(), indent=1))
    print(json.dumps(rep.to_json(), indent=1) if args.json else rep.text())
    return 0 if rep.ok else 1


if __name__ == "__main__":
    sys.exit(main())
