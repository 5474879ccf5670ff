"""Command-line front end: single-point evaluation of the growth rate,
variance or exponential-moment exponent by any route, parameter sweeps,
the Monte Carlo oracle, and the self-test battery.

Rows go to stdout as CSV (default) or newline-delimited JSON; logs go to
stderr.  Exit codes: 0 success, 2 bad arguments, 3 numeric/accuracy
failure, 4 no invariant measure (the row still carries the exponent when
it is defined).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .api import NoMeasureOutcome, Outcome, Request, compute_gamma, compute_gle, compute_sigma2
from .errors import (
    AccuracyError,
    HeavyTailError,
    NoInvariantMeasureError,
    NumericError,
    RegularisationError,
    Sl2LyapError,
    StiffnessError,
)
from .families import Family
from .laws import parse_law

_COLUMNS = [
    "model", "family", "p", "rho", "ell", "lambda1", "lambda2",
    "gamma", "sigma2", "Lambda", "method", "stderr", "diagnostics",
]


@dataclass
class ResultRow:
    model: str
    family: str
    p: float | None
    rho: float | None
    ell: str | None
    lambda1: float | None
    lambda2: float | None
    gamma: float | None
    sigma2: float | None
    Lambda: float | None
    method: str
    stderr: float | None
    diagnostics: str

    def as_list(self):
        return [getattr(self, c) for c in _COLUMNS]


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def _emit(rows, fmt, stream):
    if fmt == "csv":
        stream.write(",".join(_COLUMNS) + "\n")
        for row in rows:
            stream.write(",".join(_fmt(v) for v in row.as_list()) + "\n")
    else:
        for row in rows:
            obj = {c: v for c, v in zip(_COLUMNS, row.as_list())}
            stream.write(json.dumps(obj, ensure_ascii=False, sort_keys=False) + "\n")
    stream.flush()


def _law_primary_param(law) -> float | None:
    for attr in ("rate", "t0", "shape"):
        if hasattr(law, attr):
            return float(getattr(law, attr))
    return None


def _diag_str(diagnostics: dict) -> str:
    if not diagnostics:
        return ""
    parts = [f"{k}={v}" for k, v in sorted(diagnostics.items())]
    return ";".join(parts).replace(",", ";")


def _row_from_outcome(req: Request, out: Outcome, note: str = "") -> ResultRow:
    diag = _diag_str(out.diagnostics)
    if out.no_invariant_measure:
        diag = (diag + ";" if diag else "") + "no_invariant_measure"
    if note:
        diag = (diag + ";" if diag else "") + note
    ell_txt = None
    if out.ell is not None:
        ell_txt = _fmt(out.ell.real) if out.ell.imag == 0 else f"{out.ell.real:g}+{out.ell.imag:g}i"
    return ResultRow(
        model=req.model().label(),
        family=req.family.value,
        p=_law_primary_param(req.law),
        rho=req.rho,
        ell=ell_txt,
        lambda1=out.lambda1,
        lambda2=out.lambda2,
        gamma=out.gamma,
        sigma2=out.sigma2,
        Lambda=out.gle,
        method=out.method,
        stderr=out.stderr,
        diagnostics=diag,
    )


def _add_model_args(p: argparse.ArgumentParser):
    p.add_argument("--family", required=True,
                   choices=[f.value for f in Family], help="product family")
    p.add_argument("--dist", required=True,
                   help="first-factor law: exp:<p>, gamma:<k>,<theta>, dirac:<t0>")
    p.add_argument("--rho", type=float, required=True, help="exponential rate of the second factor")
    p.add_argument("--sign", choices=["+", "-"], default="+",
                   help="sign of the diagonal parameter (triangular family)")
    p.add_argument("--method", default="auto",
                   choices=["auto", "finite", "perturbative", "closed-form", "mc"])
    p.add_argument("--tol", type=float, default=1e-10, help="solver tolerance")
    p.add_argument("--steps", type=int, default=10**5, help="MC steps per replica")
    p.add_argument("--replicas", type=int, default=400, help="MC replicas")


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--format", default="csv", choices=["csv", "json"])
    p.add_argument("--seed", type=int, default=None,
                   help="RNG seed (default: env LYAP_SEED, else 0)")
    p.add_argument("--threads", type=int, default=1, help="worker threads for sweeps")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="sl2lyap",
                                 description="Growth statistics of random SL(2,R) products")
    sub = ap.add_subparsers(dest="subcommand", required=True)
    for name, doc in [
        ("gamma", "almost-sure growth rate"),
        ("sigma2", "variance of the log norm"),
        ("gle", "exponential-moment growth exponent at index ell"),
        ("mc", "Monte Carlo oracle (gamma, sigma2 and optionally the exponent)"),
        ("sweep", "parameter sweep producing a gamma/sigma2 table"),
    ]:
        p = sub.add_parser(name, help=doc)
        _add_model_args(p)
        _add_common(p)
        if name in ("gle", "mc"):
            p.add_argument("--ell", default=None, help="index as re[,im]" if name == "mc" else None,
                           required=(name == "gle"))
        if name == "sweep":
            p.add_argument("--axis", default="inv_rho", choices=["inv_rho", "rho"])
            p.add_argument("--range", dest="sweep_range", required=True, help="a:b")
            p.add_argument("--points", type=int, required=True)
            p.add_argument("--mc-check", type=int, default=0,
                           help="add MC columns at this many evenly spaced grid points")
    p = sub.add_parser("selftest", help="run the acceptance battery")
    p.add_argument("--filter", default=None, help="substring filter on criterion names")
    return ap


def _parse_ell(text: str) -> complex:
    parts = text.split(",")
    if len(parts) == 1:
        return complex(float(parts[0]), 0.0)
    if len(parts) == 2:
        return complex(float(parts[0]), float(parts[1]))
    raise ValueError(f"bad ell spec {text!r}; use re or re,im")


def _request(args) -> Request:
    seed = args.seed
    if seed is None:
        seed = int(os.environ.get("LYAP_SEED", "0"))
    return Request(
        family=Family(args.family),
        law=parse_law(args.dist),
        rho=args.rho,
        sign=1 if args.sign == "+" else -1,
        seed=seed,
        n_steps=args.steps,
        n_replicas=args.replicas,
        tol=args.tol,
    )


def _run_point(args) -> list[ResultRow]:
    req = _request(args)
    if args.subcommand == "gamma":
        return [_row_from_outcome(req, compute_gamma(req, args.method))]
    if args.subcommand == "sigma2":
        return [_row_from_outcome(req, compute_sigma2(req, args.method))]
    if args.subcommand == "gle":
        ell = _parse_ell(args.ell)
        return [_row_from_outcome(req, compute_gle(req, ell, args.method))]
    if args.subcommand == "mc":
        rows = [
            _row_from_outcome(req, compute_gamma(req, "mc")),
            _row_from_outcome(req, compute_sigma2(req, "mc")),
        ]
        if args.ell is not None:
            rows.append(_row_from_outcome(req, compute_gle(req, _parse_ell(args.ell), "mc")))
        return rows
    raise ValueError(f"unknown subcommand {args.subcommand}")


def _run_sweep(args) -> list[ResultRow]:
    lo, _, hi = args.sweep_range.partition(":")
    lo, hi = float(lo), float(hi)
    if not (lo > 0 and hi >= lo):
        raise ValueError("sweep range must be positive and increasing")
    n = args.points
    if n < 1:
        raise ValueError("need at least one sweep point")
    base = _request(args)
    values = [lo + (hi - lo) * i / max(1, n - 1) for i in range(n)]
    mc_at = set()
    if args.mc_check > 0:
        step = max(1, n // args.mc_check)
        mc_at = set(range(0, n, step))

    def work(idx_val):
        idx, v = idx_val
        rho = 1.0 / v if args.axis == "inv_rho" else v
        req = Request(base.family, base.law, rho, base.sign, base.seed + idx,
                      base.n_steps, base.n_replicas, base.tol)
        try:
            out = compute_sigma2(req, "perturbative" if args.method == "auto" else args.method)
            row = _row_from_outcome(req, out)
        except Sl2LyapError as exc:
            row = _row_from_outcome(req, Outcome(method="failed"), note=f"error={type(exc).__name__}")
        rows = [row]
        if idx in mc_at:
            try:
                g = compute_gamma(req, "mc")
                s = compute_sigma2(req, "mc")
                rows.append(_row_from_outcome(req, g, note="mc-check"))
                rows.append(_row_from_outcome(req, s, note="mc-check"))
            except Sl2LyapError as exc:
                rows.append(_row_from_outcome(req, Outcome(method="mc"), note=f"error={type(exc).__name__}"))
        return idx, rows

    tasks = list(enumerate(values))
    if args.threads > 1:
        with ThreadPoolExecutor(max_workers=args.threads) as pool:
            results = list(pool.map(work, tasks))
    else:
        results = [work(t) for t in tasks]
    results.sort(key=lambda pair: pair[0])
    return [row for _, rows in results for row in rows]


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.subcommand == "selftest":
        from .selftest import run_selftest

        return run_selftest(name_filter=args.filter)
    try:
        rows = _run_sweep(args) if args.subcommand == "sweep" else _run_point(args)
    except NoMeasureOutcome as exc:
        req = _request(args)
        _emit([_row_from_outcome(req, exc.outcome)], args.format, sys.stdout)
        print(f"no invariant measure: {exc}", file=sys.stderr)
        return 4
    except NoInvariantMeasureError as exc:
        print(f"no invariant measure: {exc}", file=sys.stderr)
        return 4
    except (AccuracyError, NumericError, StiffnessError, RegularisationError, HeavyTailError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"invalid arguments: {exc}", file=sys.stderr)
        return 2
    _emit(rows, args.format, sys.stdout)
    return 0


if __name__ == "__main__":
    sys.exit(main())
