"""Command-line front end: analyze, sweep, lhv, version.

Exit codes: 0 success, 2 invalid states or flags, 3 numerical failure
(vanishing filter norm, degenerate correlations, or a failed LHV check).
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass

import numpy as np

from . import __version__
from .chsh import (
    CHSH_CLASSICAL_BOUND,
    holevo_bound,
    mvci,
    teleportation_fidelity_bound,
)
from .errors import (
    BadWindow,
    DegenerateCorrelation,
    NotHermitian,
    NotPositive,
    OutOfRange,
    TraceNotOne,
    VanishingNorm,
)
from .filtering import FilterParams, maximize_filtered_mvci
from .lhv import LhvModel, lhv_sigma_check
from .optimize import OptimizerOptions, bisect_onset
from .states import (
    DensityMatrix,
    correlation_data,
    density_to_json,
    load_density,
    ppt_min_eigenvalue,
    rho1,
    rho2,
    werner,
)
from .vertesi import LHV_CEILING, Quadrature, maximize_vertesi_bound

_VALIDATION_ERRORS = (
    NotHermitian,
    TraceNotOne,
    NotPositive,
    OutOfRange,
    BadWindow,
    ValueError,
    OSError,
    json.JSONDecodeError,
)
_NUMERICAL_ERRORS = (VanishingNorm, DegenerateCorrelation, FloatingPointError)


def _fmt(value: float) -> str:
    return format(float(value), ".12g")


def _state_from_args(args) -> tuple[DensityMatrix, str]:
    if args.werner is not None:
        return werner(args.werner), f"werner(p={_fmt(args.werner)})"
    if args.rho1 is not None:
        p, r = args.rho1
        return rho1(p, r), f"rho1(p={_fmt(p)}, r={_fmt(r)})"
    if args.rho2 is not None:
        return rho2(args.rho2), f"rho2(p={_fmt(args.rho2)})"
    return load_density(args.file), f"file({args.file})"


def _filter_params_json(fp: FilterParams) -> dict:
    return {
        "x": fp.x,
        "y": fp.y,
        "euler_a": list(fp.euler_a),
        "euler_b": list(fp.euler_b),
    }


def cmd_analyze(args) -> int:
    rho, label = _state_from_args(args)
    opts = OptimizerOptions(restarts=args.restarts, seed=args.seed)
    quad = Quadrature(args.quad_n, args.quad_n)
    tt = correlation_data(rho)
    chsh = mvci(tt.T)
    ppt = ppt_min_eigenvalue(rho)

    report: dict = {
        "state": density_to_json(rho),
        "label": label,
        "mvci": chsh.value,
        "tau1": chsh.tau1,
        "tau2": chsh.tau2,
        "chsh_violating": chsh.violating,
        "ppt_min_eigenvalue": ppt,
        "entangled": ppt < 0.0,
        "teleportation_fidelity_bound": teleportation_fidelity_bound(chsh.value),
    }
    if chsh.value >= CHSH_CLASSICAL_BOUND:
        report["holevo_bound"] = holevo_bound(chsh.value)

    if args.filtered:
        filtered = maximize_filtered_mvci(rho, opts)
        report["filtered_mvci"] = filtered.value
        report["filtered_violating"] = filtered.value > CHSH_CLASSICAL_BOUND
        report["filter_params"] = _filter_params_json(filtered.params)
        report["filtered_teleportation_fidelity_bound"] = teleportation_fidelity_bound(
            filtered.value
        )
        if filtered.value >= CHSH_CLASSICAL_BOUND:
            report["filtered_holevo_bound"] = holevo_bound(filtered.value)

    if args.vertesi:
        plain = maximize_vertesi_bound(rho, with_filter=False, opts=opts, quad=quad)
        report["vertesi_bound"] = plain.bound
        report["vertesi_violating"] = plain.violating
        report["vertesi_window"] = [plain.window.a, plain.window.b, plain.window.c, plain.window.d]
        if args.filtered:
            filt = maximize_vertesi_bound(rho, with_filter=True, opts=opts, quad=quad)
            report["vertesi_filtered_bound"] = filt.bound
            report["vertesi_filtered_violating"] = filt.violating
            report["vertesi_filtered_window"] = [
                filt.window.a, filt.window.b, filt.window.c, filt.window.d,
            ]
            report["vertesi_filter_params"] = _filter_params_json(filt.filter_params)

    text = _render_analyze(report)
    if args.json:
        text = json.dumps(report, indent=2)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as handle:
            handle.write(text + "\n")
    else:
        print(text)
    return 0


def _render_analyze(report: dict) -> str:
    lines = [f"state: {report['label']}"]
    lines.append(f"mvci: {_fmt(report['mvci'])}")
    lines.append(f"tau1: {_fmt(report['tau1'])}  tau2: {_fmt(report['tau2'])}")
    lines.append(f"chsh violating: {'yes' if report['chsh_violating'] else 'no'}")
    lines.append(f"ppt min eigenvalue: {_fmt(report['ppt_min_eigenvalue'])}")
    lines.append(f"entangled (ppt): {'yes' if report['entangled'] else 'no'}")
    lines.append(
        f"teleportation fidelity bound: {_fmt(report['teleportation_fidelity_bound'])}"
    )
    if "holevo_bound" in report:
        lines.append(f"holevo bound: {_fmt(report['holevo_bound'])}")
    if "filtered_mvci" in report:
        fp = report["filter_params"]
        lines.append(f"filtered mvci: {_fmt(report['filtered_mvci'])}")
        lines.append(
            f"filter params: x={_fmt(fp['x'])} y={_fmt(fp['y'])} "
            f"euler_a=({', '.join(_fmt(v) for v in fp['euler_a'])}) "
            f"euler_b=({', '.join(_fmt(v) for v in fp['euler_b'])})"
        )
        lines.append(
            "filtered teleportation fidelity bound: "
            f"{_fmt(report['filtered_teleportation_fidelity_bound'])}"
        )
        if "filtered_holevo_bound" in report:
            lines.append(f"filtered holevo bound: {_fmt(report['filtered_holevo_bound'])}")
    if "vertesi_bound" in report:
        win = report["vertesi_window"]
        lines.append(
            f"vertesi bound: {_fmt(report['vertesi_bound'])} "
            f"window=({', '.join(_fmt(v) for v in win)})"
        )
    if "vertesi_filtered_bound" in report:
        win = report["vertesi_filtered_window"]
        fp = report["vertesi_filter_params"]
        lines.append(
            f"vertesi bound (filtered): {_fmt(report['vertesi_filtered_bound'])} "
            f"window=({', '.join(_fmt(v) for v in win)}) "
            f"x={_fmt(fp['x'])} y={_fmt(fp['y'])}"
        )
    return "\n".join(lines)


@dataclass(frozen=True)
class SweepSpec:
    """One-parameter sweep of a builtin state family."""

    family: str
    computation: str
    start: float
    stop: float
    steps: int
    r: float | None = None

    def __post_init__(self) -> None:
        if self.steps < 2:
            raise OutOfRange(f"steps={self.steps} must be at least 2")
        if not self.start < self.stop:
            raise OutOfRange(f"start={self.start} must be below stop={self.stop}")
        if self.family == "rho1" and self.r is None:
            raise OutOfRange("family rho1 needs --r")

    def state(self, p: float) -> DensityMatrix:
        if self.family == "werner":
            return werner(p)
        if self.family == "rho1":
            return rho1(p, self.r)
        return rho2(p)


_EXTRA_COLUMNS = {
    "chsh": [],
    "chsh-filtered": ["x", "y"],
    "vertesi": ["a", "b", "c", "d"],
    "vertesi-filtered": ["x", "y", "a", "b", "c", "d"],
}


def _sweep_point(spec: SweepSpec, p: float, opts, quad, carry):
    """Value, violation flag, extra columns, and the warm-start carry."""
    rho = spec.state(p)
    if spec.computation == "chsh":
        value = mvci(correlation_data(rho).T).value
        return value, value > CHSH_CLASSICAL_BOUND, [], carry
    if spec.computation == "chsh-filtered":
        result = maximize_filtered_mvci(rho, opts, warm_start=carry)
        extras = [result.params.x, result.params.y]
        return result.value, result.value > CHSH_CLASSICAL_BOUND, extras, result.params
    with_filter = spec.computation == "vertesi-filtered"
    result = maximize_vertesi_bound(
        rho, with_filter=with_filter, opts=opts, quad=quad, warm_start=carry
    )
    win = result.window
    extras = [win.a, win.b, win.c, win.d]
    if with_filter:
        extras = [result.filter_params.x, result.filter_params.y] + extras
    return result.bound, result.violating, extras, result


def cmd_sweep(args) -> int:
    spec = SweepSpec(
        family=args.family,
        computation=args.computation,
        start=args.start,
        stop=args.stop,
        steps=args.steps,
        r=args.r,
    )
    opts = OptimizerOptions(restarts=args.restarts, seed=args.seed)
    quad = Quadrature(args.quad_n, args.quad_n)
    threshold = (
        CHSH_CLASSICAL_BOUND if spec.computation.startswith("chsh") else LHV_CEILING
    )

    values = []
    rows = []
    carry = None
    for p in np.linspace(spec.start, spec.stop, spec.steps):
        value, violating, extras, carry = _sweep_point(spec, float(p), opts, quad, carry)
        values.append(value)
        cells = [_fmt(p), _fmt(value), "true" if violating else "false"]
        cells += [_fmt(v) for v in extras]
        rows.append(",".join(cells))

    lines = ["param,value,violating" + "".join("," + c for c in _EXTRA_COLUMNS[spec.computation])]
    lines.extend(rows)

    grid = np.linspace(spec.start, spec.stop, spec.steps)
    onset_carry = carry

    def probe(p: float) -> float:
        value, _, _, _ = _sweep_point(spec, float(p), opts, quad, onset_carry)
        return value

    for i in range(spec.steps - 1):
        lo_side = values[i] > threshold
        hi_side = values[i + 1] > threshold
        if lo_side != hi_side:
            onset = bisect_onset(
                probe, float(grid[i]), float(grid[i + 1]), threshold, tol=1e-4
            )
            if onset is not None:
                lines.append(f"# onset={_fmt(onset)}")

    text = "\n".join(lines) + "\n"
    with open(args.out, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(text)
    return 0


def cmd_lhv(args) -> int:
    model = LhvModel(q=args.q)
    if args.n < 1:
        raise OutOfRange(f"--n {args.n} must be at least 1")
    if args.pairs < 1:
        raise OutOfRange(f"--pairs {args.pairs} must be at least 1")
    rng = np.random.default_rng(args.seed)
    pairs = []
    for _ in range(args.pairs):
        a = rng.normal(size=3)
        b = rng.normal(size=3)
        pairs.append((a / np.linalg.norm(a), b / np.linalg.norm(b)))
    deviation, passed = lhv_sigma_check(model, pairs, args.n, args.seed)
    report = {
        "q": args.q,
        "n": args.n,
        "pairs": args.pairs,
        "seed": args.seed,
        "max_abs_deviation": deviation,
        "passed_4_sigma": passed,
    }
    if args.json:
        print(json.dumps(report, indent=2))
    else:
        print(
            f"q={_fmt(args.q)} n={args.n} pairs={args.pairs} seed={args.seed}\n"
            f"max abs deviation: {_fmt(deviation)}\n"
            f"4-sigma check: {'PASS' if passed else 'FAIL'}"
        )
    return 0 if passed else 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bellfilter",
        description=(
            "CHSH and Vertesi-inequality violation of two-qubit states "
            "under optimized local filtering"
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    analyze = sub.add_parser("analyze", help="report violation figures for one state")
    source = analyze.add_mutually_exclusive_group(required=True)
    source.add_argument("--werner", type=float, metavar="P")
    source.add_argument("--rho1", type=float, nargs=2, metavar=("P", "R"))
    source.add_argument("--rho2", type=float, metavar="P")
    source.add_argument("--file", metavar="PATH", help="JSON state file")
    analyze.add_argument("--filtered", action="store_true", help="optimize local filters")
    analyze.add_argument("--vertesi", action="store_true", help="include the Vertesi bound")
    analyze.add_argument("--quad-n", type=int, default=24, metavar="N")
    analyze.add_argument("--restarts", type=int, default=16, metavar="K")
    analyze.add_argument("--seed", type=int, default=0)
    analyze.add_argument("--json", action="store_true")
    analyze.add_argument("--out", metavar="PATH")
    analyze.set_defaults(func=cmd_analyze)

    sweep = sub.add_parser("sweep", help="sweep a family parameter, write CSV")
    sweep.add_argument("--family", choices=("werner", "rho1", "rho2"), required=True)
    sweep.add_argument("--r", type=float, default=None, help="fixed r for rho1")
    sweep.add_argument("--start", type=float, required=True)
    sweep.add_argument("--stop", type=float, required=True)
    sweep.add_argument("--steps", type=int, required=True)
    sweep.add_argument(
        "--computation",
        choices=("chsh", "chsh-filtered", "vertesi", "vertesi-filtered"),
        required=True,
    )
    sweep.add_argument("--quad-n", type=int, default=24, metavar="N")
    sweep.add_argument("--restarts", type=int, default=16, metavar="K")
    sweep.add_argument("--seed", type=int, default=0)
    sweep.add_argument("--out", required=True, metavar="PATH")
    sweep.set_defaults(func=cmd_sweep)

    lhv = sub.add_parser("lhv", help="Monte-Carlo check of the LHV model")
    lhv.add_argument("--q", type=float, required=True)
    lhv.add_argument("--n", type=int, default=1_000_000)
    lhv.add_argument("--pairs", type=int, default=20)
    lhv.add_argument("--seed", type=int, default=0)
    lhv.add_argument("--json", action="store_true")
    lhv.set_defaults(func=cmd_lhv)

    version = sub.add_parser("version", help="print the package version")
    version.set_defaults(func=lambda args: print(f"bellfilter {__version__}") or 0)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _NUMERICAL_ERRORS as error:
        print(f"error: {error}", file=sys.stderr)
        return 3
    except _VALIDATION_ERRORS as error:
        print(f"error: {error}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
