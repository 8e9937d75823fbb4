"""Command-line entry point.

Exit codes: 0 success, 2 usage or domain error, 3 a scan expectation failed,
4 an inequality was violated.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import tempfile

import numpy as np

from . import gq_analysis as gqa
from .entropy import EntropicIndex, tsallis_entropy, von_neumann
from .monogamy import (
    INEQUALITIES,
    SweepConfig,
    PairData,
    check_q,
    run_sweep,
)
from .qmath import NAMED_STATES, DomainError, PureState, as_density, partial_trace, state_from_dict
from .roof import MEASURES, Budget, roof_extremize
from .tsallis_ent import tq_2q, tq_mixed_bound, tq_pure

EXIT_OK, EXIT_USAGE, EXIT_SCAN, EXIT_VIOLATION = 0, 2, 3, 4
DEFAULT_SEED = 42


class UsageError(Exception):
    pass


def fmt(v) -> str:
    return "" if v is None else format(float(v), ".17g")


def write_atomic(path: str, text: str) -> None:
    """Write via a temp file in the target directory and rename over the target."""
    d = os.path.dirname(os.path.abspath(path))
    try:
        fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=os.path.basename(path))
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc}") from exc
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _summary_path(out: str) -> str:
    root, _ = os.path.splitext(out)
    return root + ".json"


def load_state(path: str):
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read state file {path}: {exc}") from exc
    try:
        return state_from_dict(data)
    except (DomainError, ValueError, TypeError, KeyError) as exc:
        raise UsageError(f"malformed state file {path}: {exc}") from exc


def _parse_cut(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(t) for t in text.split(",") if t.strip())
    except ValueError as exc:
        raise UsageError(f"bad cut {text!r}; expected comma-separated qubit indices") from exc


def _budget(args) -> Budget:
    return Budget(m=args.m, restarts=args.restarts, iters=args.iters)


def _print_json(obj) -> None:
    print(json.dumps(obj, indent=2))


# -- subcommands -----------------------------------------------------------------

def cmd_entropy(args) -> int:
    q = EntropicIndex(args.q)
    rho = as_density(load_state(args.state))
    if args.keep:
        rho = partial_trace(rho, _parse_cut(args.keep))
    _print_json({"tsallis_q": tsallis_entropy(rho, q), "von_neumann": von_neumann(rho), "q": q.q})
    return EXIT_OK


def cmd_measure(args) -> int:
    q = EntropicIndex(args.q)
    state = load_state(args.state)
    cut = _parse_cut(args.cut)
    rho = as_density(state)
    pure = state if isinstance(state, PureState) else None
    if pure is None and np.linalg.eigvalsh(rho.matrix)[-2] <= 1e-12:
        pure = PureState.normalized(np.linalg.eigh(rho.matrix)[1][:, -1])

    method = args.method
    if method == "auto":
        method = "pure" if pure is not None else ("closed" if rho.n_qubits == 2 else "roof")
    if method == "pure":
        mv = tq_pure(pure, cut, q)
    elif method == "closed":
        if rho.n_qubits != 2:
            raise UsageError("closed form needs a two-qubit state")
        mv = tq_2q(rho, q, allow_extended=args.allow_extended)
    else:
        mv = tq_mixed_bound(rho, cut, q, _budget(args), seed=args.seed)
    _print_json({"value": mv.value, "method": mv.method, "q": mv.q, "evidence": mv.evidence,
                 "seed": args.seed})
    return EXIT_OK


def cmd_scan_convexity(args) -> int:
    grid = gqa.ScanGrid(args.x_min, args.x_max, args.x_steps, args.q_min, args.q_max, args.q_steps)
    report = gqa.scan_convexity(grid)
    rows = [(fmt(x), fmt(q), fmt(v)) for x, q, v in report.rows()]
    summary = report.summary()
    write_atomic(args.out, _csv(["x", "q", "value"], rows))
    write_atomic(_summary_path(args.out), json.dumps(summary, indent=2) + "\n")
    n_bad = len(report.sign_violations)
    print(f"min d2g/dx2 = {report.min_value:.6g} at x={report.min_location[0]:.6g}, "
          f"q={report.min_location[1]:.6g}; {n_bad} negative cells")
    if args.expect_convex and n_bad:
        return EXIT_SCAN
    return EXIT_OK


def cmd_scan_bq(args) -> int:
    qs, vals, roots = gqa.scan_bq(args.q_min, args.q_max, args.steps)
    write_atomic(args.out, _csv(["q", "b_q"], [(fmt(q), fmt(v)) for q, v in zip(qs, vals)]))
    summary = {
        "zero_crossings": roots,
        "negative_below_2": bool(np.all(vals[qs < 2] < 0)),
        "positive_between_2_3": bool(np.all(vals[(qs > 2) & (qs < 3)] > 0)),
        "negative_above_3": bool(np.all(vals[qs > 3] < 0)),
    }
    write_atomic(_summary_path(args.out), json.dumps(summary, indent=2) + "\n")
    _print_json(summary)
    return EXIT_OK


def cmd_check(args) -> int:
    if args.state:
        psi = load_state(args.state)
        if not isinstance(psi, PureState):
            raise UsageError("check needs a pure state file")
        sid = os.path.basename(args.state)
    elif args.named:
        psi = NAMED_STATES[args.named](args.n_qubits)
        sid = f"{args.named}{args.n_qubits}"
    else:
        raise UsageError("give --state FILE or --named NAME")
    for ineq in args.ineq:
        if ineq.startswith("tsallis"):
            if not args.q:
                raise UsageError(f"{ineq} needs --q")
            for q in args.q:
                check_q(ineq, q)
    data = PairData(psi)
    reports = []
    for ineq in args.ineq:
        if ineq == "ckw":
            reports.append(data.ckw(sid))
        elif ineq == "dual_ckw":
            reports.append(data.dual_ckw(sid))
        elif ineq == "tsallis_mono":
            reports += [data.tsallis_mono(q, sid) for q in args.q]
        else:
            reports += [data.tsallis_poly(q, sid) for q in args.q]
    _print_json([r.as_dict() for r in reports])
    return EXIT_OK if all(r.passed for r in reports) else EXIT_VIOLATION


def cmd_sweep(args) -> int:
    config = SweepConfig(args.n_qubits, args.n_states, tuple(args.q or ()), args.seed,
                         tuple(args.ineq))
    reports, summary = run_sweep(config)
    rows = [(r.inequality, fmt(r.q), r.n_qubits, r.state_id, fmt(r.lhs), fmt(r.rhs),
             fmt(r.residual), "true" if r.passed else "false") for r in reports]
    header = ["inequality", "q", "n_qubits", "state_seed", "lhs", "rhs", "residual", "pass"]
    write_atomic(args.out, _csv(header, rows))
    write_atomic(_summary_path(args.out), json.dumps(summary.as_dict(), indent=2) + "\n")
    _print_json(summary.as_dict())
    return EXIT_VIOLATION if summary.violation_count else EXIT_OK


def cmd_roof(args) -> int:
    rho = as_density(load_state(args.state))
    res = roof_extremize(rho, _parse_cut(args.cut), args.measure, args.direction, _budget(args),
                         seed=args.seed, q=args.q)
    _print_json({
        "value": res.value,
        "weights": [float(w) for w in res.best.weights],
        "restarts_used": res.restarts_used,
        "converged": res.converged,
        "seed": args.seed,
    })
    return EXIT_OK


# -- parser ------------------------------------------------------------------------

def _add_budget(p):
    p.add_argument("--m", type=int, default=None, help="decomposition size")
    p.add_argument("--restarts", type=int, default=16)
    p.add_argument("--iters", type=int, default=300)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qtsallis",
                                 description="Tsallis-q entanglement and multi-qubit monogamy tools")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("entropy", help="Tsallis-q and von Neumann entropy of a state")
    p.add_argument("state")
    p.add_argument("--q", type=float, required=True)
    p.add_argument("--keep", help="comma-separated qubits to keep before evaluating")
    p.set_defaults(func=cmd_entropy)

    p = sub.add_parser("measure", help="Tsallis-q entanglement of a state")
    p.add_argument("state")
    p.add_argument("--cut", default="0", help="qubits on side A, e.g. 0 or 0,2")
    p.add_argument("--q", type=float, required=True)
    p.add_argument("--method", choices=["auto", "closed", "roof"], default="auto")
    p.add_argument("--allow-extended", action="store_true",
                   help="accept q in [0.7, 4.2] for the two-qubit closed form")
    _add_budget(p)
    p.set_defaults(func=cmd_measure)

    p = sub.add_parser("scan-convexity", help="grid of d2 g_q / dx2")
    p.add_argument("--q-min", type=float, default=1.0)
    p.add_argument("--q-max", type=float, default=4.0)
    p.add_argument("--x-min", type=float, default=0.01)
    p.add_argument("--x-max", type=float, default=0.99)
    p.add_argument("--x-steps", type=int, default=300)
    p.add_argument("--q-steps", type=int, default=100)
    p.add_argument("--out", required=True)
    p.add_argument("--expect-convex", action="store_true")
    p.set_defaults(func=cmd_scan_convexity)

    p = sub.add_parser("scan-bq", help="b_q(1/sqrt 2) along q")
    p.add_argument("--q-min", type=float, default=1.01)
    p.add_argument("--q-max", type=float, default=4.0)
    p.add_argument("--steps", type=int, default=600)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_scan_bq)

    p = sub.add_parser("check", help="evaluate inequalities on one pure state")
    p.add_argument("--state")
    p.add_argument("--named", choices=sorted(NAMED_STATES))
    p.add_argument("--n-qubits", type=int, default=3)
    p.add_argument("--ineq", nargs="+", choices=INEQUALITIES, default=["ckw"])
    p.add_argument("--q", type=float, nargs="+")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("sweep", help="Monte Carlo inequality sweep on Haar states")
    p.add_argument("--n-qubits", type=int, default=3)
    p.add_argument("--n-states", type=int, default=1000)
    p.add_argument("--q", type=float, nargs="+")
    p.add_argument("--ineq", nargs="+", choices=INEQUALITIES, default=["ckw"])
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("roof", help="convex-roof optimizer")
    p.add_argument("state")
    p.add_argument("--cut", default="0")
    p.add_argument("--measure", choices=MEASURES, default="tsallis")
    p.add_argument("--q", type=float)
    p.add_argument("--direction", choices=["min", "max"], default="min")
    _add_budget(p)
    p.set_defaults(func=cmd_roof)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
