"""Command-line front end.

Subcommands
-----------
curves    Emit the three threshold curves on an alpha grid (CSV, optional SVG).
tau       Certify sectional failure on one seeded Gaussian instance.
simulate  Run a Monte Carlo suite of cells and tabulate failure rates.
certify   Certify sectional failure for a matrix supplied as CSV.

Exit codes: 0 success, 2 invalid input or configuration, 3 numerical failure.
All output files are written to a temporary sibling and atomically renamed,
so a crashed run never leaves a half-written artifact.

A NotCertified verdict is one-sided: the search found no failure certificate,
which is evidence of--but not a proof of--successful recovery.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from typing import Optional, Sequence

import numpy as np

from .curves import XI_SK_DEFAULT, CurveKind, emit_curves
from .errors import (CertificateError, ConsistencyError, DomainError,
                     NumericalError, SecthreshError, UsageError)
from .harness import CellSpec, builtin_suite, paper_rate, run_suite
from .instances import ProblemShape, sample_gaussian_matrix
from .tau import DEFAULT_OPTIONS, Verdict, estimate_failure, verify_theorem2_construction

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERICAL = 3

_CURVE_ORDER = (CurveKind.WeakExact, CurveKind.SectionalLower, CurveKind.SectionalUpper)


def _atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix="~")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _parse_grid(spec: str) -> list[float]:
    parts = spec.split(":")
    if len(parts) != 3:
        raise DomainError(f"grid must be START:STOP:STEP, got {spec!r}")
    try:
        start, stop, step = (float(p) for p in parts)
    except ValueError as exc:
        raise DomainError(f"grid has a non-numeric field: {spec!r}") from exc
    if step <= 0 or stop < start:
        raise DomainError(f"grid must ascend with positive step, got {spec!r}")
    count = int((stop - start) / step + 1e-9) + 1
    return [round(start + i * step, 12) for i in range(count)]


def _default_workers() -> int:
    env = os.environ.get("SECTHRESH_WORKERS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise DomainError(f"SECTHRESH_WORKERS must be an integer, got {env!r}")
    return os.cpu_count() or 1


def _curves_svg(points_by_kind: dict[CurveKind, list[tuple[float, float]]]) -> str:
    """Render the three curves as SVG polylines on the unit square."""
    width, height, margin = 640, 480, 50
    colors = {CurveKind.WeakExact: "#1f77b4",
              CurveKind.SectionalLower: "#2ca02c",
              CurveKind.SectionalUpper: "#d62728"}

    def sx(a: float) -> float:
        return margin + a * (width - 2 * margin)

    def sy(b: float) -> float:
        return height - margin - b * (height - 2 * margin)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{margin}" y1="{height - margin}" x2="{width - margin}" '
        f'y2="{height - margin}" stroke="black"/>',
        f'<line x1="{margin}" y1="{margin}" x2="{margin}" y2="{height - margin}" '
        f'stroke="black"/>',
        f'<text x="{width // 2}" y="{height - 12}" text-anchor="middle" '
        f'font-size="14">alpha = m/n</text>',
        f'<text x="16" y="{height // 2}" text-anchor="middle" font-size="14" '
        f'transform="rotate(-90 16 {height // 2})">beta = k/n</text>',
    ]
    for kind in _CURVE_ORDER:
        pts = points_by_kind.get(kind, [])
        if not pts:
            continue
        coords = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in pts)
        parts.append(f'<polyline points="{coords}" fill="none" '
                     f'stroke="{colors[kind]}" stroke-width="2"/>')
        a_last, b_last = pts[-1]
        parts.append(f'<text x="{sx(a_last) + 4:.2f}" y="{sy(b_last):.2f}" '
                     f'font-size="12" fill="{colors[kind]}">{kind.value}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def cmd_curves(args: argparse.Namespace) -> int:
    grid = _parse_grid(args.grid)
    curve_set = emit_curves(grid, xi_sk=args.xi_sk, tol=args.tol)
    lines = ["curve,alpha,beta"]
    by_kind: dict[CurveKind, list[tuple[float, float]]] = {}
    for kind in _CURVE_ORDER:
        pts = [(p.alpha, p.beta) for p in curve_set.by_kind(kind)]
        by_kind[kind] = pts
        for a, b in pts:
            lines.append(f"{kind.value},{a:.10g},{b:.12g}")
    _atomic_write(args.out, "\n".join(lines) + "\n")
    if args.svg:
        _atomic_write(args.svg, _curves_svg(by_kind))
    print(f"wrote {len(curve_set.points)} points to {args.out}"
          + (f" and {args.svg}" if args.svg else ""))
    return EXIT_OK


def _certificate_json(n: int, m: int, k: int, b: np.ndarray, cert) -> str:
    payload = {
        "n": n, "m": m, "k": k,
        "b": [int(v) for v in b],
        "w": [float(v) for v in cert.w],
        "head_l1": cert.head_l1,
        "tail_l1": cert.tail_l1,
        "gap": cert.gap,
        "nullspace_residual": cert.nullspace_residual,
    }
    return json.dumps(payload, indent=2) + "\n"


def _report_outcome(outcome, n: int, m: int, k: int,
                    emit_path: Optional[str]) -> None:
    if outcome.verdict is Verdict.CertifiedFailure:
        cert = outcome.certificate
        print("verdict: CertifiedFailure")
        print(f"distance: {outcome.best_distance:.12g}")
        print(f"gap: {cert.gap:.12g} (tail {cert.tail_l1:.12g} vs head {cert.head_l1:.12g})")
        if emit_path:
            _atomic_write(emit_path, _certificate_json(n, m, k, outcome.best_b, cert))
            print(f"certificate written to {emit_path}")
    else:
        print("verdict: NotCertified (one-sided: no failure certificate found; "
              "this does not prove recovery succeeds)")
        print(f"best distance: {outcome.best_distance:.12g}")
    print(f"flips evaluated: {outcome.flips_evaluated}")
    if outcome.diagnostic:
        print(f"diagnostic: {outcome.diagnostic}")


def cmd_tau(args: argparse.Namespace) -> int:
    if not (args.m < args.n and 1 <= args.k < args.m):
        raise DomainError(
            f"need m < n and 1 <= k < m, got n={args.n} m={args.m} k={args.k}"
        )
    shape = ProblemShape(n=args.n, m=args.m, k=args.k)
    instance = sample_gaussian_matrix(shape, args.seed)
    outcome = estimate_failure(instance, args.k)
    _report_outcome(outcome, args.n, args.m, args.k, args.emit_certificate)
    return EXIT_OK


def _load_suite(args: argparse.Namespace) -> list[CellSpec]:
    if args.builtin:
        return builtin_suite(args.builtin, reps=args.reps, base_seed=args.seed)
    if args.suite:
        try:
            with open(args.suite) as handle:
                raw = json.load(handle)
        except (OSError, json.JSONDecodeError) as exc:
            raise DomainError(f"cannot read suite spec {args.suite!r}: {exc}") from exc
        if not isinstance(raw, list):
            raise DomainError("suite spec must be a JSON list of cells")
        cells = []
        for entry in raw:
            try:
                cells.append(CellSpec(n=int(entry["n"]), m=int(entry["m"]),
                                      k=int(entry["k"]),
                                      reps=int(entry.get("reps", args.reps)),
                                      base_seed=args.seed))
            except (KeyError, TypeError, ValueError) as exc:
                raise DomainError(f"malformed suite cell {entry!r}: {exc}") from exc
        return cells
    if args.cell:
        try:
            n, m, k = (int(v) for v in args.cell.split(","))
        except ValueError as exc:
            raise DomainError(f"--cell must be n,m,k, got {args.cell!r}") from exc
        return [CellSpec(n=n, m=m, k=k, reps=args.reps, base_seed=args.seed)]
    raise DomainError("one of --builtin, --suite, or --cell is required")


def cmd_simulate(args: argparse.Namespace) -> int:
    if args.reps < 1:
        raise DomainError(f"reps must be >= 1, got {args.reps}")
    cells = _load_suite(args)
    workers = args.workers if args.workers else _default_workers()
    results = run_suite(cells, DEFAULT_OPTIONS, workers=workers)
    lines = ["n,m,k,reps,failures,rate,paper_rate,mean_flips,mean_seconds"]
    for res in results:
        s = res.spec
        ref = res.paper_reference_rate
        ref_txt = f"{ref:.6f}" if ref is not None else ""
        lines.append(
            f"{s.n},{s.m},{s.k},{s.reps},{res.failures},{res.rate:.6f},"
            f"{ref_txt},{res.mean_flips:.2f},{res.mean_seconds:.4f}"
        )
        print(lines[-1])
    _atomic_write(args.out, "\n".join(lines) + "\n")
    print(f"wrote {len(results)} cells to {args.out}")
    return EXIT_OK


def _read_matrix_csv(path: str) -> np.ndarray:
    try:
        with open(path) as handle:
            rows = [line.strip() for line in handle if line.strip()]
    except OSError as exc:
        raise DomainError(f"cannot read matrix file {path!r}: {exc}") from exc
    if not rows:
        raise DomainError(f"matrix file {path!r} is empty")
    parsed = []
    width = None
    for idx, row in enumerate(rows):
        fields = row.split(",")
        if width is None:
            width = len(fields)
        elif len(fields) != width:
            raise DomainError(
                f"ragged matrix: line {idx + 1} has {len(fields)} fields, expected {width}"
            )
        try:
            parsed.append([float(f) for f in fields])
        except ValueError as exc:
            raise DomainError(f"non-numeric entry on line {idx + 1}: {exc}") from exc
    return np.array(parsed, dtype=float)


def cmd_certify(args: argparse.Namespace) -> int:
    A = _read_matrix_csv(args.matrix)
    m, n = A.shape
    if not (m < n):
        raise DomainError(f"matrix must be wide (m < n), got {m}x{n}")
    if not (1 <= args.k < n):
        raise DomainError(f"need 1 <= k < n={n}, got k={args.k}")
    shape = ProblemShape(n=n, m=m, k=args.k)
    from .instances import GaussianInstance

    instance = GaussianInstance(shape=shape, seed=0, A=A)
    outcome = estimate_failure(instance, args.k)
    if outcome.verdict is Verdict.CertifiedFailure:
        report = verify_theorem2_construction(A, args.k, outcome.certificate)
        if not report.passed:
            raise CertificateError("construction re-check failed",
                                   gap=outcome.certificate.gap)
    _report_outcome(outcome, n, m, args.k, args.emit_certificate)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="secthresh",
        description="Threshold curves and sectional-failure certification "
                    "for l1 recovery over Gaussian measurements.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_curves = sub.add_parser("curves", help="emit threshold curves")
    p_curves.add_argument("--grid", default="0.05:0.95:0.05",
                          help="alpha grid START:STOP:STEP (default 0.05:0.95:0.05)")
    p_curves.add_argument("--xi-sk", type=float, default=XI_SK_DEFAULT, dest="xi_sk",
                          help="spin-glass constant for the sectional upper bound")
    p_curves.add_argument("--tol", type=float, default=1e-10)
    p_curves.add_argument("--out", default="curves.csv")
    p_curves.add_argument("--svg", default=None, help="optional SVG plot path")
    p_curves.set_defaults(func=cmd_curves)

    p_tau = sub.add_parser("tau", help="certify one seeded Gaussian instance")
    p_tau.add_argument("--n", type=int, required=True)
    p_tau.add_argument("--m", type=int, required=True)
    p_tau.add_argument("--k", type=int, required=True)
    p_tau.add_argument("--seed", type=int, default=0)
    p_tau.add_argument("--emit-certificate", default=None, dest="emit_certificate")
    p_tau.set_defaults(func=cmd_tau)

    p_sim = sub.add_parser("simulate", help="run a Monte Carlo suite")
    p_sim.add_argument("--builtin", choices=("table1", "table2"), default=None)
    p_sim.add_argument("--suite", default=None, help="JSON suite spec path")
    p_sim.add_argument("--cell", default=None, help="inline cell n,m,k")
    p_sim.add_argument("--reps", type=int, default=25)
    p_sim.add_argument("--seed", type=int, default=0)
    p_sim.add_argument("--out", default="results.csv")
    p_sim.add_argument("--workers", type=int, default=0,
                       help="worker processes (default: SECTHRESH_WORKERS or CPU count)")
    p_sim.set_defaults(func=cmd_simulate)

    p_cert = sub.add_parser("certify", help="certify a matrix supplied as CSV")
    p_cert.add_argument("--matrix", required=True)
    p_cert.add_argument("--k", type=int, required=True)
    p_cert.add_argument("--emit-certificate", default=None, dest="emit_certificate")
    p_cert.set_defaults(func=cmd_certify)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except (DomainError, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NumericalError, ConsistencyError, CertificateError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except SecthreshError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
