"""Command-line entry point.

One executable, seven subcommands, deterministic exit codes:

    0  success
    1  usage error (bad flags)
    2  input or parse error (bad files, bad data)
    3  verification found unargmaxable assignments
    4  verification produced indeterminate results

Codes 3 and 4 come only from ``verify``; 4 wins over 3 when both apply,
since an inconclusive run must not masquerade as a clean refusal.  All
reports are JSON envelopes written to --out ('-' for stdout); logs go to
stderr.  With --deterministic, timestamps are omitted and per-item wall
times zeroed, so identical inputs and seeds give byte-identical reports.
"""

from __future__ import annotations

import argparse
import json
import sys
from datetime import datetime, timezone
from enum import IntEnum
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .dftlayer import augment_slack, build_dft_matrix
from .labelspace import FamilyKind, FamilySpec, cover_count
from .linalg import GrVerdict, gr_plus_status
from .metrics import PredictionRecord, micro_macro_f1, ndcg_at_k, prec_rec_f1_at_k
from .oracle import DegeneracyError, enumerate_regions_2d, enumerate_regions_sampled
from .reportio import (
    ParseError,
    ReportEnvelope,
    parse_labels,
    parse_matrix,
    parse_scores,
    serialize_matrix,
)
from .verifier import LpConfig, radius_report, verify_batch

__all__ = ["ExitCode", "run", "main", "build_parser"]


class ExitCode(IntEnum):
    OK = 0
    USAGE = 1
    INPUT = 2
    UNARGMAXABLE = 3
    INDETERMINATE = 4


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse maps its own errors to exit(2); this CLI reserves 2 for
    input data, so flag problems are rerouted to exit code 1."""

    def error(self, message: str):
        raise _UsageError(f"{self.prog}: error: {message}\n{self.format_usage()}")


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _nonneg_int(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {value}")
    return value


def _positive_float(text: str) -> float:
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError(f"must be > 0, got {value}")
    return value


def _int_list(text: str) -> list[int]:
    try:
        return [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated int list: {text!r}")


def _float_list(text: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list: {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="argmaxable",
        description=(
            "Certify label-assignment feasibility for low-rank sigmoid "
            "output layers, count and enumerate feasible regions, build "
            "spectral weight matrices, and score multi-label predictions."
        ),
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {__version__}"
    )
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    p = sub.add_parser(
        "count",
        help="exact number of feasible sign regions of a generic n x d layer",
    )
    p.add_argument("--n", type=_positive_int, required=True, help="label count")
    p.add_argument("--d", type=_positive_int, required=True, help="input width")
    p.add_argument(
        "--out",
        default=None,
        help="write a JSON report here ('-' for stdout); default prints the bare count",
    )
    _add_determinism_flag(p)
    p.set_defaults(handler=_cmd_count)

    p = sub.add_parser(
        "dft",
        help="write a truncated-DFT weight matrix (CSV + JSON sidecar)",
    )
    p.add_argument("--n", type=_positive_int, required=True, help="label count")
    p.add_argument("--k", type=_positive_int, required=True, help="frequency pairs")
    p.add_argument("--s", type=_nonneg_int, default=0, help="slack columns (default 0)")
    p.add_argument("--seed", type=int, default=0, help="slack RNG seed (default 0)")
    p.add_argument("--out", required=True, help="CSV path ('-' for stdout, no sidecar)")
    p.set_defaults(handler=_cmd_dft)

    p = sub.add_parser(
        "check",
        help="minor-sign scan: uniform / mixed / degenerate, plus general position",
    )
    p.add_argument("--matrix", required=True, help="matrix CSV path")
    p.add_argument(
        "--tau-det",
        type=_positive_float,
        default=1e-10,
        help="relative degeneracy threshold for minors (default 1e-10)",
    )
    p.add_argument(
        "--minor-budget",
        type=_positive_int,
        default=10**6,
        help="refuse if C(n,d) exceeds this (default 1000000)",
    )
    p.add_argument("--out", default="-", help="report path (default stdout)")
    _add_determinism_flag(p)
    p.set_defaults(handler=_cmd_check)

    p = sub.add_parser(
        "verify",
        help="LP-certify each assignment in a label file against a matrix",
    )
    p.add_argument("--matrix", required=True, help="matrix CSV path")
    p.add_argument("--labels", required=True, help="label file (dense or sparse)")
    p.add_argument(
        "--eps",
        type=_positive_float,
        default=1e-8,
        help="smallest radius that counts as feasible (default 1e-8)",
    )
    p.add_argument(
        "--box",
        type=_positive_float,
        default=1e4,
        help="coordinate box bound for the witness (default 1e4)",
    )
    p.add_argument(
        "--feas-tol",
        type=_positive_float,
        default=1e-9,
        help="LP feasibility tolerance, must be < --eps (default 1e-9)",
    )
    p.add_argument("--jobs", type=_positive_int, default=1, help="worker count")
    p.add_argument("--out", default="-", help="report path (default stdout)")
    _add_determinism_flag(p)
    p.set_defaults(handler=_cmd_verify)

    p = sub.add_parser(
        "enumerate",
        help="enumerate the feasible sign vectors of a matrix",
    )
    p.add_argument("--matrix", required=True, help="matrix CSV path")
    p.add_argument(
        "--method",
        choices=("auto", "2d", "sampled"),
        default="auto",
        help="exact angular walk (d=2 only) or certificate-stopped sampling",
    )
    p.add_argument(
        "--budget",
        type=_nonneg_int,
        default=10**7,
        help="sampling budget (default 10000000)",
    )
    p.add_argument("--seed", type=int, default=0, help="sampling seed (default 0)")
    p.add_argument("--out", default="-", help="report path (default stdout)")
    _add_determinism_flag(p)
    p.set_defaults(handler=_cmd_enumerate)

    p = sub.add_parser(
        "radii",
        help="Chebyshev radius percentiles over a whole assignment family",
    )
    p.add_argument("--matrix", required=True, help="matrix CSV path")
    p.add_argument(
        "--kind",
        choices=("active", "alternating"),
        required=True,
        help="family statistic: act(y) <= k or alt(y) <= k",
    )
    p.add_argument("--k", type=_nonneg_int, required=True, help="family bound k")
    p.add_argument(
        "--percentiles",
        type=_float_list,
        default=[1.0, 5.0, 25.0, 50.0, 100.0],
        help="comma-separated percentiles (default 1,5,25,50,100)",
    )
    p.add_argument(
        "--budget",
        type=_positive_int,
        default=10**6,
        help="family enumeration budget (default 1000000)",
    )
    p.add_argument(
        "--eps", type=_positive_float, default=1e-8, help="radius floor (default 1e-8)"
    )
    p.add_argument(
        "--box", type=_positive_float, default=1e4, help="box bound (default 1e4)"
    )
    p.add_argument(
        "--feas-tol", type=_positive_float, default=1e-9, help="LP tolerance"
    )
    p.add_argument("--jobs", type=_positive_int, default=1, help="worker count")
    p.add_argument("--out", default="-", help="report path (default stdout)")
    _add_determinism_flag(p)
    p.set_defaults(handler=_cmd_radii)

    p = sub.add_parser(
        "metrics",
        help="ranked and thresholded multi-label metrics over a score file",
    )
    p.add_argument("--scores", required=True, help="score CSV, one record per line")
    p.add_argument("--gold", required=True, help="gold label file")
    p.add_argument(
        "--k",
        type=_int_list,
        required=True,
        help="comma-separated ranks for the @k metrics, e.g. 8,10",
    )
    p.add_argument(
        "--threshold",
        type=float,
        default=0.5,
        help="activity threshold for micro/macro F1 (default 0.5)",
    )
    p.add_argument(
        "--per-record-f1",
        action="store_true",
        help="average per-record harmonic means instead of taking the "
        "harmonic mean of averaged P and R",
    )
    p.add_argument("--out", default="-", help="report path (default stdout)")
    _add_determinism_flag(p)
    p.set_defaults(handler=_cmd_metrics)

    return parser


def _add_determinism_flag(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--deterministic",
        action="store_true",
        help="omit timestamps and wall times so identical inputs give "
        "byte-identical reports",
    )


def _timestamp(args: argparse.Namespace) -> Optional[str]:
    if getattr(args, "deterministic", False):
        return None
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _emit(text: str, out: Optional[str]) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _emit_report(
    args: argparse.Namespace, command: str, config: dict, payload: dict
) -> None:
    envelope = ReportEnvelope(
        tool_version=__version__,
        command=command,
        config=config,
        timestamp=_timestamp(args),
        payload=payload,
    )
    _emit(envelope.to_json(), getattr(args, "out", "-"))


def _cmd_count(args: argparse.Namespace) -> int:
    count = cover_count(args.n, args.d)
    if args.out is None:
        sys.stdout.write(f"{count}\n")
        return ExitCode.OK
    _emit_report(
        args,
        "count",
        {"n": args.n, "d": args.d},
        # Counts overflow doubles long before they overflow anyone's
        # patience, so they travel as decimal strings.
        {"n": args.n, "d": args.d, "count": str(count)},
    )
    return ExitCode.OK


def _cmd_dft(args: argparse.Namespace) -> int:
    w = augment_slack(build_dft_matrix(args.n, args.k), args.s, args.seed)
    if args.out == "-":
        lines = [",".join(repr(float(v)) for v in row) for row in w.entries]
        sys.stdout.write("\n".join(lines) + "\n")
        return ExitCode.OK
    serialize_matrix(w, args.out, sidecar=False)
    sidecar = {"n": args.n, "k": args.k, "s": args.s, "seed": args.seed}
    Path(args.out).with_suffix(".json").write_text(
        json.dumps(sidecar, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )
    return ExitCode.OK


def _cmd_check(args: argparse.Namespace) -> int:
    w = parse_matrix(args.matrix)
    status = gr_plus_status(w, tau_det=args.tau_det, budget=args.minor_budget)
    payload = {
        "n": w.n,
        "d": w.d,
        "verdict": status.verdict.value,
        "min_abs_minor": float(status.min_abs_minor),
        "checked_minors": status.checked_minors,
        # General position and the minor scan share one threshold: the
        # matrix is degenerate exactly when some minor falls below it.
        "general_position": status.verdict is not GrVerdict.DEGENERATE,
    }
    config = {
        "matrix": args.matrix,
        "tau_det": args.tau_det,
        "minor_budget": args.minor_budget,
    }
    _emit_report(args, "check", config, payload)
    return ExitCode.OK


def _lp_config(args: argparse.Namespace) -> LpConfig:
    return LpConfig(
        box_bound=args.box, eps_floor=args.eps, solver_feas_tol=args.feas_tol
    )


def _cmd_verify(args: argparse.Namespace) -> int:
    w = parse_matrix(args.matrix)
    ys = parse_labels(args.labels)
    cfg = _lp_config(args)
    batch = verify_batch(w, ys, cfg, jobs=args.jobs)
    deterministic = args.deterministic
    results = []
    for index, res in enumerate(batch.results):
        entry = {
            "index": index,
            "status": res.status.value,
            "radius": None if res.radius is None else float(res.radius),
            "seconds": 0.0 if deterministic else round(res.wall_time, 6),
        }
        if res.reason is not None:
            entry["reason"] = res.reason
        results.append(entry)
    payload = {
        "matrix": {"n": w.n, "d": w.d, "provenance": w.provenance.to_json()},
        "results": results,
        "summary": {
            "argmaxable": batch.summary.argmaxable,
            "one_argmaxable": batch.summary.one_argmaxable,
            "not_eps": batch.summary.not_eps,
            "indeterminate": batch.summary.indeterminate,
        },
    }
    config = {
        "matrix": args.matrix,
        "labels": args.labels,
        "eps": args.eps,
        "box": args.box,
        "feas_tol": args.feas_tol,
        "jobs": args.jobs,
    }
    _emit_report(args, "verify", config, payload)
    if batch.summary.indeterminate:
        return ExitCode.INDETERMINATE
    if batch.summary.not_eps:
        return ExitCode.UNARGMAXABLE
    return ExitCode.OK


def _cmd_enumerate(args: argparse.Namespace) -> int:
    w = parse_matrix(args.matrix)
    method = args.method
    if method == "auto":
        method = "2d" if w.d == 2 else "sampled"
    if method == "2d":
        if w.d != 2:
            raise ParseError(args.matrix, f"exact walk needs d = 2, matrix has d = {w.d}")
        try:
            regions = enumerate_regions_2d(w)
        except DegeneracyError:
            if args.method != "auto":
                raise
            print(
                "warning: degenerate 2d instance, falling back to sampling",
                file=sys.stderr,
            )
            regions = enumerate_regions_sampled(w, budget=args.budget, seed=args.seed)
    else:
        regions = enumerate_regions_sampled(w, budget=args.budget, seed=args.seed)
    members = sorted(y.to_dense() for y in regions.members)
    payload = {
        "n": regions.n,
        "d": regions.d,
        "method": regions.method.value,
        "count": len(members),
        "members": members,
        "samples_used": regions.samples_used,
        "boundary_skips": regions.boundary_skips,
    }
    config = {
        "matrix": args.matrix,
        "method": args.method,
        "budget": args.budget,
        "seed": args.seed,
    }
    _emit_report(args, "enumerate", config, payload)
    return ExitCode.OK


def _cmd_radii(args: argparse.Namespace) -> int:
    w = parse_matrix(args.matrix)
    kind = FamilyKind(args.kind)
    family = FamilySpec(n=w.n, k=args.k, kind=kind)
    cfg = _lp_config(args)
    report = radius_report(
        w,
        family,
        cfg,
        percentiles=args.percentiles,
        budget=args.budget,
        jobs=args.jobs,
    )
    payload = {
        "family": {"n": family.n, "k": family.k, "kind": kind.value},
        "percentiles": [
            {"percentile": p, "radius": r} for p, r in report.rows
        ],
        "members": report.members,
        "summary": {
            "argmaxable": report.argmaxable,
            "not_eps": report.not_eps,
            "indeterminate": report.indeterminate,
        },
    }
    config = {
        "matrix": args.matrix,
        "kind": kind.value,
        "k": args.k,
        "percentiles": args.percentiles,
        "budget": args.budget,
        "eps": args.eps,
        "box": args.box,
        "feas_tol": args.feas_tol,
        "jobs": args.jobs,
    }
    _emit_report(args, "radii", config, payload)
    return ExitCode.OK


def _cmd_metrics(args: argparse.Namespace) -> int:
    scores = parse_scores(args.scores)
    gold = parse_labels(args.gold)
    if scores.shape[0] != len(gold):
        raise ParseError(
            args.scores,
            f"{scores.shape[0]} score records but {len(gold)} gold assignments",
        )
    records = [
        PredictionRecord(scores=row, gold=y) for row, y in zip(scores, gold)
    ]
    if not args.k:
        raise _UsageError("--k needs at least one rank")
    at_k = []
    empty_gold = 0
    for k in args.k:
        pr = prec_rec_f1_at_k(records, k, per_record_f1=args.per_record_f1)
        empty_gold = pr.empty_gold
        try:
            ndcg = ndcg_at_k(records, k).ndcg
        except ValueError:
            ndcg = None
        at_k.append(
            {
                "k": k,
                "prec": pr.prec,
                "rec": pr.rec,
                "f1": pr.f1,
                "ndcg": ndcg,
            }
        )
    mm = micro_macro_f1(records, threshold=args.threshold)
    payload = {
        "records": len(records),
        "at_k": at_k,
        "micro_f1": mm.micro_f1,
        "macro_f1": mm.macro_f1,
        "zero_support_labels": mm.zero_support_labels,
        "empty_gold_records": empty_gold,
    }
    config = {
        "scores": args.scores,
        "gold": args.gold,
        "k": args.k,
        "threshold": args.threshold,
        "per_record_f1": args.per_record_f1,
    }
    _emit_report(args, "metrics", config, payload)
    return ExitCode.OK


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Parse argv, dispatch, and map every outcome to an exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(exc, file=sys.stderr)
        return ExitCode.USAGE
    except SystemExit as exc:  # --help / --version paths
        return int(exc.code or 0)
    if getattr(args, "handler", None) is None:
        print(parser.format_usage(), file=sys.stderr)
        return ExitCode.USAGE
    try:
        return int(args.handler(args))
    except _UsageError as exc:
        print(exc, file=sys.stderr)
        return ExitCode.USAGE
    except (ParseError, DegeneracyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return ExitCode.INPUT
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return ExitCode.INPUT


def main() -> None:
    sys.exit(run(sys.argv[1:]))
