"""Chebyshev-center LP certification of label-assignment feasibility.

A sign vector y is feasible for W when some x has sign(Wx) = y, and
eps-feasible when the whole ball of radius eps around x stays on the
same side of every hyperplane.  The largest such radius is found by one
linear program over (x, eps):

    maximize  eps
    subject to  -y_i * w_i . x + eps * ||w_i|| <= 0     (i = 1..n)
                -box <= x_j <= box                      (j = 1..d)
                eps >= eps_floor

A feasible optimum certifies the assignment with its radius and witness
point; a certified-infeasible LP proves no point achieves y with margin
eps_floor; anything else the solver reports (numerical trouble, iteration
limits) is surfaced as Indeterminate rather than guessed.  The box bound
exists only to keep the optimum finite on unbounded regions.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import linprog

from .labelspace import FamilySpec, LabelAssignment, enumerate_family
from .linalg import WeightMatrix, sign_vector

__all__ = [
    "LpConfig",
    "VerifyStatus",
    "VerifyResult",
    "BatchSummary",
    "BatchResult",
    "RadiusReport",
    "chebyshev_verify",
    "verify_batch",
    "radius_report",
]


@dataclass(frozen=True)
class LpConfig:
    """LP parameters: the coordinate box, the smallest radius that counts
    as robustly feasible, and the solver feasibility tolerance (which must
    sit strictly below the floor so the two scales never blur)."""

    box_bound: float = 1e4
    eps_floor: float = 1e-8
    solver_feas_tol: float = 1e-9

    def __post_init__(self) -> None:
        if not self.box_bound > 0:
            raise ValueError("box_bound must be positive")
        if not self.eps_floor > self.solver_feas_tol > 0:
            raise ValueError("need eps_floor > solver_feas_tol > 0")


class VerifyStatus(Enum):
    ARGMAXABLE = "argmaxable"
    NOT_EPS_ARGMAXABLE = "not_eps_argmaxable"
    INDETERMINATE = "indeterminate"


@dataclass(frozen=True)
class VerifyResult:
    """Outcome of one LP solve.

    radius and witness are set only for ARGMAXABLE; reason only for
    INDETERMINATE (solver message or input problem).  wall_time is the
    solve time in seconds.
    """

    status: VerifyStatus
    radius: Optional[float] = None
    witness: Optional[np.ndarray] = None
    reason: Optional[str] = None
    wall_time: float = 0.0

    @property
    def is_argmaxable(self) -> bool:
        return self.status is VerifyStatus.ARGMAXABLE


def chebyshev_verify(
    w: WeightMatrix, y: LabelAssignment, cfg: LpConfig = LpConfig()
) -> VerifyResult:
    """Certify one assignment against one matrix.

    Raises ValueError on dimension mismatch or a zero-norm row (a zero
    row makes its halfspace constraint vacuous, so the question is
    ill-posed for that matrix).
    """
    if y.n != w.n:
        raise ValueError(f"assignment has n={y.n}, matrix has n={w.n}")
    norms = w.row_norms
    zero_rows = np.flatnonzero(norms == 0.0)
    if zero_rows.size:
        raise ValueError(
            "zero-norm row(s) "
            + ", ".join(str(int(r) + 1) for r in zero_rows)
        )
    start = time.perf_counter()
    n, d = w.n, w.d
    # Variables (x_1..x_d, eps); maximize eps.
    cost = np.zeros(d + 1)
    cost[-1] = -1.0
    a_ub = np.empty((n, d + 1))
    a_ub[:, :d] = -(y.signs[:, None] * w.entries)
    a_ub[:, d] = norms
    b_ub = np.zeros(n)
    bounds = [(-cfg.box_bound, cfg.box_bound)] * d + [(cfg.eps_floor, None)]
    try:
        res = linprog(
            cost,
            A_ub=a_ub,
            b_ub=b_ub,
            bounds=bounds,
            method="highs",
            options={
                "primal_feasibility_tolerance": cfg.solver_feas_tol,
                "dual_feasibility_tolerance": cfg.solver_feas_tol,
            },
        )
    except Exception as exc:  # solver blow-ups become Indeterminate, not lies
        elapsed = time.perf_counter() - start
        return VerifyResult(
            VerifyStatus.INDETERMINATE,
            reason=f"solver raised {type(exc).__name__}: {exc}",
            wall_time=elapsed,
        )
    elapsed = time.perf_counter() - start
    if res.status == 0:
        return VerifyResult(
            VerifyStatus.ARGMAXABLE,
            radius=float(res.x[-1]),
            witness=np.array(res.x[:d]),
            wall_time=elapsed,
        )
    if res.status == 2:
        return VerifyResult(
            VerifyStatus.NOT_EPS_ARGMAXABLE, wall_time=elapsed
        )
    return VerifyResult(
        VerifyStatus.INDETERMINATE,
        reason=f"solver status {res.status}: {res.message}",
        wall_time=elapsed,
    )


@dataclass(frozen=True)
class BatchSummary:
    """Counts over a batch: one_argmaxable is the subset of argmaxable
    results whose radius is at least 1 (regions big enough that unit
    perturbations cannot flip them)."""

    argmaxable: int
    one_argmaxable: int
    not_eps: int
    indeterminate: int

    @property
    def total(self) -> int:
        return self.argmaxable + self.not_eps + self.indeterminate


@dataclass(frozen=True)
class BatchResult:
    results: tuple[VerifyResult, ...]
    summary: BatchSummary


def _verify_one_safely(
    w: WeightMatrix, y: LabelAssignment, cfg: LpConfig
) -> VerifyResult:
    try:
        return chebyshev_verify(w, y, cfg)
    except ValueError as exc:
        # A bad item must not abort the batch; it surfaces per-item.
        return VerifyResult(VerifyStatus.INDETERMINATE, reason=str(exc))


def verify_batch(
    w: WeightMatrix,
    ys: Sequence[LabelAssignment],
    cfg: LpConfig = LpConfig(),
    jobs: int = 1,
) -> BatchResult:
    """Verify many assignments against one matrix.

    Results come back in input order regardless of completion order.
    Row norms are computed once on ``w`` and shared.  Per-item failures
    (e.g. a mismatched n) become Indeterminate results with the error as
    the reason instead of aborting the rest.
    """
    _ = w.row_norms  # materialize the shared cache before any workers start
    if jobs > 1 and len(ys) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = tuple(pool.map(lambda y: _verify_one_safely(w, y, cfg), ys))
    else:
        results = tuple(_verify_one_safely(w, y, cfg) for y in ys)
    return BatchResult(results=results, summary=summarize(results))


def summarize(results: Sequence[VerifyResult]) -> BatchSummary:
    argmaxable = sum(1 for r in results if r.status is VerifyStatus.ARGMAXABLE)
    one = sum(
        1
        for r in results
        if r.status is VerifyStatus.ARGMAXABLE and r.radius is not None and r.radius >= 1.0
    )
    not_eps = sum(1 for r in results if r.status is VerifyStatus.NOT_EPS_ARGMAXABLE)
    indet = sum(1 for r in results if r.status is VerifyStatus.INDETERMINATE)
    return BatchSummary(argmaxable, one, not_eps, indet)


@dataclass(frozen=True)
class RadiusReport:
    """Chebyshev radii of a whole family, reduced to percentiles.

    rows pairs each requested percentile with the nearest-rank radius of
    the ascending-sorted radius list; infeasible members count as radius
    0, and indeterminate members are counted separately (their radii are
    unknown, so they are excluded from the distribution).
    """

    family: FamilySpec
    rows: tuple[tuple[float, float], ...]
    members: int
    argmaxable: int
    not_eps: int
    indeterminate: int


def radius_report(
    w: WeightMatrix,
    family: FamilySpec,
    cfg: LpConfig = LpConfig(),
    percentiles: Sequence[float] = (1.0, 5.0, 25.0, 50.0, 100.0),
    budget: int = 10**6,
    jobs: int = 1,
) -> RadiusReport:
    """Verify every member of a family and report radius percentiles."""
    for p in percentiles:
        if not 0.0 <= p <= 100.0:
            raise ValueError(f"percentile {p} outside [0, 100]")
    ys = list(enumerate_family(family, budget=budget))
    batch = verify_batch(w, ys, cfg, jobs=jobs)
    radii = sorted(
        (r.radius if r.status is VerifyStatus.ARGMAXABLE else 0.0)
        for r in batch.results
        if r.status is not VerifyStatus.INDETERMINATE
    )
    rows = tuple((float(p), _nearest_rank(radii, p)) for p in percentiles)
    return RadiusReport(
        family=family,
        rows=rows,
        members=len(ys),
        argmaxable=batch.summary.argmaxable,
        not_eps=batch.summary.not_eps,
        indeterminate=batch.summary.indeterminate,
    )


def _nearest_rank(sorted_values: list[float], percentile: float) -> float:
    """Nearest-rank percentile on an ascending list (deterministic, no
    interpolation)."""
    if not sorted_values:
        raise ValueError("no radii to take percentiles of")
    count = len(sorted_values)
    rank = max(1, math.ceil(percentile * count / 100.0))
    return float(sorted_values[min(rank, count) - 1])
