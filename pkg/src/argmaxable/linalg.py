"""Weight matrices and the linear algebra behind region structure.

The rows of an n x d weight matrix W are the normals of n hyperplanes
through the origin in R^d.  The questions answered here are combinatorial
at heart but settled numerically:

* which sign vector a point x produces (``sign_vector``),
* whether every d-subset of rows is independent (``is_general_position``),
* whether all d x d minors share one strict sign (``gr_plus_status``),
  the "totally positive" condition that pins the feasible sign vectors
  to the low-alternation family.

Minors are relative-thresholded: a minor over rows I counts as zero when
|det| < tau_det * prod_{i in I} ||row_i||, which makes every verdict
invariant under row rescaling.  Row index sets are reported 0-based;
human-facing label/row numbers elsewhere are 1-based, and BoundaryError
follows the 1-based convention because its rows name labels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Iterator, Optional

import numpy as np

__all__ = [
    "Provenance",
    "WeightMatrix",
    "GrVerdict",
    "GrStatus",
    "BoundaryError",
    "MinorBudgetError",
    "determinant",
    "maximal_minors",
    "is_general_position",
    "gr_plus_status",
    "sign_vector",
    "perturb_input",
    "DEFAULT_TAU_DET",
    "DEFAULT_TAU_SIGN",
    "DEFAULT_MINOR_BUDGET",
]

DEFAULT_TAU_DET = 1e-10
DEFAULT_TAU_SIGN = 1e-12
DEFAULT_MINOR_BUDGET = 10**6
DEFAULT_DET_DIM_CAP = 512

_PROVENANCE_KINDS = ("random", "dft", "dft+slack")


@dataclass(frozen=True)
class Provenance:
    """How a weight matrix was produced.

    kind is one of 'random', 'dft', 'dft+slack'; k is the frequency count
    for the spectral kinds, s the number of slack columns, seed the RNG
    seed used for random content (slack columns or a fully random matrix).
    """

    kind: str = "random"
    k: Optional[int] = None
    s: Optional[int] = None
    seed: Optional[int] = None

    def __post_init__(self) -> None:
        if self.kind not in _PROVENANCE_KINDS:
            raise ValueError(f"unknown provenance kind {self.kind!r}")

    @classmethod
    def random(cls, seed: Optional[int] = None) -> "Provenance":
        return cls(kind="random", seed=seed)

    @classmethod
    def dft(cls, k: int) -> "Provenance":
        return cls(kind="dft", k=k)

    @classmethod
    def dft_with_slack(cls, k: int, s: int, seed: int) -> "Provenance":
        return cls(kind="dft+slack", k=k, s=s, seed=seed)

    def to_json(self) -> dict:
        out: dict = {"kind": self.kind}
        for field in ("k", "s", "seed"):
            value = getattr(self, field)
            if value is not None:
                out[field] = int(value)
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "Provenance":
        if not isinstance(obj, dict) or "kind" not in obj:
            raise ValueError("provenance must be an object with a 'kind' field")
        known = {"kind", "k", "s", "seed"}
        extra = set(obj) - known
        if extra:
            raise ValueError(f"unknown provenance fields {sorted(extra)}")
        return cls(
            kind=obj["kind"],
            k=obj.get("k"),
            s=obj.get("s"),
            seed=obj.get("seed"),
        )


@dataclass(frozen=True, eq=False)
class WeightMatrix:
    """An immutable n x d real matrix of hyperplane normals (one per row)."""

    entries: np.ndarray
    provenance: Provenance = Provenance()

    def __post_init__(self) -> None:
        arr = np.asarray(self.entries, dtype=np.float64)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError("entries must be a 2-d array with n, d >= 1")
        if not np.all(np.isfinite(arr)):
            raise ValueError("entries must be finite")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)

    @property
    def n(self) -> int:
        return int(self.entries.shape[0])

    @property
    def d(self) -> int:
        return int(self.entries.shape[1])

    @cached_property
    def row_norms(self) -> np.ndarray:
        """Euclidean norm of each row, computed once and cached."""
        norms = np.linalg.norm(self.entries, axis=1)
        norms.setflags(write=False)
        return norms

    def __repr__(self) -> str:
        return (
            f"WeightMatrix(n={self.n}, d={self.d}, "
            f"provenance={self.provenance.kind!r})"
        )


class BoundaryError(Exception):
    """A point lies numerically on at least one hyperplane, so its sign
    vector is undefined.  ``rows`` holds the offending 1-based row numbers."""

    def __init__(self, rows: tuple[int, ...]):
        self.rows = tuple(int(r) for r in rows)
        noun = "row" if len(self.rows) == 1 else "rows"
        super().__init__(
            f"point lies on the boundary of {noun} "
            + ", ".join(str(r) for r in self.rows)
        )


class MinorBudgetError(ValueError):
    """Raised when C(n, d) exceeds the minor enumeration budget."""


def determinant(matrix: np.ndarray, dim_cap: int = DEFAULT_DET_DIM_CAP) -> float:
    """Determinant of a square real matrix via LU with partial pivoting.

    The dimension cap is a plumbing guard: nothing in this package needs
    determinants beyond d x d blocks, so an unexpectedly large input is
    more likely a transposed or misshaped argument than a real request.
    """
    arr = np.asarray(matrix, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError(f"determinant needs a square matrix, got shape {arr.shape}")
    if arr.shape[0] > dim_cap:
        raise ValueError(f"dimension {arr.shape[0]} exceeds cap {dim_cap}")
    return float(np.linalg.det(arr))


def _colex_index_sets(n: int, d: int) -> Iterator[tuple[int, ...]]:
    """All d-subsets of range(n) in colexicographic order: sets are sorted
    ascending and ordered by their largest element first."""
    if d == 0:
        yield ()
        return
    for top in range(d - 1, n):
        for rest in _colex_index_sets(top, d - 1):
            yield rest + (top,)


def maximal_minors(
    w: WeightMatrix,
    budget: int = DEFAULT_MINOR_BUDGET,
    chunk: int = 2048,
) -> Iterator[tuple[tuple[int, ...], float]]:
    """Stream (row index set, d x d minor) pairs for every d-subset of rows.

    Index sets are 0-based ascending tuples, emitted in colexicographic
    order.  Determinants are evaluated in batches for throughput.  Raises
    MinorBudgetError before any work if C(n, d) exceeds ``budget``.
    """
    n, d = w.n, w.d
    if n < d:
        raise ValueError(f"need n >= d rows for maximal minors, got n={n}, d={d}")
    total = math.comb(n, d)
    if total > budget:
        raise MinorBudgetError(
            f"{total} maximal minors (C({n},{d})) exceed the budget {budget}"
        )
    return _minor_stream(w.entries, n, d, chunk)


def _minor_stream(
    entries: np.ndarray, n: int, d: int, chunk: int
) -> Iterator[tuple[tuple[int, ...], float]]:
    batch: list[tuple[int, ...]] = []
    for index_set in _colex_index_sets(n, d):
        batch.append(index_set)
        if len(batch) == chunk:
            yield from _eval_minor_batch(entries, batch)
            batch = []
    if batch:
        yield from _eval_minor_batch(entries, batch)


def _eval_minor_batch(
    entries: np.ndarray, batch: list[tuple[int, ...]]
) -> Iterator[tuple[tuple[int, ...], float]]:
    stacked = entries[np.array(batch, dtype=np.intp)]
    dets = np.linalg.det(stacked)
    for index_set, det in zip(batch, dets):
        yield index_set, float(det)


def _minor_threshold(w: WeightMatrix, tau_det: float):
    """Per-subset degeneracy cutoff: tau_det times the norms of the
    selected rows, so the test is invariant under row rescaling."""
    norms = w.row_norms

    def threshold(index_set: tuple[int, ...]) -> float:
        return tau_det * float(np.prod(norms[list(index_set)]))

    return threshold


def is_general_position(
    w: WeightMatrix,
    tau_det: float = DEFAULT_TAU_DET,
    budget: int = DEFAULT_MINOR_BUDGET,
) -> bool:
    """True when every size-min(n, d) subset of rows is independent.

    For n >= d this means every maximal minor satisfies
    |det| >= tau_det * product of the selected row norms.  With fewer
    rows than columns the condition degrades to full row rank, tested
    through the Gram determinant: det(W W^T) equals the sum of squared
    wide-minors, so its square root is compared against the same
    rescaling-invariant threshold.
    """
    if w.n < w.d:
        gram = w.entries @ w.entries.T
        value = math.sqrt(max(float(np.linalg.det(gram)), 0.0))
        return value >= tau_det * float(np.prod(w.row_norms))
    threshold = _minor_threshold(w, tau_det)
    for index_set, det in maximal_minors(w, budget=budget):
        if abs(det) < threshold(index_set):
            return False
    return True


class GrVerdict(Enum):
    UNIFORM_POSITIVE = "uniform-positive"
    UNIFORM_NEGATIVE = "uniform-negative"
    MIXED_SIGNS = "mixed-signs"
    DEGENERATE = "degenerate"


@dataclass(frozen=True)
class GrStatus:
    """Outcome of the all-minors sign scan.

    ``min_abs_minor`` is the smallest |det| seen (raw, not relative);
    ``checked_minors`` the number of minors evaluated before the verdict
    was reached.  A degenerate minor short-circuits the scan; the mixed
    verdict requires scanning everything, since a later near-zero minor
    would demote it to degenerate.
    """

    verdict: GrVerdict
    min_abs_minor: float
    checked_minors: int

    @property
    def is_uniform(self) -> bool:
        return self.verdict in (GrVerdict.UNIFORM_POSITIVE, GrVerdict.UNIFORM_NEGATIVE)


def gr_plus_status(
    w: WeightMatrix,
    tau_det: float = DEFAULT_TAU_DET,
    budget: int = DEFAULT_MINOR_BUDGET,
) -> GrStatus:
    """Classify the sign pattern of all maximal minors.

    Uniform-positive / uniform-negative: every minor clears the relative
    threshold and they all share one sign (the matrix represents a point
    of the strict positive region of the Grassmannian, up to column sign).
    Degenerate: some minor falls below the threshold.  Mixed-signs: all
    minors clear the threshold but disagree in sign.
    """
    threshold = _minor_threshold(w, tau_det)
    min_abs = math.inf
    checked = 0
    saw_pos = saw_neg = False
    for index_set, det in maximal_minors(w, budget=budget):
        checked += 1
        min_abs = min(min_abs, abs(det))
        if abs(det) < threshold(index_set):
            return GrStatus(GrVerdict.DEGENERATE, min_abs, checked)
        if det > 0:
            saw_pos = True
        else:
            saw_neg = True
    if saw_pos and saw_neg:
        verdict = GrVerdict.MIXED_SIGNS
    elif saw_pos:
        verdict = GrVerdict.UNIFORM_POSITIVE
    else:
        verdict = GrVerdict.UNIFORM_NEGATIVE
    return GrStatus(verdict, min_abs, checked)


def sign_vector(w: WeightMatrix, x: np.ndarray, tau_sign: float = DEFAULT_TAU_SIGN):
    """Sign vector of W x as a LabelAssignment.

    Raises BoundaryError (1-based rows) when any logit has |W_i x| <
    tau_sign; a sign vector is never fabricated on the boundary.
    """
    from .labelspace import LabelAssignment

    point = np.asarray(x, dtype=np.float64)
    if point.shape != (w.d,):
        raise ValueError(f"x must have shape ({w.d},), got {point.shape}")
    logits = w.entries @ point
    on_boundary = np.flatnonzero(np.abs(logits) < tau_sign)
    if on_boundary.size:
        raise BoundaryError(tuple(int(i) + 1 for i in on_boundary))
    return LabelAssignment(np.where(logits > 0, 1, -1).astype(np.int8))


def perturb_input(
    x: np.ndarray, seed: int, scale: float = 1e-9
) -> np.ndarray:
    """Nudge x off a hyperplane: add a seeded uniform direction of length
    scale * ||x|| (or just ``scale`` when x is the origin).  Intended as
    the retry step after BoundaryError."""
    point = np.asarray(x, dtype=np.float64)
    rng = np.random.default_rng(seed)
    direction = rng.uniform(-1.0, 1.0, size=point.shape)
    norm = float(np.linalg.norm(direction))
    if norm == 0.0:  # probability zero, but keep the contract total
        direction = np.ones_like(point)
        norm = float(np.linalg.norm(direction))
    magnitude = scale * float(np.linalg.norm(point))
    if magnitude == 0.0:
        magnitude = scale
    return point + direction * (magnitude / norm)
