"""Ranked and thresholded multi-label evaluation metrics.

Inputs are per-example score vectors paired with gold sign vectors.  The
ranked metrics (Prec@k, Rec@k, F1@k, nDCG@k) look only at the order of
the scores; ties are broken by ascending label index so every quantity
here is deterministic.  Conventions for degenerate records are explicit
and surfaced in the results rather than silently folded in:

* Rec@k of a record with no active gold labels is 1 (nothing to find,
  nothing missed); such records are counted in ``empty_gold``.
* nDCG skips records with no active gold labels (their ideal DCG is 0)
  and counts them.
* Macro-F1 averages over all labels, with zero-support labels (no gold
  positives and no predicted positives) contributing F1 = 0 and counted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .labelspace import LabelAssignment

__all__ = [
    "PredictionRecord",
    "AtKResult",
    "MicroMacroResult",
    "NdcgResult",
    "prec_rec_f1_at_k",
    "micro_macro_f1",
    "ndcg_at_k",
]


@dataclass(frozen=True)
class PredictionRecord:
    """One example: a finite score per label plus the gold assignment."""

    scores: np.ndarray
    gold: LabelAssignment

    def __post_init__(self) -> None:
        arr = np.asarray(self.scores, dtype=np.float64)
        if arr.ndim != 1:
            raise ValueError("scores must be a 1-d vector")
        if not np.all(np.isfinite(arr)):
            raise ValueError("scores must be finite")
        if arr.size != self.gold.n:
            raise ValueError(
                f"scores have length {arr.size}, gold has n={self.gold.n}"
            )
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "scores", arr)

    @property
    def n(self) -> int:
        return int(self.scores.size)


class AtKResult(NamedTuple):
    prec: float
    rec: float
    f1: float
    empty_gold: int


class MicroMacroResult(NamedTuple):
    micro_f1: float
    macro_f1: float
    zero_support_labels: int


class NdcgResult(NamedTuple):
    ndcg: float
    scored: int
    skipped: int


def _top_k(scores: np.ndarray, k: int) -> np.ndarray:
    """Indices of the k largest scores, ties broken by ascending index."""
    return np.argsort(-scores, kind="stable")[:k]


def _harmonic(p: float, r: float) -> float:
    if p + r == 0.0:
        return 0.0
    if p == r:
        # The harmonic mean of equal values is that value; routing the
        # equal case through 2pr/(p+r) can lose the identity by an ulp.
        return p
    return 2.0 * p * r / (p + r)


def prec_rec_f1_at_k(
    records: Sequence[PredictionRecord], k: int, per_record_f1: bool = False
) -> AtKResult:
    """Precision, recall, and F1 at rank k, averaged over records.

    Per record the k top-scored labels are predicted active: precision is
    hits/k and recall hits/act(gold) (1.0 when the gold set is empty).
    By default F1 is the harmonic mean of the dataset-averaged precision
    and recall; with ``per_record_f1`` the harmonic mean is taken per
    record and then averaged.
    """
    if not records:
        raise ValueError("no records")
    if k < 1:
        raise ValueError("k must be >= 1")
    precs = []
    recs = []
    f1s = []
    empty = 0
    for rec in records:
        if k > rec.n:
            raise ValueError(f"k={k} exceeds label count n={rec.n}")
        top = _top_k(rec.scores, k)
        hits = int(np.count_nonzero(rec.gold.signs[top] > 0))
        active = int(np.count_nonzero(rec.gold.signs > 0))
        p = hits / k
        if active == 0:
            r = 1.0
            empty += 1
        else:
            r = hits / active
        precs.append(p)
        recs.append(r)
        f1s.append(_harmonic(p, r))
    mean_p = float(np.mean(precs))
    mean_r = float(np.mean(recs))
    f1 = float(np.mean(f1s)) if per_record_f1 else _harmonic(mean_p, mean_r)
    return AtKResult(mean_p, mean_r, f1, empty)


def micro_macro_f1(
    records: Sequence[PredictionRecord], threshold: float = 0.5
) -> MicroMacroResult:
    """Micro- and macro-averaged F1 of thresholded predictions.

    A label is predicted active when its score is strictly above the
    threshold.  Micro pools true/false positives and false negatives
    over every (record, label) pair; macro computes F1 per label and
    averages over all n labels.
    """
    if not records:
        raise ValueError("no records")
    n = records[0].n
    for rec in records:
        if rec.n != n:
            raise ValueError("all records must share one label count")
    predicted = np.stack([rec.scores > threshold for rec in records])
    actual = np.stack([rec.gold.signs > 0 for rec in records])
    tp = (predicted & actual).sum(axis=0).astype(np.int64)
    fp = (predicted & ~actual).sum(axis=0).astype(np.int64)
    fn = (~predicted & actual).sum(axis=0).astype(np.int64)
    micro_den = 2 * int(tp.sum()) + int(fp.sum()) + int(fn.sum())
    micro = 0.0 if micro_den == 0 else 2.0 * int(tp.sum()) / micro_den
    label_den = 2 * tp + fp + fn
    zero_support = int(np.count_nonzero(label_den == 0))
    per_label = np.where(label_den == 0, 0.0, 2.0 * tp / np.maximum(label_den, 1))
    return MicroMacroResult(float(micro), float(per_label.mean()), zero_support)


def ndcg_at_k(records: Sequence[PredictionRecord], k: int) -> NdcgResult:
    """Normalized discounted cumulative gain at rank k, averaged over the
    records that have at least one active gold label.

    Gain is 1 for an active label, 0 otherwise; the discount at rank r is
    1/log2(r+1); the normalizer is the DCG of a perfect ranking.  Records
    with empty gold are skipped and counted; if every record is skipped
    there is nothing to average and a ValueError is raised.
    """
    if not records:
        raise ValueError("no records")
    if k < 1:
        raise ValueError("k must be >= 1")
    total = 0.0
    scored = 0
    skipped = 0
    for rec in records:
        active = int(np.count_nonzero(rec.gold.signs > 0))
        if active == 0:
            skipped += 1
            continue
        top = _top_k(rec.scores, min(k, rec.n))
        dcg = 0.0
        for rank, label in enumerate(top, start=1):
            if rec.gold.signs[label] > 0:
                dcg += 1.0 / math.log2(rank + 1)
        ideal = sum(
            1.0 / math.log2(rank + 1) for rank in range(1, min(k, active) + 1)
        )
        total += dcg / ideal
        scored += 1
    if scored == 0:
        raise ValueError("every record has an empty gold set")
    return NdcgResult(total / scored, scored, skipped)
