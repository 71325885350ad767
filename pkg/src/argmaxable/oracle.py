"""Brute-force enumeration of achievable sign vectors, independent of the LP.

The n rows of W cut R^d into open sign regions; this module recovers the
achievable set A(W) = {sign(Wx)} by geometry alone so it can sit in
judgment over the LP verifier.  Two routes:

* d = 2: exact.  Each row contributes two boundary directions at +-90
  degrees from its normal; walking the sorted boundary angles around the
  unit circle visits every region exactly once.
* any d: sampled.  Uniform unit-sphere draws, with the region count
  formula as a termination certificate: once the distinct sign vectors
  hit cover_count(n, d) (valid for general-position W), the set is
  provably complete.  Budget exhaustion yields an explicitly partial
  result, never an error.

Members come closed under global sign flip by construction: the
arrangement is central, so sign(W(-x)) = -sign(Wx).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import FrozenSet, Optional

import numpy as np

from .labelspace import LabelAssignment, cover_count
from .linalg import (
    DEFAULT_MINOR_BUDGET,
    DEFAULT_TAU_SIGN,
    WeightMatrix,
    is_general_position,
    sign_vector,
)
from .verifier import LpConfig, VerifyStatus, verify_batch

__all__ = [
    "DegeneracyError",
    "EnumerationMethod",
    "RegionSet",
    "CrossCheckReport",
    "enumerate_regions_2d",
    "enumerate_regions_sampled",
    "cross_check",
    "DEFAULT_SAMPLE_BUDGET",
]

DEFAULT_SAMPLE_BUDGET = 10**7
_SAMPLE_CHUNK = 1 << 15


class DegeneracyError(Exception):
    """The 2D walk found (near-)collinear rows, so sectors are not well
    separated and the exact enumeration refuses to guess."""


class EnumerationMethod(Enum):
    EXACT_2D = "exact-2d"
    SAMPLED_COMPLETE = "sampled-complete"
    SAMPLED_PARTIAL = "sampled-partial"


@dataclass(frozen=True)
class RegionSet:
    """A set of achievable sign vectors with its provenance.

    ``complete`` is True for the exact walk and for sampling that hit the
    region-count certificate; a partial set is still sound (every member
    was witnessed by a concrete x) but may miss regions.  samples_used
    counts examined draws at chunk granularity; boundary_skips the draws
    discarded for landing numerically on a hyperplane.
    """

    n: int
    d: int
    members: FrozenSet[LabelAssignment]
    method: EnumerationMethod
    samples_used: int = 0
    boundary_skips: int = 0

    @property
    def complete(self) -> bool:
        return self.method in (
            EnumerationMethod.EXACT_2D,
            EnumerationMethod.SAMPLED_COMPLETE,
        )


def enumerate_regions_2d(
    w: WeightMatrix,
    tau_angle: float = 1e-12,
    tau_sign: float = DEFAULT_TAU_SIGN,
) -> RegionSet:
    """Exact region enumeration for d = 2 by walking boundary angles.

    Row i's hyperplane meets the unit circle at the two directions
    orthogonal to its normal; collecting all 2n such angles, sorting them,
    and evaluating the sign vector at each sector midpoint yields each of
    the 2n regions exactly once.  Raises DegeneracyError when two
    boundary angles (near-)coincide, which happens iff two rows are
    collinear, or when a zero row leaves a sector undefined.
    """
    if w.d != 2:
        raise ValueError(f"exact walk needs d = 2, got d = {w.d}")
    if np.any(w.row_norms == 0.0):
        raise DegeneracyError("zero row has no boundary direction")
    normals = np.arctan2(w.entries[:, 1], w.entries[:, 0])
    boundaries = np.concatenate([normals + np.pi / 2, normals - np.pi / 2])
    boundaries = np.mod(boundaries, 2 * np.pi)
    order = np.sort(boundaries)
    gaps = np.diff(order, append=order[0] + 2 * np.pi)
    if float(np.min(gaps)) < tau_angle:
        raise DegeneracyError("collinear rows: coincident boundary directions")
    midpoints = order + gaps / 2.0
    members = set()
    for phi in midpoints:
        direction = np.array([math.cos(phi), math.sin(phi)])
        try:
            members.add(sign_vector(w, direction, tau_sign=tau_sign))
        except Exception as exc:
            raise DegeneracyError(
                f"sector midpoint at angle {phi:.6f} has no clean sign vector"
            ) from exc
    if len(members) != 2 * w.n:
        raise DegeneracyError(
            f"walk found {len(members)} regions, expected {2 * w.n}"
        )
    return RegionSet(
        n=w.n, d=2, members=frozenset(members), method=EnumerationMethod.EXACT_2D
    )


def _decode_int_codes(codes, n: int) -> frozenset:
    members = set()
    for code in codes:
        signs = np.where(
            (int(code) >> np.arange(n)) & 1, 1, -1
        ).astype(np.int8)
        members.add(LabelAssignment(signs))
    return frozenset(members)


def _decode_byte_codes(codes, n: int) -> frozenset:
    members = set()
    for blob in codes:
        bits = np.unpackbits(np.frombuffer(blob, dtype=np.uint8), count=n)
        members.add(LabelAssignment(np.where(bits, 1, -1).astype(np.int8)))
    return frozenset(members)


def enumerate_regions_sampled(
    w: WeightMatrix,
    budget: int = DEFAULT_SAMPLE_BUDGET,
    seed: int = 0,
    tau_sign: float = DEFAULT_TAU_SIGN,
    general_position: Optional[bool] = None,
    minor_budget: int = DEFAULT_MINOR_BUDGET,
) -> RegionSet:
    """Sampled region enumeration with a counting-certificate stop rule.

    Draws points uniformly on the unit sphere (seeded), records the sign
    vector of each draw and of its antipode (free by central symmetry),
    and skips draws that land within tau_sign of a hyperplane.  When W is
    in general position, reaching cover_count(n, d) distinct vectors is
    proof of completeness and sampling stops early; otherwise the result
    is SampledPartial however many members were found.

    ``general_position`` short-circuits the internal minor scan when the
    caller already knows the answer; None means decide it here (counted
    against ``minor_budget``; an over-budget scan is treated as unknown,
    so no completeness is claimed).
    """
    n, d = w.n, w.d
    if general_position is None:
        try:
            general_position = is_general_position(w, budget=minor_budget)
        except Exception:
            general_position = False
    target = cover_count(n, d) if general_position else None
    rng = np.random.default_rng(seed)
    use_int_codes = n <= 62
    full_mask = (1 << n) - 1
    seen: set = set()
    used = 0
    skips = 0
    transpose = np.ascontiguousarray(w.entries.T)
    bit_weights = (
        np.left_shift(np.int64(1), np.arange(n, dtype=np.int64))
        if use_int_codes
        else None
    )
    while used < budget:
        chunk = min(_SAMPLE_CHUNK, budget - used)
        draws = rng.standard_normal((chunk, d))
        lengths = np.linalg.norm(draws, axis=1, keepdims=True)
        good_length = lengths[:, 0] > 0.0
        lengths[~good_length] = 1.0
        draws /= lengths
        logits = draws @ transpose
        clean = good_length & (np.abs(logits) >= tau_sign).all(axis=1)
        used += chunk
        skips += int(chunk - np.count_nonzero(clean))
        active = logits[clean] > 0.0
        if use_int_codes:
            codes = active.astype(np.int64) @ bit_weights
            seen.update(codes.tolist())
            seen.update((full_mask ^ code for code in codes.tolist()))
        else:
            pos = np.packbits(active, axis=1)
            neg = np.packbits(~active, axis=1)
            seen.update(row.tobytes() for row in pos)
            seen.update(row.tobytes() for row in neg)
        if target is not None and len(seen) >= target:
            break
    decode = _decode_int_codes if use_int_codes else _decode_byte_codes
    members = decode(seen, n)
    complete = target is not None and len(members) == target
    return RegionSet(
        n=n,
        d=d,
        members=members,
        method=(
            EnumerationMethod.SAMPLED_COMPLETE
            if complete
            else EnumerationMethod.SAMPLED_PARTIAL
        ),
        samples_used=used,
        boundary_skips=skips,
    )


@dataclass(frozen=True)
class CrossCheckReport:
    """Diff between the LP verdicts over all 2^n assignments and the
    oracle's region set.

    lp_yes_oracle_no members would be soundness bugs when the oracle is
    complete.  oracle_yes_lp_no members are expected only for regions
    whose Chebyshev radius sits below the LP's eps floor.  Indeterminate
    LP results are listed separately and belong to neither side.
    """

    n: int
    d: int
    oracle: RegionSet
    lp_yes_oracle_no: tuple[LabelAssignment, ...]
    oracle_yes_lp_no: tuple[LabelAssignment, ...]
    indeterminate: tuple[LabelAssignment, ...]
    agreements: int

    @property
    def clean(self) -> bool:
        return not (
            self.lp_yes_oracle_no or self.oracle_yes_lp_no or self.indeterminate
        )


def _all_assignments(n: int):
    for code in range(1 << n):
        signs = np.where((code >> np.arange(n)) & 1, 1, -1).astype(np.int8)
        yield LabelAssignment(signs)


def cross_check(
    w: WeightMatrix,
    cfg: LpConfig = LpConfig(),
    budget: int = DEFAULT_SAMPLE_BUDGET,
    seed: int = 0,
    jobs: int = 1,
) -> CrossCheckReport:
    """Run the LP on every assignment and diff against the oracle.

    Exponential in n by design; refuses n > 16.  Uses the exact walk for
    d = 2 and certificate-stopped sampling otherwise.
    """
    n = w.n
    if n > 16:
        raise ValueError(f"cross-check enumerates 2^n assignments; n={n} > 16")
    if w.d == 2:
        oracle = enumerate_regions_2d(w)
    else:
        oracle = enumerate_regions_sampled(w, budget=budget, seed=seed)
    everything = list(_all_assignments(n))
    batch = verify_batch(w, everything, cfg, jobs=jobs)
    lp_only = []
    oracle_only = []
    indeterminate = []
    agreements = 0
    for y, res in zip(everything, batch.results):
        in_oracle = y in oracle.members
        if res.status is VerifyStatus.INDETERMINATE:
            indeterminate.append(y)
        elif res.is_argmaxable and not in_oracle:
            lp_only.append(y)
        elif in_oracle and not res.is_argmaxable:
            oracle_only.append(y)
        else:
            agreements += 1
    return CrossCheckReport(
        n=n,
        d=w.d,
        oracle=oracle,
        lp_yes_oracle_no=tuple(lp_only),
        oracle_yes_lp_no=tuple(oracle_only),
        indeterminate=tuple(indeterminate),
        agreements=agreements,
    )
