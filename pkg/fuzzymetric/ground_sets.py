"""
Subsets of a ground space, Hausdorff distances, greedy epsilon-nets and
windowed Kuratowski limits.

Empty-set conventions:

- H*(empty, B) = 0 for every B
- H*(A, empty) = +inf for nonempty A
- d(x, empty) = +inf

Extended distances are plain floats with math.inf for the infinite value.
"""
import logging
import math
from typing import Any, Literal, Optional, Sequence, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationInfo, field_validator, model_validator

from fuzzymetric import config
from fuzzymetric.exceptions import DomainError
from fuzzymetric.intervals import (
    Interval,
    distance_to_union,
    endpoint_arrays,
    height_pieces,
    intervals_subset,
    normalize,
    sup_cone_envelope,
)
from fuzzymetric.metric_core import EuclideanRm, GroundSpace, Point, RealLine, require_same_space

logger = logging.getLogger(__name__)

# Extended distance: a non-negative float, math.inf when infinite
ExtDist = float

SetKind = Literal["points", "intervals", "empty", "full"]


class GroundSet(BaseModel):
    """
    A represented subset of a ground space.

    kind "points" holds finitely many distinct points in canonical order,
    "intervals" a normalised union of closed intervals (real line only),
    "full" the whole space (only needed on R^m; the other backends spell it out).
    """
    model_config = ConfigDict(frozen=True)

    space: GroundSpace
    kind: SetKind
    points: tuple[Point, ...] = ()
    intervals: tuple[Interval, ...] = ()

    @field_validator("points")
    @classmethod
    def canonical_points(cls, v: tuple, info: ValidationInfo) -> tuple:
        space = info.data.get("space")
        if space is None:
            return v
        try:
            unique = {space.canonical(p) for p in v}
        except DomainError as e:
            raise ValueError(e.detail)
        return tuple(sorted(unique, key=space.sort_key))

    @field_validator("intervals")
    @classmethod
    def normalised_intervals(cls, v: tuple[Interval, ...]) -> tuple[Interval, ...]:
        return normalize(v)

    @model_validator(mode="after")
    def check_kind(self) -> "GroundSet":
        if self.kind == "points" and (not self.points or self.intervals):
            raise ValueError("a point set needs at least one point and no intervals")
        if self.kind == "intervals":
            if not isinstance(self.space, RealLine):
                raise ValueError("interval unions are only available on the real line")
            if not self.intervals or self.points:
                raise ValueError("an interval union needs at least one interval and no points")
        if self.kind in ("empty", "full") and (self.points or self.intervals):
            raise ValueError(f"a {self.kind} set carries no points or intervals")
        if self.kind == "full" and not isinstance(self.space, EuclideanRm):
            raise ValueError("use GroundSet.full() to build the whole space")
        return self

    # ── Constructors ───────────────────────────────────────────────

    @classmethod
    def from_points(cls, space: GroundSpace, points: Sequence[Any]) -> "GroundSet":
        if not points:
            return cls.empty(space)
        try:
            return cls(space=space, kind="points", points=tuple(points))
        except ValueError as e:
            raise DomainError(str(e))

    @classmethod
    def from_intervals(cls, space: GroundSpace, intervals: Sequence[Interval | tuple[float, float]]) -> "GroundSet":
        if not isinstance(space, RealLine):
            raise DomainError("interval unions are only available on the real line")
        if not intervals:
            return cls.empty(space)
        ivs = tuple(iv if isinstance(iv, Interval) else Interval(lo=iv[0], hi=iv[1]) for iv in intervals)
        return cls(space=space, kind="intervals", intervals=ivs)

    @classmethod
    def empty(cls, space: GroundSpace) -> "GroundSet":
        return cls(space=space, kind="empty")

    @classmethod
    def full(cls, space: GroundSpace) -> "GroundSet":
        """The whole space X."""
        if isinstance(space, RealLine):
            return cls.from_intervals(space, [(-math.inf, math.inf)])
        if isinstance(space, EuclideanRm):
            return cls(space=space, kind="full")
        return cls.from_points(space, space.labels)

    # ── Shape ──────────────────────────────────────────────────────

    @property
    def is_empty(self) -> bool:
        return self.kind == "empty"

    def as_intervals(self) -> tuple[Interval, ...]:
        """Real-line view: points become degenerate intervals."""
        if self.kind == "intervals":
            return self.intervals
        if self.kind == "points":
            return tuple(Interval(lo=p, hi=p) for p in self.points)
        return ()

    def __str__(self) -> str:
        if self.kind == "empty":
            return "{}"
        if self.kind == "full":
            return "X"
        if self.kind == "intervals":
            return " u ".join(str(iv) for iv in self.intervals)
        return "{" + ", ".join(str(p) for p in self.points) + "}"


class EpsNet(BaseModel):
    model_config = ConfigDict(frozen=True)

    centers: tuple[Point, ...]
    radius: float = Field(..., gt=0)
    covered: GroundSet

    @property
    def succeeded(self) -> bool:
        return True


class FailureWitness(BaseModel):
    """A point left farther than the radius from every center, or an unbounded set."""
    model_config = ConfigDict(frozen=True)

    point: Optional[Point] = None
    reason: Literal["budget", "unbounded"]
    centers: tuple[Point, ...] = ()

    @property
    def succeeded(self) -> bool:
        return False


NetOutcome = Union[EpsNet, FailureWitness]


class SetSequenceWindow(BaseModel):
    """C_1..C_N with the tail starting at the 1-based index tail_start."""
    model_config = ConfigDict(frozen=True)

    sets: tuple[GroundSet, ...]
    tail_start: int = Field(default=1, ge=1)

    @model_validator(mode="after")
    def check_window(self) -> "SetSequenceWindow":
        if not self.sets:
            raise ValueError("a window needs at least one set")
        if self.tail_start > len(self.sets):
            raise ValueError(f"tail_start {self.tail_start} is past the window end {len(self.sets)}")
        first = self.sets[0].space
        if any(s.space != first for s in self.sets[1:]):
            raise ValueError("all sets of a window must share one space")
        return self

    @property
    def space(self) -> GroundSpace:
        return self.sets[0].space

    def tail(self) -> list[tuple[int, GroundSet]]:
        return [(n, self.sets[n - 1]) for n in range(self.tail_start, len(self.sets) + 1)]


# ── Set algebra ────────────────────────────────────────────────────


def point_distances(A: GroundSet, xs: Sequence[Point]) -> np.ndarray:
    """d(x, A) for each canonical point x."""
    if not xs:
        return np.zeros(0)
    if A.kind == "empty":
        return np.full(len(xs), math.inf)
    if A.kind == "full":
        return np.zeros(len(xs))
    if isinstance(A.space, RealLine):
        los, his = endpoint_arrays(A.as_intervals())
        return distance_to_union(np.asarray(xs, dtype=float), los, his)
    return A.space.pairwise(list(xs), list(A.points)).min(axis=1)


def contains(A: GroundSet, x: Any) -> bool:
    return bool(point_distances(A, [A.space.canonical(x)])[0] == 0)


def is_subset(A: GroundSet, B: GroundSet) -> bool:
    require_same_space(A.space, B.space)
    if A.kind == "empty" or B.kind == "full":
        return True
    if A.kind == "full" or B.kind == "empty":
        return False
    if isinstance(A.space, RealLine):
        return intervals_subset(A.as_intervals(), B.as_intervals())
    return bool(np.all(point_distances(B, A.points) == 0))


def same_set(A: GroundSet, B: GroundSet) -> bool:
    return is_subset(A, B) and is_subset(B, A)


def union_all(space: GroundSpace, sets: Sequence[GroundSet]) -> GroundSet:
    """Union of a finite collection; the empty union is the empty set."""
    for s in sets:
        require_same_space(space, s.space)
    if any(s.kind == "full" for s in sets):
        return GroundSet.full(space)
    if any(s.kind == "intervals" for s in sets):
        return GroundSet.from_intervals(space, [iv for s in sets for iv in s.as_intervals()])
    return GroundSet.from_points(space, [p for s in sets for p in s.points])


def is_bounded(A: GroundSet) -> bool:
    if A.kind == "full":
        return False
    return all(iv.bounded for iv in A.intervals)


def is_compact(A: GroundSet) -> bool:
    """Represented sets are closed, so compact iff bounded."""
    return is_bounded(A)


def diameter(A: GroundSet) -> float:
    """sup d(x, y) over A, 0 for the empty set."""
    if A.is_empty:
        return 0.0
    if A.kind == "full":
        return math.inf
    if A.kind == "intervals":
        return A.intervals[-1].hi - A.intervals[0].lo
    return float(A.space.pairwise(list(A.points), list(A.points)).max())


def representatives(A: GroundSet, mesh: float) -> list[Point]:
    """
    Finite probe points of A: every point of a finite set; endpoints plus a
    mesh grid for intervals. Unbounded sides are sampled over PROBE_SPAN.
    """
    if not mesh > 0:
        raise DomainError(f"mesh must be positive, got {mesh}")
    if A.kind == "full" and isinstance(A.space, EuclideanRm):
        raise DomainError("the whole of R^m has no finite set of representatives")
    if A.kind != "intervals":
        return list(A.points)
    reps: list[float] = []
    for iv in A.intervals:
        lo, hi = iv.lo, iv.hi
        if lo == -math.inf and hi == math.inf:
            lo, hi = -config.PROBE_SPAN, config.PROBE_SPAN
        elif lo == -math.inf:
            lo = hi - config.PROBE_SPAN
        elif hi == math.inf:
            hi = lo + config.PROBE_SPAN
        steps = max(1, math.ceil((hi - lo) / mesh))
        reps.extend(float(x) for x in np.linspace(lo, hi, steps + 1))
    return sorted(set(reps))


# ── Hausdorff ──────────────────────────────────────────────────────


def semi_hausdorff(A: GroundSet, B: GroundSet) -> ExtDist:
    """H*(A, B) = sup over a in A of d(a, B)."""
    require_same_space(A.space, B.space)
    if A.kind == "empty":
        return 0.0
    if B.kind == "empty":
        return math.inf
    if B.kind == "full":
        return 0.0
    if A.kind == "full":
        return math.inf
    if isinstance(A.space, RealLine) and "intervals" in (A.kind, B.kind):
        los, his, _ = height_pieces([B.as_intervals()], [0.0])
        return sup_cone_envelope(A.as_intervals(), los, his, np.zeros(los.shape))
    return float(point_distances(B, A.points).max())


def hausdorff(A: GroundSet, B: GroundSet) -> ExtDist:
    return max(semi_hausdorff(A, B), semi_hausdorff(B, A))


# ── Epsilon-nets ───────────────────────────────────────────────────


def require_positive_eps(eps: float) -> None:
    if not eps > 0:
        raise DomainError(f"tolerance must be positive, got {eps}")


def _check_net_args(eps: float, budget: int) -> None:
    if not eps > 0:
        raise DomainError(f"net radius must be positive, got {eps}")
    if budget < 1:
        raise DomainError(f"net budget must be at least 1, got {budget}")


def _greedy_points(A: GroundSet, eps: float, budget: int) -> NetOutcome:
    table = A.space.pairwise(list(A.points), list(A.points))
    uncovered = np.ones(len(A.points), dtype=bool)
    centers: list[Point] = []
    while uncovered.any():
        idx = int(np.argmax(uncovered))
        if len(centers) == budget:
            return FailureWitness(point=A.points[idx], reason="budget", centers=tuple(centers))
        centers.append(A.points[idx])
        uncovered &= table[idx] > eps
    return EpsNet(centers=tuple(centers), radius=eps, covered=A)


def _greedy_intervals(A: GroundSet, eps: float, budget: int) -> NetOutcome:
    for iv in A.intervals:
        if not iv.bounded:
            finite = iv.lo if math.isfinite(iv.lo) else (iv.hi if math.isfinite(iv.hi) else 0.0)
            return FailureWitness(point=finite, reason="unbounded")
    centers: list[float] = []
    reach = -math.inf
    for iv in A.intervals:
        while iv.hi > reach:
            start = max(iv.lo, reach)
            if len(centers) == budget:
                witness = iv.lo if iv.lo > reach else min(reach + eps, iv.hi)
                return FailureWitness(point=witness, reason="budget", centers=tuple(centers))
            center = min(start + eps, iv.hi)
            centers.append(center)
            reach = center + eps
    return EpsNet(centers=tuple(centers), radius=eps, covered=A)


def greedy_eps_net(A: GroundSet, eps: float, budget: int) -> NetOutcome:
    """
    Greedy eps-net with centers drawn from A. On finite sets the first
    uncovered point in canonical order becomes the next center. On interval
    unions the sweep runs left to right and the center sits eps past the
    uncovered boundary b, clamped to its interval, so it covers [b, b + 2 eps]
    and stays more than eps from every earlier center. Unbounded sets fail at once.
    """
    _check_net_args(eps, budget)
    if A.kind == "empty":
        return EpsNet(centers=(), radius=eps, covered=A)
    if A.kind == "full":
        return FailureWitness(reason="unbounded")
    if A.kind == "intervals":
        outcome = _greedy_intervals(A, eps, budget)
    else:
        outcome = _greedy_points(A, eps, budget)
    logger.debug("greedy net at radius %g: %s", eps, "ok" if outcome.succeeded else outcome.reason)
    return outcome


# ── Kuratowski limits on a window ──────────────────────────────────


class KuratowskiWindowResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    probes: tuple[Point, ...]
    in_liminf: tuple[bool, ...]
    in_limsup: tuple[bool, ...]


class KuratowskiVerdict(BaseModel):
    model_config = ConfigDict(frozen=True)

    passed: bool
    witness_index: Optional[int] = None
    witness_point: Optional[Point] = None
    reason: str = ""


def suffix_blocks(first: int, last: int) -> list[list[int]]:
    """
    Split first..last into blocks of length L = max(1, ceil((last - first) / 4))
    tiled from the end; a short leading remainder joins the first full block.
    """
    length = max(1, math.ceil((last - first) / 4))
    blocks: list[list[int]] = []
    end = last
    while end - length + 1 >= first:
        blocks.append(list(range(end - length + 1, end + 1)))
        end -= length
    if end >= first:
        if blocks:
            blocks[-1] = list(range(first, end + 1)) + blocks[-1]
        else:
            blocks.append(list(range(first, end + 1)))
    return blocks[::-1]


def limsup_mask(hits: np.ndarray, first: int, last: int) -> np.ndarray:
    """hits[row, p] for rows first..last; True where p is hit in every suffix block."""
    result = np.ones(hits.shape[1], dtype=bool)
    for block in suffix_blocks(first, last):
        rows = [n - first for n in block]
        result &= hits[rows].any(axis=0)
    return result


def kuratowski_window(w: SetSequenceWindow, eps: float, probe: GroundSet) -> KuratowskiWindowResult:
    """
    Tolerance proxies for liminf / limsup membership of each probe point:
    liminf means within eps of every tail set, limsup within eps of some set
    in every suffix block.
    """
    require_same_space(w.space, probe.space)
    require_positive_eps(eps)
    probes = representatives(probe, eps / 2)
    tail = w.tail()
    reach = eps + config.FLOAT_TOLERANCE
    hits = np.array([point_distances(C, probes) <= reach for _, C in tail]).reshape(len(tail), len(probes))
    liminf = hits.all(axis=0)
    limsup = limsup_mask(hits, w.tail_start, len(w.sets))
    return KuratowskiWindowResult(
        probes=tuple(probes),
        in_liminf=tuple(bool(b) for b in liminf),
        in_limsup=tuple(bool(b) for b in limsup),
    )


def kuratowski_converges(w: SetSequenceWindow, C: GroundSet, eps: float) -> KuratowskiVerdict:
    """
    Tolerance check of K-lim C_n = C: every representative of C stays within
    eps of the tail sets, and the excess H*(C_n, C) stays at most eps.
    The first failing index is the witness.
    """
    require_same_space(w.space, C.space)
    require_positive_eps(eps)
    probes = representatives(C, eps / 2)
    for n, Cn in w.tail():
        if probes:
            gaps = point_distances(Cn, probes)
            worst = int(np.argmax(gaps))
            if gaps[worst] > eps + config.FLOAT_TOLERANCE:
                return KuratowskiVerdict(
                    passed=False, witness_index=n, witness_point=probes[worst],
                    reason=f"d(x, C_{n}) = {gaps[worst]:g} > {eps:g}",
                )
        excess = semi_hausdorff(Cn, C)
        if excess > eps + config.FLOAT_TOLERANCE:
            return KuratowskiVerdict(
                passed=False, witness_index=n, reason=f"H*(C_{n}, C) = {excess:g} > {eps:g}",
            )
    return KuratowskiVerdict(passed=True)
