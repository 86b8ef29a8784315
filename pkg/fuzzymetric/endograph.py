"""
Endographs as slab stacks, the slice calculus, P_USC membership,
reconstruction and the exact endograph metrics.

A SlabSet is a finite union of slabs B x (a, b] (or B x [a, b] when the slab
is closed below) inside X x [0, 1]. The endograph of a step fuzzy set is the
base X x {0} plus one slab C_i x (a_{i-1}, a_i] per level.

Distances between slab sets are computed exactly when the target is monotone
(slices nested downward from its floor): then d((x, t), target) is
nondecreasing in t above the floor, so the supremum over a slab is reached on
its top level.
"""
import logging
import math
from typing import Literal, Optional, Sequence, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from fuzzymetric import config
from fuzzymetric.exceptions import DomainError
from fuzzymetric.fuzzy_sets import StepFuzzySet, cut, empty_fuzzy_set
from fuzzymetric.ground_sets import (
    ExtDist,
    GroundSet,
    is_compact,
    is_subset,
    point_distances,
    same_set,
    semi_hausdorff,
    union_all,
)
from fuzzymetric.intervals import EnvelopeTerm, height_pieces, sup_cone_envelope, sup_envelope
from fuzzymetric.metric_core import (
    GroundSpace,
    LiftedPoint,
    ProductMetricVariant,
    RealLine,
    combine,
    require_same_space,
)

logger = logging.getLogger(__name__)


class Slab(BaseModel):
    model_config = ConfigDict(frozen=True)

    lower: float = Field(..., ge=0.0, le=1.0)
    upper: float = Field(..., ge=0.0, le=1.0)
    body: GroundSet
    closed_below: bool = False

    @model_validator(mode="after")
    def check_levels(self) -> "Slab":
        if self.lower > self.upper or (self.lower == self.upper and not self.closed_below):
            raise ValueError(f"slab levels ({self.lower}, {self.upper}] are empty")
        return self

    def covers(self, t: float) -> bool:
        return (self.lower < t or (self.closed_below and t == self.lower)) and t <= self.upper

    def level_gap(self, t: float) -> float:
        """Distance from the level t to the closure of the slab's level range."""
        return max(self.lower - t, 0.0, t - self.upper)


class SlabSet(BaseModel):
    """
    A subset of X x [0, 1] given by slabs with disjoint, increasing level ranges.
    """
    model_config = ConfigDict(frozen=True)

    space: GroundSpace
    slabs: tuple[Slab, ...] = ()

    @model_validator(mode="after")
    def check_slabs(self) -> "SlabSet":
        for s in self.slabs:
            if s.body.space != self.space:
                raise ValueError("every slab body must live in the slab set's space")
        for below, above in zip(self.slabs, self.slabs[1:]):
            if above.lower < below.upper or (above.lower == below.upper and above.closed_below):
                raise ValueError("slab level ranges must be disjoint and increasing")
        return self

    @property
    def is_empty(self) -> bool:
        return all(s.body.is_empty for s in self.slabs)

    def level_marks(self) -> list[float]:
        return sorted({0.0, 1.0} | {s.lower for s in self.slabs} | {s.upper for s in self.slabs})


class EndographView(BaseModel):
    """end u, send u or end_r^t u of a step fuzzy set."""
    model_config = ConfigDict(frozen=True)

    source: StepFuzzySet
    kind: Literal["end", "send", "truncated"] = "end"
    r: float = Field(default=0.0, ge=0.0, le=1.0)
    t: float = Field(default=1.0, ge=0.0, le=1.0)

    @model_validator(mode="after")
    def check_range(self) -> "EndographView":
        if self.r > self.t:
            raise ValueError(f"truncation range [{self.r}, {self.t}] is empty")
        return self

    def slab_set(self) -> SlabSet:
        if self.kind == "end":
            return endograph(self.source)
        if self.kind == "send":
            return sendograph(self.source)
        return truncated_endograph(self.source, self.r, self.t)


# ── Views ──────────────────────────────────────────────────────────


def _base(space: GroundSpace, body: Optional[GroundSet] = None) -> Slab:
    return Slab(lower=0.0, upper=0.0, body=body if body is not None else GroundSet.full(space), closed_below=True)


def _steps(u: StepFuzzySet) -> list[Slab]:
    lowers = (0.0,) + u.levels[:-1]
    return [Slab(lower=a, upper=b, body=c) for a, b, c in zip(lowers, u.levels, u.cuts)]


def endograph(u: StepFuzzySet) -> SlabSet:
    """end u = {(x, t): u(x) >= t}, which contains X x {0}."""
    return SlabSet(space=u.space, slabs=(_base(u.space),) + tuple(_steps(u)))


def sendograph(u: StepFuzzySet) -> SlabSet:
    """send u = end u restricted to the closed support."""
    if u.is_empty:
        return SlabSet(space=u.space)
    return SlabSet(space=u.space, slabs=(_base(u.space, u.cuts[0]),) + tuple(_steps(u)))


def truncated_endograph(u: StepFuzzySet, r: float, t: float = 1.0) -> SlabSet:
    """end_r^t u = end u ∩ ([u]_r x [r, t])."""
    if not 0 <= r <= t <= 1:
        raise DomainError(f"truncation needs 0 <= r <= t <= 1, got r={r}, t={t}")
    floor = cut(u, r)
    if floor.is_empty:
        return SlabSet(space=u.space)
    slabs = [Slab(lower=r, upper=r, body=floor, closed_below=True)]
    for s in _steps(u):
        lower, upper = max(s.lower, r), min(s.upper, t)
        if lower < upper:
            slabs.append(Slab(lower=lower, upper=upper, body=s.body))
    return SlabSet(space=u.space, slabs=tuple(slabs))


def as_slab_set(E: Union[SlabSet, EndographView]) -> SlabSet:
    return E.slab_set() if isinstance(E, EndographView) else E


def slice_at(E: Union[SlabSet, EndographView], alpha: float) -> GroundSet:
    """<E>_alpha = {x : (x, alpha) in E}."""
    if not 0 <= alpha <= 1:
        raise DomainError(f"level {alpha} is outside [0, 1]")
    S = as_slab_set(E)
    for s in S.slabs:
        if s.covers(alpha):
            return s.body
    return GroundSet.empty(S.space)


def slab_height(E: Union[SlabSet, EndographView]) -> float:
    """S_D: the largest level carrying a point of the set, 0 when empty."""
    S = as_slab_set(E)
    return max((s.upper for s in S.slabs if not s.body.is_empty), default=0.0)


# ── P_USC ──────────────────────────────────────────────────────────


def _probe_levels(S: SlabSet, start: float = 0.0) -> list[tuple[float, bool]]:
    """Level marks at or above start and the midpoints between them; flag marks endpoints."""
    marks = [m for m in S.level_marks() if m >= start]
    probes: list[tuple[float, bool]] = []
    for lo, hi in zip(marks, marks[1:]):
        probes.append((lo, True))
        probes.append(((lo + hi) / 2, False))
    if marks:
        probes.append((marks[-1], True))
    return probes


def is_p_usc(E: Union[SlabSet, EndographView]) -> bool:
    """
    Slices are nested downward and each positive slice equals the
    intersection of the slices below it.
    """
    S = as_slab_set(E)
    previous: Optional[GroundSet] = None
    for alpha, endpoint in _probe_levels(S):
        current = slice_at(S, alpha)
        if previous is not None:
            if not is_subset(current, previous):
                logger.debug("slice at %g is not inside the slice below", alpha)
                return False
            if endpoint and alpha > 0 and not same_set(current, previous):
                logger.debug("slice at %g differs from the slices just below", alpha)
                return False
        previous = current
    return True


def is_p_uscb(E: Union[SlabSet, EndographView]) -> bool:
    S = as_slab_set(E)
    return is_p_usc(S) and all(is_compact(s.body) for s in S.slabs)


def reconstruct(E: Union[SlabSet, EndographView]) -> StepFuzzySet:
    """The fuzzy set whose positive cuts are the positive slices of E."""
    S = as_slab_set(E)
    if not is_p_usc(S):
        raise DomainError("slab set is not in P_USC: slices are not nested and left-continuous")
    levels = sorted({s.upper for s in S.slabs if s.upper > 0 and not s.body.is_empty})
    cuts = [slice_at(S, a) for a in levels]
    kept = [(a, c) for a, c in zip(levels, cuts) if not c.is_empty]
    if not kept:
        return empty_fuzzy_set(S.space)
    return StepFuzzySet(space=S.space, levels=tuple(a for a, _ in kept), cuts=tuple(c for _, c in kept))


def downward_union(space: GroundSpace, parts: Sequence[Union[SlabSet, EndographView]]) -> SlabSet:
    """
    Endograph of the smallest step fuzzy set whose endograph contains every
    part: its cut at level t is the union of the part slices at all marks >= t.
    """
    slab_sets = [as_slab_set(P) for P in parts]
    for S in slab_sets:
        require_same_space(space, S.space)
    marks = sorted({s.upper for S in slab_sets for s in S.slabs if s.upper > 0 and not s.body.is_empty}, reverse=True)
    if not marks:
        return endograph(empty_fuzzy_set(space))
    running = GroundSet.empty(space)
    cuts: list[GroundSet] = []
    for t in marks:
        running = union_all(space, [running, *(slice_at(S, t) for S in slab_sets)])
        cuts.append(running)
    return endograph(StepFuzzySet.from_cuts(space, marks[::-1], cuts[::-1]))


# ── Distances ──────────────────────────────────────────────────────


def _monotone_floor(S: SlabSet) -> float:
    """Lowest level of a slab set whose slices are nested downward from there on."""
    floor = min(s.lower for s in S.slabs if not s.body.is_empty)
    previous: Optional[GroundSet] = None
    for alpha, _ in _probe_levels(S, floor):
        current = slice_at(S, alpha)
        if previous is None:
            if not current.is_empty:
                previous = current
            continue
        if not is_subset(current, previous):
            raise DomainError(f"target slab set is not monotone at level {alpha:g}")
        previous = current
    return floor


def _slab_sup(
    variant: ProductMetricVariant,
    body: GroundSet,
    level: float,
    target: SlabSet,
) -> float:
    """sup over x in body of d((x, level), target)."""
    live = [s for s in target.slabs if not s.body.is_empty]
    gaps = [s.level_gap(level) for s in live]
    if isinstance(body.space, RealLine) and (body.kind == "intervals" or any(s.body.kind == "intervals" for s in live)):
        terms = [EnvelopeTerm(body=s.body.as_intervals(), offset=g) for s, g in zip(live, gaps)]
        return sup_envelope(body.as_intervals(), terms, additive=variant is ProductMetricVariant.SUM)
    if body.kind == "full":
        # Far from every bounded body only the full ones stay close.
        flat = [g for s, g in zip(live, gaps) if s.body.kind == "full"]
        return min(flat) if flat else math.inf
    xs = list(body.points)
    best = np.full(len(xs), math.inf)
    for s, g in zip(live, gaps):
        best = np.minimum(best, combine(variant, point_distances(s.body, xs), g))
    return float(best.max()) if xs else 0.0


def point_to_slabs(variant: ProductMetricVariant, x, t: float, S: SlabSet) -> ExtDist:
    """d((x, t), S) under the chosen product metric."""
    x = S.space.canonical(x)
    best = math.inf
    for s in S.slabs:
        if s.body.is_empty:
            continue
        d = float(point_distances(s.body, [x])[0])
        best = min(best, float(combine(variant, d, s.level_gap(t))))
    return best


def point_to_endograph(variant: ProductMetricVariant, a: LiftedPoint, v: StepFuzzySet) -> float:
    """d((x, t), end v); at most t because X x {0} lies in every endograph."""
    require_same_space(a.space, v.space)
    return point_to_slabs(variant, a.x, a.t, endograph(v))


def _uses_profile(variant: ProductMetricVariant, S1: SlabSet, S2: SlabSet) -> bool:
    if variant is not ProductMetricVariant.SUM or not isinstance(S1.space, RealLine):
        return False
    return any(s.body.kind == "intervals" for s in S1.slabs + S2.slabs)


def slab_semi_hausdorff(S1: SlabSet, S2: SlabSet, variant: ProductMetricVariant = ProductMetricVariant.SUM) -> ExtDist:
    """
    H*(S1, S2) for a monotone target S2 whose floor lies at or below every
    level of S1. Raises DomainError otherwise.
    """
    require_same_space(S1.space, S2.space)
    if S1.is_empty:
        return 0.0
    if S2.is_empty:
        return math.inf
    floor = _monotone_floor(S2)
    lowest = min(s.lower for s in S1.slabs if not s.body.is_empty)
    if lowest < floor:
        raise DomainError(f"source reaches level {lowest:g} below the target floor {floor:g}")
    live = [s for s in S1.slabs if not s.body.is_empty]
    if _uses_profile(variant, S1, S2):
        # Nested target: the level gap at height t over y is max(0, t - h(y)).
        los, his, h = height_pieces(
            [s.body.as_intervals() for s in S2.slabs if not s.body.is_empty],
            [s.upper for s in S2.slabs if not s.body.is_empty],
        )
        return max(sup_cone_envelope(s.body.as_intervals(), los, his, np.maximum(0.0, s.upper - h)) for s in live)
    worst = 0.0
    for s in live:
        worst = max(worst, _slab_sup(variant, s.body, s.upper, S2))
        if worst == math.inf:
            break
    return worst


def slab_hausdorff(S1: SlabSet, S2: SlabSet, variant: ProductMetricVariant = ProductMetricVariant.SUM) -> ExtDist:
    return max(slab_semi_hausdorff(S1, S2, variant), slab_semi_hausdorff(S2, S1, variant))


def endograph_semi(variant: ProductMetricVariant, u: StepFuzzySet, v: StepFuzzySet) -> float:
    """H*(end u, end v)."""
    return slab_semi_hausdorff(endograph(u), endograph(v), variant)


def endograph_dist(variant: ProductMetricVariant, u: StepFuzzySet, v: StepFuzzySet) -> float:
    """H_end (SUM) or H'_end (MAX); never infinite since X x {0} is shared."""
    return max(endograph_semi(variant, u, v), endograph_semi(variant, v, u))


def distance_matrix(variant: ProductMetricVariant, members: Sequence[StepFuzzySet]) -> np.ndarray:
    """Symmetric matrix of endograph distances."""
    n = len(members)
    ends = [endograph(u) for u in members]
    matrix = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            matrix[i, j] = matrix[j, i] = slab_hausdorff(ends[i], ends[j], variant)
    return matrix


class CutBoundReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    alpha: float
    beta: float
    eps: float
    cut_semi: ExtDist
    endograph_semi: float
    hypothesis_met: bool
    holds: bool


def cut_bound_check(
    u: StepFuzzySet,
    v: StepFuzzySet,
    alpha: float,
    beta: float,
    eps: float,
    variant: ProductMetricVariant = ProductMetricVariant.SUM,
) -> CutBoundReport:
    """
    If H*(end u, end v) < eps and alpha - beta >= eps, then
    H*([u]_alpha, [v]_beta) <= H*(end u, end v).
    """
    if not eps > 0 or alpha - beta < eps or not 0 <= beta <= alpha <= 1:
        raise DomainError(f"cut bound needs alpha - beta >= eps > 0, got alpha={alpha}, beta={beta}, eps={eps}")
    lhs = semi_hausdorff(cut(u, alpha), cut(v, beta))
    rhs = endograph_semi(variant, u, v)
    met = rhs < eps
    holds = (not met) or lhs <= rhs + config.FLOAT_TOLERANCE
    if met and not holds:
        logger.warning("cut bound violated: H*(cuts) = %g > H*(end) = %g", lhs, rhs)
    logger.debug("cut bound at alpha=%g beta=%g: %g vs %g", alpha, beta, lhs, rhs)
    return CutBoundReport(
        alpha=alpha, beta=beta, eps=eps, cut_semi=lhs, endograph_semi=rhs, hypothesis_met=met, holds=holds,
    )


def same_slab_set(S1: SlabSet, S2: SlabSet) -> bool:
    """Set equality of two slab sets, compared slice by slice."""
    require_same_space(S1.space, S2.space)
    marks = sorted(set(S1.level_marks()) | set(S2.level_marks()))
    probes = marks + [(a + b) / 2 for a, b in zip(marks, marks[1:])]
    return all(same_set(slice_at(S1, a), slice_at(S2, a)) for a in probes)
