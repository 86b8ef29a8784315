"""
Step fuzzy sets: finitely many positive levels with nested cuts.

A StepFuzzySet with levels a_1 < ... < a_K and cuts C_1 ⊇ ... ⊇ C_K is the
fuzzy set u(x) = max{a_i : x in C_i} (0 when x lies in no cut). K = 0 is the
empty fuzzy set.
"""
import logging
from bisect import bisect_left
from typing import Any, Optional, Sequence

from pydantic import BaseModel, ConfigDict, model_validator

from fuzzymetric.exceptions import DomainError, RepresentationError
from fuzzymetric.ground_sets import (
    GroundSet,
    is_compact,
    is_subset,
    point_distances,
    same_set,
)
from fuzzymetric.metric_core import GroundSpace, Point, RealLine, require_same_space

logger = logging.getLogger(__name__)


def _level_problem(levels: Sequence[float]) -> Optional[str]:
    for a in levels:
        if not 0 < a <= 1:
            return f"level {a} is outside (0, 1]"
    for a, b in zip(levels, levels[1:]):
        if not a < b:
            return f"levels must be strictly increasing ({a} then {b})"
    return None


def _nesting_problem(cuts: Sequence[GroundSet]) -> Optional[str]:
    for i, (lower, upper) in enumerate(zip(cuts, cuts[1:]), start=1):
        if not is_subset(upper, lower):
            return f"cut {i + 1} is not contained in cut {i}"
    return None


class StepFuzzySet(BaseModel):
    model_config = ConfigDict(frozen=True)

    space: GroundSpace
    levels: tuple[float, ...] = ()
    cuts: tuple[GroundSet, ...] = ()

    @model_validator(mode="after")
    def check_level_family(self) -> "StepFuzzySet":
        if len(self.levels) != len(self.cuts):
            raise ValueError(f"{len(self.levels)} levels but {len(self.cuts)} cuts")
        problem = _level_problem(self.levels)
        if problem:
            raise ValueError(problem)
        for c in self.cuts:
            if c.space != self.space:
                raise ValueError("every cut must live in the fuzzy set's space")
            if c.is_empty:
                raise ValueError("cuts at represented levels must be nonempty")
        problem = _nesting_problem(self.cuts)
        if problem:
            raise ValueError(problem)
        return self

    @classmethod
    def from_cuts(cls, space: GroundSpace, levels: Sequence[float], cuts: Sequence[GroundSet]) -> "StepFuzzySet":
        """The fuzzy set whose cut at each given level is the given set, constant between levels."""
        levels = tuple(float(a) for a in levels)
        if len(levels) != len(cuts):
            raise DomainError(f"{len(levels)} levels but {len(cuts)} cuts")
        problem = _level_problem(levels)
        if problem:
            raise DomainError(problem)
        for c in cuts:
            require_same_space(space, c.space)
            if c.is_empty:
                raise DomainError("cuts at represented levels must be nonempty")
        problem = _nesting_problem(cuts)
        if problem:
            raise RepresentationError(problem)
        return cls(space=space, levels=levels, cuts=tuple(cuts))

    @property
    def is_empty(self) -> bool:
        return not self.levels

    def __str__(self) -> str:
        if self.is_empty:
            return "∅_F"
        return "; ".join(f"{a:g}: {c}" for a, c in zip(self.levels, self.cuts))


# ── Constructors ───────────────────────────────────────────────────


def empty_fuzzy_set(space: GroundSpace) -> StepFuzzySet:
    return StepFuzzySet(space=space)


def characteristic(A: GroundSet) -> StepFuzzySet:
    """chi_A: membership 1 on A, 0 elsewhere."""
    if A.is_empty:
        return empty_fuzzy_set(A.space)
    return StepFuzzySet(space=A.space, levels=(1.0,), cuts=(A,))


def point_fuzzy_set(space: GroundSpace, x: Any) -> StepFuzzySet:
    """x-hat, the characteristic function of {x}."""
    return characteristic(GroundSet.from_points(space, [x]))


# ── Queries ────────────────────────────────────────────────────────


def membership(u: StepFuzzySet, x: Any) -> float:
    x = u.space.canonical(x)
    for level, c in zip(reversed(u.levels), reversed(u.cuts)):
        if point_distances(c, [x])[0] == 0:
            return level
    return 0.0


def cut(u: StepFuzzySet, alpha: float) -> GroundSet:
    """[u]_alpha; alpha = 0 gives the closure of the support, C_1."""
    if not 0 <= alpha <= 1:
        raise DomainError(f"level {alpha} is outside [0, 1]")
    if u.is_empty or alpha > u.levels[-1]:
        return GroundSet.empty(u.space)
    if alpha <= 0:
        return u.cuts[0]
    return u.cuts[bisect_left(u.levels, alpha)]


def height(u: StepFuzzySet) -> float:
    """S_u, the top level (always attained)."""
    return u.levels[-1] if u.levels else 0.0


class ClassReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    is_usc: bool
    is_uscg: bool
    is_uscb: bool
    is_normal: bool
    height_attained: bool
    is_connected_cuts: Optional[bool] = None


def classify(u: StepFuzzySet) -> ClassReport:
    # Cuts are closed on every backend, so USC always holds.
    compact_cuts = all(is_compact(c) for c in u.cuts)
    connected = None
    if isinstance(u.space, RealLine):
        connected = all(len(c.as_intervals()) == 1 for c in u.cuts)
    return ClassReport(
        is_usc=True,
        is_uscg=compact_cuts,
        is_uscb=compact_cuts and (u.is_empty or is_compact(u.cuts[0])),
        is_normal=height(u) == 1.0,
        height_attained=True,
        is_connected_cuts=connected,
    )


def refine_levels(u: StepFuzzySet, mesh: float) -> StepFuzzySet:
    """Insert levels k*mesh below the height; cuts and endograph are unchanged."""
    if not mesh > 0:
        raise DomainError(f"mesh must be positive, got {mesh}")
    top = height(u)
    extra = []
    k = 1
    while k * mesh < top:
        level = k * mesh
        if level not in u.levels:
            extra.append(level)
        k += 1
    if not extra:
        return u
    levels = sorted(set(u.levels) | set(extra))
    logger.debug("refined %d levels into %d", len(u.levels), len(levels))
    return StepFuzzySet(space=u.space, levels=tuple(levels), cuts=tuple(cut(u, a) for a in levels))


def same_endograph(u: StepFuzzySet, v: StepFuzzySet) -> bool:
    """Structural equality of endographs, compared on the merged level grid."""
    require_same_space(u.space, v.space)
    if height(u) != height(v):
        return False
    return all(same_set(cut(u, a), cut(v, a)) for a in sorted(set(u.levels) | set(v.levels)))


def top_cut(u: StepFuzzySet) -> GroundSet:
    """[u]_{S_u}, where the height is attained."""
    return u.cuts[-1] if u.cuts else GroundSet.empty(u.space)


def attaining_point(u: StepFuzzySet) -> Optional[Point]:
    """Some point of the top cut, or None for the empty fuzzy set."""
    c = top_cut(u)
    if c.kind == "points":
        return c.points[0]
    if c.kind == "intervals":
        iv = c.intervals[0]
        return iv.lo if iv.lo != float("-inf") else min(iv.hi, 0.0)
    if c.kind == "full":
        return u.space.canonical((0.0,) * u.space.dimension)
    return None
