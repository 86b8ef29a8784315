"""
Gamma-convergence of fuzzy-set sequences on finite windows.

A sequence Gamma-converges to u when its endographs Kuratowski-converge to
end u. Endographs are slab sets, so discrepancies show up at slab corners:
every check here probes corner points (x, a_i) with x a representative of the
cut C_i. liminf / limsup use the suffix-block proxy of ground_sets.
"""
import logging
from typing import Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from fuzzymetric import config
from fuzzymetric.endograph import SlabSet, endograph, endograph_dist, endograph_semi
from fuzzymetric.fuzzy_sets import StepFuzzySet, height
from fuzzymetric.ground_sets import limsup_mask, point_distances, representatives, require_positive_eps
from fuzzymetric.metric_core import GroundSpace, Point, ProductMetricVariant, combine, require_same_space

logger = logging.getLogger(__name__)

Corner = tuple[Point, float]


class FuzzySeqWindow(BaseModel):
    """u_1..u_N over one space, tail starting at the 1-based index tail_start."""
    model_config = ConfigDict(frozen=True)

    members: tuple[StepFuzzySet, ...]
    tail_start: int = Field(default=1, ge=1)

    @model_validator(mode="after")
    def check_window(self) -> "FuzzySeqWindow":
        if not self.members:
            raise ValueError("a window needs at least one member")
        if self.tail_start > len(self.members):
            raise ValueError(f"tail_start {self.tail_start} is past the window end {len(self.members)}")
        first = self.members[0].space
        if any(u.space != first for u in self.members[1:]):
            raise ValueError("all members of a window must share one space")
        return self

    @property
    def space(self) -> GroundSpace:
        return self.members[0].space

    def __len__(self) -> int:
        return len(self.members)

    def tail(self) -> list[tuple[int, StepFuzzySet]]:
        return [(n, self.members[n - 1]) for n in range(self.tail_start, len(self.members) + 1)]

    def subwindow(self, start: int = 1, stride: int = 1) -> "FuzzySeqWindow":
        """Members start, start + stride, ...; the tail begins at the first kept index >= tail_start."""
        if start < 1 or stride < 1 or start > len(self.members):
            raise ValueError(f"invalid subwindow start={start} stride={stride}")
        indices = list(range(start, len(self.members) + 1, stride))
        tail = next((j for j, n in enumerate(indices, start=1) if n >= self.tail_start), len(indices))
        return FuzzySeqWindow(members=tuple(self.members[n - 1] for n in indices), tail_start=tail)


# ── Corner probes ──────────────────────────────────────────────────


def corner_probes(u: StepFuzzySet, mesh: float) -> list[Corner]:
    """(x, a_i) for x a representative of each cut C_i."""
    return [(x, level) for level, c in zip(u.levels, u.cuts) for x in representatives(c, mesh)]


def corner_distances(variant: ProductMetricVariant, probes: list[Corner], S: SlabSet) -> np.ndarray:
    """d((x, t), S) for every probe, vectorised per slab."""
    if not probes:
        return np.zeros(0)
    xs = [x for x, _ in probes]
    ts = np.array([t for _, t in probes])
    best = np.full(len(probes), np.inf)
    for s in S.slabs:
        if s.body.is_empty:
            continue
        vertical = np.maximum(np.maximum(s.lower - ts, 0.0), ts - s.upper)
        best = np.minimum(best, combine(variant, point_distances(s.body, xs), vertical))
    return best


def _dedupe(probes: list[Corner]) -> list[Corner]:
    seen, unique = set(), []
    for p in probes:
        if p not in seen:
            seen.add(p)
            unique.append(p)
    return unique


def _hit_matrix(variant: ProductMetricVariant, w: FuzzySeqWindow, probes: list[Corner], eps: float) -> np.ndarray:
    reach = eps + config.FLOAT_TOLERANCE
    rows = [corner_distances(variant, probes, endograph(un)) <= reach for _, un in w.tail()]
    return np.array(rows, dtype=bool).reshape(len(rows), len(probes))


# ── Reports ────────────────────────────────────────────────────────


class GammaVerdict(BaseModel):
    model_config = ConfigDict(frozen=True)

    passed: bool
    eps: float
    witness_index: Optional[int] = None
    witness_point: Optional[Corner] = None
    reason: str = ""
    max_excess: float = 0.0


class OscillationReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    verdict: Literal["plausible-limit", "oscillation"]
    eps: float
    witnesses: tuple[Corner, ...] = ()

    @property
    def witness(self) -> Optional[Corner]:
        return self.witnesses[0] if self.witnesses else None


class HendGammaReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    eps: float
    distances: tuple[float, ...]
    hypothesis_met: bool
    gamma_passed: bool
    holds: bool
    exhibit: Literal["implication", "vacuous", "converse-failure"]
    heights_within_distance: bool


class VanishingHeightResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    eps: float
    indices: tuple[int, ...]
    heights: tuple[float, ...]
    found: bool


# ── Operations ─────────────────────────────────────────────────────


def gamma_limit_check(
    w: FuzzySeqWindow,
    u: StepFuzzySet,
    eps: float,
    variant: ProductMetricVariant = ProductMetricVariant.SUM,
) -> GammaVerdict:
    """
    Tolerance check of Gamma-lim u_n = u.

    liminf side: every corner of end u stays within eps of end u_n on the tail.
    limsup side: every member corner that recurs in each suffix block lies
    within eps of end u. Endograph excesses are logged, not judged: a
    Gamma-convergent sequence can keep a large excess.
    """
    require_positive_eps(eps)
    require_same_space(w.space, u.space)
    mesh = eps / 2
    tail = w.tail()
    excess = max(endograph_semi(variant, un, u) for _, un in tail)
    logger.debug("gamma check: max tail excess H*(end u_n, end u) = %g", excess)

    own = corner_probes(u, mesh)
    for n, un in tail:
        gaps = corner_distances(variant, own, endograph(un))
        if gaps.size and gaps.max() > eps + config.FLOAT_TOLERANCE:
            worst = int(np.argmax(gaps))
            return GammaVerdict(
                passed=False, eps=eps, witness_index=n, witness_point=own[worst], max_excess=excess,
                reason=f"corner {own[worst]} is {gaps[worst]:g} away from end u_{n}",
            )

    probes = _dedupe([p for _, un in tail for p in corner_probes(un, mesh)])
    if probes:
        hits = _hit_matrix(variant, w, probes, eps)
        recurring = limsup_mask(hits, w.tail_start, len(w))
        outside = corner_distances(variant, probes, endograph(u)) > eps + config.FLOAT_TOLERANCE
        bad = np.flatnonzero(recurring & outside)
        if bad.size:
            p = int(bad[0])
            last_hit = w.tail_start + int(np.flatnonzero(hits[:, p])[-1])
            return GammaVerdict(
                passed=False, eps=eps, witness_index=last_hit, witness_point=probes[p], max_excess=excess,
                reason=f"corner {probes[p]} recurs along the tail but lies outside end u",
            )
    logger.info("gamma check passed at eps=%g", eps)
    return GammaVerdict(passed=True, eps=eps, max_excess=excess)


def gamma_oscillation_probe(
    w: FuzzySeqWindow,
    eps: float,
    variant: ProductMetricVariant = ProductMetricVariant.SUM,
) -> OscillationReport:
    """
    Corners that recur within eps along the tail (limsup) but stray beyond
    2 eps from some tail member (not liminf). Corners whose distance drifts
    monotonically across eps stay inside the band and are not witnesses.
    """
    require_positive_eps(eps)
    probes = _dedupe([p for un in reversed(w.members) for p in corner_probes(un, eps / 2)])
    if not probes:
        return OscillationReport(verdict="plausible-limit", eps=eps)
    hits = _hit_matrix(variant, w, probes, eps)
    liminf = _hit_matrix(variant, w, probes, 2 * eps).all(axis=0)
    limsup = limsup_mask(hits, w.tail_start, len(w))
    witnesses = tuple(probes[i] for i in np.flatnonzero(limsup & ~liminf))
    if witnesses:
        logger.info("oscillation at eps=%g: %d witnesses, first %s", eps, len(witnesses), witnesses[0])
        return OscillationReport(verdict="oscillation", eps=eps, witnesses=witnesses)
    return OscillationReport(verdict="plausible-limit", eps=eps)


def hend_implies_gamma_audit(
    w: FuzzySeqWindow,
    u: StepFuzzySet,
    eps: float,
) -> HendGammaReport:
    """H_end(u_n, u) <= eps on the tail must give a Gamma check passing at 2 eps."""
    distances = tuple(endograph_dist(ProductMetricVariant.SUM, un, u) for _, un in w.tail())
    hypothesis = all(d <= eps + config.FLOAT_TOLERANCE for d in distances)
    gamma = gamma_limit_check(w, u, 2 * eps)
    if hypothesis:
        exhibit = "implication"
    elif gamma.passed:
        exhibit = "converse-failure"
    else:
        exhibit = "vacuous"
    holds = gamma.passed or not hypothesis
    heights_ok = all(
        abs(height(un) - height(u)) <= d + config.FLOAT_TOLERANCE for (_, un), d in zip(w.tail(), distances)
    )
    logger.info("H_end => Gamma: max H_end %g, gamma at 2eps %s (%s)", max(distances), gamma.passed, exhibit)
    if not holds:
        logger.warning("H_end tail convergence did not give a Gamma pass: %s", gamma.reason)
    return HendGammaReport(
        eps=eps, distances=distances, hypothesis_met=hypothesis, gamma_passed=gamma.passed,
        holds=holds, exhibit=exhibit, heights_within_distance=heights_ok,
    )


def vanishing_height_subsequence(w: FuzzySeqWindow, eps: float) -> VanishingHeightResult:
    """
    Tail members of height below eps. When they recur in every suffix block
    they form a subsequence with H_end(u_n, empty) = S_{u_n} < eps.
    """
    tail = w.tail()
    low = np.array([[height(un) < eps] for _, un in tail], dtype=bool).reshape(len(tail), 1)
    indices = tuple(n for n, un in tail if height(un) < eps)
    found = bool(limsup_mask(low, w.tail_start, len(w))[0])
    return VanishingHeightResult(
        eps=eps, indices=indices, heights=tuple(height(w.members[n - 1]) for n in indices), found=found,
    )
