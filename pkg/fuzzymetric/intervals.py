"""
Closed real intervals with possibly infinite endpoints.

Finite endpoints are included; an infinite endpoint is open at infinity. The
helpers here work on normalised unions (sorted, pairwise disjoint, positive
gaps) and give exact suprema of lower envelopes of the form

    x -> min_i combine(d(x, T_i), c_i)

over a union of intervals, which is the kernel behind every Hausdorff
semi-distance on the real line.

Unbounded domains follow this truth table:

| domain unbounded towards | some term body unbounded that way | supremum |
|--------------------------|-----------------------------------|----------|
| +inf (or -inf)           | no                                | +inf     |
| +inf (or -inf)           | yes                               | value at a point past every breakpoint |
"""
import logging
import math
from typing import Iterable, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

logger = logging.getLogger(__name__)


class Interval(BaseModel):
    """[lo, hi] with lo in [-inf, inf), hi in (-inf, inf]."""
    model_config = ConfigDict(frozen=True)

    lo: float
    hi: float

    @model_validator(mode="after")
    def check_endpoints(self) -> "Interval":
        if math.isnan(self.lo) or math.isnan(self.hi):
            raise ValueError("interval endpoints must not be NaN")
        if self.lo == math.inf or self.hi == -math.inf:
            raise ValueError("an interval cannot start at +inf or end at -inf")
        if self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")
        return self

    @property
    def bounded(self) -> bool:
        return math.isfinite(self.lo) and math.isfinite(self.hi)

    def contains(self, x: float) -> bool:
        return self.lo <= x <= self.hi

    def __str__(self) -> str:
        left = "(" if self.lo == -math.inf else "["
        right = ")" if self.hi == math.inf else "]"
        return f"{left}{self.lo:g}, {self.hi:g}{right}"


def normalize(intervals: Iterable[Interval]) -> tuple[Interval, ...]:
    """Sort and merge intervals that overlap or touch."""
    merged: list[Interval] = []
    for iv in sorted(intervals, key=lambda i: (i.lo, i.hi)):
        if merged and iv.lo <= merged[-1].hi:
            if iv.hi > merged[-1].hi:
                merged[-1] = Interval(lo=merged[-1].lo, hi=iv.hi)
        else:
            merged.append(iv)
    return tuple(merged)


def endpoint_arrays(intervals: Sequence[Interval]) -> tuple[np.ndarray, np.ndarray]:
    los = np.array([iv.lo for iv in intervals], dtype=float)
    his = np.array([iv.hi for iv in intervals], dtype=float)
    return los, his


def distance_to_union(xs: np.ndarray, los: np.ndarray, his: np.ndarray) -> np.ndarray:
    """d(x, union) for every x in xs; +inf against the empty union."""
    xs = np.asarray(xs, dtype=float)
    if los.size == 0:
        return np.full(xs.shape, math.inf)
    gap = np.maximum(los[None, :] - xs[:, None], xs[:, None] - his[None, :])
    return np.maximum(gap, 0.0).min(axis=1)


def intervals_subset(a: Sequence[Interval], b: Sequence[Interval]) -> bool:
    """Every interval of a lies inside one interval of the normalised union b."""
    return all(any(y.lo <= x.lo and x.hi <= y.hi for y in b) for x in a)


class EnvelopeTerm(BaseModel):
    """One term combine(d(x, body), offset) of a lower envelope."""
    model_config = ConfigDict(frozen=True)

    body: tuple[Interval, ...]
    offset: float


def envelope_values(xs: np.ndarray, terms: Sequence[EnvelopeTerm], additive: bool) -> np.ndarray:
    values = np.full(np.asarray(xs, dtype=float).shape, math.inf)
    for term in terms:
        los, his = endpoint_arrays(term.body)
        d = distance_to_union(xs, los, his)
        values = np.minimum(values, d + term.offset if additive else np.maximum(d, term.offset))
    return values


def _breakpoints(terms: Sequence[EnvelopeTerm], additive: bool) -> np.ndarray:
    """Abscissae where the envelope can change slope."""
    rising_at, rising_off, falling_at, falling_off, flat = [], [], [], [], []
    for term in terms:
        flat.append(term.offset)
        slope_off = term.offset if additive else 0.0
        for iv in term.body:
            if math.isfinite(iv.hi):
                rising_at.append(iv.hi)
                rising_off.append(slope_off)
            if math.isfinite(iv.lo):
                falling_at.append(iv.lo)
                falling_off.append(slope_off)
    re, ro = np.array(rising_at), np.array(rising_off)
    fe, fo = np.array(falling_at), np.array(falling_off)
    levels = np.array(flat)
    pieces = [
        re,
        fe,
        ((re[:, None] + fe[None, :] + fo[None, :] - ro[:, None]) / 2).ravel(),
        (re[:, None] + levels[None, :] - ro[:, None]).ravel(),
        (fe[:, None] + fo[:, None] - levels[None, :]).ravel(),
    ]
    return np.concatenate([p.astype(float) for p in pieces])


def sup_envelope(domain: Sequence[Interval], terms: Sequence[EnvelopeTerm], additive: bool) -> float:
    """
    Exact sup over x in the union `domain` of min_i combine(d(x, body_i), offset_i).

    combine is addition when `additive`, max otherwise. Returns 0 for an empty
    domain and +inf when there are no terms.
    """
    if not domain:
        return 0.0
    terms = [t for t in terms if t.body]
    if not terms:
        return math.inf
    candidates = _breakpoints(terms, additive)
    reaches_right = any(t.body[-1].hi == math.inf for t in terms)
    reaches_left = any(t.body[0].lo == -math.inf for t in terms)
    finite = [c for c in candidates if math.isfinite(c)]
    for iv in domain:
        finite.extend(e for e in (iv.lo, iv.hi) if math.isfinite(e))
    span_lo, span_hi = min(finite, default=0.0), max(finite, default=0.0)

    best = 0.0
    for iv in domain:
        if iv.hi == math.inf and not reaches_right:
            logger.debug("domain %s escapes to +inf past every body", iv)
            return math.inf
        if iv.lo == -math.inf and not reaches_left:
            logger.debug("domain %s escapes to -inf past every body", iv)
            return math.inf
        inside = candidates[(candidates >= iv.lo) & (candidates <= iv.hi)]
        probes = [inside]
        probes.append(np.array([e for e in (iv.lo, iv.hi) if math.isfinite(e)]))
        if iv.hi == math.inf:
            probes.append(np.array([max(span_hi, iv.lo) + 1.0]))
        if iv.lo == -math.inf:
            probes.append(np.array([min(span_lo, iv.hi) - 1.0]))
        xs = np.concatenate(probes)
        if xs.size:
            best = max(best, float(envelope_values(xs, terms, additive).max()))
    return best


def height_pieces(
    bodies: Sequence[Sequence[Interval]],
    heights: Sequence[float],
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Cut the union of the bodies at every finite endpoint. Each closed piece
    (endpoint, gap between endpoints, or outer ray) carries the largest height
    among the bodies containing it; uncovered pieces are dropped.
    """
    ends = np.unique([e for body in bodies for iv in body for e in (iv.lo, iv.hi) if math.isfinite(e)])
    if ends.size:
        los = np.concatenate([ends, ends[:-1], [-math.inf, ends[-1]]])
        his = np.concatenate([ends, ends[1:], [ends[0], math.inf]])
    else:
        los, his = np.array([-math.inf]), np.array([math.inf])
    value = np.full(los.shape, -math.inf)
    for body, h in zip(bodies, heights):
        if not body:
            continue
        body_los, body_his = endpoint_arrays(body)
        idx = np.searchsorted(body_los, los, side="right") - 1
        inside = (idx >= 0) & (body_his[np.maximum(idx, 0)] >= his)
        value = np.where(inside, np.maximum(value, h), value)
    keep = value > -math.inf
    return los[keep], his[keep], value[keep]


def sup_cone_envelope(domain: Sequence[Interval], los: np.ndarray, his: np.ndarray, weights: np.ndarray) -> float:
    """
    Exact sup over the union `domain` of E(x) = min_s weights_s + d(x, [los_s, his_s]).

    Pieces must have pairwise disjoint interiors (as produced by height_pieces).
    Between consecutive piece endpoints E is min(C, x + A, B - x), so each
    region is maximised in closed form.
    """
    if not domain:
        return 0.0
    if los.size == 0:
        return math.inf
    bounds = np.unique(np.concatenate([los, his]))
    bounds = bounds[np.isfinite(bounds)]
    r_lo = np.concatenate([[-math.inf], bounds])
    r_hi = np.concatenate([bounds, [math.inf]])

    by_hi = np.argsort(his, kind="stable")
    left_best = np.minimum.accumulate((weights - his)[by_hi])
    k = np.searchsorted(his[by_hi], r_lo, side="right")
    A = np.where(k > 0, left_best[np.maximum(k - 1, 0)], math.inf)

    by_lo = np.argsort(los, kind="stable")
    right_best = np.minimum.accumulate((weights + los)[by_lo][::-1])[::-1]
    k = np.searchsorted(los[by_lo], r_hi, side="left")
    B = np.where(k < los.size, right_best[np.minimum(k, los.size - 1)], math.inf)

    wide = los < his
    w_los, w_his, w_weights = los[wide], his[wide], weights[wide]
    order = np.argsort(w_los, kind="stable")
    w_los, w_his, w_weights = w_los[order], w_his[order], w_weights[order]
    C = np.full(r_lo.shape, math.inf)
    if w_los.size:
        j = np.clip(np.searchsorted(w_los, r_lo, side="left"), 0, w_los.size - 1)
        spans = (w_los[j] == r_lo) & (w_his[j] >= r_hi)
        C = np.where(spans, w_weights[j], math.inf)

    best = 0.0
    for iv in domain:
        lo = np.maximum(r_lo, iv.lo)
        hi = np.minimum(r_hi, iv.hi)
        valid = lo <= hi
        # Rays: past every piece only a spanning piece keeps E bounded.
        ray = valid & (np.isinf(lo) | np.isinf(hi))
        if ray.any():
            best = max(best, float(C[ray].max()))
            if best == math.inf:
                return best
        box = valid & ~ray
        if not box.any():
            continue
        a, b, c, lo, hi = A[box], B[box], C[box], lo[box], hi[box]
        with np.errstate(invalid="ignore"):
            cand = np.stack([lo, hi, (b - a) / 2, c - a, b - c], axis=1)
        cand = np.where(np.isfinite(cand), cand, lo[:, None])
        cand = np.clip(cand, lo[:, None], hi[:, None])
        values = np.minimum(np.minimum(c[:, None], cand + a[:, None]), b[:, None] - cand)
        best = max(best, float(values.max()))
    return best
