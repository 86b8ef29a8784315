"""
Brute-force references for the exact kernels: dense samples of endographs on
the real line and exhaustive minimal nets of small point sets.
"""
import itertools
import math

import numpy as np
from scipy.spatial import cKDTree

from fuzzymetric.fuzzy_sets import StepFuzzySet, cut
from fuzzymetric.ground_sets import GroundSet, is_bounded, representatives


def _reach(members: list[StepFuzzySet]) -> tuple[float, float]:
    xs = [x for u in members for c in u.cuts for x in representatives(c, 1.0)]
    return min(xs, default=0.0) - 1.0, max(xs, default=0.0) + 1.0


def sampled_endograph(u: StepFuzzySet, h: float, window: tuple[float, float]) -> np.ndarray:
    """
    Points (x, t) of end u on a grid of mesh h: levels are multiples of h
    plus every level of u, bodies are sampled at mesh h, and the base X x {0}
    is sampled over window.
    """
    assert all(is_bounded(c) for c in u.cuts)
    lo, hi = window
    base = np.linspace(lo, hi, math.ceil((hi - lo) / h) + 1)
    rows = [np.column_stack([base, np.zeros_like(base)])]
    levels = sorted({k * h for k in range(1, math.floor(1 / h) + 1)} | set(u.levels))
    for t in levels:
        xs = representatives(cut(u, min(t, 1.0)), h)
        if xs:
            rows.append(np.column_stack([xs, np.full(len(xs), t)]))
    return np.vstack(rows)


def sampled_endograph_dist(u: StepFuzzySet, v: StepFuzzySet, h: float, p: float = 1) -> float:
    """Hausdorff distance of the two samples; p=1 is the sum metric, p=inf the max metric."""
    window = _reach([u, v])
    a = sampled_endograph(u, h, window)
    b = sampled_endograph(v, h, window)
    forward = cKDTree(b).query(a, p=p)[0].max()
    backward = cKDTree(a).query(b, p=p)[0].max()
    return float(max(forward, backward))


def minimal_net_size(A: GroundSet, eps: float) -> int:
    """Smallest number of centers from A covering A at radius eps."""
    points = list(A.points)
    table = A.space.pairwise(points, points)
    for size in range(1, len(points) + 1):
        for centers in itertools.combinations(range(len(points)), size):
            if np.all(table[list(centers)].min(axis=0) <= eps):
                return size
    return 0


def sampled_hausdorff(A: GroundSet, B: GroundSet, h: float) -> float:
    """Hausdorff distance of mesh-h samples of two bounded subsets of the line."""
    a = np.asarray(representatives(A, h), dtype=float).reshape(-1, 1)
    b = np.asarray(representatives(B, h), dtype=float).reshape(-1, 1)
    return float(max(cKDTree(b).query(a)[0].max(), cKDTree(a).query(b)[0].max()))
