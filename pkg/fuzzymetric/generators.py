"""
Instance generators.

gen_random_family draws from a seeded PCG64 stream, so the same spec and seed
always give the same family. The other generators are deterministic
constructions: the escaping and oscillating sequences on the real line, a
shrinking-interval sequence, and level-grid discretisations of two
counterexamples:

- empu: cuts (-inf, -1/(r - a)] for a < r, a fuzzy set whose cuts are closed
  but unbounded (USC, not USCG)
- rnce: u_m with cuts [1 - 1/m, 2 - a/r] against u with cuts [1, 2 - a/r],
  where H_end(u_m, u) = min(1/m, r)
"""
import logging
import math
from typing import Any, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from fuzzymetric import config
from fuzzymetric.compactness import FuzzyFamily
from fuzzymetric.convergence import FuzzySeqWindow
from fuzzymetric.exceptions import ConfigError
from fuzzymetric.fuzzy_sets import StepFuzzySet, characteristic, point_fuzzy_set
from fuzzymetric.ground_sets import GroundSet
from fuzzymetric.metric_core import EuclideanRm, RealLine

logger = logging.getLogger(__name__)

# Levels of random members are multiples of 1/LEVEL_STEPS
LEVEL_STEPS = 20

RANDOM_FAMILY_DEFAULTS: dict[str, Any] = {
    "members": 10,
    "dimension": 2,
    "levels": [1, 4],
    "cut_size": [1, 6],
    "box": [0.0, 1.0],
}


class GeneratorSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    generator: str = Field(..., examples=["random_family"])
    params: dict[str, Any] = Field(default_factory=dict)
    seed: int = Field(default=0, ge=0, lt=2**64)


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def _int_range(params: dict[str, Any], name: str, least: int) -> tuple[int, int]:
    try:
        lo, hi = (int(v) for v in params[name])
    except (TypeError, ValueError):
        raise ConfigError(f"{name} must be a pair of integers, got {params[name]!r}")
    if not least <= lo <= hi:
        raise ConfigError(f"{name} must satisfy {least} <= min <= max, got [{lo}, {hi}]")
    return lo, hi


def _random_family_params(spec: GeneratorSpec) -> dict[str, Any]:
    unknown = set(spec.params) - set(RANDOM_FAMILY_DEFAULTS)
    if unknown:
        raise ConfigError(f"unknown random_family parameters: {', '.join(sorted(unknown))}")
    params = {**RANDOM_FAMILY_DEFAULTS, **spec.params}
    members = params["members"]
    if not isinstance(members, int) or members < 0:
        raise ConfigError(f"members must be a non-negative integer, got {members!r}")
    dimension = params["dimension"]
    if not isinstance(dimension, int) or dimension < 1:
        raise ConfigError(f"dimension must be a positive integer, got {dimension!r}")
    levels = _int_range(params, "levels", 1)
    if levels[1] > LEVEL_STEPS:
        raise ConfigError(f"at most {LEVEL_STEPS} levels per member")
    cut_size = _int_range(params, "cut_size", 1)
    try:
        lo, hi = (float(v) for v in params["box"])
    except (TypeError, ValueError):
        raise ConfigError(f"box must be a pair of numbers, got {params['box']!r}")
    if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
        raise ConfigError(f"box must be a finite range lo < hi, got [{lo}, {hi}]")
    return {"members": members, "dimension": dimension, "levels": levels, "cut_size": cut_size, "box": (lo, hi)}


def gen_random_family(spec: GeneratorSpec, seed: Optional[int] = None) -> FuzzyFamily:
    """
    A family of step fuzzy sets in a coordinate box of R^m.

    Each member draws a base point set and distinct levels from the 1/20 grid;
    its cuts are nonincreasing prefixes of the base, so they are nested, finite
    and bounded.
    """
    params = _random_family_params(spec)
    rng = make_rng(spec.seed if seed is None else seed)
    space = EuclideanRm(dimension=params["dimension"])
    lo, hi = params["box"]
    members = []
    for _ in range(params["members"]):
        k = int(rng.integers(params["levels"][0], params["levels"][1] + 1))
        grid = np.sort(rng.choice(np.arange(1, LEVEL_STEPS + 1), size=k, replace=False))
        levels = [int(g) / LEVEL_STEPS for g in grid]
        size = int(rng.integers(params["cut_size"][0], params["cut_size"][1] + 1))
        base = rng.uniform(lo, hi, size=(size, space.dimension))
        counts = np.sort(rng.integers(1, size + 1, size=k))[::-1]
        cuts = [GroundSet.from_points(space, [tuple(float(c) for c in p) for p in base[:n]]) for n in counts]
        members.append(StepFuzzySet.from_cuts(space, levels, cuts))
    logger.debug("random family: %d members in R^%d", len(members), space.dimension)
    return FuzzyFamily(space=space, members=tuple(members))


def gen_escaping(n: int, spacing: float) -> FuzzySeqWindow:
    """u_k = chi of {x_1, x_k} with x_k = (k - 1) * spacing; H_end(u_k, u_1) = min(1, (k - 1) * spacing)."""
    if n < 2 or not spacing > 0:
        raise ConfigError(f"escaping needs n >= 2 and spacing > 0, got n={n}, spacing={spacing}")
    line = RealLine()
    members = tuple(
        characteristic(GroundSet.from_points(line, [0.0, (k - 1) * spacing])) for k in range(1, n + 1)
    )
    return FuzzySeqWindow(members=members)


def gen_oscillating(n: int) -> FuzzySeqWindow:
    """1-hat at odd indices, 3-hat at even ones."""
    if n < 2:
        raise ConfigError(f"oscillating needs n >= 2, got {n}")
    line = RealLine()
    return FuzzySeqWindow(members=tuple(point_fuzzy_set(line, 1.0 if k % 2 else 3.0) for k in range(1, n + 1)))


def gen_nested_intervals(n: int) -> FuzzySeqWindow:
    """u_k = chi of [0, 1 + 1/k], shrinking to chi of [0, 1]."""
    if n < 1:
        raise ConfigError(f"nested_intervals needs n >= 1, got {n}")
    line = RealLine()
    return FuzzySeqWindow(
        members=tuple(characteristic(GroundSet.from_intervals(line, [(0.0, 1.0 + 1.0 / k)])) for k in range(1, n + 1))
    )


def _level_grid(r: float, mesh: float) -> list[float]:
    """i * mesh for i >= 1 while strictly below r."""
    if not 0 < r <= 1:
        raise ConfigError(f"r must lie in (0, 1], got {r}")
    if not 0 < mesh < r:
        raise ConfigError(f"mesh must lie in (0, r), got {mesh}")
    return [i * mesh for i in range(1, math.ceil(r / mesh)) if i * mesh < r]


def gen_example_empu(r: float, mesh: float = config.DEFAULT_MESH) -> StepFuzzySet:
    """
    Cuts (-inf, -1/(r - a)] sampled at a = mesh, 2 mesh, ... below r. The
    height is the largest sampled level, which is attained.
    """
    line = RealLine()
    levels = _level_grid(r, mesh)
    cuts = [GroundSet.from_intervals(line, [(-math.inf, -1.0 / (r - a))]) for a in levels]
    return StepFuzzySet.from_cuts(line, levels, cuts)


def gen_example_rnce(
    r: float,
    n: int,
    mesh: float = config.DEFAULT_MESH,
) -> tuple[FuzzySeqWindow, StepFuzzySet]:
    """The window u_1..u_n and its limit u, all sampled on the grid {i * mesh < r} plus r."""
    if n < 1:
        raise ConfigError(f"rnce needs n >= 1, got {n}")
    line = RealLine()
    levels = _level_grid(r, mesh) + [r]

    def member(left: float) -> StepFuzzySet:
        cuts = [GroundSet.from_intervals(line, [(left, 2.0 - a / r)]) for a in levels]
        return StepFuzzySet.from_cuts(line, levels, cuts)

    window = FuzzySeqWindow(members=tuple(member(1.0 - 1.0 / m) for m in range(1, n + 1)))
    return window, member(1.0)
