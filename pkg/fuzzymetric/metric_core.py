"""
Metric-space backends and the two product metrics on X x [0, 1].

Three backends are supported:

- ``PointCloud``: finitely many labelled points with an explicit distance table.
- ``EuclideanRm``: points of R^m, Euclidean norm of coordinate differences.
- ``RealLine``: the real line; the only backend whose sets may be intervals.

All values are frozen pydantic models, so they can be shared between threads.
"""
import logging
from enum import Enum
from functools import cached_property
from typing import Annotated, Any, Literal, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationInfo, field_validator, model_validator
from scipy.spatial.distance import cdist

from fuzzymetric.exceptions import DomainError

logger = logging.getLogger(__name__)

# A ground point: a label on a PointCloud, a coordinate tuple in R^m, a float on the real line.
Point = Union[str, float, tuple[float, ...]]


class ProductMetricVariant(str, Enum):
    """SUM is d-bar (d + |s - t|), MAX is d' (max{d, |s - t|})."""
    SUM = "sum"
    MAX = "max"


def combine(variant: ProductMetricVariant, ground, vertical):
    """Combine a ground distance and a level distance. Works on floats and numpy arrays."""
    if variant is ProductMetricVariant.SUM:
        return ground + vertical
    return np.maximum(ground, vertical)


class PointCloud(BaseModel):
    """
    A finite metric space given by labels and a full symmetric distance table.
    """
    model_config = ConfigDict(frozen=True)

    backend: Literal["point_cloud"] = "point_cloud"
    labels: tuple[str, ...]
    table: tuple[tuple[float, ...], ...]
    validated: bool = Field(default=True, description="Whether the triangle inequality was checked")

    @model_validator(mode="after")
    def check_metric_table(self) -> "PointCloud":
        n = len(self.labels)
        if n == 0:
            raise ValueError("a point cloud needs at least one point")
        if len(set(self.labels)) != n:
            raise ValueError("point labels must be unique")
        table = np.asarray(self.table, dtype=float)
        if table.shape != (n, n):
            raise ValueError(f"distance table must be {n}x{n}, got shape {table.shape}")
        if not np.all(np.isfinite(table)) or np.any(table < 0):
            raise ValueError("distances must be finite and non-negative")
        if np.any(np.diag(table) != 0):
            raise ValueError("distance table must have a zero diagonal")
        if not np.array_equal(table, table.T):
            raise ValueError("distance table must be symmetric")
        if np.any(table + np.eye(n) <= 0):
            raise ValueError("distinct points must be at positive distance")
        if self.validated:
            # via[i, j] = min_k d(i, k) + d(k, j)
            via = (table[:, :, None] + table[None, :, :]).min(axis=1)
            if np.any(table > via + 1e-12):
                raise ValueError("distance table violates the triangle inequality")
        return self

    @cached_property
    def _index(self) -> dict[str, int]:
        return {label: i for i, label in enumerate(self.labels)}

    # Not cached: model equality compares __dict__ and an array has no truth value
    @property
    def _matrix(self) -> np.ndarray:
        return np.asarray(self.table, dtype=float)

    @property
    def is_compact_space(self) -> bool:
        return True

    def canonical(self, p: Any) -> str:
        if isinstance(p, str) and p in self._index:
            return p
        raise DomainError(f"unknown point {p!r} for this point cloud")

    def sort_key(self, p: str) -> int:
        return self._index[p]

    def pairwise(self, xs: list[str], ys: list[str]) -> np.ndarray:
        rows = [self._index[x] for x in xs]
        cols = [self._index[y] for y in ys]
        return self._matrix[np.ix_(rows, cols)]


class EuclideanRm(BaseModel):
    """
    R^m with the Euclidean norm. Points are coordinate tuples; a bare number is
    accepted when m = 1.
    """
    model_config = ConfigDict(frozen=True)

    backend: Literal["euclidean"] = "euclidean"
    dimension: int = Field(default=2, ge=1)

    @property
    def is_compact_space(self) -> bool:
        return False

    def canonical(self, p: Any) -> tuple[float, ...]:
        if isinstance(p, (int, float)) and not isinstance(p, bool) and self.dimension == 1:
            p = (p,)
        if isinstance(p, (tuple, list)) and len(p) == self.dimension:
            coords = tuple(float(c) for c in p)
            if all(np.isfinite(coords)):
                return coords
        raise DomainError(f"{p!r} is not a point of R^{self.dimension}")

    def sort_key(self, p: tuple[float, ...]) -> tuple[float, ...]:
        return p

    def pairwise(self, xs: list[tuple[float, ...]], ys: list[tuple[float, ...]]) -> np.ndarray:
        if not xs or not ys:
            return np.zeros((len(xs), len(ys)))
        a = np.asarray(xs, dtype=float).reshape(len(xs), self.dimension)
        b = np.asarray(ys, dtype=float).reshape(len(ys), self.dimension)
        return cdist(a, b)


class RealLine(BaseModel):
    """
    The real line. Points are finite floats; infinite values only appear as
    interval endpoints (see ground_sets).
    """
    model_config = ConfigDict(frozen=True)

    backend: Literal["real_line"] = "real_line"

    @property
    def is_compact_space(self) -> bool:
        return False

    def canonical(self, p: Any) -> float:
        if isinstance(p, (int, float)) and not isinstance(p, bool) and np.isfinite(p):
            return float(p)
        raise DomainError(f"{p!r} is not a point of the real line")

    def sort_key(self, p: float) -> float:
        return p

    def pairwise(self, xs: list[float], ys: list[float]) -> np.ndarray:
        a = np.asarray(xs, dtype=float)
        b = np.asarray(ys, dtype=float)
        return np.abs(a[:, None] - b[None, :])


GroundSpace = Annotated[Union[PointCloud, EuclideanRm, RealLine], Field(discriminator="backend")]


def same_space(a: GroundSpace, b: GroundSpace) -> bool:
    return a is b or a == b


def require_same_space(a: GroundSpace, b: GroundSpace) -> None:
    if not same_space(a, b):
        raise DomainError(f"objects live in different spaces ({a.backend} vs {b.backend})")


def dist(space: GroundSpace, p: Point, q: Point) -> float:
    """The ground metric d(p, q)."""
    p, q = space.canonical(p), space.canonical(q)
    return float(space.pairwise([p], [q])[0, 0])


class LiftedPoint(BaseModel):
    """
    A point (x, t) of X x [0, 1].
    """
    model_config = ConfigDict(frozen=True)

    space: GroundSpace
    x: Point
    t: float = Field(..., ge=0.0, le=1.0)

    @field_validator("x")
    @classmethod
    def x_in_space(cls, v: Any, info: ValidationInfo) -> Point:
        space = info.data.get("space")
        if space is None:
            return v
        try:
            return space.canonical(v)
        except DomainError as e:
            raise ValueError(e.detail)


def product_dist(variant: ProductMetricVariant, a: LiftedPoint, b: LiftedPoint) -> float:
    """d-bar or d' between two lifted points of the same space."""
    require_same_space(a.space, b.space)
    ground = dist(a.space, a.x, b.x)
    return float(combine(variant, ground, abs(a.t - b.t)))
