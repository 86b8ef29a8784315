"""
Pydantic schemas for the fuzzymetric instance and report files.
This module defines the line records for sets, fuzzy sets, families and
sequences, and the report records emitted by the command line.

Infinite values are written as null: interval ends use null for -inf / +inf,
and report distances use null for +inf.
"""
from typing import Annotated, Any, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field

from fuzzymetric.metric_core import GroundSpace, Point

RNG_ALGORITHM = "PCG64"


# ========== PAYLOAD SCHEMAS ==========
class IntervalBody(BaseModel):
    """
    A closed interval; a missing end is unbounded on that side.
    """
    model_config = ConfigDict(frozen=True)

    lo: Optional[float] = Field(None, examples=[0.0])
    hi: Optional[float] = Field(None, examples=[1.5])


class SetBody(BaseModel):
    """
    A subset of the ground space.
    """
    model_config = ConfigDict(frozen=True)

    kind: Literal["points", "intervals", "empty", "full"]
    points: tuple[Point, ...] = ()
    intervals: tuple[IntervalBody, ...] = ()


class FuzzyBody(BaseModel):
    """
    A step fuzzy set: increasing levels and one nested cut per level.
    """
    model_config = ConfigDict(frozen=True)

    levels: tuple[float, ...] = Field(default=(), examples=[[0.5, 1.0]])
    cuts: tuple[SetBody, ...] = ()


class FamilyBody(BaseModel):
    model_config = ConfigDict(frozen=True)

    members: tuple[FuzzyBody, ...] = ()
    height_tag: Optional[float] = Field(None, gt=0.0, le=1.0)


class SequenceBody(BaseModel):
    """
    A finite window u_1..u_N, optionally with its intended limit.
    """
    model_config = ConfigDict(frozen=True)

    members: tuple[FuzzyBody, ...]
    tail_start: int = Field(default=1, ge=1)
    limit: Optional[FuzzyBody] = None


class Metadata(BaseModel):
    model_config = ConfigDict(frozen=True)

    seed: Optional[int] = Field(None, ge=0, lt=2**64)
    generator: Optional[str] = Field(None, examples=["escaping"])
    validated: bool = True
    rng: str = RNG_ALGORITHM
    params: dict[str, Any] = Field(default_factory=dict)


# ========== INSTANCE RECORDS ==========
class SetRecord(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["set"] = "set"
    space: GroundSpace
    payload: SetBody
    metadata: Metadata = Field(default_factory=Metadata)


class FuzzyRecord(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["fuzzy"] = "fuzzy"
    space: GroundSpace
    payload: FuzzyBody
    metadata: Metadata = Field(default_factory=Metadata)


class FamilyRecord(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["family"] = "family"
    space: GroundSpace
    payload: FamilyBody
    metadata: Metadata = Field(default_factory=Metadata)


class SequenceRecord(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["sequence"] = "sequence"
    space: GroundSpace
    payload: SequenceBody
    metadata: Metadata = Field(default_factory=Metadata)


InstanceRecord = Annotated[
    Union[SetRecord, FuzzyRecord, FamilyRecord, SequenceRecord],
    Field(discriminator="kind"),
]


# ========== REPORT SCHEMAS ==========
class ReportRecord(BaseModel):
    """
    One command result: the verdict, a one-line summary and the raw quantities.
    """
    model_config = ConfigDict(frozen=True)

    kind: Literal["report"] = "report"
    command: str = Field(..., examples=["tb-audit"])
    passed: bool
    summary: str = ""
    data: dict[str, Any] = Field(default_factory=dict)
