"""
Reading and writing instance files: one JSON record per line.

parse_instance_file / emit_instance_file work on wire records;
read_instances / to_record convert between records and domain values.
"""
import logging
import math
from typing import Any, Iterator, Optional, Sequence, Union

from pydantic import BaseModel, ConfigDict, TypeAdapter, ValidationError

from fuzzymetric.compactness import FuzzyFamily
from fuzzymetric.convergence import FuzzySeqWindow
from fuzzymetric.exceptions import ConfigError, FuzzyMetricError
from fuzzymetric.fuzzy_sets import StepFuzzySet
from fuzzymetric.ground_sets import GroundSet
from fuzzymetric.metric_core import GroundSpace
from fuzzymetric.schemas import (
    FamilyBody,
    FamilyRecord,
    FuzzyBody,
    FuzzyRecord,
    InstanceRecord,
    IntervalBody,
    Metadata,
    SequenceBody,
    SequenceRecord,
    SetBody,
    SetRecord,
)

logger = logging.getLogger(__name__)

_records: TypeAdapter = TypeAdapter(InstanceRecord)


class SequenceInstance(BaseModel):
    """A window together with the limit it is meant to approach, when known."""
    model_config = ConfigDict(frozen=True)

    window: FuzzySeqWindow
    limit: Optional[StepFuzzySet] = None


Instance = Union[GroundSet, StepFuzzySet, FuzzyFamily, SequenceInstance]


def _first_error(e: ValidationError) -> str:
    err = e.errors()[0]
    where = ".".join(str(p) for p in err["loc"])
    return f"{where}: {err['msg']}" if where else err["msg"]


# ── Text format ────────────────────────────────────────────────────


def _numbered_records(text: str) -> Iterator[tuple[int, Any]]:
    for number, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            yield number, _records.validate_json(line)
        except ValidationError as e:
            raise ConfigError(_first_error(e), line_number=number)


def parse_instance_file(text: str) -> list[Any]:
    """Wire records, one per non-blank line."""
    return [record for _, record in _numbered_records(text)]


def emit_instance_file(records: Sequence[Any]) -> str:
    return "".join(record.model_dump_json() + "\n" for record in records)


# ── Wire -> domain ─────────────────────────────────────────────────


def _interval_from_body(iv: IntervalBody) -> tuple[float, float]:
    return (-math.inf if iv.lo is None else iv.lo, math.inf if iv.hi is None else iv.hi)


def set_from_body(space: GroundSpace, body: SetBody) -> GroundSet:
    if body.kind == "empty":
        return GroundSet.empty(space)
    if body.kind == "full":
        return GroundSet.full(space)
    if body.kind == "intervals":
        return GroundSet.from_intervals(space, [_interval_from_body(iv) for iv in body.intervals])
    return GroundSet.from_points(space, list(body.points))


def fuzzy_from_body(space: GroundSpace, body: FuzzyBody) -> StepFuzzySet:
    return StepFuzzySet.from_cuts(space, body.levels, [set_from_body(space, c) for c in body.cuts])


def from_record(record: Any) -> Instance:
    space = record.space
    if isinstance(record, SetRecord):
        return set_from_body(space, record.payload)
    if isinstance(record, FuzzyRecord):
        return fuzzy_from_body(space, record.payload)
    if isinstance(record, FamilyRecord):
        members = tuple(fuzzy_from_body(space, m) for m in record.payload.members)
        return FuzzyFamily(space=space, members=members, height_tag=record.payload.height_tag)
    payload = record.payload
    window = FuzzySeqWindow(
        members=tuple(fuzzy_from_body(space, m) for m in payload.members),
        tail_start=payload.tail_start,
    )
    limit = fuzzy_from_body(space, payload.limit) if payload.limit is not None else None
    return SequenceInstance(window=window, limit=limit)


def read_instances(text: str) -> list[Instance]:
    """Domain values of every record; any problem is reported with its line number."""
    instances = []
    for number, record in _numbered_records(text):
        try:
            instances.append(from_record(record))
        except ValidationError as e:
            raise ConfigError(_first_error(e), line_number=number)
        except FuzzyMetricError as e:
            raise ConfigError(e.detail, line_number=number)
    logger.debug("read %d instances", len(instances))
    return instances


# ── Domain -> wire ─────────────────────────────────────────────────


def finite_or_none(value: float) -> Optional[float]:
    return None if math.isinf(value) else value


def set_to_body(A: GroundSet) -> SetBody:
    if A.kind == "intervals":
        return SetBody(
            kind="intervals",
            intervals=tuple(IntervalBody(lo=finite_or_none(iv.lo), hi=finite_or_none(iv.hi)) for iv in A.intervals),
        )
    return SetBody(kind=A.kind, points=A.points)


def fuzzy_to_body(u: StepFuzzySet) -> FuzzyBody:
    return FuzzyBody(levels=u.levels, cuts=tuple(set_to_body(c) for c in u.cuts))


def to_record(value: Instance, metadata: Optional[Metadata] = None) -> Any:
    metadata = metadata or Metadata()
    if isinstance(value, GroundSet):
        return SetRecord(space=value.space, payload=set_to_body(value), metadata=metadata)
    if isinstance(value, StepFuzzySet):
        return FuzzyRecord(space=value.space, payload=fuzzy_to_body(value), metadata=metadata)
    if isinstance(value, FuzzyFamily):
        payload = FamilyBody(members=tuple(fuzzy_to_body(u) for u in value.members), height_tag=value.height_tag)
        return FamilyRecord(space=value.space, payload=payload, metadata=metadata)
    if isinstance(value, FuzzySeqWindow):
        value = SequenceInstance(window=value)
    payload = SequenceBody(
        members=tuple(fuzzy_to_body(u) for u in value.window.members),
        tail_start=value.window.tail_start,
        limit=fuzzy_to_body(value.limit) if value.limit is not None else None,
    )
    return SequenceRecord(space=value.window.space, payload=payload, metadata=metadata)
