"""
MCP server for fuzzymetric.
This server exposes endograph distances, Gamma checks, total boundedness audits,
diagonal extraction and the instance generators as tools. Every tool takes and
returns text: instances travel as instance-file lines.
"""
import logging
from typing import Optional

from dotenv import load_dotenv
from mcp.server.fastmcp import FastMCP
from pydantic import ValidationError

from fuzzymetric import config
from fuzzymetric.compactness import DiagonalSchedule, FuzzyFamily, diagonal_extract, kx_tb_audit, tb_audit
from fuzzymetric.convergence import gamma_limit_check, gamma_oscillation_probe
from fuzzymetric.endograph import distance_matrix
from fuzzymetric.exceptions import FuzzyMetricError
from fuzzymetric.fuzzy_sets import StepFuzzySet, classify, height
from fuzzymetric.generators import gen_escaping, gen_nested_intervals, gen_oscillating
from fuzzymetric.ground_sets import GroundSet
from fuzzymetric.instances import SequenceInstance, emit_instance_file, read_instances, to_record
from fuzzymetric.metric_core import ProductMetricVariant
from fuzzymetric.schemas import Metadata

load_dotenv()

logger = logging.getLogger(__name__)

mcp = FastMCP()


def _fuzzy_sets(instance_text: str) -> list[StepFuzzySet]:
    members: list[StepFuzzySet] = []
    for value in read_instances(instance_text):
        if isinstance(value, StepFuzzySet):
            members.append(value)
        elif isinstance(value, FuzzyFamily):
            members.extend(value.members)
        elif isinstance(value, SequenceInstance):
            members.extend(value.window.members)
    return members


def _sequence(instance_text: str) -> Optional[SequenceInstance]:
    return next((v for v in read_instances(instance_text) if isinstance(v, SequenceInstance)), None)


def _fmt(x: float) -> str:
    return "inf" if x == float("inf") else f"{x:.6g}"


def _problem(e: Exception) -> str:
    if isinstance(e, FuzzyMetricError):
        return e.detail
    if isinstance(e, ValidationError):
        return e.errors()[0]["msg"]
    return str(e)


@mcp.tool(name="endograph_distances",
          description="Computes the pairwise endograph distance matrix of the fuzzy sets in an instance file. "
                      "metric is 'sum' (H_end) or 'max' (H'_end).")
def endograph_distances(instances: str, metric: str = "sum") -> str:
    """
    Computes the pairwise endograph distance matrix of the fuzzy sets in an instance file.
    """
    try:
        variant = ProductMetricVariant(metric)
        members = _fuzzy_sets(instances)
    except ValueError:
        return f"Unknown metric {metric!r}; use 'sum' or 'max'."
    except FuzzyMetricError as e:
        return f"Invalid instances: {e.detail}"
    if not members:
        return "No fuzzy sets found in the instances."

    matrix = distance_matrix(variant, members)
    return "\n".join(" ".join(_fmt(x) for x in row) for row in matrix)


@mcp.tool(name="gamma_check",
          description="Checks a sequence record at tolerance eps: against its limit when one is given, "
                      "otherwise probes the tail for Gamma-oscillation.")
def gamma_check(instances: str, eps: float = config.DEFAULT_EPS) -> str:
    """
    Checks a sequence record at tolerance eps.
    """
    try:
        seq = _sequence(instances)
    except FuzzyMetricError as e:
        return f"Invalid instances: {e.detail}"
    if seq is None:
        return "No sequence record found in the instances."

    try:
        if seq.limit is None:
            probe = gamma_oscillation_probe(seq.window, eps)
            if probe.verdict == "oscillation":
                return f"Oscillation at eps={eps:g}: {len(probe.witnesses)} witnesses, first {probe.witness}"
            return f"No oscillation detected at eps={eps:g}."
        verdict = gamma_limit_check(seq.window, seq.limit, eps)
    except (FuzzyMetricError, ValueError) as e:
        return f"Check not possible: {_problem(e)}"
    if verdict.passed:
        return f"Gamma check passed at eps={eps:g} (largest endograph excess {_fmt(verdict.max_excess)})."
    return f"Gamma check failed at n={verdict.witness_index}: {verdict.reason}"


@mcp.tool(name="tb_audit",
          description="Runs the total boundedness audit at tolerance eps on a family record, "
                      "or on a list of compact set records.")
def tb_audit_tool(
        instances: str,
        eps: float = config.DEFAULT_EPS,
        alpha_grid: Optional[list[float]] = None,
        budget: int = config.DEFAULT_BUDGET,
) -> str:
    """
    Runs the total boundedness audit at tolerance eps.
    """
    try:
        values = read_instances(instances)
        if values and all(isinstance(v, GroundSet) for v in values):
            report = kx_tb_audit(values, eps, budget)
        else:
            family = next((v for v in values if isinstance(v, FuzzyFamily)), None)
            if family is None:
                return "No family record found in the instances."
            report = tb_audit(family, eps, alpha_grid or [0.25, 0.5, 0.75, 1.0], budget)
    except (FuzzyMetricError, ValueError) as e:
        return f"Audit not possible: {_problem(e)}"

    lines = [
        f"Forward: {'holds' if report.forward_holds else 'fails'} | "
        f"Backward: {'holds' if report.backward_holds else 'fails'} (radius {report.backward_radius:g})",
    ]
    if report.family_net_size is not None:
        lines.append(f"Family net: {report.family_net_size} centers at eps={eps:g}")
    lines.extend(f"Witness: {w}" for w in report.witnesses)
    return "\n".join(lines)


@mcp.tool(name="extract_subsequence",
          description="Runs the staged diagonal extraction on a sequence record with a geometric level schedule.")
def extract_subsequence(instances: str, stages: int = 4, budget: int = config.DEFAULT_BUDGET) -> str:
    """
    Runs the staged diagonal extraction on a sequence record.
    """
    try:
        seq = _sequence(instances)
        if seq is None:
            return "No sequence record found in the instances."
        xi = min(1.0, min(height(u) for _, u in seq.window.tail()))
        if xi <= 0:
            return "Extraction not possible: the window tail reaches the empty fuzzy set."
        result = diagonal_extract(seq.window, DiagonalSchedule.geometric(stages, xi=xi, net_budget=budget))
    except (FuzzyMetricError, ValueError) as e:
        return f"Extraction not possible: {_problem(e)}"

    if not result.succeeded:
        return f"Extraction failed at stage {result.failure.stage} ({result.failure.kind}): {result.failure.detail}"
    residuals = ", ".join(_fmt(r) for r in result.final_residuals)
    return (
        f"Diagonal: {list(result.diagonal_indices)}\n"
        f"Residuals: {residuals}\n"
        f"Bounds hold: {result.bounds_hold}"
    )


@mcp.tool(name="classify",
          description="Reports height and class membership (USC, USCG, USCB, normal) of each fuzzy set.")
def classify_tool(instances: str) -> str:
    """
    Reports height and class membership of each fuzzy set.
    """
    try:
        members = _fuzzy_sets(instances)
    except FuzzyMetricError as e:
        return f"Invalid instances: {e.detail}"
    if not members:
        return "No fuzzy sets found in the instances."

    lines = []
    for i, u in enumerate(members):
        c = classify(u)
        names = [n.upper() for n in ("usc", "uscg", "uscb") if getattr(c, f"is_{n}")]
        if c.is_normal:
            names.append("normal")
        lines.append(f"[{i}] height {height(u):g} | {', '.join(names)}")
    return "\n".join(lines)


@mcp.tool(name="generate_sequence",
          description="Generates a sequence instance: 'escaping' (needs spacing), 'oscillating' or 'nested-intervals'.")
def generate_sequence(generator: str, n: int = 10, spacing: float = 1.0) -> str:
    """
    Generates a sequence instance and returns it as an instance-file line.
    """
    try:
        if generator == "escaping":
            window = gen_escaping(n, spacing)
        elif generator == "oscillating":
            window = gen_oscillating(n)
        elif generator == "nested-intervals":
            window = gen_nested_intervals(n)
        else:
            return f"Unknown generator {generator!r}."
    except FuzzyMetricError as e:
        return f"Invalid parameters: {e.detail}"
    metadata = Metadata(generator=generator, params={"n": n, "spacing": spacing} if generator == "escaping" else {"n": n})
    return emit_instance_file([to_record(window, metadata)]).rstrip("\n")
