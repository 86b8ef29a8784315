"""
Command line for fuzzymetric.

    fuzzymetric gen escaping --n 10 --spacing 5 | fuzzymetric dist --metric hend

Reports go to stdout as one JSON record per line, summaries and logs to
stderr. Exit status: 0 when every report passed, 1 when an audit failed,
2 on usage errors and malformed input.
"""
import argparse
import logging
import math
import sys
from pathlib import Path
from typing import Any, Callable, Optional, Sequence

import numpy as np
from pydantic import ValidationError

from fuzzymetric import config
from fuzzymetric.compactness import DiagonalSchedule, FuzzyFamily, diagonal_extract, kx_tb_audit, tb_audit
from fuzzymetric.convergence import FuzzySeqWindow, gamma_limit_check, gamma_oscillation_probe
from fuzzymetric.endograph import distance_matrix
from fuzzymetric.exceptions import ConfigError, FuzzyMetricError
from fuzzymetric.fuzzy_sets import StepFuzzySet, characteristic, classify, height
from fuzzymetric.generators import (
    GeneratorSpec,
    gen_escaping,
    gen_example_empu,
    gen_example_rnce,
    gen_nested_intervals,
    gen_oscillating,
    gen_random_family,
)
from fuzzymetric.ground_sets import GroundSet, hausdorff
from fuzzymetric.instances import Instance, SequenceInstance, emit_instance_file, read_instances, to_record
from fuzzymetric.metric_core import ProductMetricVariant
from fuzzymetric.schemas import Metadata, ReportRecord

logger = logging.getLogger(__name__)

GENERATORS = ("random-family", "escaping", "oscillating", "nested-intervals", "empu", "rnce")


# ── Input / output ─────────────────────────────────────────────────


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text()
    except OSError as e:
        raise ConfigError(f"cannot read {path}: {e.strerror}")


def _write_text(path: Optional[str], text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _plain(value: Any) -> Any:
    """JSON-ready copy: tuples become lists, infinities become None."""
    if isinstance(value, float) and math.isinf(value):
        return None
    if isinstance(value, np.ndarray):
        return _plain(value.tolist())
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, dict):
        return {k: _plain(v) for k, v in value.items()}
    return value


def _report(command: str, passed: bool, summary: str, data: dict[str, Any]) -> ReportRecord:
    return ReportRecord(command=command, passed=passed, summary=summary, data=_plain(data))


def _fuzzy_members(instances: Sequence[Instance]) -> list[StepFuzzySet]:
    members: list[StepFuzzySet] = []
    for value in instances:
        if isinstance(value, StepFuzzySet):
            members.append(value)
        elif isinstance(value, GroundSet):
            members.append(characteristic(value))
        elif isinstance(value, FuzzyFamily):
            members.extend(value.members)
        else:
            members.extend(value.window.members)
    return members


def _only(instances: Sequence[Instance], kind: type, what: str) -> Any:
    found = [v for v in instances if isinstance(v, kind)]
    if len(found) != 1:
        raise ConfigError(f"expected exactly one {what} record, found {len(found)}")
    return found[0]


def _alpha_grid(text: str) -> list[float]:
    try:
        grid = [float(a) for a in text.split(",") if a.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of levels: {text!r}")
    if not grid or any(not 0 < a <= 1 for a in grid):
        raise argparse.ArgumentTypeError("levels must lie in (0, 1]")
    return grid


def _positive_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not value > 0 or math.isinf(value):
        raise argparse.ArgumentTypeError(f"must be a positive number, got {text}")
    return value


def _bounded_int(least: int) -> Callable[[str], int]:
    def parse(text: str) -> int:
        try:
            value = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
        if value < least:
            raise argparse.ArgumentTypeError(f"must be at least {least}, got {value}")
        return value
    return parse


def _pair(kind: type) -> Callable[[str], list]:
    """'lo,hi' as a two-element list."""
    def parse(text: str) -> list:
        try:
            pair = [kind(v) for v in text.split(",")]
        except ValueError:
            raise argparse.ArgumentTypeError(f"not a pair of {kind.__name__} values: {text!r}")
        if len(pair) != 2:
            raise argparse.ArgumentTypeError(f"expected two comma-separated values, got {text!r}")
        return pair
    return parse


# ── Commands ───────────────────────────────────────────────────────


def cmd_gen(args: argparse.Namespace) -> list[ReportRecord]:
    name = args.generator
    params: dict[str, Any] = {}
    seed = None
    if name == "random-family":
        params = {"members": args.members, "dimension": args.dimension}
        for key in ("levels", "cut_size", "box"):
            if getattr(args, key) is not None:
                params[key] = getattr(args, key)
        seed = args.seed
        value = gen_random_family(GeneratorSpec(generator=name, params=params, seed=seed))
    elif name == "escaping":
        params = {"n": args.n, "spacing": args.spacing}
        value = gen_escaping(args.n, args.spacing)
    elif name == "oscillating":
        params = {"n": args.n}
        value = gen_oscillating(args.n)
    elif name == "nested-intervals":
        params = {"n": args.n}
        value = gen_nested_intervals(args.n)
    elif name == "empu":
        params = {"r": args.r, "mesh": args.mesh}
        value = gen_example_empu(args.r, args.mesh)
    else:
        params = {"r": args.r, "n": args.n, "mesh": args.mesh}
        window, limit = gen_example_rnce(args.r, args.n, args.mesh)
        value = SequenceInstance(window=window, limit=limit)
    record = to_record(value, Metadata(seed=seed, generator=name, params=params))
    _write_text(args.output, emit_instance_file([record]))
    logger.info("generated %s %s", name, params)
    return []


def cmd_dist(args: argparse.Namespace) -> list[ReportRecord]:
    instances = read_instances(_read_text(args.input))
    data: dict[str, Any] = {"metric": args.metric}
    if args.metric == "hausdorff":
        sets = [v for v in instances if isinstance(v, GroundSet)]
        if len(sets) != len(instances):
            raise ConfigError("the hausdorff metric compares set records only")
        matrix = np.array([[hausdorff(a, b) for b in sets] for a in sets]).reshape(len(sets), len(sets))
    else:
        members = _fuzzy_members(instances)
        data["hend"] = distance_matrix(ProductMetricVariant.SUM, members)
        data["hend_max"] = distance_matrix(ProductMetricVariant.MAX, members)
        matrix = data["hend" if args.metric == "hend" else "hend_max"]
    size = matrix.shape[0]
    finite = matrix[np.isfinite(matrix)]
    largest = float(finite.max()) if finite.size else 0.0
    summary = f"{args.metric}: {size}x{size} matrix, largest finite entry {largest:g}"
    return [_report("dist", True, summary, {**data, "matrix": matrix})]


def cmd_gamma_check(args: argparse.Namespace) -> list[ReportRecord]:
    seq = _only(read_instances(_read_text(args.input)), SequenceInstance, "sequence")
    window = seq.window
    if args.tail is not None:
        try:
            window = FuzzySeqWindow(members=window.members, tail_start=args.tail)
        except ValidationError as e:
            raise ConfigError(f"--tail {args.tail}: {e.errors()[0]['msg']}")
    if seq.limit is None:
        probe = gamma_oscillation_probe(window, args.eps)
        passed = probe.verdict == "plausible-limit"
        summary = f"gamma oscillation probe at eps={args.eps:g}: {probe.verdict}"
        if probe.witness is not None:
            summary += f", witness {probe.witness}"
        return [_report("gamma-check", passed, summary, probe.model_dump())]
    verdict = gamma_limit_check(window, seq.limit, args.eps)
    summary = f"gamma check at eps={args.eps:g}: {'pass' if verdict.passed else 'fail'}"
    if not verdict.passed:
        summary += f" at n={verdict.witness_index}, {verdict.reason}"
    return [_report("gamma-check", verdict.passed, summary, verdict.model_dump())]


def cmd_tb_audit(args: argparse.Namespace) -> list[ReportRecord]:
    instances = read_instances(_read_text(args.input))
    if instances and all(isinstance(v, GroundSet) for v in instances):
        report = kx_tb_audit(instances, args.eps, args.budget)
    else:
        family = _only(instances, FuzzyFamily, "family")
        report = tb_audit(family, args.eps, args.alpha_grid, args.budget)
    summary = (
        f"tb audit at eps={args.eps:g}: forward {'holds' if report.forward_holds else 'fails'}, "
        f"backward {'holds' if report.backward_holds else 'fails'} (radius {report.backward_radius:g})"
    )
    return [_report("tb-audit", report.passed, summary, report.model_dump())]


def cmd_extract(args: argparse.Namespace) -> list[ReportRecord]:
    seq = _only(read_instances(_read_text(args.input)), SequenceInstance, "sequence")
    xi = min(1.0, min(height(u) for _, u in seq.window.tail()))
    if xi <= 0:
        raise ConfigError("the window tail reaches the empty fuzzy set")
    sched = DiagonalSchedule.geometric(args.stages, xi=xi, net_budget=args.budget)
    result = diagonal_extract(seq.window, sched)
    passed = result.succeeded and result.bounds_hold
    if result.succeeded:
        summary = f"extracted diagonal {list(result.diagonal_indices)}, last residual {result.final_residuals[-1]:g}"
    else:
        summary = f"extraction failed at stage {result.failure.stage}: {result.failure.detail}"
    data = result.model_dump(exclude={"limit", "stage_limits"})
    return [_report("extract", passed, summary, data)]


def cmd_classify(args: argparse.Namespace) -> list[ReportRecord]:
    reports = []
    for i, u in enumerate(_fuzzy_members(read_instances(_read_text(args.input)))):
        classes = classify(u)
        names = [n for n in ("usc", "uscg", "uscb", "normal") if getattr(classes, f"is_{n}")]
        summary = f"member {i}: height {height(u):g}, classes {', '.join(names)}"
        reports.append(_report("classify", True, summary, {"member": i, "height": height(u), **classes.model_dump()}))
    return reports


# ── Parser ─────────────────────────────────────────────────────────


def _add_input(p: argparse.ArgumentParser) -> None:
    p.add_argument("input", nargs="?", default="-", help="instance file ('-' for stdin)")
    p.add_argument("-o", "--output", default=None, help="report file (default stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fuzzymetric", description="Endograph metrics and compactness audits.")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="write a generated instance")
    gen.add_argument("generator", choices=GENERATORS)
    gen.add_argument("--n", type=int, default=10)
    gen.add_argument("--spacing", type=float, default=1.0)
    gen.add_argument("--r", type=float, default=0.5)
    gen.add_argument("--members", type=_bounded_int(0), default=10)
    gen.add_argument("--dimension", type=_bounded_int(1), default=2)
    gen.add_argument("--levels", type=_pair(int), default=None, help="min,max levels per member")
    gen.add_argument("--cut-size", dest="cut_size", type=_pair(int), default=None, help="min,max points per cut")
    gen.add_argument("--box", type=_pair(float), default=None, help="lo,hi coordinate range")
    gen.add_argument("--seed", type=_bounded_int(0), default=0)
    gen.add_argument("--mesh", type=float, default=config.DEFAULT_MESH)
    gen.add_argument("-o", "--output", default=None)
    gen.set_defaults(handler=cmd_gen)

    dist = sub.add_parser("dist", help="pairwise distance matrix")
    _add_input(dist)
    dist.add_argument("--metric", choices=("hend", "hend-max", "hausdorff"), default="hend")
    dist.set_defaults(handler=cmd_dist)

    gamma = sub.add_parser("gamma-check", help="Gamma-limit check, or oscillation probe without a limit")
    _add_input(gamma)
    gamma.add_argument("--eps", type=_positive_float, default=config.DEFAULT_EPS)
    gamma.add_argument("--tail", type=int, default=None, help="1-based index where the tail starts")
    gamma.set_defaults(handler=cmd_gamma_check)

    tb = sub.add_parser("tb-audit", help="total boundedness audit of a family or of compact sets")
    _add_input(tb)
    tb.add_argument("--eps", type=_positive_float, default=config.DEFAULT_EPS)
    tb.add_argument("--alpha-grid", type=_alpha_grid, default=[0.25, 0.5, 0.75, 1.0])
    tb.add_argument("--budget", type=_bounded_int(1), default=config.DEFAULT_BUDGET)
    tb.set_defaults(handler=cmd_tb_audit)

    extract = sub.add_parser("extract", help="diagonal extraction of a convergent subsequence")
    _add_input(extract)
    extract.add_argument("--stages", type=_bounded_int(1), default=4)
    extract.add_argument("--budget", type=_bounded_int(1), default=config.DEFAULT_BUDGET)
    extract.set_defaults(handler=cmd_extract)

    cls = sub.add_parser("classify", help="class membership of every fuzzy set in the input")
    _add_input(cls)
    cls.set_defaults(handler=cmd_classify)
    return parser


def cli_main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 2
    logging.basicConfig(level=config.LOG_LEVEL, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")

    handler: Callable[[argparse.Namespace], list[ReportRecord]] = args.handler
    try:
        reports = handler(args)
    except FuzzyMetricError as e:
        print(f"error: {e.detail}", file=sys.stderr)
        return e.exit_code
    except ValidationError as e:
        problem = e.errors()[0]
        where = ".".join(str(p) for p in problem["loc"])
        print(f"error: {where}: {problem['msg']}" if where else f"error: {problem['msg']}", file=sys.stderr)
        return 2
    if args.command != "gen":
        _write_text(args.output, "".join(r.model_dump_json() + "\n" for r in reports))
    for r in reports:
        print(r.summary, file=sys.stderr)
    return 0 if all(r.passed for r in reports) else 1


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
