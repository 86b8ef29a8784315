"""
Total boundedness and compactness audits for families of fuzzy sets, and the
staged diagonal extraction of a convergent subsequence.

The ground backends are complete, so relative compactness is audited as total
boundedness. Every audit works at a tolerance: nets are greedy with a center
budget, and the constants (2 eps, 3 eps, 4 eps) come from triangle-inequality
budgets. They are sound, not tight.

Family members are addressed by their 0-based position; window members by
their 1-based index.
"""
import logging
import math
from typing import Callable, Literal, Optional, Sequence, Union

from pydantic import BaseModel, ConfigDict, Field, model_validator

from fuzzymetric import config
from fuzzymetric.convergence import FuzzySeqWindow, gamma_limit_check
from fuzzymetric.endograph import (
    SlabSet,
    downward_union,
    endograph,
    endograph_dist,
    reconstruct,
    slab_hausdorff,
    slab_semi_hausdorff,
    truncated_endograph,
)
from fuzzymetric.exceptions import BudgetError, DomainError
from fuzzymetric.fuzzy_sets import StepFuzzySet, characteristic, classify, cut, height, same_endograph
from fuzzymetric.ground_sets import (
    FailureWitness,
    GroundSet,
    greedy_eps_net,
    diameter,
    hausdorff,
    is_bounded,
    representatives,
    semi_hausdorff,
    union_all,
)
from fuzzymetric.metric_core import GroundSpace, Point, ProductMetricVariant, dist, require_same_space

logger = logging.getLogger(__name__)


class FuzzyFamily(BaseModel):
    """A finite family of step fuzzy sets over one space."""
    model_config = ConfigDict(frozen=True)

    space: GroundSpace
    members: tuple[StepFuzzySet, ...] = ()
    height_tag: Optional[float] = Field(default=None, gt=0.0, le=1.0)

    @model_validator(mode="after")
    def check_members(self) -> "FuzzyFamily":
        if any(u.space != self.space for u in self.members):
            raise ValueError("all members of a family must share its space")
        return self

    def check_height_tag(self) -> float:
        """The tag r, after checking every member has height exactly r."""
        if self.height_tag is None:
            raise DomainError("family carries no height tag")
        for i, u in enumerate(self.members):
            if height(u) != self.height_tag:
                raise DomainError(f"member {i} has height {height(u)}, expected {self.height_tag}")
        return self.height_tag


def family_union(U: FuzzyFamily, alpha: float) -> GroundSet:
    """U(alpha), the union of the members' alpha-cuts."""
    if not 0 < alpha <= 1:
        raise DomainError(f"level {alpha} is outside (0, 1]")
    return union_all(U.space, [cut(u, alpha) for u in U.members])


# ── Index nets ─────────────────────────────────────────────────────


class IndexNet(BaseModel):
    model_config = ConfigDict(frozen=True)

    centers: tuple[int, ...]
    radius: float

    @property
    def succeeded(self) -> bool:
        return True


class IndexNetFailure(BaseModel):
    model_config = ConfigDict(frozen=True)

    index: int
    centers: tuple[int, ...]
    radius: float

    @property
    def succeeded(self) -> bool:
        return False


IndexNetOutcome = Union[IndexNet, IndexNetFailure]


class _DistanceCache:
    def __init__(self, distance: Callable[[int, int], float]):
        self._distance = distance
        self._values: dict[tuple[int, int], float] = {}

    def __call__(self, i: int, j: int) -> float:
        if i == j:
            return 0.0
        key = (min(i, j), max(i, j))
        if key not in self._values:
            self._values[key] = self._distance(*key)
        return self._values[key]


def greedy_index_net(
    items: Sequence[int],
    distance: Callable[[int, int], float],
    eps: float,
    budget: int,
) -> IndexNetOutcome:
    """Greedy eps-net over items in the given order; the first uncovered item becomes a center."""
    if not eps > 0 or budget < 1:
        raise DomainError(f"net needs eps > 0 and budget >= 1, got eps={eps}, budget={budget}")
    uncovered = list(items)
    centers: list[int] = []
    while uncovered:
        head = uncovered[0]
        if len(centers) == budget:
            return IndexNetFailure(index=head, centers=tuple(centers), radius=eps)
        centers.append(head)
        uncovered = [j for j in uncovered[1:] if distance(head, j) > eps]
    return IndexNet(centers=tuple(centers), radius=eps)


def family_eps_net_hend(U: FuzzyFamily, eps: float, budget: int = config.DEFAULT_BUDGET) -> IndexNetOutcome:
    """Greedy weak eps-net of the members under H_end; centers are member positions."""
    ends = [endograph(u) for u in U.members]
    distance = _DistanceCache(lambda i, j: slab_hausdorff(ends[i], ends[j]))
    return greedy_index_net(range(len(ends)), distance, eps, budget)


def _hausdorff_family_net(D: Sequence[GroundSet], eps: float, budget: int) -> IndexNetOutcome:
    distance = _DistanceCache(lambda i, j: hausdorff(D[i], D[j]))
    return greedy_index_net(range(len(D)), distance, eps, budget)


def _describe(outcome) -> str:
    if isinstance(outcome, FailureWitness):
        return f"{outcome.reason} failure at {outcome.point!r} after {len(outcome.centers)} centers"
    if isinstance(outcome, IndexNetFailure):
        return f"member {outcome.index} uncovered after {len(outcome.centers)} centers"
    return f"{len(outcome.centers)} centers"


# ── Total boundedness audits ───────────────────────────────────────


class TbAuditReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    eps: float
    backward_radius: float
    family_net_ok: bool
    family_net_size: Optional[int] = None
    cut_nets_ok: bool
    forward_holds: bool
    backward_holds: bool
    witnesses: tuple[str, ...] = ()

    @property
    def passed(self) -> bool:
        return self.forward_holds and self.backward_holds


def _require_uscg(members: Sequence[StepFuzzySet]) -> None:
    for i, u in enumerate(members):
        if not classify(u).is_uscg:
            raise DomainError(f"member {i} has a non-compact cut (not USCG)")


def level_gap(alpha_grid: Sequence[float], top: float) -> float:
    """Largest gap of {0} ∪ (grid ∩ (0, top]) ∪ {top}."""
    marks = sorted({0.0, top} | {a for a in alpha_grid if 0 < a <= top})
    return max((b - a for a, b in zip(marks, marks[1:])), default=0.0)


def tb_audit(
    U: FuzzyFamily,
    eps: float,
    alpha_grid: Sequence[float],
    budget: int = config.DEFAULT_BUDGET,
) -> TbAuditReport:
    """
    Both directions of "U totally bounded under H_end iff every U(alpha) is
    totally bounded", at tolerance:

    forward: an eps-net of U gives a 2 eps-net of U(alpha) for alpha > 2 eps
    backward: eps-nets of U(alpha) along the grid give a net of U at
    3 eps + the largest grid gap
    """
    _require_uscg(U.members)
    witnesses: list[str] = []
    top = max((height(u) for u in U.members), default=0.0)
    back_radius = 3 * eps + level_gap(alpha_grid, top)

    family_net = family_eps_net_hend(U, eps, budget)
    forward = True
    if family_net.succeeded:
        for alpha in alpha_grid:
            if alpha <= 2 * eps or alpha > 1:
                continue
            outcome = greedy_eps_net(family_union(U, alpha), 2 * eps, budget)
            if not outcome.succeeded:
                forward = False
                witnesses.append(f"forward: U({alpha:g}) at radius {2 * eps:g}: {_describe(outcome)}")
    else:
        witnesses.append(f"family net at {eps:g}: {_describe(family_net)}")

    cut_nets_ok = True
    for alpha in alpha_grid:
        if not 0 < alpha <= top:
            continue
        outcome = greedy_eps_net(family_union(U, alpha), eps, budget)
        if not outcome.succeeded:
            cut_nets_ok = False
            witnesses.append(f"U({alpha:g}) at radius {eps:g}: {_describe(outcome)}")
            break
    backward = True
    if cut_nets_ok:
        wide = family_eps_net_hend(U, back_radius, budget)
        if not wide.succeeded:
            backward = False
            witnesses.append(f"backward: family net at {back_radius:g}: {_describe(wide)}")

    logger.info("tb_audit forward: family net %s, cut nets %s", family_net.succeeded, cut_nets_ok)
    if not (forward and backward):
        logger.warning("tb_audit implication failed: %s", "; ".join(witnesses))
    return TbAuditReport(
        eps=eps,
        backward_radius=back_radius,
        family_net_ok=family_net.succeeded,
        family_net_size=len(family_net.centers) if family_net.succeeded else None,
        cut_nets_ok=cut_nets_ok,
        forward_holds=forward,
        backward_holds=backward,
        witnesses=tuple(witnesses),
    )


def kx_tb_audit(D: Sequence[GroundSet], eps: float, budget: int = config.DEFAULT_BUDGET) -> TbAuditReport:
    """
    Both directions of "D totally bounded under H iff the union of D is totally
    bounded": a family eps-net gives a 2 eps-net of the union, and an eps-net
    of the union gives a family net at 3 eps.
    """
    for i, A in enumerate(D):
        if not is_bounded(A):
            raise DomainError(f"set {i} is unbounded, so not compact")
    if D:
        for A in D[1:]:
            require_same_space(D[0].space, A.space)
    witnesses: list[str] = []
    union = union_all(D[0].space, D) if D else None

    family_net = _hausdorff_family_net(D, eps, budget)
    forward = True
    if family_net.succeeded and union is not None:
        outcome = greedy_eps_net(union, 2 * eps, budget)
        if not outcome.succeeded:
            forward = False
            witnesses.append(f"forward: union at radius {2 * eps:g}: {_describe(outcome)}")
    elif not family_net.succeeded:
        witnesses.append(f"family net at {eps:g}: {_describe(family_net)}")

    union_ok = union is None or greedy_eps_net(union, eps, budget).succeeded
    backward = True
    if union_ok:
        wide = _hausdorff_family_net(D, 3 * eps, budget)
        if not wide.succeeded:
            backward = False
            witnesses.append(f"backward: family net at {3 * eps:g}: {_describe(wide)}")
    else:
        witnesses.append(f"union net at {eps:g} failed")
    logger.info("kx_tb_audit: family net %s, union net %s", family_net.succeeded, union_ok)
    return TbAuditReport(
        eps=eps,
        backward_radius=3 * eps,
        family_net_ok=family_net.succeeded,
        family_net_size=len(family_net.centers) if family_net.succeeded else None,
        cut_nets_ok=union_ok,
        forward_holds=forward,
        backward_holds=backward,
        witnesses=tuple(witnesses),
    )


class ChiTransferReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    eps: float
    pairs_checked: int
    max_identity_error: float
    max_semi_identity_error: float = 0.0
    identity_holds: bool
    nets_compared: bool
    nets_agree: bool

    @property
    def passed(self) -> bool:
        return self.identity_holds and self.nets_agree


def chi_transfer_audit(D: Sequence[GroundSet], eps: float, budget: int = config.DEFAULT_BUDGET) -> ChiTransferReport:
    """
    H_end(chi_A, chi_B) = min(H(A, B), 1) on every pair, the one-sided
    H*(end chi_A, end chi_B) = min(H*(A, B), 1) in both orders, and matching
    family nets for eps < 1.
    """
    chis = [characteristic(A) for A in D]
    ends = [endograph(u) for u in chis]
    worst = 0.0
    semi_worst = 0.0
    pairs = 0
    for i in range(len(D)):
        for j in range(i + 1, len(D)):
            expected = min(hausdorff(D[i], D[j]), 1.0)
            actual = endograph_dist(ProductMetricVariant.SUM, chis[i], chis[j])
            worst = max(worst, abs(expected - actual))
            for a, b in ((i, j), (j, i)):
                one_sided = min(semi_hausdorff(D[a], D[b]), 1.0)
                semi_worst = max(semi_worst, abs(one_sided - slab_semi_hausdorff(ends[a], ends[b])))
            pairs += 1
    compared = eps < 1
    agree = True
    if compared:
        plain = _hausdorff_family_net(D, eps, budget)
        lifted = family_eps_net_hend(FuzzyFamily(space=D[0].space, members=tuple(chis)), eps, budget) if D else plain
        agree = plain.succeeded == lifted.succeeded and plain.centers == lifted.centers
    holds = max(worst, semi_worst) <= config.FLOAT_TOLERANCE
    if not holds:
        logger.warning("chi identity off by %g (one-sided %g)", worst, semi_worst)
    return ChiTransferReport(
        eps=eps, pairs_checked=pairs, max_identity_error=worst, max_semi_identity_error=semi_worst,
        identity_holds=holds,
        nets_compared=compared, nets_agree=agree,
    )


# ── Diagonal extraction ────────────────────────────────────────────


class DiagonalSchedule(BaseModel):
    """Level floor xi, strictly decreasing levels alpha_k <= min(xi, 1/k) and target residuals eps_k."""
    model_config = ConfigDict(frozen=True)

    xi: float = Field(..., gt=0.0, le=1.0)
    alphas: tuple[float, ...]
    epsilons: tuple[float, ...]
    net_budget: int = Field(default=config.DEFAULT_BUDGET, ge=1)

    @model_validator(mode="after")
    def check_schedule(self) -> "DiagonalSchedule":
        if not self.alphas:
            raise ValueError("a schedule needs at least one stage")
        if len(self.alphas) != len(self.epsilons):
            raise ValueError("one residual target per stage is required")
        for k, a in enumerate(self.alphas, start=1):
            if not 0 < a <= min(self.xi, 1 / k):
                raise ValueError(f"alpha_{k} = {a} must lie in (0, min(xi, 1/{k})]")
        for a, b in zip(self.alphas, self.alphas[1:]):
            if not b < a:
                raise ValueError("levels must be strictly decreasing")
        if any(not e > 0 for e in self.epsilons):
            raise ValueError("residual targets must be positive")
        return self

    @classmethod
    def geometric(cls, stages: int, xi: float = 1.0, net_budget: int = config.DEFAULT_BUDGET) -> "DiagonalSchedule":
        """alpha_k = xi / 2^k, eps_k = 1 / 2^k."""
        return cls(
            xi=xi,
            alphas=tuple(xi / 2**k for k in range(1, stages + 1)),
            epsilons=tuple(1 / 2**k for k in range(1, stages + 1)),
            net_budget=net_budget,
        )

    @property
    def stages(self) -> int:
        return len(self.alphas)


class StageRecord(BaseModel):
    model_config = ConfigDict(frozen=True)

    stage: int
    alpha: float
    eps: float
    pool_size: int
    representative: int
    diagonal_index: int
    residual: float
    monotonicity_defect: float


class StageFailure(BaseModel):
    model_config = ConfigDict(frozen=True)

    stage: int
    kind: Literal["cut-net", "family-net"]
    index: int
    detail: str


class ExtractionResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    diagonal_indices: tuple[int, ...] = ()
    subsequence_indices: tuple[int, ...] = ()
    stages: tuple[StageRecord, ...] = ()
    stage_limits: tuple[SlabSet, ...] = ()
    limit: Optional[SlabSet] = None
    final_residuals: tuple[float, ...] = ()
    bounds: tuple[float, ...] = ()
    failure: Optional[StageFailure] = None

    @property
    def succeeded(self) -> bool:
        return self.failure is None

    @property
    def bounds_hold(self) -> bool:
        return all(r <= b + config.FLOAT_TOLERANCE for r, b in zip(self.final_residuals, self.bounds))


def diagonal_extract(w: FuzzySeqWindow, sched: DiagonalSchedule) -> ExtractionResult:
    """
    Staged pigeonhole extraction. Stage k nets the truncated endographs
    end_{alpha_k} of the current pool at eps_k, keeps the largest cluster
    (first center on ties), and takes its center as v^k. The k-th member of
    the stage-k pool joins the diagonal. The surviving pool is a subsequence
    of every earlier pool, so v^k is estimated as end_{alpha_k} of the last
    center. The limit v is the downward union of the v^k with X x {0}, and
    each stage reports how far its own center sits from v.

    Raises BudgetError when a stage leaves fewer than k members.
    """
    pool = [n for n, _ in w.tail()]
    for n in pool:
        if height(w.members[n - 1]) < sched.xi:
            raise DomainError(f"member {n} has height {height(w.members[n - 1])} below xi = {sched.xi}")

    records: list[StageRecord] = []
    diagonal: list[int] = []
    stage_centers: list[SlabSet] = []
    representative = None
    for k, (alpha, eps) in enumerate(zip(sched.alphas, sched.epsilons), start=1):
        for n in pool:
            outcome = greedy_eps_net(cut(w.members[n - 1], alpha), eps, sched.net_budget)
            if not outcome.succeeded:
                logger.info("extraction stage %d: cut of member %d not totally bounded", k, n)
                return ExtractionResult(
                    diagonal_indices=tuple(diagonal), stages=tuple(records),
                    failure=StageFailure(stage=k, kind="cut-net", index=n, detail=_describe(outcome)),
                )
        truncs = {n: truncated_endograph(w.members[n - 1], alpha) for n in pool}
        distance = _DistanceCache(lambda i, j: slab_hausdorff(truncs[i], truncs[j]))
        net = greedy_index_net(pool, distance, eps, sched.net_budget)
        if not net.succeeded:
            logger.info("extraction stage %d: truncated endographs admit no %g-net", k, eps)
            return ExtractionResult(
                diagonal_indices=tuple(diagonal), stages=tuple(records),
                failure=StageFailure(stage=k, kind="family-net", index=net.index, detail=_describe(net)),
            )
        clusters: dict[int, list[int]] = {c: [] for c in net.centers}
        for n in pool:
            nearest = min(net.centers, key=lambda c: distance(c, n))
            clusters[nearest].append(n)
        center = max(net.centers, key=lambda c: len(clusters[c]))
        pool = clusters[center]
        if len(pool) < k:
            raise BudgetError(f"stage {k} kept {len(pool)} members, fewer than {k}", stage=k)
        representative = w.members[center - 1]
        stage_centers.append(truncs[center])
        member = pool[k - 1]
        diagonal.append(member)
        residual = distance(member, center)
        logger.debug("stage %d: alpha=%g eps=%g pool=%d center=%d residual=%g", k, alpha, eps, len(pool), center, residual)
        records.append(StageRecord(
            stage=k, alpha=alpha, eps=eps, pool_size=len(pool), representative=center,
            diagonal_index=member, residual=residual, monotonicity_defect=0.0,
        ))

    stage_limits = tuple(truncated_endograph(representative, alpha) for alpha in sched.alphas)
    limit = downward_union(w.space, stage_limits)
    records = [
        r.model_copy(update={"monotonicity_defect": slab_semi_hausdorff(c_k, limit)})
        for r, c_k in zip(records, stage_centers)
    ]
    limit_fuzzy = reconstruct(limit)
    finals = tuple(endograph_dist(ProductMetricVariant.SUM, w.members[n - 1], limit_fuzzy) for n in diagonal)
    bounds = tuple(max(a, 3 * e) for a, e in zip(sched.alphas, sched.epsilons))
    result = ExtractionResult(
        diagonal_indices=tuple(diagonal),
        subsequence_indices=tuple(pool),
        stages=tuple(records),
        stage_limits=stage_limits,
        limit=limit,
        final_residuals=finals,
        bounds=bounds,
    )
    if not result.bounds_hold:
        logger.warning("extraction residuals %s exceed bounds %s", finals, bounds)
    logger.info("extraction finished: diagonal %s, last residual %g", diagonal, finals[-1])
    return result


# ── Closedness and restricted-height audits ────────────────────────


class ClosednessReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    verdict: Literal["pass", "fail", "inconclusive"]
    eps: float
    residual: Optional[float] = None
    nearest_member: Optional[int] = None
    gap: Optional[float] = None
    detail: str = ""


def closedness_probe(
    U: FuzzyFamily,
    w: FuzzySeqWindow,
    eps: float,
    sched: Optional[DiagonalSchedule] = None,
) -> ClosednessReport:
    """
    Extract a limit candidate from the window; when its residual is at most
    eps, some member of U outside the window must lie within 2 eps of it
    (a constant final pool is its own limit).
    """
    tail = [u for _, u in w.tail()]
    if all(same_endograph(tail[0], u) for u in tail[1:]):
        return ClosednessReport(verdict="pass", eps=eps, residual=0.0, detail="window tail is constant")
    if sched is None:
        stages = max(1, math.ceil(math.log2(3 / eps)))
        xi = min(height(u) for u in tail)
        if xi <= 0:
            return ClosednessReport(verdict="inconclusive", eps=eps, detail="window reaches the empty fuzzy set")
        sched = DiagonalSchedule.geometric(stages, xi=min(xi, 1.0))
    try:
        result = diagonal_extract(w, sched)
    except BudgetError as e:
        return ClosednessReport(verdict="inconclusive", eps=eps, detail=e.detail)
    if not result.succeeded:
        return ClosednessReport(verdict="inconclusive", eps=eps, detail=result.failure.detail)
    residual = result.final_residuals[-1]
    if residual > eps:
        return ClosednessReport(verdict="inconclusive", eps=eps, residual=residual, detail="limit candidate not reached")

    candidate = reconstruct(result.limit)
    pool = [w.members[n - 1] for n in result.subsequence_indices]
    if all(same_endograph(pool[0], u) for u in pool[1:]):
        return ClosednessReport(verdict="pass", eps=eps, residual=residual, detail="final pool is constant")

    outside = [
        i for i, m in enumerate(U.members)
        if not any(same_endograph(m, u) for u in w.members)
    ]
    gaps = [(endograph_dist(ProductMetricVariant.SUM, candidate, U.members[i]), i) for i in outside]
    if not gaps:
        return ClosednessReport(verdict="fail", eps=eps, residual=residual, detail="no member of U outside the window")
    gap, nearest = min(gaps)
    verdict = "pass" if gap <= 2 * eps else "fail"
    logger.info("closedness probe: nearest member %d at %g (%s)", nearest, gap, verdict)
    return ClosednessReport(verdict=verdict, eps=eps, residual=residual, nearest_member=nearest, gap=gap)


class RestrictedHeightReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    height: float
    high_unions_empty: bool
    full: TbAuditReport
    restricted: TbAuditReport

    @property
    def verdicts_equal(self) -> bool:
        return self.full.passed == self.restricted.passed and self.full.cut_nets_ok == self.restricted.cut_nets_ok

    @property
    def passed(self) -> bool:
        return self.high_unions_empty and self.verdicts_equal


def fr_restrict_audit(
    U: FuzzyFamily,
    eps: float,
    alpha_grid: Sequence[float],
    budget: int = config.DEFAULT_BUDGET,
) -> RestrictedHeightReport:
    """For a family of height exactly r, unions above r are empty and the tb audit only needs (0, r]."""
    r = U.check_height_tag()
    above = [a for a in alpha_grid if r < a <= 1] + ([(r + 1) / 2] if r < 1 else [])
    empty_above = all(family_union(U, a).is_empty for a in above)
    full = tb_audit(U, eps, alpha_grid, budget)
    restricted = tb_audit(U, eps, [a for a in alpha_grid if a <= r], budget)
    return RestrictedHeightReport(height=r, high_unions_empty=empty_above, full=full, restricted=restricted)


class ChiLimitReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    eps: float
    distances: tuple[float, ...]
    hypothesis_met: bool
    limit_height: float
    cut_spread: float
    set_distance: float
    singletons: bool
    limit_diameter: Optional[float] = None
    limit_point: Optional[Point] = None
    point_distance: Optional[float] = None

    @property
    def holds(self) -> bool:
        if not self.hypothesis_met:
            return True
        tol = config.FLOAT_TOLERANCE
        ok = self.limit_height >= 1 - self.eps - tol and self.cut_spread <= 2 * self.eps + tol
        ok = ok and self.set_distance <= self.eps + tol
        if self.singletons:
            ok = ok and self.limit_diameter is not None and self.limit_diameter <= 2 * self.eps + tol
            ok = ok and self.point_distance is not None and self.point_distance <= self.eps + tol
        return ok


def chi_limit_audit(w: FuzzySeqWindow, u: StepFuzzySet, eps: float) -> ChiLimitReport:
    """
    A tail of characteristic functions chi_{A_n} within eps < 1/2 of u under
    H_end forces u to look like a characteristic function: S_u >= 1 - eps,
    the cuts of u over (eps, 1 - eps] lie within 2 eps of each other and
    within eps of every A_n. When every A_n is a singleton {x_n} the top cut
    has diameter at most 2 eps and any of its points x has d(x_n, x) <= eps.
    """
    require_same_space(w.space, u.space)
    if not 0 < eps < 0.5:
        raise DomainError(f"chi limit audit needs 0 < eps < 1/2, got {eps}")
    tail = w.tail()
    for n, un in tail:
        if un.levels != (1.0,):
            raise DomainError(f"member {n} is not the characteristic function of a nonempty set")
    sets = [cut(un, 1.0) for _, un in tail]
    distances = tuple(endograph_dist(ProductMetricVariant.SUM, un, u) for _, un in tail)
    hypothesis = all(d <= eps + config.FLOAT_TOLERANCE for d in distances)

    checked_levels = sorted({1 - eps, *(a for a in u.levels if eps < a < 1 - eps)})
    cuts = [cut(u, a) for a in checked_levels]
    spread = max((hausdorff(c, d) for c in cuts for d in cuts), default=0.0)
    set_distance = max((hausdorff(A, c) for A in sets for c in cuts), default=0.0)
    singletons = all(A.kind == "points" and len(A.points) == 1 for A in sets)

    top = cut(u, 1 - eps)
    top_diameter = diameter(top) if singletons else None
    x, x_distance = None, None
    if top_diameter is not None and not top.is_empty and math.isfinite(top_diameter):
        x = representatives(top, eps)[0]
        x_distance = max(dist(w.space, A.points[0], x) for A in sets)
    logger.info("chi limit audit: max H_end %g, cut spread %g, set distance %g", max(distances), spread, set_distance)
    return ChiLimitReport(
        eps=eps, distances=distances, hypothesis_met=hypothesis, limit_height=height(u),
        cut_spread=spread, set_distance=set_distance, singletons=singletons,
        limit_diameter=top_diameter, limit_point=x, point_distance=x_distance,
    )


class HeightSliceReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    r: float
    eps: float
    distances: tuple[float, ...]
    hypothesis_met: bool
    limit_height: float
    top_cut_attained: bool
    limit_is_uscg: bool

    @property
    def heights_close(self) -> bool:
        return abs(self.limit_height - self.r) <= max(self.distances) + config.FLOAT_TOLERANCE

    @property
    def holds(self) -> bool:
        """The height slice is closed: near limits keep the height."""
        return not self.hypothesis_met or self.heights_close

    @property
    def stays_in_slice(self) -> bool:
        """The limit also attains its height, as it must when it is USCG."""
        return self.heights_close and self.top_cut_attained


def height_slice_audit(
    w: FuzzySeqWindow,
    u: StepFuzzySet,
    eps: float,
    puncture: Optional[Point] = None,
) -> HeightSliceReport:
    """
    Members of height exactly r within eps of u on the tail. |S_u - r| is
    bounded by the distances, so the slice of height r is closed. With
    puncture the space is read as X minus that point: a limit whose top cut
    is only the puncture has height r without attaining it.
    """
    require_same_space(w.space, u.space)
    tail = w.tail()
    r = height(tail[0][1])
    for n, un in tail:
        if abs(height(un) - r) > config.FLOAT_TOLERANCE:
            raise DomainError(f"member {n} has height {height(un)}, not {r}")
    distances = tuple(endograph_dist(ProductMetricVariant.SUM, un, u) for _, un in tail)
    hypothesis = all(d <= eps + config.FLOAT_TOLERANCE for d in distances)
    top = cut(u, height(u)) if not u.is_empty else GroundSet.empty(u.space)
    attained = not top.is_empty
    if attained and puncture is not None and top.kind != "full":
        attained = set(representatives(top, 1.0)) != {u.space.canonical(puncture)}
    classes = classify(u)
    logger.info("height slice audit at r=%g: S_u=%g, attained %s", r, height(u), attained)
    return HeightSliceReport(
        r=r, eps=eps, distances=distances, hypothesis_met=hypothesis, limit_height=height(u),
        top_cut_attained=attained, limit_is_uscg=classes.is_uscg,
    )


class HendGammaCompactReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    eps: float
    hend_tail: bool
    gamma: bool
    cut_unions_bounded: bool
    hend_tail_at_4eps: bool
    forward_holds: bool
    converse_holds: bool

    @property
    def passed(self) -> bool:
        return self.forward_holds and self.converse_holds


def hend_iff_gamma_plus_compact_audit(
    w: FuzzySeqWindow,
    u: StepFuzzySet,
    eps: float,
    alpha_grid: Sequence[float],
    budget: int = config.DEFAULT_BUDGET,
) -> HendGammaCompactReport:
    """
    A: H_end(u_n, u) <= eps on the tail
    B: the Gamma check passes at 2 eps
    C: the tail's cut unions admit eps/4-nets along the grid
    Checks A => B and C, and (B and C) => A at 4 eps.
    """
    tail = [un for _, un in w.tail()]
    _require_uscg(tail)
    distances = [endograph_dist(ProductMetricVariant.SUM, un, u) for un in tail]
    a = all(d <= eps + config.FLOAT_TOLERANCE for d in distances)
    a4 = all(d <= 4 * eps + config.FLOAT_TOLERANCE for d in distances)
    b = gamma_limit_check(w, u, 2 * eps).passed
    c = True
    for alpha in alpha_grid:
        if not 0 < alpha <= 1:
            continue
        union = union_all(w.space, [cut(un, alpha) for un in tail])
        if not greedy_eps_net(union, eps / 4, budget).succeeded:
            c = False
            break
    forward = (not a) or (b and c)
    converse = (not (b and c)) or a4
    logger.info("H_end/Gamma/compact audit: A=%s B=%s C=%s", a, b, c)
    if not (forward and converse):
        logger.warning("H_end iff Gamma + compact violated: A=%s B=%s C=%s A(4eps)=%s", a, b, c, a4)
    return HendGammaCompactReport(
        eps=eps, hend_tail=a, gamma=b, cut_unions_bounded=c, hend_tail_at_4eps=a4,
        forward_holds=forward, converse_holds=converse,
    )
