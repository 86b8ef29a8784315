import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fuzzymetric.exceptions import DomainError
from fuzzymetric.ground_sets import (
    GroundSet,
    SetSequenceWindow,
    contains,
    greedy_eps_net,
    hausdorff,
    is_bounded,
    is_subset,
    kuratowski_converges,
    kuratowski_window,
    representatives,
    same_set,
    semi_hausdorff,
    suffix_blocks,
    union_all,
)
from tests.factories import LINE, PLANE, interval_unions, ivs, line_sets, point_sets, pts
from tests.oracles import minimal_net_size, sampled_hausdorff

INF = math.inf

# ========== CONSTRUCTION TESTS ==========

def test_points_are_canonical_and_unique():
    """Test that duplicate points collapse and points come out sorted."""
    assert pts(LINE, 3, 1, 3).points == (1.0, 3.0)


def test_unknown_cloud_label(cloud):
    """Test that a label outside the cloud cannot be a member."""
    with pytest.raises(DomainError):
        pts(cloud, "a", "z")


def test_intervals_need_the_real_line(cloud):
    with pytest.raises(DomainError):
        GroundSet.from_intervals(cloud, [(0.0, 1.0)])


def test_empty_constructors():
    """Test that an empty point list or interval list is the empty set."""
    assert GroundSet.from_points(LINE, []).is_empty
    assert GroundSet.from_intervals(LINE, []).is_empty


def test_full_sets(cloud):
    """Test the whole space on each backend."""
    assert GroundSet.full(LINE).as_intervals()[0].lo == -INF
    assert GroundSet.full(cloud).points == ("a", "b", "c", "d")
    assert GroundSet.full(PLANE).kind == "full"
    assert str(GroundSet.full(PLANE)) == "X"


def test_set_str():
    assert str(ivs((0.0, 1.0), (2.0, 3.0))) == "[0, 1] u [2, 3]"
    assert str(GroundSet.empty(LINE)) == "{}"

# ========== SET ALGEBRA TESTS ==========

def test_contains_and_subset():
    A = ivs((0.0, 1.0), (3.0, 4.0))
    assert contains(A, 0.5)
    assert not contains(A, 2.0)
    assert is_subset(pts(LINE, 0.0, 3.5), A)
    assert not is_subset(ivs((0.0, 4.0)), A)
    assert is_subset(GroundSet.empty(LINE), A)


def test_union_and_same_set():
    """Test that unions merge touching intervals and absorb points."""
    U = union_all(LINE, [ivs((0.0, 1.0)), ivs((1.0, 2.0)), pts(LINE, 1.5)])
    assert same_set(U, ivs((0.0, 2.0)))
    assert union_all(LINE, []).is_empty


def test_union_with_full_plane():
    assert union_all(PLANE, [pts(PLANE, (0.0, 0.0)), GroundSet.full(PLANE)]).kind == "full"


def test_boundedness():
    assert is_bounded(ivs((0.0, 1.0)))
    assert not is_bounded(ivs((0.0, INF)))
    assert not is_bounded(GroundSet.full(PLANE))
    assert is_bounded(GroundSet.empty(LINE))


def test_representatives_include_endpoints():
    reps = representatives(ivs((0.0, 1.0)), 0.25)
    assert reps == [0.0, 0.25, 0.5, 0.75, 1.0]
    with pytest.raises(DomainError):
        representatives(GroundSet.full(PLANE), 0.5)

# ========== HAUSDORFF TESTS ==========

@pytest.mark.parametrize("A, B, expected", [
    (pts(LINE, 0.0), pts(LINE, 3.0), 3.0),
    (ivs((0.0, 1.0)), ivs((0.0, 2.0)), 1.0),
    (ivs((0.0, 1.0), (3.0, 4.0)), ivs((0.0, 4.0)), 1.0),
    (pts(LINE, 0.0, 1.0), ivs((0.0, 1.0)), 0.5),
    (ivs((-INF, 0.0)), ivs((-INF, 5.0)), 5.0),
])
def test_hausdorff_on_the_line(A, B, expected):
    """Test exact Hausdorff distances between point sets and interval unions."""
    assert hausdorff(A, B) == pytest.approx(expected)
    assert hausdorff(B, A) == pytest.approx(expected)


def test_semi_hausdorff_is_one_sided():
    assert semi_hausdorff(ivs((0.0, 1.0)), ivs((0.0, 2.0))) == 0.0
    assert semi_hausdorff(ivs((0.0, 2.0)), ivs((0.0, 1.0))) == pytest.approx(1.0)


def test_hausdorff_in_a_cloud(cloud):
    assert hausdorff(pts(cloud, "a"), pts(cloud, "c", "d")) == 3.0


def test_empty_set_conventions():
    """Test H*(empty, B) = 0 and H*(A, empty) = +inf."""
    empty = GroundSet.empty(LINE)
    A = pts(LINE, 1.0)
    assert semi_hausdorff(empty, A) == 0.0
    assert semi_hausdorff(A, empty) == INF
    assert hausdorff(empty, empty) == 0.0
    assert hausdorff(A, empty) == INF


def test_full_plane_conventions():
    full = GroundSet.full(PLANE)
    A = pts(PLANE, (0.0, 0.0))
    assert semi_hausdorff(full, A) == INF
    assert semi_hausdorff(A, full) == 0.0


def test_mixed_spaces_rejected(cloud):
    with pytest.raises(DomainError):
        hausdorff(pts(LINE, 0.0), pts(cloud, "a"))


@given(point_sets(), point_sets(), point_sets())
def test_hausdorff_triangle_inequality(A, B, C):
    assert hausdorff(A, C) <= hausdorff(A, B) + hausdorff(B, C) + 1e-9
    assert hausdorff(A, B) == hausdorff(B, A)

# ========== EPSILON-NET TESTS ==========

def test_greedy_net_on_points():
    """Test that the first uncovered point becomes the next center."""
    A = pts(LINE, 0.0, 0.1, 0.2, 1.0)
    net = greedy_eps_net(A, 0.15, budget=10)
    assert net.succeeded
    assert net.centers == (0.0, 0.2, 1.0)

    failure = greedy_eps_net(A, 0.15, budget=2)
    assert not failure.succeeded
    assert failure.reason == "budget"
    assert failure.point == 1.0


def test_greedy_net_on_intervals():
    net = greedy_eps_net(ivs((0.0, 1.0)), 0.25, budget=10)
    assert net.centers == (0.25, 0.75)

    failure = greedy_eps_net(ivs((0.0, 1.0)), 0.25, budget=1)
    assert failure.point == 0.75
    assert failure.centers == (0.25,)


@given(interval_unions(), st.sampled_from([0.25, 0.5]))
def test_greedy_interval_centers_are_separated_and_cover(A, eps):
    """Centers sit in A, more than eps apart, and every point of A lies within eps of one."""
    net = greedy_eps_net(A, eps, budget=200)
    assert net.succeeded
    assert all(contains(A, c) for c in net.centers)
    assert all(b - a > eps for a, b in zip(net.centers, net.centers[1:]))
    assert semi_hausdorff(A, pts(LINE, *net.centers)) <= eps + 1e-9


def test_greedy_net_on_unbounded_sets():
    """Test that unbounded sets fail with a witness at their finite end."""
    failure = greedy_eps_net(ivs((0.0, INF)), 0.5, budget=10)
    assert failure.reason == "unbounded"
    assert failure.point == 0.0
    assert greedy_eps_net(GroundSet.full(PLANE), 0.5, budget=10).reason == "unbounded"


def test_greedy_net_rejects_bad_arguments():
    with pytest.raises(DomainError):
        greedy_eps_net(pts(LINE, 0.0), 0.0, budget=1)
    with pytest.raises(DomainError):
        greedy_eps_net(pts(LINE, 0.0), 0.5, budget=0)


def test_empty_set_has_empty_net():
    assert greedy_eps_net(GroundSet.empty(LINE), 0.5, budget=1).centers == ()


@given(point_sets(max_size=6), st.sampled_from([0.25, 0.5, 1.0]))
def test_greedy_net_size_is_sandwiched(A, eps):
    """minimal(eps) <= greedy <= minimal(eps / 2)."""
    net = greedy_eps_net(A, eps, budget=100)
    assert minimal_net_size(A, eps) <= len(net.centers) <= minimal_net_size(A, eps / 2)

# ========== KURATOWSKI TESTS ==========

def test_suffix_blocks():
    assert suffix_blocks(1, 10) == [[1, 2, 3, 4], [5, 6, 7], [8, 9, 10]]
    assert suffix_blocks(3, 3) == [[3]]


def test_window_validation():
    with pytest.raises(ValueError):
        SetSequenceWindow(sets=())
    with pytest.raises(ValueError):
        SetSequenceWindow(sets=(pts(LINE, 0.0),), tail_start=2)


def test_shrinking_points_converge():
    """{1/n} converges to {0}; at a tighter tolerance the first tail index is the witness."""
    w = SetSequenceWindow(sets=tuple(pts(LINE, 1 / n) for n in range(1, 21)), tail_start=10)
    assert kuratowski_converges(w, pts(LINE, 0.0), 0.15).passed

    verdict = kuratowski_converges(w, pts(LINE, 0.0), 0.05)
    assert not verdict.passed
    assert verdict.witness_index == 10
    assert verdict.witness_point == 0.0


def test_oscillating_sets_have_limsup_without_liminf():
    w = SetSequenceWindow(sets=tuple(pts(LINE, 1.0 if n % 2 else 3.0) for n in range(1, 9)))
    result = kuratowski_window(w, 0.1, pts(LINE, 1.0, 3.0))
    assert result.probes == (1.0, 3.0)
    assert result.in_liminf == (False, False)
    assert result.in_limsup == (True, True)


def _shifted(A: GroundSet, delta: float) -> GroundSet:
    if A.intervals:
        return ivs(*[(iv.lo + delta, iv.hi + delta) for iv in A.intervals])
    return pts(LINE, *[x + delta for x in A.points])


@given(line_sets(), st.lists(st.integers(min_value=-4, max_value=4), min_size=1, max_size=12))
def test_hausdorff_convergence_gives_kuratowski_convergence(C, shifts):
    """Sets within eps of C in H Kuratowski-converge to C at 2 eps."""
    eps = 0.1
    w = SetSequenceWindow(sets=tuple(_shifted(C, k / 40) for k in shifts))
    assert all(hausdorff(S, C) <= eps + 1e-9 for S in w.sets)
    assert kuratowski_converges(w, C, 2 * eps).passed


@settings(max_examples=100)
@given(interval_unions(), interval_unions())
def test_hausdorff_agrees_with_samples(A, B):
    h = 0.01
    assert abs(hausdorff(A, B) - sampled_hausdorff(A, B, h)) <= h
