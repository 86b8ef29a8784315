import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fuzzymetric.endograph import (
    EndographView,
    Slab,
    SlabSet,
    cut_bound_check,
    distance_matrix,
    downward_union,
    endograph,
    endograph_dist,
    endograph_semi,
    is_p_usc,
    is_p_uscb,
    point_to_endograph,
    reconstruct,
    same_slab_set,
    sendograph,
    slab_height,
    slab_semi_hausdorff,
    slice_at,
    truncated_endograph,
)
from fuzzymetric.exceptions import DomainError
from fuzzymetric.fuzzy_sets import empty_fuzzy_set, height, same_endograph
from fuzzymetric.ground_sets import GroundSet, hausdorff, same_set
from fuzzymetric.metric_core import LiftedPoint, ProductMetricVariant
from tests.factories import LINE, PLANE, chi, ivs, line_sets, plane_sets, pts, random_fuzzy, step
from tests.oracles import sampled_endograph_dist

SUM, MAX = ProductMetricVariant.SUM, ProductMetricVariant.MAX


@pytest.fixture
def tent():
    return step(LINE, (0.5, ivs((0.0, 2.0))), (1.0, ivs((0.0, 1.0))))

# ========== VIEW TESTS ==========

def test_endograph_slices(tent):
    """Test that slices of end u are the cuts, with the whole line at level 0."""
    E = endograph(tent)
    assert same_set(slice_at(E, 0.0), GroundSet.full(LINE))
    assert same_set(slice_at(E, 0.25), ivs((0.0, 2.0)))
    assert same_set(slice_at(E, 0.5), ivs((0.0, 2.0)))
    assert same_set(slice_at(E, 0.75), ivs((0.0, 1.0)))
    assert slab_height(E) == 1.0


def test_sendograph_base_is_the_support(tent):
    S = sendograph(tent)
    assert same_set(slice_at(S, 0.0), ivs((0.0, 2.0)))
    assert sendograph(empty_fuzzy_set(LINE)).is_empty


def test_truncated_endograph(tent):
    T = truncated_endograph(tent, 0.25, 0.75)
    assert slice_at(T, 0.1).is_empty
    assert same_set(slice_at(T, 0.25), ivs((0.0, 2.0)))
    assert same_set(slice_at(T, 0.75), ivs((0.0, 1.0)))
    assert slice_at(T, 0.9).is_empty
    assert slab_height(T) == 0.75


def test_truncation_above_the_height_is_empty():
    assert truncated_endograph(step(LINE, (0.5, pts(LINE, 0.0))), 0.75).is_empty
    with pytest.raises(DomainError):
        truncated_endograph(chi(pts(LINE, 0.0)), 0.8, 0.5)


def test_endograph_view(tent):
    view = EndographView(source=tent, kind="truncated", r=0.5)
    assert same_slab_set(view.slab_set(), truncated_endograph(tent, 0.5))
    assert slab_height(EndographView(source=tent)) == 1.0
    with pytest.raises(ValueError):
        EndographView(source=tent, kind="truncated", r=0.8, t=0.5)


def test_slab_validation():
    with pytest.raises(ValueError):
        Slab(lower=0.5, upper=0.5, body=pts(LINE, 0.0))
    with pytest.raises(ValueError):
        SlabSet(space=LINE, slabs=(
            Slab(lower=0.0, upper=0.5, body=pts(LINE, 0.0)),
            Slab(lower=0.25, upper=1.0, body=pts(LINE, 0.0)),
        ))

# ========== P_USC TESTS ==========

def _growing_slabs() -> SlabSet:
    return SlabSet(space=LINE, slabs=(
        Slab(lower=0.0, upper=0.0, body=GroundSet.full(LINE), closed_below=True),
        Slab(lower=0.0, upper=0.5, body=ivs((0.0, 1.0))),
        Slab(lower=0.5, upper=1.0, body=ivs((0.0, 2.0))),
    ))


def test_growing_slices_are_not_p_usc():
    """Test that a slice larger than the slice below fails and cannot be reconstructed."""
    S = _growing_slabs()
    assert not is_p_usc(S)
    with pytest.raises(DomainError):
        reconstruct(S)


def test_p_uscb(tent):
    assert is_p_uscb(sendograph(tent))
    assert not is_p_uscb(endograph(tent))


def test_reconstruct_known_set(tent):
    assert same_endograph(reconstruct(endograph(tent)), tent)
    assert reconstruct(endograph(empty_fuzzy_set(LINE))).is_empty


@given(random_fuzzy())
def test_reconstruct_round_trip(u):
    """Test that end, send and reconstruct are mutually inverse on step fuzzy sets."""
    assert is_p_usc(endograph(u))
    assert same_endograph(reconstruct(endograph(u)), u)
    assert same_endograph(reconstruct(sendograph(u)), u)


def test_downward_union_of_truncations():
    """Test that the union keeps each part and extends the lowest slices down to level 0."""
    high = truncated_endograph(chi(ivs((0.0, 1.0))), 0.5)
    low = truncated_endograph(step(LINE, (0.25, ivs((2.0, 3.0)))), 0.25)
    U = downward_union(LINE, [high, low])
    assert is_p_usc(U)
    assert slab_height(U) == 1.0
    assert same_set(slice_at(U, 0.1), ivs((0.0, 1.0), (2.0, 3.0)))
    assert same_set(slice_at(U, 0.3), ivs((0.0, 1.0)))
    assert same_set(slice_at(U, 0.75), ivs((0.0, 1.0)))
    assert slice_at(U, 0.0) == GroundSet.full(LINE)


def test_downward_union_repairs_growing_slices():
    U = downward_union(LINE, [_growing_slabs()])
    assert is_p_usc(U)
    assert same_endograph(reconstruct(U), chi(ivs((0.0, 2.0))))


def test_downward_union_of_nothing():
    assert slab_height(downward_union(LINE, [])) == 0.0
    assert slab_height(downward_union(LINE, [truncated_endograph(empty_fuzzy_set(LINE), 0.5)])) == 0.0


@given(random_fuzzy(), random_fuzzy())
def test_downward_union_contains_its_parts(u, v):
    U = downward_union(LINE, [endograph(u), endograph(v)])
    assert is_p_usc(U)
    assert slab_semi_hausdorff(endograph(u), U) == pytest.approx(0.0, abs=1e-9)
    assert slab_semi_hausdorff(endograph(v), U) == pytest.approx(0.0, abs=1e-9)

# ========== DISTANCE TESTS ==========

def test_point_to_endograph():
    u = chi(pts(LINE, 0.0))
    assert point_to_endograph(SUM, LiftedPoint(space=LINE, x=3.0, t=0.5), u) == pytest.approx(0.5)
    assert point_to_endograph(SUM, LiftedPoint(space=LINE, x=0.2, t=1.0), u) == pytest.approx(0.2)
    assert point_to_endograph(MAX, LiftedPoint(space=LINE, x=0.2, t=1.0), u) == pytest.approx(0.2)


@pytest.mark.parametrize("a, b, expected", [
    (0.0, 3.0, 1.0),
    (0.0, 0.3, 0.3),
    (0.0, 0.0, 0.0),
])
def test_characteristic_distances(a, b, expected):
    """H_end of two point characteristics is their distance capped at 1."""
    u, v = chi(pts(LINE, a)), chi(pts(LINE, b))
    assert endograph_dist(SUM, u, v) == pytest.approx(expected)
    assert endograph_dist(MAX, u, v) == pytest.approx(expected)


def test_distance_to_empty_fuzzy_set_is_the_height(tent):
    half = step(LINE, (0.5, ivs((0.0, 1.0))))
    empty = empty_fuzzy_set(LINE)
    assert endograph_dist(SUM, half, empty) == pytest.approx(0.5)
    assert endograph_semi(SUM, empty, tent) == 0.0


def test_unbounded_cuts_stay_finite():
    u = chi(ivs((0.0, math.inf)))
    v = chi(ivs((1.0, math.inf)))
    assert endograph_dist(SUM, u, v) == pytest.approx(1.0)


def test_plane_distances():
    u = chi(pts(PLANE, (0.0, 0.0)))
    v = chi(pts(PLANE, (0.3, 0.4)))
    assert endograph_dist(SUM, u, v) == pytest.approx(0.5)
    assert endograph_dist(SUM, u, chi(GroundSet.full(PLANE))) == pytest.approx(1.0)


def test_cloud_distances(cloud):
    u = step(cloud, (0.5, pts(cloud, "a", "b")), (1.0, pts(cloud, "a")))
    v = chi(pts(cloud, "b"))
    # corner (a, 1) is 1 from (b, 1), corner (b, 0.5) is inside end v
    assert endograph_dist(SUM, u, v) == pytest.approx(1.0)


def test_non_monotone_target_rejected():
    with pytest.raises(DomainError):
        slab_semi_hausdorff(endograph(chi(pts(LINE, 0.0))), _growing_slabs())


def test_distance_matrix():
    members = [chi(pts(LINE, x)) for x in (0.0, 0.5, 3.0)]
    matrix = distance_matrix(SUM, members)
    assert matrix.shape == (3, 3)
    assert matrix[0, 1] == pytest.approx(0.5)
    assert matrix[1, 0] == matrix[0, 1]
    assert matrix[0, 2] == pytest.approx(1.0)
    assert matrix[2, 2] == 0.0


@given(st.one_of(line_sets(), plane_sets()).flatmap(lambda A: st.tuples(
    st.just(A), plane_sets() if A.space == PLANE else line_sets(),
)))
def test_characteristic_identity(pair):
    """H_end(chi_A, chi_B) = min(H(A, B), 1)."""
    A, B = pair
    expected = min(hausdorff(A, B), 1.0)
    assert abs(endograph_dist(SUM, chi(A), chi(B)) - expected) <= 1e-12


@given(random_fuzzy(), random_fuzzy())
def test_sum_and_max_sandwich(u, v):
    """H'_end <= H_end <= 2 H'_end."""
    d_max = endograph_dist(MAX, u, v)
    d_sum = endograph_dist(SUM, u, v)
    assert d_max <= d_sum + 1e-9
    assert d_sum <= 2 * d_max + 1e-9


@given(random_fuzzy(), random_fuzzy())
def test_height_bounds(u, v):
    """|S_u - S_v| <= H_end(u, v) <= max(S_u, S_v)."""
    d = endograph_dist(SUM, u, v)
    assert abs(height(u) - height(v)) <= d + 1e-9
    assert d <= max(height(u), height(v)) + 1e-9


@given(random_fuzzy(PLANE), random_fuzzy(PLANE), random_fuzzy(PLANE))
def test_triangle_inequality_in_the_plane(u, v, w):
    assert endograph_dist(SUM, u, w) <= endograph_dist(SUM, u, v) + endograph_dist(SUM, v, w) + 1e-9


@settings(max_examples=100)
@given(random_fuzzy(), random_fuzzy())
def test_agrees_with_sampled_endographs(u, v):
    """The exact kernels match a dense sample of both endographs."""
    h = 0.01
    exact_sum = endograph_dist(SUM, u, v)
    exact_max = endograph_dist(MAX, u, v)
    assert abs(exact_sum - sampled_endograph_dist(u, v, h, p=1)) <= 2 * h
    assert abs(exact_max - sampled_endograph_dist(u, v, h, p=math.inf)) <= 2 * h


@pytest.mark.parametrize("u, v", [
    (chi(pts(LINE, 0.0)), chi(pts(LINE, 0.3))),
    (step(LINE, (0.5, pts(LINE, 0.0, 1.0)), (1.0, pts(LINE, 0.0))), chi(pts(LINE, 0.25))),
    (step(LINE, (0.25, pts(LINE, -0.5, 0.5)), (0.75, pts(LINE, 0.5))), step(LINE, (0.6, pts(LINE, 0.1)))),
])
def test_agrees_with_fine_samples(u, v):
    h = 1e-3
    assert abs(endograph_dist(SUM, u, v) - sampled_endograph_dist(u, v, h, p=1)) <= 2 * h
    assert abs(endograph_dist(MAX, u, v) - sampled_endograph_dist(u, v, h, p=math.inf)) <= 2 * h

# ========== CUT BOUND TESTS ==========

def test_cut_bound_on_nearby_sets():
    u = chi(ivs((0.0, 1.0)))
    v = chi(ivs((0.0, 1.1)))
    report = cut_bound_check(v, u, alpha=1.0, beta=0.5, eps=0.5)
    assert report.hypothesis_met
    assert report.holds
    assert report.cut_semi == pytest.approx(0.1)
    assert report.endograph_semi == pytest.approx(0.1)


def test_cut_bound_needs_separated_levels(tent):
    with pytest.raises(DomainError):
        cut_bound_check(tent, tent, alpha=0.5, beta=0.4, eps=0.2)
    with pytest.raises(DomainError):
        cut_bound_check(tent, tent, alpha=0.5, beta=0.0, eps=0.0)


@given(random_fuzzy(), random_fuzzy(), st.sampled_from([(1.0, 0.5), (0.75, 0.25), (0.5, 0.0)]))
def test_cut_bound_holds(u, v, levels):
    alpha, beta = levels
    assert cut_bound_check(u, v, alpha, beta, eps=alpha - beta).holds
