import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import ALPHA, qhm_ctx
from twistoid.bundle import (
    AffinePhase,
    BundleContext,
    BundlePoint,
    CyclicConstant,
    DomainError,
    Piece,
    TransitionFamily,
    canonical_index,
    canonicalize,
    cocycle_check,
    flip_identity_check,
    in_refined_chart,
    iter_indices,
    lattice_points,
    make_point,
    negative_power_closed,
    negative_power_composed,
    points_equivalent,
    refined_chart,
    tensor_families,
    transition_power,
)
from twistoid.heisenberg import nc_clutching_data, nc_cover, nc_overlap_components
from twistoid.torus import Cyclic, Phase, TorusPoint

F = Fraction
lattice_coord = st.integers(0, 47).map(lambda k: F(k, 48))
points = st.builds(lambda a, b: TorusPoint((a, b)), lattice_coord, lattice_coord)


def pt(x, y):
    return TorusPoint((F(x), F(y)))


def test_clutching_values_on_each_overlap_component():
    fam = nc_clutching_data(2)
    assert fam(1, 2, pt("1/2", "1/3")) == Phase(0)  # component A
    assert fam(1, 2, pt(0, "1/3")) == Phase(F(2, 3))  # component B: e(2y)
    assert fam(2, 1, pt(0, "1/3")) == Phase(F(1, 3))
    with pytest.raises(DomainError):
        fam(1, 2, pt("1/4", 0))  # only in chart 1


def test_trivial_clutching_data_is_identity():
    fam = nc_clutching_data(0)
    for x in lattice_points(16):
        for i in (1, 2):
            for j in (1, 2):
                if fam.cover.chart(i).contains(x) and fam.cover.chart(j).contains(x):
                    assert fam(i, j, x).is_identity()


def test_transition_pieces_cover_overlap_exactly():
    for c in (-2, 1, 3):
        assert nc_clutching_data(c).validate_pieces() == []


def test_overlap_components_partition_the_overlap():
    a, b = nc_overlap_components()
    cover = nc_cover()
    overlap = cover.chart(1).intersect(cover.chart(2))
    for x in lattice_points(48):
        assert overlap.contains(x) == (a.contains(x) or b.contains(x))
        assert not (a.contains(x) and b.contains(x))


@pytest.mark.parametrize("c", [-3, -1, 1, 2, 3])
def test_base_cocycle_conditions_exact(c):
    ctx = BundleContext(nc_clutching_data(c), ALPHA)
    report = cocycle_check(ctx, lattice_points(48), 1)
    assert report.ok and report.checked > 0


@pytest.mark.parametrize("n", [-3, -2, 2, 3])
def test_refined_cocycle_conditions(n):
    ctx = qhm_ctx(1)
    assert cocycle_check(ctx, lattice_points(12), n).ok


def test_transition_power_hand_values():
    # nc_clutching_data(-1): c_12 = 0 on A and -y on B; alpha = (1/2, 1/3)
    ctx = qhm_ctx(1)
    x = pt(0, "1/4")
    # level 2: c_12(x) + c_21(alpha x) = -1/4 + 0
    assert transition_power(ctx, 2, (1, 2), (2, 1), x) == Phase(F(3, 4))
    # level -2: -(c_12(alpha^-1 x) + c_21(alpha^-2 x)) = -(0 + 7/12)
    assert transition_power(ctx, -2, (1, 2), (2, 1), x) == Phase(F(5, 12))


def test_refined_chart_matches_membership():
    ctx = qhm_ctx(1)
    for n in (-2, 2):
        for idx in iter_indices(ctx, 2):
            region = refined_chart(ctx, n, idx)
            for x in lattice_points(24):
                assert region.contains(x) == in_refined_chart(ctx, n, idx, x)


def _pair(ctx, rng, n, x):
    valid = [i for i in iter_indices(ctx, abs(n)) if in_refined_chart(ctx, n, i, x)]
    return rng.choice(valid), rng.choice(valid)


@settings(max_examples=150, deadline=None)
@given(points, st.integers(1, 4), st.randoms(use_true_random=False))
def test_negative_power_closed_equals_composed(x, n, rng):
    ctx = qhm_ctx(2)
    i, j = _pair(ctx, rng, -n, x)
    assert negative_power_closed(ctx, i, j, x) == negative_power_composed(ctx, i, j, x)


@settings(max_examples=150, deadline=None)
@given(points, st.integers(-4, 4), st.randoms(use_true_random=False))
def test_flip_identity(x, n, rng):
    ctx = qhm_ctx(1)
    i, j = _pair(ctx, rng, n, x)
    assert flip_identity_check(ctx, n, i, j, x)


def test_canonical_index_is_least_valid():
    ctx = qhm_ctx(1)
    rng = random.Random(3)
    for _ in range(100):
        x = pt(F(rng.randrange(48), 48), F(rng.randrange(48), 48))
        n = rng.choice([-3, -1, 1, 2])
        valid = [i for i in iter_indices(ctx, abs(n)) if in_refined_chart(ctx, n, i, x)]
        assert canonical_index(ctx, n, x) == min(valid)


def test_canonicalize_preserves_class():
    ctx = qhm_ctx(1)
    x = pt(0, "1/4")
    p = make_point(ctx, Phase(F(1, 8)), x, (2, 1), 2)
    c = canonicalize(ctx, p)
    assert c.index == canonical_index(ctx, 2, x) != p.index
    assert points_equivalent(ctx, p, c) and points_equivalent(ctx, c, p)
    assert not points_equivalent(ctx, p, BundlePoint(c.g + Phase(F(1, 3)), x, c.index, 2))


def test_make_point_rejects_wrong_chart():
    ctx = qhm_ctx(1)
    with pytest.raises(DomainError):
        make_point(ctx, Phase(0), pt("1/4", 0), (2,), 1)
    with pytest.raises(ValueError):
        BundlePoint(Phase(0), pt(0, 0), (1,), 2)


def test_family_json_round_trip():
    fam = nc_clutching_data(3)
    again = TransitionFamily.from_json(fam.to_json())
    assert again == fam
    for x in lattice_points(16):
        if fam.cover.chart(1).contains(x) and fam.cover.chart(2).contains(x):
            assert again(1, 2, x) == fam(1, 2, x)


def test_tensor_adds_phases():
    a, b = nc_clutching_data(2), nc_clutching_data(-5)
    both = tensor_families(a, b)
    for x in lattice_points(24):
        if a.cover.chart(1).contains(x) and a.cover.chart(2).contains(x):
            assert both(1, 2, x) == a(1, 2, x) + b(1, 2, x)
            assert both(2, 1, x) == a(2, 1, x) + b(2, 1, x)


def test_cyclic_structure_group():
    cover = nc_cover()
    comp_a, comp_b = nc_overlap_components()
    fam = TransitionFamily.of(
        cover, {(1, 2): (Piece(comp_a, CyclicConstant(0, 3)), Piece(comp_b, CyclicConstant(1, 3)))}, modulus=3
    )
    ctx = BundleContext(fam, ALPHA)
    assert fam(2, 1, pt(0, 0)) == Cyclic(2, 3)
    assert cocycle_check(ctx, lattice_points(24), 2).ok
    assert TransitionFamily.from_json(fam.to_json()) == fam


def test_affine_phase_arithmetic():
    f = AffinePhase(F(1, 3), 1, -2)
    assert f(pt("1/2", "1/4")) == Phase(F(1, 3) + F(1, 2) - F(1, 2))
    assert (f + (-f))(pt("1/7", "2/9")).is_identity()
    with pytest.raises(TypeError):
        AffinePhase(0, F(1, 2), 0)
