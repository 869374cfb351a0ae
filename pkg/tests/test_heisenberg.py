import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from twistoid.bimodule import QuasiPeriodic, winding_degree
from twistoid.heisenberg import (
    H_IDENTITY,
    EquivariantNcFunction,
    HeisenbergPoint,
    InvariantViolation,
    bundle_projection,
    circle_action,
    equivariant_to_section,
    h_inverse,
    h_mul,
    lattice_canonicalize,
    left_translate,
    nc_clutching_data,
    nc_trivialization,
    section_to_equivariant,
)
from twistoid.suites import formula_equivariant
from twistoid.torus import Phase, TorusPoint

F = Fraction
rationals = st.fractions(min_value=-4, max_value=4, max_denominator=12)
triples = st.builds(HeisenbergPoint, rationals, rationals, rationals)
cs = st.integers(1, 4)


def test_product_example():
    assert h_mul(HeisenbergPoint.of(1, 2, 3), HeisenbergPoint.of(4, 5, 6), 1) == HeisenbergPoint.of(5, 7, 17)


@given(triples, triples, triples, cs)
def test_group_axioms(a, b, d, c):
    assert h_mul(h_mul(a, b, c), d, c) == h_mul(a, h_mul(b, d, c), c)
    assert h_mul(H_IDENTITY, a, c) == a == h_mul(a, H_IDENTITY, c)
    assert h_mul(a, h_inverse(a, c), c) == H_IDENTITY == h_mul(h_inverse(a, c), a, c)


def test_canonical_form_example_is_the_unique_lattice_translate_in_the_unit_cube():
    p = HeisenbergPoint.of(F(3, 2), F(1, 4), F(9, 8))
    found = []
    for k, m, n in itertools.product(range(-3, 4), repeat=3):
        r = h_mul(p, HeisenbergPoint.of(k, m, n), 1)
        if all(0 <= t < 1 for t in (r.x, r.y, r.s)):
            found.append(r)
    assert found == [HeisenbergPoint.of(F(1, 2), F(1, 4), F(7, 8))]
    assert lattice_canonicalize(p, 1).rep == found[0]


@given(triples, cs, st.integers(-3, 3), st.integers(-3, 3), st.integers(-3, 3))
def test_lattice_invariance(p, c, k, m, n):
    w = lattice_canonicalize(p, c)
    assert w == lattice_canonicalize(h_mul(p, HeisenbergPoint.of(k, m, n), c), c)
    assert all(0 <= t < 1 for t in (w.rep.x, w.rep.y, w.rep.s))
    assert lattice_canonicalize(w.rep, c) == w


@given(triples, cs, rationals, rationals)
def test_circle_action(p, c, t1, t2):
    w = lattice_canonicalize(p, c)
    assert circle_action(F(0), w) == w
    assert circle_action(F(1), w) == w
    assert circle_action(t1, circle_action(t2, w)) == circle_action(t1 + t2, w)
    assert bundle_projection(circle_action(Phase(t1), w)) == bundle_projection(w)


@given(triples, triples, cs)
def test_projection_equivariant_under_left_translation(h, p, c):
    w = lattice_canonicalize(p, c)
    moved = bundle_projection(left_translate(h, w))
    assert moved == bundle_projection(w).translate((h.x, h.y))


@given(triples, st.integers(-3, 3))
def test_trivializations_glue_with_clutching_data(p, c):
    w = lattice_canonicalize(p, c if c else 1)
    fam = nc_clutching_data(w.c)
    x = bundle_projection(w)
    here = [i for i, r in fam.cover.charts if r.contains(x)]
    for i in here:
        for j in here:
            assert nc_trivialization(w, j)[0] == fam(i, j, x) + nc_trivialization(w, i)[0]


@pytest.mark.parametrize("c", [1, 2, 3])
def test_degree_of_clutching_data(c):
    assert winding_degree(nc_clutching_data(c), numeric_samples=1024) == c
    assert winding_degree(nc_clutching_data(0)) == 0


@pytest.mark.parametrize("c", [1, 2])
def test_conditions_and_round_trip(c):
    rng = np.random.default_rng(c)
    q = 16
    F_sec = QuasiPeriodic(rng.normal(size=(q, q)) + 1j * rng.normal(size=(q, q)), -c)
    f = formula_equivariant(F_sec, c)
    errors = f.check_conditions()
    assert max(errors.values()) < 1e-9
    back = equivariant_to_section(f)
    assert back.twist == -c
    assert np.max(np.abs(back.values - F_sec.values)) < 1e-9
    assert np.max(np.abs(equivariant_to_section(section_to_equivariant(F_sec)).values - F_sec.values)) < 1e-9
    # condition (v) at a sample node
    x, y = F(3, 16), F(5, 16)
    lhs = f(HeisenbergPoint(x, y, F(0)))
    rhs = np.exp(2j * np.pi * float(c * y)) * f(HeisenbergPoint(x + 1, y, F(0)))
    assert abs(lhs - rhs) < 1e-12


def test_zero_function_maps_to_zero():
    f = EquivariantNcFunction(lambda p: 0j, 1, 8)
    assert not np.any(equivariant_to_section(f).values)


def test_wrong_sign_is_rejected():
    # a section of M^{+c} does not come from N_c
    q = 8
    rng = np.random.default_rng(0)
    wrong = QuasiPeriodic(rng.normal(size=(q, q)) + 0j, 1)
    with pytest.raises(InvariantViolation):
        equivariant_to_section(formula_equivariant(wrong, 1))


def test_grid_function_evaluates_off_grid_raises():
    f = EquivariantNcFunction.from_grid(np.ones((4, 4), dtype=complex), 1)
    with pytest.raises(ValueError):
        f(HeisenbergPoint.of(F(1, 3), 0, 0))


def test_projection_of_canonical_point():
    w = lattice_canonicalize(HeisenbergPoint.of(F(7, 3), F(-1, 4), 0), 2)
    assert bundle_projection(w) == TorusPoint((F(1, 3), F(3, 4)))
