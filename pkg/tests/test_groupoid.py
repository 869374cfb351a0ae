"""Groupoid tests. The product is checked against a word model that knows only the raw transitions.

An element (g, x, I, n) with n > 0 is the word g * s_{i1}(x) s_{i2}(alpha x) ... s_{in}(alpha^{n-1} x);
for n < 0 it is g * s*_{i1}(alpha^-1 x) s*_{i2}(alpha^-2 x) ... .  Adjacent letters of opposite kind
at the same point cancel, leaving the phase c_{ab}(y) (a from the s letter, b from the s* letter).
"""

import itertools
import random
from fractions import Fraction

import pytest

from conftest import ALPHA, qhm_ctx
from twistoid.bundle import BundleContext, BundlePoint, CyclicConstant, Piece, TransitionFamily, canonicalize
from twistoid.groupoid import (
    GammaElement,
    NotComposable,
    TwistGroupoid,
    composable_triple,
    gamma_compose,
    magnitude_levels,
    product_case,
    sample_element,
    sample_group_value,
    sample_point,
    twist_axioms_report,
)
from twistoid.heisenberg import nc_clutching_data, nc_cover, nc_overlap_components
from twistoid.torus import Phase, TorusPoint, map_power

F = Fraction


def word(ctx, lam):
    n = lam.level
    if n > 0:
        return [("s", i, map_power(ctx.alpha, k, lam.x)) for k, i in enumerate(lam.index)]
    return [("t", i, map_power(ctx.alpha, -(k + 1), lam.x)) for k, i in enumerate(lam.index)]


def word_product(ctx, a, b):
    """(phase, remaining letters) of the product of the words of a and b."""
    phase = a.g + b.g
    left, right = word(ctx, a), word(ctx, b)
    while left and right and left[-1][0] != right[0][0]:
        (ka, ia, ya), (_, ib, yb) = left.pop(), right.pop(0)
        assert ya == yb, "composable words meet at the same point"
        s_chart, t_chart = (ia, ib) if ka == "s" else (ib, ia)
        phase = phase + ctx.family(s_chart, t_chart, ya)
    return phase, left + right


def check_against_words(G, a, b):
    raw = G.compose_raw(a, b)
    phase, letters = word_product(G.ctx, a, b)
    assert raw.level == a.level + b.level
    assert raw.x == a.x
    assert raw.g == phase
    assert [i for _, i, _ in letters] == list(raw.index)
    assert word(G.ctx, raw) == letters


PATTERNS = list(itertools.product((-1, 0, 1), repeat=3))


@pytest.mark.parametrize("signs", PATTERNS, ids=lambda s: "".join("-0+"[k + 1] for k in s))
def test_products_match_word_model_and_associate(G, signs):
    rng = random.Random(hash(signs) & 0xFFFF)
    for _ in range(40):
        levels = magnitude_levels(rng, signs, 4)
        a, b, c = composable_triple(G, rng, levels, 48)
        check_against_words(G, a, b)
        check_against_words(G, b, c)
        assert G.compose(G.compose(a, b), c) == G.compose(a, G.compose(b, c))


def test_worked_pattern_with_both_splittings(G):
    # m < 0 < n, p < 0, |m| > n, n < |p|: both bracketings pass through the mixed cases
    rng = random.Random(5)
    for m, n, p in [(-3, 1, -2), (-4, 2, -3), (-2, 1, -4), (-4, 3, -4)]:
        for _ in range(30):
            a, b, c = composable_triple(G, rng, (m, n, p), 48)
            assert product_case(m, n) in "ef" and product_case(n, p) in "gh"
            check_against_words(G, G.compose(a, b), c)
            check_against_words(G, a, G.compose(b, c))
            assert G.compose(G.compose(a, b), c) == G.compose(a, G.compose(b, c))


def test_case_e_hand_value():
    # n = -3, n' = 2 on the QHM bundle for c = 1: c_12 = 0 on A = (3/8, 5/8), -y on B = (7/8, 9/8);
    # alpha = (1/2, 1/3), x = (1/2, 1/4), alpha^-3 x = (0, 1/4)
    ctx = qhm_ctx(1)
    G = TwistGroupoid(ctx)
    x = TorusPoint((F(1, 2), F(1, 4)))
    # level -3 at x uses alpha^-1 x = (0, 11/12), alpha^-2 x = (1/2, 7/12), alpha^-3 x = (0, 1/4)
    a = BundlePoint(Phase(F(1, 10)), x, (2, 1, 2), -3)
    y = map_power(ALPHA, -3, x)
    # level 2 at y uses y = (0, 1/4) and alpha y = (1/2, 7/12)
    b = BundlePoint(Phase(F(1, 5)), y, (1, 2), 2)
    raw = G.compose_raw(a, b)
    # case (e): i = (i1, i2) with |i2| = 2, i2 = (1, 2); phase c^(2)_{(1,2),(2,1)}(y) = c_12(y) + c_21(alpha y)
    #         = -1/4 + 0; total 1/10 + 1/5 - 1/4 = 1/20
    assert product_case(-3, 2) == "e"
    assert raw == BundlePoint(Phase(F(1, 20)), x, (2,), -1)


def test_case_a_concatenates(G):
    x = TorusPoint((F(1, 4), F(1, 8)))
    a = G.element(Phase(F(1, 3)), x, None, 2)
    b = G.element(Phase(F(1, 6)), G.source(a), None, 3)
    raw = G.compose_raw(a, b)
    assert raw == BundlePoint(Phase(F(1, 2)), x, a.index + b.index, 5)


def test_trivial_bundle_cancellation_gives_product_of_phases():
    G = TwistGroupoid(BundleContext(nc_clutching_data(0), ALPHA))
    rng = random.Random(1)
    for n in (1, 2, 4, -1, -3):
        x = sample_point(rng, 48)
        a = sample_element(G, rng, x, n)
        b = sample_element(G, rng, G.source(a), -n)
        assert G.compose(a, b) == BundlePoint(a.g + b.g, x, (), 0)


def test_dispatch_boundaries():
    assert product_case(0, 3) == "unit-left"
    assert product_case(3, 0) == "unit-right"
    assert product_case(2, -2) == "c" and product_case(-2, 2) == "d"
    assert product_case(-3, 2) == "e" and product_case(-2, 3) == "f"
    assert product_case(2, -3) == "g" and product_case(3, -2) == "h"


def test_range_source_inverse(G):
    x = TorusPoint((F(1, 8), F(1, 3)))
    lam = G.element(Phase(F(2, 7)), x, None, 3)
    assert G.range(lam) == x and G.source(lam) == map_power(ALPHA, 3, x)
    inv = G.inverse(lam)
    assert G.range(inv) == G.source(lam) and G.source(inv) == G.range(lam)
    assert G.compose(lam, inv) == G.unit(x)
    assert G.compose(inv, lam) == G.unit(G.source(lam))
    assert G.equivalent(G.inverse(inv), lam)
    unit = G.unit(x)
    assert G.inverse(unit) == unit


def test_inverse_formula_before_canonicalization(G):
    x = TorusPoint((F(1, 2), F(1, 4)))
    lam = BundlePoint(Phase(F(1, 10)), x, (2, 1, 2), -3)
    expected = BundlePoint(Phase(F(9, 10)), map_power(ALPHA, -3, x), (2, 1, 2), 3)
    assert G.inverse(lam) == canonicalize(G.ctx, expected)


def test_not_composable(G):
    x = TorusPoint((F(0), F(0)))
    a = G.element(Phase(0), x, None, 1)
    with pytest.raises(NotComposable):
        G.compose(a, a)


def test_projection_is_a_homomorphism(G):
    rng = random.Random(9)
    for _ in range(100):
        a, b, _ = composable_triple(G, rng, (rng.randint(-4, 4), rng.randint(-4, 4), 0), 48)
        assert G.project(G.compose(a, b)) == gamma_compose(ALPHA, G.project(a), G.project(b))
    assert G.project(G.unit(TorusPoint((F(0), F(0))))) == GammaElement(TorusPoint((F(0), F(0))), 0)


def test_circle_action_is_an_action_and_central(G):
    rng = random.Random(2)
    for _ in range(100):
        a, b, _ = composable_triple(G, rng, (rng.randint(-3, 3), rng.randint(-3, 3), 0), 48)
        z1, z2 = sample_group_value(rng, G.unit_value), sample_group_value(rng, G.unit_value)
        assert G.act(z1, G.act(z2, a)) == G.act(z1 + z2, a)
        assert G.act(Phase(0), a) == a
        assert G.compose(G.act(z1, a), b) == G.act(z1, G.compose(a, b))
        assert G.project(G.act(z1, a)) == G.project(a)


def test_representatives_compose_to_the_same_class(G):
    rng = random.Random(4)
    checked = 0
    for _ in range(300):
        x = sample_point(rng, 48)
        n, m = rng.randint(-4, 4), rng.randint(-4, 4)
        a0 = G.element(Phase(F(1, 7)), x, None, n)
        b0 = G.element(Phase(F(2, 7)), G.source(a0), None, m)
        ra, rb = G.representatives(a0), G.representatives(b0)
        if len(ra) * len(rb) > 1:
            checked += 1
            results = {G.compose(a, b) for a in ra for b in rb}
            assert len(results) == 1
    assert checked > 100


def test_twist_axioms_pass_for_qhm_and_trivial():
    for c in (0, 1):
        G = TwistGroupoid(BundleContext(nc_clutching_data(-c), ALPHA))
        report = twist_axioms_report(G, 300, 42, 48)
        assert report.ok, report.failures
        assert report.to_json()["suite"] == "twist-axioms"


class CorruptedGroupoid(TwistGroupoid):
    """Negative control: case (c) forgets its transition phase."""

    def compose_raw(self, a, b):
        if product_case(a.level, b.level) == "c":
            return BundlePoint(a.g + b.g, a.x, (), 0)
        return super().compose_raw(a, b)


def test_corrupted_product_is_caught():
    G = CorruptedGroupoid(qhm_ctx(1))
    rng = random.Random(0)
    failures = 0
    for _ in range(200):
        a, b, c = composable_triple(G, rng, (2, -2, 1), 48)
        if G.compose(G.compose(a, b), c) != G.compose(a, G.compose(b, c)):
            failures += 1
    assert failures > 20


def test_cyclic_group_twist():
    cover = nc_cover()
    comp_a, comp_b = nc_overlap_components()
    fam = TransitionFamily.of(
        cover, {(1, 2): (Piece(comp_a, CyclicConstant(0, 5)), Piece(comp_b, CyclicConstant(2, 5)))}, modulus=5
    )
    G = TwistGroupoid(BundleContext(fam, ALPHA))
    rng = random.Random(8)
    for signs in PATTERNS[::3]:
        a, b, c = composable_triple(G, rng, magnitude_levels(rng, signs, 3), 48)
        check_against_words(G, a, b)
        assert G.compose(G.compose(a, b), c) == G.compose(a, G.compose(b, c))
    assert twist_axioms_report(G, 200, 3, 48).ok
