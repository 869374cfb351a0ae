"""Seeded verification suites, each producing a :class:`Report`."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from . import algebra as alg
from . import bimodule as bm
from .bundle import (
    BundleContext,
    DomainError,
    TransitionFamily,
    canonicalize,
    cocycle_check,
    flip_identity_check,
    in_refined_chart,
    iter_indices,
    lattice_points,
    negative_power_closed,
    negative_power_composed,
    points_equivalent,
    tensor_families,
)
from .groupoid import (
    Report,
    TwistGroupoid,
    composable_triple,
    gamma_compose,
    magnitude_levels,
    product_case,
    sample_group_value,
    sample_point,
    twist_axioms_report,
)
from .heisenberg import (
    EquivariantNcFunction,
    HeisenbergPoint,
    InvariantViolation,
    equivariant_to_section,
    h_inverse,
    h_mul,
    lattice_canonicalize,
    nc_clutching_data,
    nc_trivialization,
    section_to_equivariant,
)
from .torus import AffineTorusMap, TorusPoint, lattice_denominator, rational_str

TOL = 1e-9
SUITES = ("cocycle", "flip", "twist-axioms", "associativity", "heisenberg", "bimodule", "algebra")
STRUCTURES = ("d1", "mc", "lt", "h", "a-theta")


class InvalidConfig(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    c: int = 1
    mu: Fraction = Fraction(1, 4)
    nu: Fraction = Fraction(1, 6)
    grid: int = 24
    levels: int = 3
    samples: int = 500
    seed: int = 0
    out: str | None = None

    def validate(self, dynamics: bool = True) -> "RunConfig":
        """Raise InvalidConfig on bad values; ``dynamics`` also checks that the grid carries alpha."""
        if self.grid <= 0:
            raise InvalidConfig("grid must be positive")
        if self.levels < 1:
            raise InvalidConfig("levels must be at least 1")
        if self.samples < 1:
            raise InvalidConfig("samples must be at least 1")
        checks = (("2*mu", 2 * self.mu), ("2*nu", 2 * self.nu), ("nu", self.nu)) if dynamics else ()
        for name, value in checks:
            if (value * self.grid).denominator != 1:
                raise InvalidConfig(f"{name} = {rational_str(value)} is not a multiple of 1/{self.grid}")
        return self

    @property
    def alpha(self) -> AffineTorusMap:
        return AffineTorusMap.of(2 * self.mu, 2 * self.nu)

    @property
    def group_levels(self) -> int:
        """Level bound for the groupoid suites, never below 4."""
        return max(self.levels, 4)

    def context(self, family: TransitionFamily | None = None) -> BundleContext:
        """The QHM bundle (sections form M^c) over the translation by (2 mu, 2 nu)."""
        return BundleContext(family if family is not None else qhm_family(self.c), self.alpha)

    def to_json(self) -> dict:
        return {
            "c": self.c,
            "mu": rational_str(self.mu),
            "nu": rational_str(self.nu),
            "grid": self.grid,
            "levels": self.levels,
            "samples": self.samples,
            "seed": self.seed,
        }


def qhm_family(c: int) -> TransitionFamily:
    """Two-band data of N_{-c}, whose line bundle has M^c as its section module."""
    return nc_clutching_data(-c)


def _denominator(ctx: BundleContext) -> int:
    return lattice_denominator((r for _, r in ctx.family.cover.charts), ctx.alpha)


# --------------------------------------------------------------------------
# bundle suites


def cocycle_report(cfg: RunConfig, ctx: BundleContext, denominator: int = 48) -> Report:
    """Conditions (a)-(c) at every overlap point of the lattice, then on refined levels at sampled points."""
    rep = Report("cocycle", cfg.samples, cfg.seed)
    cover = ctx.family.cover
    overlap = [x for x in lattice_points(denominator) if sum(r.contains(x) for _, r in cover.charts) >= 2]
    _absorb_cocycle(rep, cocycle_check(ctx, overlap, 1), "base")
    rng = random.Random(cfg.seed)
    den = _denominator(ctx)
    for _ in range(cfg.samples):
        n = rng.choice([k for k in range(-cfg.levels, cfg.levels + 1) if k])
        _absorb_cocycle(rep, cocycle_check(ctx, [sample_point(rng, den)], n), f"level{n:+d}")
    return rep


def _absorb_cocycle(rep: Report, result, label: str):
    rep.count(label, result.checked)
    for w in result.failures:
        rep.fail(f"cocycle-{w['condition']}", scope=label, **{k: v for k, v in w.items() if k != "condition"})


def _random_pair(ctx: BundleContext, rng: random.Random, n: int, x: TorusPoint):
    valid = [i for i in iter_indices(ctx, abs(n)) if in_refined_chart(ctx, n, i, x)]
    return rng.choice(valid), rng.choice(valid)


def flip_report(cfg: RunConfig, ctx: BundleContext) -> Report:
    """Negative transition powers in closed and composed form, and both flip identities."""
    rep = Report("flip", cfg.samples, cfg.seed)
    rng = random.Random(cfg.seed)
    den = _denominator(ctx)
    top = cfg.group_levels
    for _ in range(cfg.samples):
        x = sample_point(rng, den)
        n = rng.randint(1, top)
        i, j = _random_pair(ctx, rng, -n, x)
        rep.count("negative-power")
        closed, composed = negative_power_closed(ctx, i, j, x), negative_power_composed(ctx, i, j, x)
        if closed != composed:
            rep.fail("negative-power", x=x.to_json(), n=-n, i=list(i), j=list(j), closed=str(closed), composed=str(composed))
        for sign, name in ((1, "flip-positive"), (-1, "flip-negative")):
            i, j = _random_pair(ctx, rng, sign * n, x)
            rep.count(name)
            try:
                ok = flip_identity_check(ctx, sign * n, i, j, x)
            except DomainError as exc:
                ok = False
                rep.fail(name, x=x.to_json(), n=sign * n, i=list(i), j=list(j), error=str(exc))
                continue
            if not ok:
                rep.fail(name, x=x.to_json(), n=sign * n, i=list(i), j=list(j))
    return rep


# --------------------------------------------------------------------------
# groupoid suites


def sign_patterns() -> list[tuple[int, int, int]]:
    return list(itertools.product((-1, 0, 1), repeat=3))


def worked_pattern_levels(rng: random.Random, cap: int) -> tuple[int, int, int]:
    """Levels (m, n, p) with m < 0 < n, p < 0, |m| > n and n < |p|."""
    n = rng.randint(1, cap - 1)
    return -rng.randint(n + 1, cap), n, -rng.randint(n + 1, cap)


def associativity_report(cfg: RunConfig, ctx: BundleContext, per_pattern: int | None = None) -> Report:
    """Associativity per sign pattern, unit and inverse laws, centrality, projection, representative independence."""
    G = TwistGroupoid(ctx)
    per_pattern = per_pattern or max(200, cfg.samples // 2)
    rep = Report("associativity", per_pattern, cfg.seed)
    rng = random.Random(cfg.seed)
    den = _denominator(ctx)
    cap = cfg.group_levels
    patterns: list[tuple[str, Callable[[], tuple[int, int, int]]]] = [
        ("".join("-0+"[s + 1] for s in signs), lambda signs=signs: magnitude_levels(rng, signs, cap)) for signs in sign_patterns()
    ]
    patterns.append(("worked", lambda: worked_pattern_levels(rng, cap)))
    for label, draw in patterns:
        for _ in range(per_pattern):
            levels = draw()
            a, b, c = composable_triple(G, rng, levels, den)
            _check_triple(G, rep, label, a, b, c, rng)
    for _ in range(cfg.samples):
        _check_representatives(G, rep, rng, den, cap)
    return rep


def _check_triple(G: TwistGroupoid, rep: Report, label: str, a, b, c, rng: random.Random):
    rep.count(f"assoc[{label}]")
    left, right = G.compose(G.compose(a, b), c), G.compose(a, G.compose(b, c))
    if left != right:
        rep.fail("associativity", pattern=label, triple=[p.to_json() for p in (a, b, c)], left=left.to_json(), right=right.to_json())
    ab = G.compose(a, b)
    rep.count("projection")
    if G.project(ab) != gamma_compose(G.alpha, G.project(a), G.project(b)):
        rep.fail("projection", pair=[a.to_json(), b.to_json()])
    ca = canonicalize(G.ctx, a)
    rep.count("units")
    if G.compose(G.unit(G.range(a)), a) != ca or G.compose(a, G.unit(G.source(a))) != ca:
        rep.fail("units", element=a.to_json())
    rep.count("inverse")
    inv = G.inverse(a)
    if G.compose(a, inv) != G.unit(G.range(a)) or G.compose(inv, a) != G.unit(G.source(a)):
        rep.fail("inverse", element=a.to_json())
    rep.count("inverse-involutive")
    if not G.equivalent(G.inverse(inv), a):
        rep.fail("inverse-involutive", element=a.to_json())
    z = sample_group_value(rng, G.unit_value)
    rep.count("central")
    if G.compose(G.act(z, a), b) != G.act(z, ab) or G.compose(a, G.act(z, b)) != G.act(z, ab):
        rep.fail("central", pair=[a.to_json(), b.to_json()], z=str(z), case=product_case(a.level, b.level))


def _check_representatives(G: TwistGroupoid, rep: Report, rng: random.Random, den: int, cap: int):
    """Compose two different representatives of each factor; the raw products must be equivalent."""
    for _ in range(100):
        x = sample_point(rng, den)
        n, m = rng.randint(-cap, cap), rng.randint(-cap, cap)
        a0 = G.element(sample_group_value(rng, G.unit_value), x, None, n)
        b0 = G.element(sample_group_value(rng, G.unit_value), G.source(a0), None, m)
        reps_a, reps_b = G.representatives(a0), G.representatives(b0)
        if len(reps_a) > 1 or len(reps_b) > 1:
            break
    a1, a2 = rng.choice(reps_a), rng.choice(reps_a)
    b1, b2 = rng.choice(reps_b), rng.choice(reps_b)
    rep.count("representative-independence")
    if not points_equivalent(G.ctx, G.compose_raw(a1, b1), G.compose_raw(a2, b2)):
        rep.fail("representative-independence", first=[a1.to_json(), b1.to_json()], second=[a2.to_json(), b2.to_json()])


def twist_report(cfg: RunConfig, ctx: BundleContext) -> Report:
    G = TwistGroupoid(ctx)
    return twist_axioms_report(G, 2 * cfg.samples, cfg.seed, _denominator(ctx), cfg.group_levels)


# --------------------------------------------------------------------------
# Heisenberg suite


def _random_triple(rng: random.Random) -> HeisenbergPoint:
    def r():
        return Fraction(rng.randint(-36, 36), rng.randint(1, 12))

    return HeisenbergPoint(r(), r(), r())


def formula_equivariant(F: bm.QuasiPeriodic, c: int) -> EquivariantNcFunction:
    """f(x, y, s) = e(s) F(x, y), evaluated with F's own extension rule (no lattice reduction)."""

    def fn(p: HeisenbergPoint) -> complex:
        return complex(np.exp(2j * np.pi * float(p.s))) * F(p.x, p.y)

    return EquivariantNcFunction(fn, c, F.q)


def heisenberg_report(cfg: RunConfig) -> Report:
    c, q = cfg.c, cfg.grid
    rep = Report("heisenberg", 2 * cfg.samples, cfg.seed)
    rng = random.Random(cfg.seed)
    zero = HeisenbergPoint(Fraction(0), Fraction(0), Fraction(0))
    for _ in range(2 * cfg.samples):
        a, b, d = _random_triple(rng), _random_triple(rng), _random_triple(rng)
        rep.count("group-axioms")
        if h_mul(h_mul(a, b, c), d, c) != h_mul(a, h_mul(b, d, c), c):
            rep.fail("associativity", a=str(a), b=str(b), c=str(d))
        if h_mul(zero, a, c) != a or h_mul(a, zero, c) != a:
            rep.fail("identity", a=str(a))
        if h_mul(a, h_inverse(a, c), c) != zero or h_mul(h_inverse(a, c), a, c) != zero:
            rep.fail("inverse", a=str(a))
    lattice = list(itertools.product(range(-3, 4), repeat=3))
    for _ in range(max(1, cfg.samples // 25)):
        p = _random_triple(rng)
        base = lattice_canonicalize(p, c)
        for k, m, n in lattice:
            rep.count("lattice-invariance")
            if lattice_canonicalize(h_mul(p, HeisenbergPoint(Fraction(k), Fraction(m), Fraction(n)), c), c) != base:
                rep.fail("lattice-invariance", p=str(p), lattice=[k, m, n])
    # local trivializations of N_c agree with its clutching data
    family = nc_clutching_data(c)
    for _ in range(cfg.samples):
        w = lattice_canonicalize(_random_triple(rng), c)
        x = TorusPoint((w.rep.x, w.rep.y))
        here = [i for i, region in family.cover.charts if region.contains(x)]
        for i in here:
            for j in here:
                rep.count("trivialization")
                gi, _ = nc_trivialization(w, i)
                gj, _ = nc_trivialization(w, j)
                if gj != family(i, j, x) + gi:
                    rep.fail("trivialization", w=str(w.rep), i=i, j=j)
    # conditions (i)-(vi) and the round trip, on a random section of M^{-c}
    values = bm.random_values(np.random.default_rng(cfg.seed), q)
    F = bm.QuasiPeriodic(values, -c)
    f = formula_equivariant(F, c)
    for name, err in f.check_conditions().items():
        rep.count(f"condition-{name}", q * q)
        rep.measure(f"condition-{name}", err)
        if not err < TOL:
            rep.fail(f"condition-{name}", error=err)
    try:
        back = equivariant_to_section(f)
        err = float(np.max(np.abs(back.values - F.values)))
        err2 = float(np.max(np.abs(equivariant_to_section(section_to_equivariant(F)).values - F.values)))
    except InvariantViolation as exc:
        rep.fail("round-trip", error=str(exc))
    else:
        for name, e in (("round-trip", err), ("round-trip-inverse", err2)):
            rep.count(name, q * q)
            rep.measure(name, e)
            if not e < TOL:
                rep.fail(name, error=e)
    return rep


# --------------------------------------------------------------------------
# bimodule suite


def _absorb(rep: Report, prefix: str, errors: dict[str, float], nodes: int):
    for name, err in sorted(errors.items()):
        key = f"{prefix}:{name}"
        rep.count(key, nodes)
        rep.measure(key, err)
        if not err < TOL:
            rep.fail(key, error=err)


def bimodule_report(cfg: RunConfig, structures=STRUCTURES) -> Report:
    c, q, mu, nu = cfg.c, cfg.grid, cfg.mu, cfg.nu
    rep = Report("bimodule", cfg.samples, cfg.seed)
    rng = np.random.default_rng(cfg.seed)
    xis = [bm.random_values(rng, q) for _ in range(4)]
    coeffs = [bm.random_values(rng, q) for _ in range(3)]
    nodes = q * q
    lam = (2 * mu, 2 * nu)
    d1 = bm.d1_structure(c, mu, nu, q)
    mc = bm.mc_structure(c)
    family = qhm_family(c)
    lt = bm.lt_structure(family, q)

    def to_section(values):
        return bm.section_from_quasi_periodic(family, bm.QuasiPeriodic(values, c))

    if "d1" in structures:
        _absorb(rep, "d1", bm.axiom_errors(d1, xis, coeffs), nodes)
        ext = max(d1.element(xi).extension_error() for xi in xis[:2])
        _absorb(rep, "d1", {"quasi-periodicity": ext}, nodes)
        target = bm.phi_target(c, mu, nu)
        _absorb(rep, "phi", bm.isomorphism_errors(d1, target, lambda v: bm.phi_map(d1.element(v), nu).values, xis, coeffs), nodes)
        _absorb(rep, "phi-target", bm.axiom_errors(target, xis, coeffs), nodes)
        mc_alpha = bm.tensor_with_a_theta(mc, lam)
        psi = lambda v: bm.gauge_map(d1.element(v), c, nu).values  # noqa: E731
        _absorb(rep, "psi", bm.isomorphism_errors(d1, mc_alpha, psi, xis, coeffs), nodes)
        homotopy = max(
            float(np.max(np.abs(bm.homotopy_map(bm.phi_map(d1.element(v), nu), c, nu).values - psi(v)))) for v in xis
        )
        _absorb(rep, "homotopy", {"K-phi=psi": homotopy}, nodes)
        sym = bm.symmetrize(d1)
        _absorb(rep, "d1-sym", bm.axiom_errors(sym, xis, coeffs), nodes)
        _absorb(rep, "d1-sym", {"symmetric": bm.symmetry_error(sym, xis, coeffs)}, nodes)
        _absorb(rep, "d1=sym(d1)(x)A", bm.isomorphism_errors(d1, bm.tensor_with_a_theta(sym, lam), lambda v: v, xis, coeffs), nodes)
        pieces = bm.partition_of_unity_elements(q, c, nu)
        left = sum(d1.inner_left(p.values, p.values) for p in pieces)
        right = sum(d1.inner_right(p.values, p.values) for p in pieces)
        _absorb(rep, "fullness", {"left": float(np.max(np.abs(left - 1))), "right": float(np.max(np.abs(right - 1)))}, nodes)
    if "mc" in structures:
        _absorb(rep, "mc", bm.axiom_errors(mc, xis, coeffs), nodes)
        _absorb(rep, "mc", {"symmetric": bm.symmetry_error(mc, xis, coeffs)}, nodes)
        _absorb(rep, "mc-alpha", bm.axiom_errors(bm.tensor_with_a_theta(mc, lam), xis, coeffs), nodes)
        conj = bm.conjugate(mc, lam)
        _absorb(rep, "mc-conjugate", bm.axiom_errors(conj, xis, coeffs), nodes)
    if "lt" in structures:
        _absorb(rep, "lt", bm.axiom_errors(lt, xis, coeffs), nodes)
        _absorb(rep, "lt", {"symmetric": bm.symmetry_error(lt, xis, coeffs)}, nodes)
        _absorb(rep, "lt=mc", bm.isomorphism_errors(mc, lt, to_section, xis, coeffs), nodes)
        gluing = max(bm.section_gluing_error(family, bm.QuasiPeriodic(v, c)) for v in xis[:2])
        _absorb(rep, "lt=mc", {"gluing": gluing}, nodes)
    if "h" in structures:
        h = bm.h_correspondence(family, lam, q)
        _absorb(rep, "h", bm.axiom_errors(h, xis, coeffs), nodes)
        _absorb(rep, "h=lt(x)A", bm.isomorphism_errors(h, bm.tensor_with_a_theta(lt, lam), lambda v: v, xis, coeffs), nodes)
        _absorb(rep, "d1=h", bm.isomorphism_errors(d1, h, _d1_to_h(d1, family, c, nu), xis, coeffs), nodes)
    if "a-theta" in structures:
        beta = (Fraction(1, q), Fraction(-3, q))
        lhs = bm.tensor_with_a_theta(bm.a_theta(lam), beta)
        _absorb(rep, "a-theta", bm.axiom_errors(bm.a_theta(lam), xis, coeffs), nodes)
        _absorb(rep, "a-theta-product", bm.isomorphism_errors(lhs, bm.a_theta(bm.add(lam, beta)), lambda v: v, xis, coeffs), nodes)
    if {"mc", "lt"} & set(structures):
        degree_checks(rep, cfg)
    return rep


def _d1_to_h(d1, family, c, nu):
    def mapping(values):
        return bm.section_from_quasi_periodic(family, bm.gauge_map(d1.element(values), c, nu))

    return mapping


def degree_checks(rep: Report, cfg: RunConfig):
    """winding_degree(nc_clutching_data(k)) = k and additivity under tensor products."""
    for k in range(-3, 4):
        rep.count("degree")
        got = bm.winding_degree(nc_clutching_data(k), numeric_samples=1024)
        if got != k:
            rep.fail("degree", c=k, got=got)
    rng = random.Random(cfg.seed)
    for _ in range(10):
        k1, k2 = rng.randint(-4, 4), rng.randint(-4, 4)
        rep.count("degree-additivity")
        both = tensor_families(nc_clutching_data(k1), nc_clutching_data(k2))
        got = bm.winding_degree(both, numeric_samples=1024)
        if got != k1 + k2:
            rep.fail("degree-additivity", pair=[k1, k2], got=got)


# --------------------------------------------------------------------------
# algebra suite


def algebra_report(cfg: RunConfig) -> Report:
    grid = alg.OrbitGrid(cfg.context(), cfg.grid)
    samples = max(3, cfg.samples // 100)
    return alg.algebra_report(grid, cfg.levels, samples, cfg.seed, cfg.c, cfg.mu, cfg.nu)


# --------------------------------------------------------------------------


def run_suite(name: str, cfg: RunConfig, family: TransitionFamily | None = None) -> Report:
    ctx = cfg.context(family)
    if name == "cocycle":
        return cocycle_report(cfg, ctx)
    if name == "flip":
        return flip_report(cfg, ctx)
    if name == "twist-axioms":
        return twist_report(cfg, ctx)
    if name == "associativity":
        return associativity_report(cfg, ctx)
    if name == "heisenberg":
        return heisenberg_report(cfg)
    if name == "bimodule":
        return bimodule_report(cfg)
    if name == "algebra":
        return algebra_report(cfg)
    raise InvalidConfig(f"unknown suite {name!r}")
