"""Finitely supported T-equivariant functions on the twist groupoid over a finite orbit grid.

A function is stored as one complex array per level: ``F[n][a, b]`` is its
value at the canonical element ``(0, x, I, n)`` with ``x = (a/q, b/q)`` and
``I`` the canonical index. Equivariance then fixes every other value:
``f(z lam) = e(z) f(lam)``.

Products use counting measure on the (discrete) fibers:
``(f * h)(lam) = sum over lam1 lam2 = lam, one pair per T-orbit, of f(lam1) h(lam2)``.
All phases come from :meth:`TwistGroupoid.compose` and are cached per level pair.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

import numpy as np

from .bimodule import (
    D1Structure,
    QuasiPeriodic,
    gauge_map,
    node_offset,
    pullback,
    random_values,
    section_from_quasi_periodic,
    section_gluing_error,
)
from .bundle import AffinePhase, BundleContext, Piece, TransitionFamily
from .groupoid import Report, TwistGroupoid
from .heisenberg import nc_clutching_data
from .torus import AffineTorusMap, Phase, TorusPoint, rational

TOL = 1e-9


class ContextMismatch(ValueError):
    pass


class OrbitGrid:
    """The q x q lattice of the torus with the groupoid built over the translation alpha.

    alpha must move lattice points to lattice points, so the lattice is a
    finite union of alpha-orbits.
    """

    def __init__(self, ctx: BundleContext, q: int):
        self.ctx, self.q = ctx, q
        self.groupoid = TwistGroupoid(ctx)
        self.shift = tuple(rational(t) for t in ctx.alpha.translation)
        node_offset(self.shift, q)
        self._phases: dict[tuple[int, int], np.ndarray] = {}
        self._inverse: dict[int, np.ndarray] = {}
        self._canonical: dict[int, list] = {}

    @property
    def unit(self) -> Phase:
        return Phase(Fraction(0))

    def point(self, a: int, b: int) -> TorusPoint:
        return TorusPoint((Fraction(a, self.q), Fraction(b, self.q)))

    def nodes(self) -> Iterable[tuple[int, int]]:
        for a in range(self.q):
            for b in range(self.q):
                yield a, b

    def move(self, values: np.ndarray, n: int) -> np.ndarray:
        """values o alpha^n on the lattice."""
        return pullback(values, (n * self.shift[0], n * self.shift[1]))

    def canonical(self, n: int) -> list:
        if n not in self._canonical:
            G = self.groupoid
            self._canonical[n] = [[G.element(self.unit, self.point(a, b), None, n) for b in range(self.q)] for a in range(self.q)]
        return self._canonical[n]

    def product_phase(self, n1: int, n2: int) -> np.ndarray:
        """phi[x]: the canonical level-n1 element at x times the canonical level-n2 element at alpha^n1 x
        is e(phi[x]) times the canonical level-(n1+n2) element at x."""
        key = (n1, n2)
        if key not in self._phases:
            G = self.groupoid
            first, second = self.canonical(n1), self.canonical(n2)
            da, db = node_offset((n1 * self.shift[0], n1 * self.shift[1]), self.q)
            out = np.zeros((self.q, self.q))
            for a, b in self.nodes():
                lam = G.compose(first[a][b], second[(a + da) % self.q][(b + db) % self.q])
                out[a, b] = float(lam.g.value)
            self._phases[key] = out
        return self._phases[key]

    def inverse_phase(self, n: int) -> np.ndarray:
        """psi[x]: the inverse of the canonical level-n element at x is e(psi[x]) times the canonical one at alpha^n x."""
        if n not in self._inverse:
            G = self.groupoid
            out = np.zeros((self.q, self.q))
            for a, b in self.nodes():
                out[a, b] = float(G.inverse(self.canonical(n)[a][b]).g.value)
            self._inverse[n] = out
        return self._inverse[n]


def qhm_context(c: int, mu, nu) -> BundleContext:
    """The two-band bundle whose sections form M^c, over translation by (2 mu, 2 nu)."""
    mu, nu = rational(mu), rational(nu)
    return BundleContext(nc_clutching_data(-c), AffineTorusMap.of(2 * mu, 2 * nu))


def qhm_grid(c: int, mu, nu, q: int) -> OrbitGrid:
    return OrbitGrid(qhm_context(c, mu, nu), q)


@dataclass
class EquivariantFunction:
    grid: OrbitGrid
    levels: dict[int, np.ndarray] = field(default_factory=dict)

    def component(self, n: int) -> np.ndarray:
        return self.levels.get(n, np.zeros((self.grid.q, self.grid.q), dtype=complex))

    def support(self) -> list[int]:
        return sorted(n for n, v in self.levels.items() if np.any(v != 0))

    def copy(self) -> "EquivariantFunction":
        return EquivariantFunction(self.grid, {n: v.copy() for n, v in self.levels.items()})

    def value(self, g: Phase, a: int, b: int, n: int) -> complex:
        """f at the canonical element with group coordinate g."""
        return complex(np.exp(2j * np.pi * float(g.value)) * self.component(n)[a, b])

    def __add__(self, other):
        _same(self, other)
        out = self.copy()
        for n, v in other.levels.items():
            out.levels[n] = out.component(n) + v
        return out

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, s: complex) -> "EquivariantFunction":
        return EquivariantFunction(self.grid, {n: s * v for n, v in self.levels.items()})

    def distance(self, other: "EquivariantFunction") -> float:
        _same(self, other)
        keys = set(self.levels) | set(other.levels)
        return max((float(np.max(np.abs(self.component(n) - other.component(n)))) for n in keys), default=0.0)


def _same(f: EquivariantFunction, h: EquivariantFunction):
    if f.grid is not h.grid:
        raise ContextMismatch("functions live on different grids")


def delta(grid: OrbitGrid, a: int, b: int, n: int, weight: complex = 1.0) -> EquivariantFunction:
    v = np.zeros((grid.q, grid.q), dtype=complex)
    v[a, b] = weight
    return EquivariantFunction(grid, {n: v})


def random_function(grid: OrbitGrid, rng: np.random.Generator, levels: Iterable[int]) -> EquivariantFunction:
    return EquivariantFunction(grid, {n: random_values(rng, grid.q) for n in levels})


def convolve(f: EquivariantFunction, h: EquivariantFunction) -> EquivariantFunction:
    _same(f, h)
    grid = f.grid
    out: dict[int, np.ndarray] = {}
    for n1, F in f.levels.items():
        for n2, H in h.levels.items():
            phi = grid.product_phase(n1, n2)
            term = np.exp(-2j * np.pi * phi) * F * grid.move(H, n1)
            out[n1 + n2] = out.get(n1 + n2, 0) + term
    return EquivariantFunction(grid, out)


def involution(f: EquivariantFunction) -> EquivariantFunction:
    grid = f.grid
    out = {}
    for n, F in f.levels.items():
        # f*(x, -n) = conj(f(inverse of the level -n element at x)), and that inverse sits at level n over alpha^-n x
        psi = grid.inverse_phase(-n)
        out[-n] = np.exp(-2j * np.pi * psi) * np.conj(grid.move(F, -n))
    return EquivariantFunction(grid, out)


def gamma_act(z: Phase | Fraction, f: EquivariantFunction) -> EquivariantFunction:
    t = float(z.value if isinstance(z, Phase) else rational(z))
    return EquivariantFunction(f.grid, {n: np.exp(2j * np.pi * n * t) * v for n, v in f.levels.items()})


def spectral_component(f: EquivariantFunction, n: int) -> EquivariantFunction:
    return EquivariantFunction(f.grid, {n: f.component(n).copy()} if n in f.levels else {})


def fourier_component(f: EquivariantFunction, p: int, order: int) -> EquivariantFunction:
    """Average of e(-p z) gamma_z(f) over z in (1/order)Z/Z."""
    acc = None
    for k in range(order):
        z = Fraction(k, order)
        term = gamma_act(z, f).scale(np.exp(-2j * np.pi * p * float(z)))
        acc = term if acc is None else acc + term
    return acc.scale(1 / order)


# --------------------------------------------------------------------------
# level-one part versus the D_1 bimodule


def level_one_from_d1(grid: OrbitGrid, g: QuasiPeriodic, c: int, nu) -> np.ndarray:
    """Values at canonical level-1 elements of the function corresponding to g in D_1.

    g goes to M^c by the gauge e(c nu x), then to a section of the bundle
    (whose sections form M^c) read in the canonical chart at each node.
    """
    return section_from_quasi_periodic(grid.ctx.family, gauge_map(g, c, nu))


def d1_crosscheck(grid: OrbitGrid, c: int, mu, nu, seed: int = 0, samples: int = 4) -> Report:
    """Compare the level-one part of the convolution algebra with D_1 at every grid node."""
    q = grid.q
    mu, nu = rational(mu), rational(nu)
    d1 = D1Structure(c, mu, nu, q)
    rng = np.random.default_rng(seed)
    rep = Report("d1-crosscheck", samples, seed)
    gs = [d1.element(random_values(rng, q)) for _ in range(samples)]
    phis = [random_values(rng, q) for _ in range(samples)]

    def as_level1(g: QuasiPeriodic) -> EquivariantFunction:
        return EquivariantFunction(grid, {1: level_one_from_d1(grid, g, c, nu)})

    def as_level0(phi: np.ndarray) -> EquivariantFunction:
        return EquivariantFunction(grid, {0: phi})

    def check(name: str, got: EquivariantFunction, want: EquivariantFunction, **witness):
        rep.count(name)
        err = got.distance(want)
        rep.measure(name, err)
        if not err < TOL:
            rep.fail(name, error=err, **witness)

    gluing = max(section_gluing_error(grid.ctx.family, gauge_map(g, c, nu)) for g in gs)
    rep.count("gluing")
    rep.measure("gluing", gluing)
    if not gluing < TOL:
        rep.fail("gluing", error=gluing)

    for k, (g, phi) in enumerate(zip(gs, phis)):
        f = as_level1(g)
        check("left-action", convolve(as_level0(phi), f), as_level1(d1.element(d1.left(phi, g.values))), sample=k)
        check("right-action", convolve(f, as_level0(phi)), as_level1(d1.element(d1.right(g.values, phi))), sample=k)
        for m, h in enumerate(gs):
            fh = as_level1(h)
            check("inner-right", convolve(involution(f), fh), as_level0(d1.inner_right(g.values, h.values)), pair=[k, m])
            check("inner-left", convolve(f, involution(fh)), as_level0(d1.inner_left(g.values, h.values)), pair=[k, m])
    return rep


def algebra_report(grid: OrbitGrid, levels: int, samples: int, seed: int, c: int, mu, nu) -> Report:
    """Associativity, *-algebra axioms, grading and spectral projection on seeded random elements."""
    rng = np.random.default_rng(seed)
    pick = random.Random(seed)
    rep = Report("algebra", samples, seed)

    def check(name: str, err: float, **witness):
        rep.count(name)
        rep.measure(name, err)
        if not err < TOL:
            rep.fail(name, error=err, **witness)

    def rand(n_levels: int = 2) -> EquivariantFunction:
        chosen = pick.sample(range(-levels, levels + 1), n_levels)
        return random_function(grid, rng, chosen)

    for k in range(samples):
        f, h, g = rand(), rand(), rand()
        fh = convolve(f, h)
        check("associativity", convolve(fh, g).distance(convolve(f, convolve(h, g))), sample=k)
        check("involutive", involution(involution(f)).distance(f), sample=k)
        check("anti-multiplicative", involution(fh).distance(convolve(involution(h), involution(f))), sample=k)
        w = complex(*rng.normal(size=2))
        check("conjugate-linear", involution(f.scale(w)).distance(involution(f).scale(w.conjugate())), sample=k)
        check("distributive", convolve(f, h + g).distance(fh + convolve(f, g)), sample=k)
        z = Fraction(pick.randrange(360), 360)
        check("gamma-automorphism", gamma_act(z, fh).distance(convolve(gamma_act(z, f), gamma_act(z, h))), sample=k)
        check("gamma-star", gamma_act(z, involution(f)).distance(involution(gamma_act(z, f))), sample=k)
        top = max(abs(n) for n in fh.levels)
        for p in range(-top, top + 1):
            check("spectral-projection", fourier_component(fh, p, 2 * top + 1).distance(spectral_component(fh, p)), sample=k, level=p)
        for n in fh.support():
            rep.count("grading")
            if not any(n1 + n2 == n for n1 in f.support() for n2 in h.support()):
                rep.fail("grading", sample=k, level=n)
        phi, psi = random_function(grid, rng, [0]), random_function(grid, rng, [0])
        check("level-zero-commutative", convolve(phi, psi).distance(convolve(psi, phi)), sample=k)
        check("level-zero-pointwise", convolve(phi, psi).distance(EquivariantFunction(grid, {0: phi.levels[0] * psi.levels[0]})), sample=k)
    cross = d1_crosscheck(grid, c, mu, nu, seed)
    for name, count in cross.checks.items():
        rep.count(f"d1:{name}", count)
    rep.failures.extend({**w, "check": f"d1:{w['check']}"} for w in cross.failures)
    return rep


def corrupt_diagonal(family: TransitionFamily, i: int = 1, amount: Fraction = Fraction(1, 7)) -> TransitionFamily:
    """A copy of the family whose (i, i) transition is a nonzero constant; used as a negative control."""
    return family.with_transition(i, i, (Piece(family.cover.chart(i), AffinePhase(amount)),))
