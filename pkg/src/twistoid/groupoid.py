"""The twist groupoid over the transformation groupoid of a torus translation.

Elements are canonical bundle points ``(g, x, I, n)``; ``n`` is the level and
``I`` an index of length ``|n|`` (the unit index ``()`` at level 0).
Composition ``a . b`` requires ``b.x == alpha^(a.level) a.x``.
"""

from __future__ import annotations

import random
from fractions import Fraction
from dataclasses import dataclass, field
from typing import Callable, Iterable

from .bundle import (
    UNIT_INDEX,
    BundleContext,
    BundlePoint,
    canonical_index,
    canonicalize,
    flip,
    in_refined_chart,
    iter_indices,
    points_equivalent,
    transition_power,
)
from .torus import GroupValue, Phase, TorusPoint, map_power


class NotComposable(ValueError):
    pass


@dataclass(frozen=True)
class GammaElement:
    """Arrow (x, n) of the transformation groupoid: range x, source alpha^n x."""

    x: TorusPoint
    n: int


def gamma_compose(alpha, a: GammaElement, b: GammaElement) -> GammaElement:
    if b.x != map_power(alpha, a.n, a.x):
        raise NotComposable(f"{a} and {b} are not composable")
    return GammaElement(a.x, a.n + b.n)


def product_case(n: int, m: int) -> str:
    """Name of the product formula used for levels (n, m); the unit cases come first."""
    if n == 0:
        return "unit-left"
    if m == 0:
        return "unit-right"
    if n > 0 and m > 0:
        return "a"
    if n < 0 and m < 0:
        return "b"
    if n > 0 and m == -n:
        return "c"
    if n < 0 and m == -n:
        return "d"
    if n < 0 < m:
        return "e" if m < -n else "f"
    # n > 0 > m
    return "g" if -m > n else "h"


class TwistGroupoid:
    def __init__(self, ctx: BundleContext):
        self.ctx = ctx

    @property
    def alpha(self):
        return self.ctx.alpha

    @property
    def unit_value(self) -> GroupValue:
        return self.ctx.unit

    # construction -------------------------------------------------------

    def element(self, g: GroupValue, x: TorusPoint, index=None, n: int = 0) -> BundlePoint:
        """Canonical element; ``index=None`` picks the canonical chart directly."""
        if index is None:
            return BundlePoint(g, x, canonical_index(self.ctx, n, x), n)
        index = tuple(index)
        if n != 0 and not in_refined_chart(self.ctx, n, index, x):
            raise ValueError(f"{x!r} is not in the level-{n} chart {index}")
        return canonicalize(self.ctx, BundlePoint(g, x, index, n))

    def representatives(self, lam: BundlePoint) -> list[BundlePoint]:
        """Every representative of the class of ``lam``, one per valid index."""
        out = []
        for idx in iter_indices(self.ctx, abs(lam.level)):
            if lam.level == 0 or in_refined_chart(self.ctx, lam.level, idx, lam.x):
                g = transition_power(self.ctx, lam.level, lam.index, idx, lam.x) + lam.g
                out.append(BundlePoint(g, lam.x, idx, lam.level))
        return out

    def unit(self, x: TorusPoint) -> BundlePoint:
        return BundlePoint(self.unit_value, x, UNIT_INDEX, 0)

    def iota(self, x: TorusPoint, z: GroupValue) -> BundlePoint:
        return BundlePoint(z, x, UNIT_INDEX, 0)

    def lift(self, gamma: GammaElement) -> BundlePoint:
        return self.element(self.unit_value, gamma.x, None, gamma.n)

    # structure maps -----------------------------------------------------

    def range(self, lam: BundlePoint) -> TorusPoint:
        return lam.x

    def source(self, lam: BundlePoint) -> TorusPoint:
        return map_power(self.alpha, lam.level, lam.x)

    def project(self, lam: BundlePoint) -> GammaElement:
        return GammaElement(lam.x, lam.level)

    def act(self, z: GroupValue, lam: BundlePoint) -> BundlePoint:
        return BundlePoint(z + lam.g, lam.x, lam.index, lam.level)

    def inverse(self, lam: BundlePoint) -> BundlePoint:
        n = lam.level
        raw = BundlePoint(-lam.g, map_power(self.alpha, n, lam.x), flip(lam.index), -n)
        return canonicalize(self.ctx, raw)

    def equivalent(self, a: BundlePoint, b: BundlePoint) -> bool:
        return points_equivalent(self.ctx, a, b)

    # product ------------------------------------------------------------

    def compose(self, a: BundlePoint, b: BundlePoint) -> BundlePoint:
        if b.x != self.source(a):
            raise NotComposable(f"source {self.source(a)!r} != range {b.x!r}")
        return canonicalize(self.ctx, self.compose_raw(a, b))

    def compose_raw(self, a: BundlePoint, b: BundlePoint) -> BundlePoint:
        """The product as given case by case, before canonicalization."""
        ctx = self.ctx
        g, x, i, n = a.g, a.x, a.index, a.level
        h, j, m = b.g, b.index, b.level
        gh = g + h
        x_src = b.x  # alpha^n x
        case = product_case(n, m)
        if case == "unit-left":
            return BundlePoint(gh, x, j, m)
        if case == "unit-right":
            return BundlePoint(gh, x, i, n)
        if case in ("a", "b"):
            return BundlePoint(gh, x, i + j, n + m)
        if case == "c":
            phase = transition_power(ctx, n, i, flip(j), x)
            return BundlePoint(phase + gh, x, UNIT_INDEX, 0)
        if case == "d":
            phase = transition_power(ctx, -n, j, flip(i), x_src)
            return BundlePoint(phase + gh, x, UNIT_INDEX, 0)
        if case == "e":
            # n < 0 < m < |n|; i = (i1, i2) with |i2| = m
            i1, i2 = i[: -n - m], i[-n - m :]
            phase = transition_power(ctx, m, j, flip(i2), x_src)
            return BundlePoint(phase + gh, x, i1, n + m)
        if case == "f":
            # n < 0 < |n| < m; j = (j1, j2) with |j1| = |n|
            j1, j2 = j[:-n], j[-n:]
            phase = transition_power(ctx, -n, j1, flip(i), x_src)
            return BundlePoint(phase + gh, x, j2, n + m)
        if case == "g":
            # m < 0 < n < |m|; j = (j1, j2) with |j1| = n
            j1, j2 = j[:n], j[n:]
            phase = transition_power(ctx, n, i, flip(j1), x)
            return BundlePoint(phase + gh, x, j2, n + m)
        # case h: n > |m| > 0 > m; i = (i1, i2) with |i2| = |m|
        i1, i2 = i[: n + m], i[n + m :]
        phase = transition_power(ctx, -m, i2, flip(j), map_power(self.alpha, n + m, x))
        return BundlePoint(phase + gh, x, i1, n + m)


# --------------------------------------------------------------------------
# randomized verification


def sample_point(rng: random.Random, denominator: int) -> TorusPoint:
    return TorusPoint((Fraction(rng.randrange(denominator), denominator), Fraction(rng.randrange(denominator), denominator)))


def sample_group_value(rng: random.Random, unit: GroupValue, denominator: int = 360) -> GroupValue:
    if isinstance(unit, Phase):
        return Phase(Fraction(rng.randrange(denominator), denominator))
    return type(unit)(rng.randrange(unit.modulus), unit.modulus)


def sample_element(G: TwistGroupoid, rng: random.Random, x: TorusPoint, n: int) -> BundlePoint:
    """A random representative (not necessarily canonical) of a random class over (x, n)."""
    g = sample_group_value(rng, G.unit_value)
    reps = G.representatives(G.element(g, x, None, n))
    return rng.choice(reps)


@dataclass
class Report:
    suite: str
    samples: int
    seed: int
    checks: dict[str, int] = field(default_factory=dict)
    failures: list[dict] = field(default_factory=list)
    metrics: dict[str, float] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.failures

    def count(self, name: str, k: int = 1):
        self.checks[name] = self.checks.get(name, 0) + k

    def fail(self, check: str, **witness):
        if len(self.failures) < 20:
            self.failures.append({"check": check, **witness})
        else:
            self.count("failures_truncated")

    def measure(self, name: str, value: float):
        """Track the largest value seen for a numeric error."""
        self.metrics[name] = max(self.metrics.get(name, 0.0), float(value))

    def to_json(self) -> dict:
        out = {
            "suite": self.suite,
            "samples": self.samples,
            "seed": self.seed,
            "checks": dict(sorted(self.checks.items())),
            "failures": self.failures,
            "passed": self.ok,
        }
        if self.metrics:
            out["max_errors"] = {k: float(f"{v:.3e}") for k, v in sorted(self.metrics.items())}
        return out


def twist_axioms_report(G: TwistGroupoid, samples: int, seed: int, denominator: int, max_level: int = 4) -> Report:
    """Randomized check that the groupoid is a twist: free central action, surjective projection, transitive fibers."""
    rng = random.Random(seed)
    rep = Report("twist-axioms", samples, seed)
    unit = G.unit_value
    for _ in range(samples):
        x = sample_point(rng, denominator)
        n = rng.randint(-max_level, max_level)
        z1 = sample_group_value(rng, unit)
        z2 = sample_group_value(rng, unit)

        # injectivity of iota and freeness of the action
        rep.count("iota-injective")
        if (G.iota(x, z1) == G.iota(x, z2)) != (z1 == z2):
            rep.fail("iota-injective", x=x.to_json(), z1=str(z1), z2=str(z2))

        # surjectivity of the projection
        gamma = GammaElement(x, n)
        lam = G.lift(gamma)
        rep.count("pi-surjective")
        if G.project(lam) != gamma:
            rep.fail("pi-surjective", x=x.to_json(), n=n)

        lam1 = G.act(z1, lam)
        lam2 = G.act(z2, sample_element(G, rng, x, n))
        lam2 = canonicalize(G.ctx, lam2)

        # fiber condition: same projection means related by iota(r, z)
        rep.count("fiber")
        z = lam2.g - lam1.g
        if G.compose(G.iota(G.range(lam1), z), lam1) != lam2:
            rep.fail("fiber", lam1=lam1.to_json(), lam2=lam2.to_json())

        # centrality
        rep.count("central")
        left = G.compose(lam1, G.iota(G.source(lam1), z2))
        right = G.compose(G.iota(G.range(lam1), z2), lam1)
        if left != right:
            rep.fail("central", lam=lam1.to_json(), z=str(z2))

        # the action is free and preserves the projection
        rep.count("free")
        if (G.act(z2, lam1) == lam1) != z2.is_identity() or G.project(G.act(z2, lam1)) != gamma:
            rep.fail("free", lam=lam1.to_json(), z=str(z2))
    return rep


SIGN_PATTERNS = (-1, 0, 1)


def magnitude_levels(rng: random.Random, signs: tuple[int, int, int], cap: int = 4) -> tuple[int, int, int]:
    return tuple(s * rng.randint(1, cap) if s else 0 for s in signs)


def composable_triple(G: TwistGroupoid, rng: random.Random, levels: Iterable[int], denominator: int) -> list[BundlePoint]:
    x = sample_point(rng, denominator)
    out = []
    for n in levels:
        out.append(sample_element(G, rng, x, n))
        x = map_power(G.alpha, n, x)
    return out


Composer = Callable[[BundlePoint, BundlePoint], BundlePoint]
