"""The Heisenberg group in coordinates where the lattice is Z^3, and the nilmanifold N_c.

Product: (x, y, s)(x', y', s') = (x + x', y + y', s + s' + c*y*x').
N_c is the quotient by right multiplication with integer triples; it fibers
over the 2-torus by (x, y, s) -> (x, y) with the circle acting on s.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from .bimodule import QuasiPeriodic
from .bundle import AffinePhase, Piece, TransitionFamily
from .torus import FULL_ARC, QHM_BANDS, Arc, ArcProduct, Cover, Phase, Region, TorusPoint, band_cover, rational

DEFAULT_BANDS = QHM_BANDS


class InvariantViolation(ValueError):
    pass


@dataclass(frozen=True)
class HeisenbergPoint:
    x: Fraction
    y: Fraction
    s: Fraction

    def __post_init__(self):
        for name in ("x", "y", "s"):
            object.__setattr__(self, name, rational(getattr(self, name)))

    @classmethod
    def of(cls, x, y, s) -> "HeisenbergPoint":
        return cls(rational(x), rational(y), rational(s))


def h_mul(a: HeisenbergPoint, b: HeisenbergPoint, c: int) -> HeisenbergPoint:
    return HeisenbergPoint(a.x + b.x, a.y + b.y, a.s + b.s + c * a.y * b.x)


def h_inverse(a: HeisenbergPoint, c: int) -> HeisenbergPoint:
    return HeisenbergPoint(-a.x, -a.y, -a.s + c * a.x * a.y)


H_IDENTITY = HeisenbergPoint(Fraction(0), Fraction(0), Fraction(0))


@dataclass(frozen=True)
class NcPoint:
    """A point of N_c stored by its representative in [0, 1)^3."""

    rep: HeisenbergPoint
    c: int


def lattice_canonicalize(p: HeisenbergPoint, c: int) -> NcPoint:
    k = -math.floor(p.x)
    m = -math.floor(p.y)
    shifted_s = p.s + c * k * p.y
    n = -math.floor(shifted_s)
    rep = h_mul(p, HeisenbergPoint(Fraction(k), Fraction(m), Fraction(n)), c)
    return NcPoint(rep, c)


def circle_action(t: Phase | Fraction, w: NcPoint) -> NcPoint:
    t = t.value if isinstance(t, Phase) else rational(t)
    p = w.rep
    return lattice_canonicalize(HeisenbergPoint(p.x, p.y, p.s + t), w.c)


def bundle_projection(w: NcPoint) -> TorusPoint:
    return TorusPoint((w.rep.x, w.rep.y))


def left_translate(h: HeisenbergPoint, w: NcPoint) -> NcPoint:
    return lattice_canonicalize(h_mul(h, w.rep, w.c), w.c)


# --------------------------------------------------------------------------
# clutching data


def nc_cover(bands=DEFAULT_BANDS) -> Cover:
    return band_cover(bands)


def nc_overlap_components(bands=DEFAULT_BANDS) -> tuple[Region, Region]:
    """(A, B): A is where moving in +x passes from chart 1 to chart 2, B where it passes back."""
    (a1, b1), (a2, b2) = bands
    comp_a = Region.of(ArcProduct((Arc(a2, b1), FULL_ARC)))
    comp_b = Region.of(ArcProduct((Arc(a1 + 1, b2), FULL_ARC)))
    return comp_a, comp_b


def nc_clutching_data(c: int, bands=DEFAULT_BANDS) -> TransitionFamily:
    """Two-band transition data of N_c: c_12 = 1 on A and e(c*y) on B.

    Chart 2 sees a point of B through the lift shifted by +1 in x, and
    (x, y, s)(1, 0, 0) = (x + 1, y, s + c*y) produces the phase.
    """
    cover = nc_cover(bands)
    comp_a, comp_b = nc_overlap_components(bands)
    zero = AffinePhase()
    twist = AffinePhase(Fraction(0), 0, c)
    table = {
        (1, 1): (Piece(cover.chart(1), zero),),
        (2, 2): (Piece(cover.chart(2), zero),),
        (1, 2): (Piece(comp_a, zero), Piece(comp_b, twist)),
        (2, 1): (Piece(comp_a, zero), Piece(comp_b, -twist)),
    }
    return TransitionFamily.of(cover, table)


def nc_trivialization(w: NcPoint, chart: int, bands=DEFAULT_BANDS) -> tuple[Phase, TorusPoint]:
    """Local coordinates (g, b) of w over a band: lift x into the band's window and read off s."""
    cover = nc_cover(bands)
    b = bundle_projection(w)
    arc = cover.chart(chart).pieces[0].arcs[0]
    x_lift = arc.lift(w.rep.x)
    k = x_lift - w.rep.x  # integer
    p = h_mul(w.rep, HeisenbergPoint(k, Fraction(0), Fraction(0)), w.c)
    return Phase(p.s), b


# --------------------------------------------------------------------------
# equivariant functions on N_c


class EquivariantNcFunction:
    """A complex function on the Heisenberg group meant to descend to N_c with f(z w) = z f(w).

    ``fn`` takes a HeisenbergPoint; use :meth:`from_grid` to build one from
    values at s = 0 on the grid (the s-dependence then comes from equivariance).
    """

    def __init__(self, fn: Callable[[HeisenbergPoint], complex], c: int, q: int):
        self.fn = fn
        self.c = c
        self.q = q

    def __call__(self, p: HeisenbergPoint) -> complex:
        return self.fn(p)

    @classmethod
    def from_grid(cls, values: np.ndarray, c: int) -> "EquivariantNcFunction":
        q = values.shape[0]

        def fn(p: HeisenbergPoint) -> complex:
            w = lattice_canonicalize(p, c).rep
            a, b = w.x * q, w.y * q
            if a.denominator != 1 or b.denominator != 1:
                raise ValueError("grid function evaluated off the grid")
            return cmath.exp(2j * math.pi * w.s) * complex(values[int(a), int(b)])

        return cls(fn, c, q)

    def check_conditions(self, shifts=(Fraction(1, 3), Fraction(-5, 7))) -> dict[str, float]:
        """Max deviation of each defining relation over the grid (and sample circle shifts)."""
        q, c = self.q, self.c
        f = self.fn
        err = {k: 0.0 for k in ("i", "ii", "iii", "iv", "v", "vi")}
        e = lambda t: cmath.exp(2j * math.pi * float(t))  # noqa: E731
        for a in range(q):
            for b in range(q):
                x, y = Fraction(a, q), Fraction(b, q)
                for s in (Fraction(0), *shifts):
                    v = f(HeisenbergPoint(x, y, s))
                    err["i"] = max(err["i"], abs(v - f(HeisenbergPoint(x + 1, y, s + c * y))))
                    err["ii"] = max(err["ii"], abs(v - f(HeisenbergPoint(x, y + 1, s))))
                    err["iii"] = max(err["iii"], abs(v - f(HeisenbergPoint(x, y, s + 1))))
                    for t in shifts:
                        err["iv"] = max(err["iv"], abs(f(HeisenbergPoint(x, y, s + t)) - e(t) * v))
                f0 = f(HeisenbergPoint(x, y, Fraction(0)))
                err["v"] = max(
                    err["v"],
                    abs(f0 - f(HeisenbergPoint(x + 1, y, c * y))),
                    abs(f0 - e(c * y) * f(HeisenbergPoint(x + 1, y, Fraction(0)))),
                )
                err["vi"] = max(
                    err["vi"],
                    abs(f(HeisenbergPoint(x, y + 1, Fraction(0))) - f0),
                    abs(f0 - f(HeisenbergPoint(x, y, Fraction(1)))),
                )
        return err


def equivariant_to_section(f: EquivariantNcFunction, tol: float = 1e-9) -> QuasiPeriodic:
    """F(x, y) = f(x, y, 0): an element of M^{-c}, i.e. F(x + 1, y) = e(-c y) F(x, y)."""
    errors = f.check_conditions()
    bad = {k: v for k, v in errors.items() if v > tol}
    if bad:
        raise InvariantViolation(f"not an equivariant function on N_{f.c}: {bad}")
    q = f.q
    values = np.empty((q, q), dtype=complex)
    for a in range(q):
        for b in range(q):
            values[a, b] = f(HeisenbergPoint(Fraction(a, q), Fraction(b, q), Fraction(0)))
    return QuasiPeriodic(values, twist=-f.c)


def section_to_equivariant(F: QuasiPeriodic) -> EquivariantNcFunction:
    if F.shift != 0:
        raise ValueError("only untwisted-offset modules M^k come from Heisenberg manifolds")
    return EquivariantNcFunction.from_grid(F.values, -F.twist)
