"""Sampled Hilbert C(T^2)-bimodules on a q x q grid.

Every element is a ``(q, q)`` complex array of values at the nodes
``(a/q, b/q)``. Coefficients (elements of C(T^2)) are arrays of the same
shape. An automorphism induced by a translation ``t`` acts by pullback,
``t'(phi) = phi o t``, which on the grid is a roll of the array.

Quasi-periodic modules (M^c, the spectral subspaces D_n) store their values on
the fundamental domain [0, 1) x T and extend to x + 1 by their phase rule.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .bundle import AffinePhase, TransitionFamily
from .torus import (
    QHM_BANDS,
    AffineTorusMap,
    Cover,
    TorusPoint,
    cell_representatives,
    rational,
    reduce_mod1,
)

Shift = tuple[Fraction, Fraction]
ZERO_SHIFT: Shift = (Fraction(0), Fraction(0))


class GridMismatch(ValueError):
    pass


def as_shift(t) -> Shift:
    if isinstance(t, AffineTorusMap):
        t = t.translation
    return (rational(t[0]), rational(t[1]))


def node_offset(shift: Shift, q: int) -> tuple[int, int]:
    out = []
    for s in shift:
        k = s * q
        if k.denominator != 1:
            raise GridMismatch(f"translation {shift} is not a multiple of 1/{q}")
        out.append(int(k) % q)
    return out[0], out[1]


def pullback(phi: np.ndarray, shift: Shift) -> np.ndarray:
    """(phi o t)(node) = phi(node + t) for the translation t by ``shift``."""
    da, db = node_offset(shift, phi.shape[0])
    return np.roll(phi, (-da, -db), axis=(0, 1))


def neg(shift: Shift) -> Shift:
    return (-shift[0], -shift[1])


def add(a: Shift, b: Shift) -> Shift:
    return (a[0] + b[0], a[1] + b[1])


def grid_coords(q: int) -> tuple[np.ndarray, np.ndarray]:
    a = np.arange(q)
    return np.meshgrid(a / q, a / q, indexing="ij")


def e(t) -> np.ndarray | complex:
    return np.exp(2j * np.pi * t)


# --------------------------------------------------------------------------
# quasi-periodic functions


@dataclass
class QuasiPeriodic:
    """f on R x T with f(x + 1, y) = e(twist * (y - shift)) f(x, y), sampled on [0, 1) x T.

    M^c is ``QuasiPeriodic(values, twist=c)``; the spectral subspace D_n of the
    Heisenberg algebra is ``QuasiPeriodic(values, twist=c*n, shift=n*nu)``.
    """

    values: np.ndarray
    twist: int
    shift: Fraction = Fraction(0)

    def __post_init__(self):
        self.shift = rational(self.shift)

    @property
    def q(self) -> int:
        return self.values.shape[0]

    def factor(self, y: Fraction) -> complex:
        return cmath.exp(2j * math.pi * float(reduce_mod1(self.twist * (y - self.shift))))

    def __call__(self, x, y) -> complex:
        x, y = rational(x), reduce_mod1(rational(y))
        m = math.floor(x)
        a, b = (x - m) * self.q, y * self.q
        if a.denominator != 1 or b.denominator != 1:
            raise GridMismatch(f"({x}, {y}) is not a grid node")
        base = complex(self.values[int(a), int(b)])
        return base * self.factor(y) ** m

    def extension_error(self, shifts: Sequence[int] = (-2, -1, 1, 2)) -> float:
        """Largest deviation from the phase rule, evaluating through __call__ at x + k."""
        q = self.q
        worst = 0.0
        for a in range(q):
            for b in range(q):
                x, y = Fraction(a, q), Fraction(b, q)
                for k in shifts:
                    lhs = self(x + k + 1, y)
                    rhs = self.factor(y) * self(x + k, y)
                    worst = max(worst, abs(lhs - rhs))
        return worst


def quasi_periodic_phase(q: int, twist: int, shift: Fraction = Fraction(0)) -> np.ndarray:
    _, y = grid_coords(q)
    return e(twist * (y - float(shift)))


def partition_of_unity_profile(q: int, bands=QHM_BANDS) -> tuple[np.ndarray, np.ndarray]:
    """rho_1, rho_2 on the x-circle with rho_1^2 + rho_2^2 = 1 and rho_k vanishing off band k.

    Bands (a1, b1), (a2, b2) must satisfy a1 < a2 < b1 < b2 < a1 + 1.
    """
    (a1, b1), (a2, b2) = (tuple(map(Fraction, band)) for band in bands)
    h = np.zeros(q)
    for k in range(q):
        t = Fraction(k, q)
        while t < a2:
            t += 1
        while t >= a2 + 1:
            t -= 1
        if t < b1:
            h[k] = (t - a2) / (b1 - a2)
        elif t <= a1 + 1:
            h[k] = 1.0
        elif t < b2:
            h[k] = 1 - (t - a1 - 1) / (b2 - a1 - 1)
    # cos(pi/2) is not exactly zero in floating point
    return np.where(h >= 1, 0.0, np.cos(np.pi * h / 2)), np.sin(np.pi * h / 2)


def partition_of_unity_elements(q: int, twist: int, shift: Fraction = Fraction(0), bands=QHM_BANDS) -> list[QuasiPeriodic]:
    """Two elements whose inner products with themselves sum to 1, supported in one band each.

    On the fundamental domain the value at x is rho_k at the band lift of x,
    transported by the quasi-periodicity factor when the lift is x - 1 or x + 1.
    """
    rho1, rho2 = partition_of_unity_profile(q, bands)
    out = []
    for k, rho in enumerate((rho1, rho2)):
        lo, hi = bands[k]
        vals = np.zeros((q, q), dtype=complex)
        for a in range(q):
            x = Fraction(a, q)
            lift = x
            while lift <= lo:
                lift += 1
            while lift >= hi:
                lift -= 1
            inside = lo < lift < hi
            m = x - lift  # the fundamental-domain point is the lift shifted by m
            for b in range(q):
                y = Fraction(b, q)
                phase = cmath.exp(2j * math.pi * float(reduce_mod1(twist * (y - shift)))) ** int(m)
                vals[a, b] = (rho[a] if inside else 0.0) * phase
        out.append(QuasiPeriodic(vals, twist, shift))
    return out


# --------------------------------------------------------------------------
# bimodule structures


class BimoduleStructure:
    """Left/right actions and inner products of a Hilbert C(T^2)-bimodule on sampled elements."""

    name = "bimodule"

    def left(self, a: np.ndarray, xi: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def right(self, xi: np.ndarray, a: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def inner_left(self, xi: np.ndarray, eta: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def inner_right(self, xi: np.ndarray, eta: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def norm(self, xi: np.ndarray) -> float:
        return float(np.max(np.abs(xi)))

    def __repr__(self):
        return f"<{self.name}>"


class Pointwise(BimoduleStructure):
    """Symmetric structure with pointwise actions and the canonical inner products."""

    def __init__(self, name: str = "pointwise"):
        self.name = name

    def left(self, a, xi):
        return a * xi

    def right(self, xi, a):
        return xi * a

    def inner_left(self, xi, eta):
        return xi * np.conj(eta)

    def inner_right(self, xi, eta):
        return np.conj(xi) * eta


class RightTwisted(BimoduleStructure):
    """M (x) A_theta: xi . a = xi . theta'(a), <xi, eta>_R = theta'^-1(<xi, eta>_R)."""

    def __init__(self, base: BimoduleStructure, theta: Shift):
        self.base, self.theta = base, as_shift(theta)
        self.name = f"{base.name}(x)A{_fmt(self.theta)}"

    def left(self, a, xi):
        return self.base.left(a, xi)

    def right(self, xi, a):
        return self.base.right(xi, pullback(a, self.theta))

    def inner_left(self, xi, eta):
        return self.base.inner_left(xi, eta)

    def inner_right(self, xi, eta):
        return pullback(self.base.inner_right(xi, eta), neg(self.theta))


class LeftTwisted(BimoduleStructure):
    """A_beta (x) M on the vector space of M, via a (x) xi -> beta'^-1(a) xi."""

    def __init__(self, base: BimoduleStructure, beta: Shift):
        self.base, self.beta = base, as_shift(beta)
        self.name = f"A{_fmt(self.beta)}(x){base.name}"

    def left(self, a, xi):
        return self.base.left(pullback(a, neg(self.beta)), xi)

    def right(self, xi, a):
        return self.base.right(xi, a)

    def inner_left(self, xi, eta):
        return pullback(self.base.inner_left(xi, eta), self.beta)

    def inner_right(self, xi, eta):
        return self.base.inner_right(xi, eta)


class Conjugated(BimoduleStructure):
    """A_alpha (x) M (x) A_alpha^-1 on the vector space of M."""

    def __init__(self, base: BimoduleStructure, alpha: Shift):
        self.base, self.alpha = base, as_shift(alpha)
        self.name = f"conj{_fmt(self.alpha)}({base.name})"

    def left(self, a, xi):
        return self.base.left(pullback(a, neg(self.alpha)), xi)

    def right(self, xi, a):
        return self.base.right(xi, pullback(a, neg(self.alpha)))

    def inner_left(self, xi, eta):
        return pullback(self.base.inner_left(xi, eta), self.alpha)

    def inner_right(self, xi, eta):
        return pullback(self.base.inner_right(xi, eta), self.alpha)


class Symmetrized(BimoduleStructure):
    """M^s: keep the left structure, let A act on the right as on the left.

    The right inner product is <xi, eta>_R = <eta, xi>_L of M; with the
    arguments in the other order the right inner product would be
    conjugate-linear in its second slot.
    """

    def __init__(self, base: BimoduleStructure):
        self.base = base
        self.name = f"sym({base.name})"

    def left(self, a, xi):
        return self.base.left(a, xi)

    def right(self, xi, a):
        return self.base.left(a, xi)

    def inner_left(self, xi, eta):
        return self.base.inner_left(xi, eta)

    def inner_right(self, xi, eta):
        return self.base.inner_left(eta, xi)


def _fmt(shift: Shift) -> str:
    return "[" + ",".join(str(s) for s in shift) + "]"


def a_theta(theta) -> BimoduleStructure:
    return RightTwisted(Pointwise("A"), as_shift(theta))


def tensor_with_a_theta(m: BimoduleStructure, theta) -> BimoduleStructure:
    if all(t == 0 for t in as_shift(theta)):
        return m
    return RightTwisted(m, as_shift(theta))


def left_tensor_a_theta(beta, m: BimoduleStructure) -> BimoduleStructure:
    return LeftTwisted(m, as_shift(beta))


def symmetrize(m: BimoduleStructure) -> BimoduleStructure:
    if isinstance(m, (Pointwise, Symmetrized)):
        return m
    return Symmetrized(m)


def conjugate(m: BimoduleStructure, alpha) -> BimoduleStructure:
    alpha = as_shift(alpha)
    if alpha == ZERO_SHIFT:
        return m
    if isinstance(m, Conjugated) and add(m.alpha, alpha) == ZERO_SHIFT:
        return m.base
    return Conjugated(m, alpha)


def mc_structure(c: int) -> BimoduleStructure:
    return Pointwise(f"M^{c}")


class D1Structure(BimoduleStructure):
    """First spectral subspace: phi.g = phi g, g.phi = g (phi o lambda), <g1,g2>_R = (conj(g1) g2) o lambda^-1.

    lambda is the translation by (2 mu, 2 nu). Elements are
    ``QuasiPeriodic(values, twist=c, shift=nu)``; the operations act on values.
    """

    def __init__(self, c: int, mu, nu, q: int):
        self.c, self.mu, self.nu, self.q = c, rational(mu), rational(nu), q
        self.lam: Shift = (2 * self.mu, 2 * self.nu)
        node_offset(self.lam, q)
        node_offset((Fraction(0), self.nu), q)
        self.name = f"D1(c={c},mu={self.mu},nu={self.nu})"

    def element(self, values: np.ndarray) -> QuasiPeriodic:
        return QuasiPeriodic(values, self.c, self.nu)

    def left(self, a, g):
        return a * g

    def right(self, g, a):
        return g * pullback(a, self.lam)

    def inner_left(self, g1, g2):
        return g1 * np.conj(g2)

    def inner_right(self, g1, g2):
        return pullback(np.conj(g1) * g2, neg(self.lam))


def d1_structure(c: int, mu, nu, q: int) -> D1Structure:
    return D1Structure(c, mu, nu, q)


def phi_map(g: QuasiPeriodic, nu) -> QuasiPeriodic:
    """g~(x, y) = g(x, y + nu): carries D_1 onto M^c."""
    nu = rational(nu)
    shifted = pullback(g.values, (Fraction(0), nu))
    return QuasiPeriodic(shifted, g.twist, g.shift - nu)


def phi_target(c: int, mu, nu) -> BimoduleStructure:
    """The structure phi_map transports D_1 onto: A_{delta^-1} (x) M^c (x) A_{alpha delta}.

    delta is the translation by (0, nu) and alpha the one by (2 mu, 2 nu);
    with pullback-induced automorphisms these compose to alpha.
    """
    mu, nu = rational(mu), rational(nu)
    delta = (Fraction(0), nu)
    return LeftTwisted(RightTwisted(mc_structure(c), (2 * mu, 3 * nu)), neg(delta))


def gauge_map(g: QuasiPeriodic, c: int, nu) -> QuasiPeriodic:
    """g -> e(c nu x) g, from D_1 onto M^c, intertwining D_1 with M^c (x) A_alpha."""
    nu = rational(nu)
    x, _ = grid_coords(g.q)
    return QuasiPeriodic(e(c * float(nu) * x) * g.values, g.twist, g.shift - nu)


def gauge_map_at(g: QuasiPeriodic, c: int, nu, x: Fraction, y: Fraction) -> complex:
    """The gauge map evaluated off the fundamental domain, using D_1's own extension rule."""
    return cmath.exp(2j * math.pi * float(c * rational(nu) * x)) * g(x, y)


def homotopy_map(xi: QuasiPeriodic, c: int, nu) -> QuasiPeriodic:
    """xi -> e(c nu x) xi(x, y - nu): from phi_target onto M^c (x) A_alpha."""
    nu = rational(nu)
    back = pullback(xi.values, (Fraction(0), -nu))
    x, _ = grid_coords(xi.q)
    return QuasiPeriodic(e(c * float(nu) * x) * back, xi.twist, xi.shift)


# --------------------------------------------------------------------------
# sections of bundles given by transition data


class LTStructure(Pointwise):
    """Sections of the line bundle of a circle bundle, stored by their values at canonical points.

    The value at node x is f(0, x, j) with j the least chart containing x.
    """

    def __init__(self, family: TransitionFamily, q: int):
        super().__init__("L_T")
        self.family, self.q = family, q
        self.charts = _canonical_charts(family.cover, q)


def _canonical_charts(cover: Cover, q: int) -> np.ndarray:
    out = np.zeros((q, q), dtype=int)
    for a in range(q):
        for b in range(q):
            x = TorusPoint((Fraction(a, q), Fraction(b, q)))
            out[a, b] = next(i for i, region in cover.charts if region.contains(x))
    return out


def lt_structure(family: TransitionFamily, q: int) -> LTStructure:
    return LTStructure(family, q)


def chart_value(family: TransitionFamily, section: np.ndarray, chart: int, a: int, b: int) -> complex:
    """Local value s_i at node (a, b) from the canonical value: s_i = e(c_{i,j}) s_j."""
    q = section.shape[0]
    x = TorusPoint((Fraction(a, q), Fraction(b, q)))
    j = next(i for i, region in family.cover.charts if region.contains(x))
    phase = family(chart, j, x)
    return complex(section[a, b]) * phase.to_complex()


def section_from_quasi_periodic(family: TransitionFamily, f: QuasiPeriodic) -> np.ndarray:
    """Read a section off f through each band's lift window (bands must be x-bands)."""
    q = f.q
    out = np.zeros((q, q), dtype=complex)
    for a in range(q):
        for b in range(q):
            x, y = Fraction(a, q), Fraction(b, q)
            j = next(i for i, region in family.cover.charts if region.contains(TorusPoint((x, y))))
            arc = family.cover.chart(j).pieces[0].arcs[0]
            out[a, b] = f(arc.lift(x), y)
    return out


def quasi_periodic_from_section(family: TransitionFamily, section: np.ndarray, twist: int, shift=Fraction(0)) -> QuasiPeriodic:
    q = section.shape[0]
    vals = np.zeros((q, q), dtype=complex)
    probe = QuasiPeriodic(np.ones((q, q), dtype=complex), twist, shift)
    for a in range(q):
        for b in range(q):
            x, y = Fraction(a, q), Fraction(b, q)
            j = next(i for i, region in family.cover.charts if region.contains(TorusPoint((x, y))))
            lift = family.cover.chart(j).pieces[0].arcs[0].lift(x)
            # section = f(lift) = factor^(lift - x) f(x)
            vals[a, b] = section[a, b] / probe.factor(y) ** int(lift - x)
    return QuasiPeriodic(vals, twist, shift)


def section_gluing_error(family: TransitionFamily, f: QuasiPeriodic) -> float:
    """max |s_i - e(c_ij) s_j| over nodes in overlaps, with s_i read through chart i's lift."""
    q = f.q
    worst = 0.0
    for a in range(q):
        for b in range(q):
            x, y = Fraction(a, q), Fraction(b, q)
            p = TorusPoint((x, y))
            here = [i for i, region in family.cover.charts if region.contains(p)]
            local = {i: f(family.cover.chart(i).pieces[0].arcs[0].lift(x), y) for i in here}
            for i in here:
                for j in here:
                    worst = max(worst, abs(local[i] - family(i, j, p).to_complex() * local[j]))
    return worst


class HCorrespondence(BimoduleStructure):
    """L_T (x) l^2(sigma) for a translation sigma, with the fiber sums written out.

    xi . g (t) = xi(t) g(sigma(p(t))), <xi, eta>_R(x) = sum over sigma(p(t)) = x of conj(xi) eta.
    """

    def __init__(self, family: TransitionFamily, sigma, q: int):
        self.family, self.q = family, q
        self.sigma = as_shift(sigma)
        self.name = "H"
        # fiber of each node under sigma, found by search rather than inversion
        self.image = np.zeros((q, q, 2), dtype=int)
        for a in range(q):
            for b in range(q):
                t = TorusPoint((Fraction(a, q), Fraction(b, q))).translate(self.sigma)
                self.image[a, b] = (int(t[0] * q), int(t[1] * q))

    def left(self, g, xi):
        return g * xi

    def right(self, xi, g):
        ia, ib = self.image[..., 0], self.image[..., 1]
        return xi * g[ia, ib]

    def inner_left(self, xi, eta):
        return xi * np.conj(eta)

    def inner_right(self, xi, eta):
        out = np.zeros((self.q, self.q), dtype=complex)
        np.add.at(out, (self.image[..., 0], self.image[..., 1]), np.conj(xi) * eta)
        return out


def h_correspondence(family: TransitionFamily, sigma, q: int) -> HCorrespondence:
    return HCorrespondence(family, sigma, q)


# --------------------------------------------------------------------------
# axiom checks


def axiom_errors(
    m: BimoduleStructure,
    xis: Sequence[np.ndarray],
    coeffs: Sequence[np.ndarray],
) -> dict[str, float]:
    """Max nodewise error of the Hilbert bimodule axioms over all given samples."""
    err: dict[str, float] = {}

    def note(key, value):
        err[key] = max(err.get(key, 0.0), float(value))

    def d(u, v):
        return np.max(np.abs(u - v)) if np.size(u) else 0.0

    for xi in xis:
        for side, inner in (("R", m.inner_right), ("L", m.inner_left)):
            ip = inner(xi, xi)
            note(f"positive_{side}", max(0.0, -float(np.min(ip.real))) + float(np.max(np.abs(ip.imag))))
            note(f"norm_{side}", abs(m.norm(xi) - math.sqrt(float(np.max(np.abs(ip))))))
            if m.norm(xi) > 1e-6 and np.max(np.abs(ip)) < 1e-12:
                note(f"definite_{side}", m.norm(xi))
    for xi in xis:
        for eta in xis:
            note("hermitian_R", d(m.inner_right(xi, eta), np.conj(m.inner_right(eta, xi))))
            note("hermitian_L", d(m.inner_left(xi, eta), np.conj(m.inner_left(eta, xi))))
            for a in coeffs:
                note("right_linear", d(m.inner_right(xi, m.right(eta, a)), m.inner_right(xi, eta) * a))
                note("left_linear", d(m.inner_left(m.left(a, xi), eta), a * m.inner_left(xi, eta)))
            for zeta in xis[:3]:
                note("compatibility", d(m.left(m.inner_left(xi, eta), zeta), m.right(xi, m.inner_right(eta, zeta))))
    for xi in xis[:3]:
        for a in coeffs:
            for b in coeffs:
                note("right_module", d(m.right(m.right(xi, a), b), m.right(xi, a * b)))
                note("left_module", d(m.left(a, m.left(b, xi)), m.left(a * b, xi)))
                note("bimodule", d(m.right(m.left(a, xi), b), m.left(a, m.right(xi, b))))
    return err


def symmetry_error(m: BimoduleStructure, xis, coeffs) -> float:
    return max(float(np.max(np.abs(m.left(a, xi) - m.right(xi, a)))) for xi in xis for a in coeffs)


def isomorphism_errors(
    source: BimoduleStructure,
    target: BimoduleStructure,
    mapping,
    xis: Sequence[np.ndarray],
    coeffs: Sequence[np.ndarray],
) -> dict[str, float]:
    """How far ``mapping`` (values -> values) is from a bimodule isomorphism on the samples."""
    err = {"left": 0.0, "right": 0.0, "inner_left": 0.0, "inner_right": 0.0, "linear": 0.0}

    def d(u, v):
        return float(np.max(np.abs(u - v)))

    for xi in xis:
        for a in coeffs:
            err["left"] = max(err["left"], d(mapping(source.left(a, xi)), target.left(a, mapping(xi))))
            err["right"] = max(err["right"], d(mapping(source.right(xi, a)), target.right(mapping(xi), a)))
        for eta in xis:
            err["inner_left"] = max(err["inner_left"], d(source.inner_left(xi, eta), target.inner_left(mapping(xi), mapping(eta))))
            err["inner_right"] = max(err["inner_right"], d(source.inner_right(xi, eta), target.inner_right(mapping(xi), mapping(eta))))
            err["linear"] = max(err["linear"], d(mapping(xi + 2j * eta), mapping(xi) + 2j * mapping(eta)))
    return err


def random_values(rng: np.random.Generator, q: int) -> np.ndarray:
    return rng.normal(size=(q, q)) + 1j * rng.normal(size=(q, q))


# --------------------------------------------------------------------------
# line bundle degree


class WindingError(ValueError):
    pass


def _axis_index(loop: str) -> int:
    if loop not in ("x", "y"):
        raise ValueError("loop must be 'x' or 'y'")
    return 0 if loop == "x" else 1


def clutching_route(family: TransitionFamily, walk_axis: int, fixed: Fraction) -> list[tuple[int, int, Fraction]]:
    """Chart changes met when walking once around ``walk_axis`` at the given other coordinate.

    Returns (from_chart, to_chart, position) triples; position lies in both charts.
    The walk starts and ends in the same chart.
    """
    cover = family.cover
    cuts = set()
    other = 1 - walk_axis
    for _, region in cover.charts:
        for piece in region.pieces:
            if piece.arcs[other].contains(fixed):
                cuts.update(piece.arcs[walk_axis].endpoints_mod1())
    atoms = sorted(cell_representatives(cuts))

    def point(t):
        coords = [None, None]
        coords[walk_axis], coords[other] = t, fixed
        return TorusPoint(tuple(coords))

    def charts_at(t):
        return [i for i, region in cover.charts if region.contains(point(t))]

    start = charts_at(atoms[0])
    if not start:
        raise WindingError("not a cover")
    cur = start[0]
    first = cur
    route = []
    sequence = atoms[1:] + [atoms[0]]
    prev = atoms[0]
    for t in sequence:
        here = charts_at(t)
        if cur not in here:
            new = here[0]
            # prev is an open cell next to the cut t, so every chart containing t contains prev
            route.append((cur, new, prev))
            cur = new
        prev = t
    if cur != first:
        route.append((cur, first, atoms[0]))
    return route


def winding_degree(obj, loop: str = "y", numeric_samples: int = 0) -> int:
    """Degree of a line bundle (or winding of an affine phase) along ``loop``.

    For a transition family the clutching function is read off by walking
    around the other axis; the degree is minus the winding of that function,
    so the Heisenberg bundle N_c has degree c. With ``numeric_samples`` the
    symbolic answer is cross-checked by unwrapping sampled phases.
    """
    wind_axis = _axis_index(loop)
    if isinstance(obj, AffinePhase):
        return obj.a1 if wind_axis == 0 else obj.a2
    family: TransitionFamily = obj
    walk_axis = 1 - wind_axis
    # chart sequences are constant on the cells cut out by the endpoints along the winding axis
    cuts = set()
    for _, region in family.cover.charts:
        for piece in region.pieces:
            cuts.update(piece.arcs[wind_axis].endpoints_mod1())
    coefficients = set()
    for fixed in cell_representatives(cuts):
        total = 0
        for i, j, pos in clutching_route(family, walk_axis, fixed):
            p = [None, None]
            p[walk_axis], p[wind_axis] = pos, fixed
            pieces = family.pieces(i, j)
            sign = 1
            if pieces is None:
                pieces, sign = family.pieces(j, i), -1
            fn = next(pc.fn for pc in pieces if pc.region.contains(TorusPoint(tuple(p))))
            total += sign * (fn.a1 if wind_axis == 0 else fn.a2)
        coefficients.add(total)
    if len(coefficients) != 1:
        symbolic = None
    else:
        symbolic = -coefficients.pop()
    if numeric_samples or symbolic is None:
        numeric = numeric_winding(family, loop, max(numeric_samples, 1024))
        rounded = round(numeric)
        if abs(numeric - rounded) >= 0.1:
            raise WindingError(f"numeric winding {numeric} is not near an integer")
        if symbolic is not None and rounded != symbolic:
            raise WindingError(f"symbolic degree {symbolic} != numeric {numeric}")
        return rounded
    return symbolic


def numeric_winding(family: TransitionFamily, loop: str = "y", samples: int = 1024, walk_at: Fraction | None = None) -> float:
    """Minus the accumulated principal-branch phase increments of the clutching function."""
    wind_axis = _axis_index(loop)
    walk_axis = 1 - wind_axis
    values = []
    for k in range(samples):
        fixed = Fraction(k, samples)
        total = 1 + 0j
        for i, j, pos in clutching_route(family, walk_axis, fixed):
            p = [None, None]
            p[walk_axis], p[wind_axis] = pos, fixed
            total *= family(i, j, TorusPoint(tuple(p))).to_complex()
        values.append(total)
    values = np.array(values)
    steps = np.angle(np.roll(values, -1) / values)
    return -float(np.sum(steps)) / (2 * np.pi)


# --------------------------------------------------------------------------
# JSON


def grid_function_to_json(values: np.ndarray) -> list:
    """Nested rows of [re, im] pairs."""
    return [[[float(v.real), float(v.imag)] for v in row] for row in np.asarray(values, dtype=complex)]


def grid_function_from_json(data) -> np.ndarray:
    arr = np.asarray(data, dtype=float)
    if arr.ndim != 3 or arr.shape[0] != arr.shape[1] or arr.shape[2] != 2:
        raise ValueError("expected a q x q array of [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]
