"""Exact arithmetic on tori: points, circle phases, translations, arc regions, covers."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from itertools import product
from typing import Iterable, Sequence


class EmptyResult(LookupError):
    """A point lies in no chart of a cover."""


def rational(value) -> Fraction:
    """Parse ints, Fractions and ``"p/q"`` strings into a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot interpret {value!r} as an exact rational")


def rational_str(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def reduce_mod1(x) -> Fraction:
    x = rational(x)
    return x - math.floor(x)


@dataclass(frozen=True)
class Phase:
    """An element of the circle group written additively: ``value`` stands for e(value)."""

    value: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "value", reduce_mod1(self.value))

    def __add__(self, other: "Phase") -> "Phase":
        if not isinstance(other, Phase):
            return NotImplemented
        return Phase(self.value + other.value)

    def __neg__(self) -> "Phase":
        return Phase(-self.value)

    def __sub__(self, other: "Phase") -> "Phase":
        return self + (-other)

    def identity(self) -> "Phase":
        return Phase(0)

    def is_identity(self) -> bool:
        return self.value == 0

    def to_complex(self) -> complex:
        return complex(math.cos(2 * math.pi * self.value), math.sin(2 * math.pi * self.value))

    def __repr__(self):
        return f"Phase({rational_str(self.value)})"


@dataclass(frozen=True)
class Cyclic:
    """An element of Z/m, used for groupoid-level tests with a finite structure group."""

    residue: int
    modulus: int

    def __post_init__(self):
        if self.modulus < 1:
            raise ValueError("modulus must be positive")
        object.__setattr__(self, "residue", self.residue % self.modulus)

    def _check(self, other):
        if not isinstance(other, Cyclic) or other.modulus != self.modulus:
            raise TypeError(f"cannot combine {self!r} with {other!r}")

    def __add__(self, other: "Cyclic") -> "Cyclic":
        self._check(other)
        return Cyclic(self.residue + other.residue, self.modulus)

    def __neg__(self) -> "Cyclic":
        return Cyclic(-self.residue, self.modulus)

    def __sub__(self, other: "Cyclic") -> "Cyclic":
        return self + (-other)

    def identity(self) -> "Cyclic":
        return Cyclic(0, self.modulus)

    def is_identity(self) -> bool:
        return self.residue == 0


GroupValue = Phase | Cyclic


@dataclass(frozen=True)
class TorusPoint:
    coords: tuple[Fraction, ...]

    def __post_init__(self):
        coords = tuple(reduce_mod1(c) for c in self.coords)
        if not 1 <= len(coords) <= 3:
            raise ValueError("torus dimension must be 1, 2 or 3")
        object.__setattr__(self, "coords", coords)

    @classmethod
    def of(cls, *coords) -> "TorusPoint":
        return cls(tuple(rational(c) for c in coords))

    @property
    def dim(self) -> int:
        return len(self.coords)

    def __getitem__(self, k: int) -> Fraction:
        return self.coords[k]

    def translate(self, shift: Sequence[Fraction]) -> "TorusPoint":
        if len(shift) != self.dim:
            raise ValueError("dimension mismatch")
        return TorusPoint(tuple(c + s for c, s in zip(self.coords, shift)))

    def to_json(self) -> list[str]:
        return [rational_str(c) for c in self.coords]

    def __repr__(self):
        return "TorusPoint(" + ", ".join(rational_str(c) for c in self.coords) + ")"


@dataclass(frozen=True)
class AffineTorusMap:
    """A translation of the torus. Always invertible."""

    translation: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "translation", tuple(rational(t) for t in self.translation))

    @classmethod
    def of(cls, *shift) -> "AffineTorusMap":
        return cls(tuple(rational(s) for s in shift))

    @property
    def dim(self) -> int:
        return len(self.translation)

    def power_shift(self, n: int) -> tuple[Fraction, ...]:
        return tuple(n * t for t in self.translation)

    def __call__(self, p: TorusPoint) -> TorusPoint:
        return p.translate(self.translation)

    def inverse(self) -> "AffineTorusMap":
        return AffineTorusMap(tuple(-t for t in self.translation))


def map_power(alpha: AffineTorusMap, n: int, p: TorusPoint) -> TorusPoint:
    if n == 0:
        return p
    return p.translate(alpha.power_shift(n))


@dataclass(frozen=True)
class Arc:
    """Open arc of the circle between two rational endpoints, read counter-clockwise.

    ``start`` may lie outside [0, 1); the raw endpoints double as the lift window
    used when a chart value has to be read off a function on the real line.
    An arc of length at least one is the whole circle.
    """

    start: Fraction
    end: Fraction

    def __post_init__(self):
        start, end = rational(self.start), rational(self.end)
        if end <= start:
            raise ValueError(f"empty arc ({start}, {end})")
        object.__setattr__(self, "start", start)
        object.__setattr__(self, "end", end)
        # integer data for the membership test, which dominates most workloads
        length = end - start
        object.__setattr__(self, "_full", length >= 1)
        object.__setattr__(self, "_key", (start.numerator, start.denominator, length.numerator, length.denominator))

    @property
    def length(self) -> Fraction:
        return self.end - self.start

    @property
    def is_full(self) -> bool:
        return self.length >= 1

    def contains(self, t: Fraction) -> bool:
        if self._full:
            return True
        sn, sd, ln, ld = self._key
        den = t.denominator * sd
        offset = (t.numerator * sd - sn * t.denominator) % den
        return offset != 0 and offset * ld < ln * den

    def lift(self, t: Fraction) -> Fraction:
        """Representative of ``t`` inside (start, end); for full arcs, inside [start, start+1)."""
        if self.is_full:
            return self.start + reduce_mod1(t - self.start)
        if not self.contains(t):
            raise ValueError(f"{t} not in arc {self}")
        return self.start + reduce_mod1(t - self.start)

    def shifted(self, s: Fraction) -> "Arc":
        return Arc(self.start + s, self.end + s)

    def intersect(self, other: "Arc") -> list["Arc"]:
        if self.is_full:
            return [other]
        if other.is_full:
            return [self]
        # translate other so its start lies in [self.start - 1, self.start)
        m = math.ceil(self.start - other.start) - 1
        pieces = []
        for k in (m, m + 1):
            lo = max(self.start, other.start + k)
            hi = min(self.end, other.end + k)
            if lo < hi:
                pieces.append(Arc(lo, hi))
        return pieces

    def endpoints_mod1(self) -> list[Fraction]:
        if self.is_full:
            return []
        return [reduce_mod1(self.start), reduce_mod1(self.end)]

    def to_json(self) -> list[str]:
        return [rational_str(self.start), rational_str(self.end)]

    @classmethod
    def from_json(cls, data) -> "Arc":
        return cls(rational(data[0]), rational(data[1]))

    def __repr__(self):
        return f"Arc({rational_str(self.start)}, {rational_str(self.end)})"


FULL_ARC = Arc(Fraction(0), Fraction(1))


@dataclass(frozen=True)
class ArcProduct:
    arcs: tuple[Arc, ...]

    @classmethod
    def of(cls, *arcs) -> "ArcProduct":
        return cls(tuple(a if isinstance(a, Arc) else Arc(rational(a[0]), rational(a[1])) for a in arcs))

    @property
    def dim(self) -> int:
        return len(self.arcs)

    def contains(self, p: TorusPoint) -> bool:
        return all(a.contains(c) for a, c in zip(self.arcs, p.coords))

    def shifted(self, shift: Sequence[Fraction]) -> "ArcProduct":
        return ArcProduct(tuple(a.shifted(s) for a, s in zip(self.arcs, shift)))

    def intersect(self, other: "ArcProduct") -> list["ArcProduct"]:
        per_axis = [a.intersect(b) for a, b in zip(self.arcs, other.arcs)]
        return [ArcProduct(tuple(combo)) for combo in product(*per_axis)]

    def to_json(self):
        return [a.to_json() for a in self.arcs]

    @classmethod
    def from_json(cls, data) -> "ArcProduct":
        return cls(tuple(Arc.from_json(a) for a in data))


@dataclass(frozen=True)
class Region:
    """Finite union of open arc-products. The empty union is allowed."""

    pieces: tuple[ArcProduct, ...] = ()

    @classmethod
    def of(cls, *pieces: ArcProduct) -> "Region":
        return cls(tuple(pieces))

    @classmethod
    def full(cls, dim: int = 2) -> "Region":
        return cls((ArcProduct((FULL_ARC,) * dim),))

    def is_empty(self) -> bool:
        return not self.pieces

    def contains(self, p: TorusPoint) -> bool:
        return any(piece.contains(p) for piece in self.pieces)

    def shifted(self, shift: Sequence[Fraction]) -> "Region":
        return Region(tuple(piece.shifted(shift) for piece in self.pieces))

    def intersect(self, other: "Region") -> "Region":
        out = []
        for a in self.pieces:
            for b in other.pieces:
                out.extend(a.intersect(b))
        return Region(tuple(out))

    def union(self, other: "Region") -> "Region":
        return Region(self.pieces + other.pieces)

    def endpoints(self, axis: int) -> set[Fraction]:
        pts: set[Fraction] = set()
        for piece in self.pieces:
            pts.update(piece.arcs[axis].endpoints_mod1())
        return pts

    def to_json(self):
        return [piece.to_json() for piece in self.pieces]

    @classmethod
    def from_json(cls, data) -> "Region":
        return cls(tuple(ArcProduct.from_json(p) for p in data))


def cell_representatives(endpoints: Iterable[Fraction]) -> list[Fraction]:
    """One point per atom of the circle cut at ``endpoints``: the cuts and the gap midpoints.

    Open-arc membership is constant on each atom, so these points decide any
    question about unions of arcs with those endpoints. Gap midpoints come first.
    """
    cuts = sorted(set(reduce_mod1(e) for e in endpoints))
    if not cuts:
        return [Fraction(0)]
    mids = []
    for k, a in enumerate(cuts):
        b = cuts[k + 1] if k + 1 < len(cuts) else cuts[0] + 1
        mids.append(reduce_mod1((a + b) / 2))
    return mids + cuts


def region_witnesses(region: Region, dim: int, extra: Iterable[Region] = ()) -> list[TorusPoint]:
    """Representative points of every cell of the subdivision induced by the given regions."""
    regions = [region, *extra]
    axes = []
    for axis in range(dim):
        cuts: set[Fraction] = set()
        for r in regions:
            cuts |= r.endpoints(axis)
        axes.append(cell_representatives(cuts))
    return [TorusPoint(tuple(c)) for c in product(*axes)]


def region_subset(inner: Region, outer: Region, dim: int = 2) -> bool:
    """Exact containment test for unions of open arc-products."""
    for p in region_witnesses(inner, dim, [outer]):
        if inner.contains(p) and not outer.contains(p):
            return False
    return True


@dataclass(frozen=True)
class Cover:
    """Indexed family of open regions of the 2-torus; indices are ordered as given."""

    charts: tuple[tuple[int, Region], ...]
    dim: int = 2

    @classmethod
    def of(cls, charts: dict[int, Region] | Sequence[tuple[int, Region]], dim: int = 2) -> "Cover":
        items = charts.items() if isinstance(charts, dict) else charts
        return cls(tuple(sorted(items, key=lambda kv: kv[0])), dim)

    @property
    def indices(self) -> tuple[int, ...]:
        return tuple(i for i, _ in self.charts)

    def chart(self, i: int) -> Region:
        for j, region in self.charts:
            if j == i:
                return region
        raise KeyError(f"no chart with index {i}")

    def to_json(self) -> dict:
        return {
            "charts": [
                {"index": i, "arcs": region.to_json()} for i, region in self.charts
            ]
        }

    @classmethod
    def from_json(cls, data: dict) -> "Cover":
        charts = [(int(c["index"]), Region.from_json(c["arcs"])) for c in data["charts"]]
        dims = {piece.dim for _, r in charts for piece in r.pieces}
        return cls.of(charts, dim=dims.pop() if len(dims) == 1 else 2)


def charts_containing(cover: Cover, p: TorusPoint) -> list[int]:
    found = [i for i, region in cover.charts if region.contains(p)]
    if not found:
        raise EmptyResult(f"{p!r} lies in no chart")
    return found


@dataclass
class ValidationReport:
    covered: bool
    checked: int
    witnesses: list[TorusPoint] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.covered

    def to_json(self) -> dict:
        return {
            "covered": self.covered,
            "checked": self.checked,
            "witnesses": [w.to_json() for w in self.witnesses],
        }


def cover_validate(cover: Cover) -> ValidationReport:
    union = reduce(Region.union, (r for _, r in cover.charts), Region())
    points = region_witnesses(union, cover.dim)
    missing = [p for p in points if not union.contains(p)]
    return ValidationReport(covered=not missing, checked=len(points), witnesses=missing)


def band_cover(bands: Sequence[tuple], dim: int = 2) -> Cover:
    """Cover by bands in the first coordinate, full in the others; indices start at 1."""
    charts = []
    for k, (a, b) in enumerate(bands, start=1):
        arcs = (Arc(rational(a), rational(b)),) + (FULL_ARC,) * (dim - 1)
        charts.append((k, Region.of(ArcProduct(arcs))))
    return Cover.of(charts, dim)


def lattice_denominator(regions: Iterable[Region], alpha: AffineTorusMap | None = None, factor: int = 8) -> int:
    dens = [1]
    for r in regions:
        for piece in r.pieces:
            for arc in piece.arcs:
                dens += [arc.start.denominator, arc.end.denominator]
    if alpha is not None:
        dens += [t.denominator for t in alpha.translation]
    return math.lcm(*dens) * factor


# two overlapping bands in x used for the Heisenberg manifold bundles; their
# overlap has the components (3/8, 5/8) and (7/8, 9/8)
QHM_BANDS = ((Fraction(-1, 8), Fraction(5, 8)), (Fraction(3, 8), Fraction(9, 8)))
