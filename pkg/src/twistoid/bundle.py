"""Principal bundles over the 2-torus given by transition data, and their refinements.

A bundle is described by a cover ``{U_i}`` and transition functions
``c_ij : U_i ∩ U_j -> G``, glued by ``(g, x, i) ~ (g + c_ij(x), x, j)``
(the group is abelian and written additively throughout).

For a translation ``alpha`` and a level ``n != 0`` the refined data are

* ``n > 0``: charts ``U_(i1..in) = ∩_k alpha^-(k-1) U_ik`` and
  ``c^(n)_{I,J}(x) = Σ_k c_{ik,jk}(alpha^(k-1) x)``;
* ``n < 0``: charts ``W_(i1..im) = ∩_k alpha^k U_ik`` and
  ``c^(n)_{I,J}(x) = -Σ_k c_{ik,jk}(alpha^-k x)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

from .torus import (
    AffineTorusMap,
    Cover,
    Cyclic,
    GroupValue,
    Phase,
    Region,
    TorusPoint,
    map_power,
    rational,
    rational_str,
    region_subset,
    region_witnesses,
)


class DomainError(ValueError):
    """A point lies outside the domain of a transition function."""


class CocycleInconsistency(AssertionError):
    """Two routes to the same transition value disagree."""


@dataclass(frozen=True)
class AffinePhase:
    """The circle-valued function e(a0 + a1*x + a2*y); a1, a2 must be integers."""

    a0: Fraction = Fraction(0)
    a1: int = 0
    a2: int = 0

    def __post_init__(self):
        if not (isinstance(self.a1, int) and isinstance(self.a2, int)):
            raise TypeError("winding coefficients must be integers")
        object.__setattr__(self, "a0", rational(self.a0))

    def __call__(self, x: TorusPoint) -> Phase:
        return Phase(self.a0 + self.a1 * x[0] + self.a2 * x[1])

    def __add__(self, other: "AffinePhase") -> "AffinePhase":
        return AffinePhase(self.a0 + other.a0, self.a1 + other.a1, self.a2 + other.a2)

    def __neg__(self) -> "AffinePhase":
        return AffinePhase(-self.a0, -self.a1, -self.a2)

    def to_json(self) -> dict:
        return {"a0": rational_str(self.a0), "a1": self.a1, "a2": self.a2}

    @classmethod
    def from_json(cls, data: dict) -> "AffinePhase":
        return cls(rational(data["a0"]), int(data["a1"]), int(data["a2"]))


@dataclass(frozen=True)
class CyclicConstant:
    residue: int
    modulus: int

    def __call__(self, x: TorusPoint) -> Cyclic:
        return Cyclic(self.residue, self.modulus)

    def __add__(self, other: "CyclicConstant") -> "CyclicConstant":
        return CyclicConstant(self.residue + other.residue, self.modulus)

    def __neg__(self) -> "CyclicConstant":
        return CyclicConstant(-self.residue, self.modulus)


@dataclass(frozen=True)
class Piece:
    region: Region
    fn: AffinePhase | CyclicConstant


@dataclass(frozen=True)
class TransitionFamily:
    """Cover plus piecewise transition functions keyed by ordered chart pairs.

    Missing ``(i, i)`` entries are the identity and a missing ``(j, i)`` is the
    inverse of a stored ``(i, j)``; ``stored_pairs`` lists what was given.
    """

    cover: Cover
    transitions: tuple[tuple[tuple[int, int], tuple[Piece, ...]], ...]
    modulus: int | None = None  # None for the circle group, m for Z/m

    def __post_init__(self):
        object.__setattr__(self, "_table", dict(self.transitions))

    @classmethod
    def of(cls, cover: Cover, table: dict, modulus: int | None = None) -> "TransitionFamily":
        return cls(cover, tuple(sorted((k, tuple(v)) for k, v in table.items())), modulus)

    @property
    def unit(self) -> GroupValue:
        return Phase(0) if self.modulus is None else Cyclic(0, self.modulus)

    @property
    def stored_pairs(self) -> list[tuple[int, int]]:
        return [k for k, _ in self.transitions]

    def overlap(self, i: int, j: int) -> Region:
        return self.cover.chart(i).intersect(self.cover.chart(j))

    def pieces(self, i: int, j: int) -> tuple[Piece, ...] | None:
        return self._table.get((i, j))

    def __call__(self, i: int, j: int, x: TorusPoint) -> GroupValue:
        if not (self.cover.chart(i).contains(x) and self.cover.chart(j).contains(x)):
            raise DomainError(f"{x!r} not in U_{i} ∩ U_{j}")
        pieces = self._table.get((i, j))
        if pieces is None:
            if i == j:
                return self.unit
            if (j, i) in self._table:
                return -self(j, i, x)
            raise DomainError(f"no transition stored for ({i}, {j})")
        for piece in pieces:
            if piece.region.contains(x):
                return piece.fn(x)
        raise DomainError(f"{x!r} not covered by the pieces of c_{i},{j}")

    def validate_pieces(self) -> list[str]:
        """Check that each stored function is defined exactly on its overlap."""
        problems = []
        for (i, j), pieces in self.transitions:
            overlap = self.overlap(i, j)
            union = Region(tuple(p for piece in pieces for p in piece.region.pieces))
            if not region_subset(overlap, union):
                problems.append(f"c_{i},{j} undefined somewhere on U_{i} ∩ U_{j}")
            if not region_subset(union, overlap):
                problems.append(f"c_{i},{j} has a piece outside U_{i} ∩ U_{j}")
            for a in range(len(pieces)):
                for b in range(a + 1, len(pieces)):
                    common = pieces[a].region.intersect(pieces[b].region)
                    for x in region_witnesses(common, 2):
                        if common.contains(x) and pieces[a].fn(x) != pieces[b].fn(x):
                            problems.append(f"pieces of c_{i},{j} disagree at {x!r}")
                            break
        return problems

    def with_transition(self, i: int, j: int, pieces: Sequence[Piece]) -> "TransitionFamily":
        table = dict(self._table)
        table[(i, j)] = tuple(pieces)
        return TransitionFamily.of(self.cover, table, self.modulus)

    def to_json(self) -> dict:
        out = []
        for (i, j), pieces in self.transitions:
            rows = []
            for piece in pieces:
                row = {"region": piece.region.to_json()}
                if isinstance(piece.fn, AffinePhase):
                    row["phase"] = piece.fn.to_json()
                else:
                    row["residue"] = piece.fn.residue
                rows.append(row)
            out.append({"i": i, "j": j, "pieces": rows})
        group = "T" if self.modulus is None else f"Z/{self.modulus}"
        return {"group": group, "cover": self.cover.to_json(), "transitions": out}

    @classmethod
    def from_json(cls, data: dict) -> "TransitionFamily":
        group = data.get("group", "T")
        modulus = None if group == "T" else int(group.split("/")[1])
        cover = Cover.from_json(data["cover"])
        table = {}
        for entry in data["transitions"]:
            pieces = []
            for row in entry["pieces"]:
                region = Region.from_json(row["region"])
                if modulus is None:
                    fn = AffinePhase.from_json(row["phase"])
                else:
                    fn = CyclicConstant(int(row["residue"]), modulus)
                pieces.append(Piece(region, fn))
            table[(int(entry["i"]), int(entry["j"]))] = tuple(pieces)
        return cls.of(cover, table, modulus)


def tensor_families(a: TransitionFamily, b: TransitionFamily) -> TransitionFamily:
    """Pointwise product of two transition families on a common cover."""
    if a.cover != b.cover or a.modulus != b.modulus:
        raise ValueError("tensor product needs a common cover and group")
    keys = set(a.stored_pairs) | set(b.stored_pairs)
    table = {}
    for i, j in keys:
        pa = a.pieces(i, j) or _derived_pieces(a, i, j)
        pb = b.pieces(i, j) or _derived_pieces(b, i, j)
        table[(i, j)] = tuple(
            Piece(Region(tuple(r.pieces)), x.fn + y.fn)
            for x in pa
            for y in pb
            for r in [x.region.intersect(y.region)]
            if not r.is_empty()
        )
    return TransitionFamily.of(a.cover, table, a.modulus)


def _derived_pieces(fam: TransitionFamily, i: int, j: int) -> tuple[Piece, ...]:
    if (j, i) in fam._table:
        return tuple(Piece(p.region, -p.fn) for p in fam._table[(j, i)])
    if i == j:
        unit = AffinePhase() if fam.modulus is None else CyclicConstant(0, fam.modulus)
        return (Piece(fam.overlap(i, i), unit),)
    raise DomainError(f"no transition for ({i}, {j})")


@dataclass(frozen=True)
class BundleContext:
    family: TransitionFamily
    alpha: AffineTorusMap

    @property
    def indices(self) -> tuple[int, ...]:
        return self.family.cover.indices

    @property
    def unit(self) -> GroupValue:
        return self.family.unit


Index = tuple[int, ...]
UNIT_INDEX: Index = ()


@dataclass(frozen=True)
class BundlePoint:
    """A representative (g, x, index, level); level 0 always carries the unit index ``()``."""

    g: GroupValue
    x: TorusPoint
    index: Index
    level: int

    def __post_init__(self):
        if len(self.index) != abs(self.level):
            raise ValueError(f"index {self.index} has the wrong length for level {self.level}")

    def to_json(self) -> dict:
        g = rational_str(self.g.value) if isinstance(self.g, Phase) else self.g.residue
        return {"g": g, "x": self.x.to_json(), "index": list(self.index), "n": self.level}


def flip(index: Index) -> Index:
    return tuple(reversed(index))


def truncate(index: Index, length: int) -> Index:
    return index[:length]


def chart_position_point(ctx: BundleContext, n: int, k: int, x: TorusPoint) -> TorusPoint:
    """The point that must lie in ``U_{i_k}`` (k counted from 1) for x to be in a level-n chart."""
    return map_power(ctx.alpha, k - 1 if n > 0 else -k, x)


def in_refined_chart(ctx: BundleContext, n: int, index: Index, x: TorusPoint) -> bool:
    if len(index) != abs(n):
        return False
    cover = ctx.family.cover
    return all(
        cover.chart(i).contains(chart_position_point(ctx, n, k, x))
        for k, i in enumerate(index, start=1)
    )


def refined_chart(ctx: BundleContext, n: int, index: Index) -> Region:
    if n == 0:
        return Region.full(2)
    if len(index) != abs(n):
        raise ValueError("index length must equal |n|")
    region = Region.full(2)
    for k, i in enumerate(index, start=1):
        # x in the chart iff alpha^(k-1) x in U_i (n>0) or alpha^-k x in U_i (n<0)
        steps = -(k - 1) if n > 0 else k
        region = region.intersect(ctx.family.cover.chart(i).shifted(ctx.alpha.power_shift(steps)))
    return region


def canonical_index(ctx: BundleContext, n: int, x: TorusPoint) -> Index:
    """Lexicographically least index whose level-n chart contains x."""
    if n == 0:
        return UNIT_INDEX
    cover = ctx.family.cover
    out = []
    for k in range(1, abs(n) + 1):
        p = chart_position_point(ctx, n, k, x)
        for i in cover.indices:
            if cover.chart(i).contains(p):
                out.append(i)
                break
        else:
            raise DomainError(f"{p!r} lies in no chart")
    return tuple(out)


def iter_indices(ctx: BundleContext, length: int) -> Iterator[Index]:
    if length == 0:
        yield UNIT_INDEX
        return
    for head in ctx.indices:
        for tail in iter_indices(ctx, length - 1):
            yield (head,) + tail


def _sum(values: Iterable[GroupValue], unit: GroupValue) -> GroupValue:
    total = unit
    for v in values:
        total = total + v
    return total


def _require_overlap(ctx, n, i, j, x):
    if not (in_refined_chart(ctx, n, i, x) and in_refined_chart(ctx, n, j, x)):
        raise DomainError(f"{x!r} not in the level-{n} overlap of {i} and {j}")


def transition_minus_one(ctx: BundleContext, i: int, j: int, x: TorusPoint) -> GroupValue:
    """c^(-1)_{i,j}(x) = [c_{i,j}(alpha^-1 x)]^-1 on W_i ∩ W_j."""
    return -ctx.family(i, j, map_power(ctx.alpha, -1, x))


def negative_power_closed(ctx: BundleContext, i: Index, j: Index, x: TorusPoint) -> GroupValue:
    c = ctx.family
    return _sum(
        (-c(a, b, map_power(ctx.alpha, -k, x)) for k, (a, b) in enumerate(zip(i, j), start=1)),
        ctx.unit,
    )


def negative_power_composed(ctx: BundleContext, i: Index, j: Index, x: TorusPoint) -> GroupValue:
    return _sum(
        (
            transition_minus_one(ctx, a, b, map_power(ctx.alpha, -(k - 1), x))
            for k, (a, b) in enumerate(zip(i, j), start=1)
        ),
        ctx.unit,
    )


def transition_power(ctx: BundleContext, n: int, i: Index, j: Index, x: TorusPoint) -> GroupValue:
    if n == 0:
        return ctx.unit
    _require_overlap(ctx, n, i, j, x)
    c = ctx.family
    if n > 0:
        return _sum(
            (c(a, b, map_power(ctx.alpha, k - 1, x)) for k, (a, b) in enumerate(zip(i, j), start=1)),
            ctx.unit,
        )
    closed = negative_power_closed(ctx, i, j, x)
    composed = negative_power_composed(ctx, i, j, x)
    if closed != composed:
        raise CocycleInconsistency(f"c^({n})_{i},{j}({x!r}): {closed!r} != {composed!r}")
    return closed


def flip_identity_check(ctx: BundleContext, n: int, i: Index, j: Index, x: TorusPoint) -> bool:
    """c^(n)_{I,J}(x) == c^(-n)_{σJ,σI}(alpha^n x), valid for either sign of n."""
    if n == 0:
        return True
    lhs = transition_power(ctx, n, i, j, x)
    rhs = transition_power(ctx, -n, flip(j), flip(i), map_power(ctx.alpha, n, x))
    return lhs == rhs


def make_point(ctx: BundleContext, g: GroupValue, x: TorusPoint, index: Index, n: int) -> BundlePoint:
    p = BundlePoint(g, x, tuple(index), n)
    if not in_refined_chart(ctx, n, p.index, x) and n != 0:
        raise DomainError(f"{x!r} not in the level-{n} chart {index}")
    return p


def canonicalize(ctx: BundleContext, p: BundlePoint) -> BundlePoint:
    target = canonical_index(ctx, p.level, p.x)
    if target == p.index:
        return p
    g = transition_power(ctx, p.level, p.index, target, p.x) + p.g
    return BundlePoint(g, p.x, target, p.level)


def points_equivalent(ctx: BundleContext, p: BundlePoint, q: BundlePoint) -> bool:
    if p.level != q.level or p.x != q.x:
        return False
    if p.level == 0:
        return p.g == q.g
    if not (in_refined_chart(ctx, p.level, p.index, p.x) and in_refined_chart(ctx, q.level, q.index, q.x)):
        return False
    return q.g == transition_power(ctx, p.level, p.index, q.index, p.x) + p.g


@dataclass
class CocycleReport:
    checked: int = 0
    failures: list[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def cocycle_check(
    ctx: BundleContext, points: Iterable[TorusPoint], n: int = 1, index_length_cap: int | None = None
) -> CocycleReport:
    """Check c_ii = 1, c_ij = c_ji^-1 and c_ij c_jk = c_ik for the level-n family at the given points."""
    report = CocycleReport()
    indices = list(iter_indices(ctx, abs(n)))
    unit = ctx.unit
    for x in points:
        here = [i for i in indices if in_refined_chart(ctx, n, i, x)]
        table = {(i, j): transition_power(ctx, n, i, j, x) for i in here for j in here}
        for i in here:
            report.checked += 1
            if table[i, i] != unit:
                report.failures.append({"condition": "a", "x": x.to_json(), "i": list(i)})
            for j in here:
                cij = table[i, j]
                if cij != -table[j, i]:
                    report.failures.append({"condition": "b", "x": x.to_json(), "i": list(i), "j": list(j)})
                for k in here:
                    if cij + table[j, k] != table[i, k]:
                        report.failures.append(
                            {"condition": "c", "x": x.to_json(), "i": list(i), "j": list(j), "k": list(k)}
                        )
    return report


def lattice_points(q: int) -> list[TorusPoint]:
    return [TorusPoint((Fraction(a, q), Fraction(b, q))) for a in range(q) for b in range(q)]


def with_alpha(ctx: BundleContext, alpha: AffineTorusMap) -> BundleContext:
    return replace(ctx, alpha=alpha)
