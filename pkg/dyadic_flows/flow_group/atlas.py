# Copyright 2024 Google LLC
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""
Elements of the suspension-flow groups as finite atlases with type-D fibers.

An element g is given by pieces (C, [a, b), f): for x in C and t in [a, b), g(x, t) = (x, f(t)), where f(t) may
leave [0, 1) and is read back in Y through (x, t) ~ (shift^k(x), t - k). Points covered by no piece are fixed.
The normal form `Atlas.moves` refines the piece clopens into atoms, glues the fibers of each atom into one type-D
map of [0, 1], drops atoms that do not move and merges atoms with equal fibers. Composition, inversion and
equality all run on moves.

Classes:
    AtlasPiece: one (clopen, half-open interval, fiber) triple.
    Atlas: a group element with its pieces, its normal form and an optional chart form.
    ChartElement: an element given on a chart C x I by cells (E, f), lifted to an Atlas.
    Block, Region: finite unions of clopen x interval blocks, for supports and chart images.

Functions:
    elem_eval(g, y), cocycle_eval(g, y): the action on Y and the translation cocycle.
    elem_validate(g) -> Report
    elem_compose(g, h), elem_invert(g), elem_equal(g, h)
    support_region(g), chart_region(chart) -> Region
    random_points(sft, atlases, count, rng) -> list[PointY]: samples biased towards the supports.
"""

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

from dyadic_flows.common.ioc_container import Container, provide_rng
from dyadic_flows.common.model import Certificate, Report
from dyadic_flows.common.sampling import verify_samples
from dyadic_flows.core_numeric import ONE, ZERO, Dyadic, DyInterval, dy, random_dyadic
from dyadic_flows.subshifts.clopen import Clopen
from dyadic_flows.subshifts.sft import Sft
from dyadic_flows.suspension import Chart, PointY, hat_sigma, make_chart, random_point_y
from dyadic_flows.type_d import (
    TypeDMap,
    d_compose,
    d_concat,
    d_equal,
    d_invert,
    d_mirror,
    d_restrict,
    d_shift,
    d_verify,
    moved_intervals,
)

Move = tuple[Clopen, TypeDMap]


def _piece_limit() -> int:
    return int(Container.config.get("piece_limit", 4096))


def refine(base: Clopen | None, items, limit: int | None = None) -> list[tuple[Clopen, tuple]]:
    """Atoms of the Boolean algebra generated by the item clopens, each with the labels of the items containing it.

    With a base the atoms partition the base; without one they partition the union of the items.

    Raises:
        ValueError: When the number of atoms exceeds `limit` (the configured `piece_limit` by default).
    """
    limit = limit or _piece_limit()
    atoms: list[tuple[Clopen, tuple]] = [] if base is None else [(base, ())]
    for clopen, label in items:
        if base is not None:
            clopen = clopen & base
        if clopen.is_empty():
            continue
        rest = clopen
        refined = []
        for atom, labels in atoms:
            inside = atom & clopen
            if inside.is_empty():
                refined.append((atom, labels))
                continue
            refined.append((inside, labels + (label,)))
            outside = atom - clopen
            if not outside.is_empty():
                refined.append((outside, labels))
            rest = rest - atom
        if base is None and not rest.is_empty():
            refined.append((rest, (label,)))
        atoms = refined
        if len(atoms) > limit:
            raise ValueError(f"refinement explosion: more than {limit} atoms")
    return atoms


def _normalize(raw: Sequence[Move]) -> tuple[Move, ...]:
    """Drops empty and identity moves and merges moves with equal fibers."""
    buckets: dict[int, list[list]] = {}
    merged: list[list] = []
    for clopen, fiber in raw:
        if clopen.is_empty() or fiber.is_identity():
            continue
        bucket = buckets.setdefault(hash(fiber), [])
        for entry in bucket:
            if d_equal(entry[1], fiber):
                entry[0] = entry[0] | clopen
                break
        else:
            entry = [clopen, fiber]
            bucket.append(entry)
            merged.append(entry)
    return tuple((clopen, fiber) for clopen, fiber in merged)


def _glue(parts: Sequence[TypeDMap], lo: Dyadic, hi: Dyadic) -> TypeDMap:
    """Concatenates maps on disjoint sub-intervals of [lo, hi], filling the gaps with the identity."""
    maps, cursor = [], lo
    for f in sorted(parts, key=lambda f: f.lo):
        if f.lo > cursor:
            maps.append(TypeDMap.identity(DyInterval.closed(cursor, f.lo)))
        maps.append(f)
        cursor = f.hi
    if cursor < hi:
        maps.append(TypeDMap.identity(DyInterval.closed(cursor, hi)))
    return maps[0] if len(maps) == 1 else d_concat(maps)


def _line_map(fibers: dict[int, TypeDMap], lo: Dyadic, hi: Dyadic) -> TypeDMap:
    """The map t -> F_k(t - k) + k on [lo, hi], where F_k is the fiber met k unit steps along the orbit."""
    parts = []
    for k in range(lo.floor(), hi.ceil()):
        fiber = fibers.get(k)
        if fiber is None:
            continue
        a, b = dy(max(lo, k)), dy(min(hi, k + 1))
        if a >= b:
            continue
        if (a - k, b - k) != (ZERO, ONE):
            fiber = d_restrict(fiber, a - k, b - k)
        parts.append(d_shift(fiber, k))
    return _glue(parts, lo, hi)


def _product_name(first: str, second: str) -> str:
    if first and second:
        return f"{first}*{second}"
    return first or second


def _at(clopen: Clopen, t) -> str:
    return f"(x: {clopen.witness()}, t: {t})"


@dataclass(frozen=True)
class AtlasPiece:
    """(x, t) -> (x, fiber(t)) for x in `clopen` and t in the half-open `interval` [a, b) inside [0, 1)."""

    clopen: Clopen
    interval: DyInterval
    fiber: TypeDMap

    def __post_init__(self):
        lo, hi = self.interval.lo, self.interval.hi
        if lo < 0 or hi > 1:
            raise ValueError(f"piece interval {self.interval} leaves [0, 1]")
        object.__setattr__(self, "interval", DyInterval.half_open(lo, hi))

    def record(self) -> dict:
        return {"clopen": self.clopen.record(), "interval": str(self.interval), "fiber": self.fiber.to_dict()}

    @classmethod
    def from_record(cls, sft: Sft, data: dict) -> "AtlasPiece":
        return cls(
            Clopen.from_record(sft, data["clopen"]),
            DyInterval.parse(data["interval"]),
            TypeDMap.from_dict(data["fiber"]),
        )


@dataclass(frozen=True, eq=False)
class Atlas:
    """A homeomorphism of Y moving points along flow lines, stored by its pieces.

    Attributes:
        sft: The ambient subshift.
        pieces: Pieces with pairwise disjoint domains; uncovered points are fixed.
        equivariant: Whether the element claims to commute with hat_sigma.
        name: Display name.
        chart_form: The chart element the atlas was lifted from, if any.
    """

    sft: Sft
    pieces: tuple[AtlasPiece, ...] = ()
    equivariant: bool = False
    name: str = ""
    chart_form: "ChartElement | None" = field(default=None, repr=False)

    @classmethod
    def from_moves(cls, sft: Sft, raw: Sequence[Move], equivariant: bool = False, name: str = "") -> "Atlas":
        moves = _normalize(raw)
        unit = DyInterval.half_open(0, 1)
        atlas = cls(sft, tuple(AtlasPiece(clopen, unit, fiber) for clopen, fiber in moves), equivariant, name)
        # already in normal form
        atlas.__dict__["moves"] = moves
        return atlas

    @cached_property
    def moves(self) -> tuple[Move, ...]:
        """Disjoint (clopen, fiber on [0, 1]) pairs with non-identity, pairwise distinct fibers.

        Raises:
            ValueError: When pieces overlap or their fibers disagree at a shared end.
        """
        atoms = refine(None, [(p.clopen, i) for i, p in enumerate(self.pieces)])
        raw = [(atom, _glue([self.pieces[i].fiber for i in labels], ZERO, ONE)) for atom, labels in atoms]
        return _normalize(raw)

    def is_identity(self) -> bool:
        return not self.moves

    def record(self) -> dict:
        row = {"subshift": self.sft.name, "name": self.name, "equivariant": self.equivariant}
        if self.chart_form is not None:
            row["chart"] = self.chart_form.record()
        else:
            row["pieces"] = [p.record() for p in self.pieces]
        return row

    @classmethod
    def from_record(cls, sft: Sft, data: dict) -> "Atlas":
        if "chart" in data:
            return ChartElement.from_record(sft, data["chart"]).atlas
        pieces = tuple(AtlasPiece.from_record(sft, p) for p in data.get("pieces", []))
        return cls(sft, pieces, bool(data.get("equivariant", False)), data.get("name", ""))

    def __str__(self) -> str:
        return f"Atlas({self.name or 'anonymous'}; {len(self.pieces)} pieces)"


def identity_atlas(sft: Sft) -> Atlas:
    return Atlas(sft, (), True, "id")


def _move_at(g: Atlas, y: PointY) -> TypeDMap | None:
    for clopen, fiber in g.moves:
        if clopen.contains(y.x):
            return fiber
    return None


def elem_eval(g: Atlas, y: PointY) -> PointY:
    fiber = _move_at(g, y)
    return y if fiber is None else PointY(y.x, fiber(y.t))


def cocycle_eval(g: Atlas, y: PointY) -> Dyadic:
    """tau_g(y), the flow time with g(y) = Phi^tau(y)."""
    fiber = _move_at(g, y)
    return ZERO if fiber is None else fiber(y.t) - y.t


def _same_sft(g: Atlas, h: Atlas) -> None:
    if g.sft is not h.sft:
        raise ValueError(f"elements live over different subshifts: {g.sft.name}, {h.sft.name}")


def elem_compose(g: Atlas, h: Atlas) -> Atlas:
    """Returns g o h (h acts first) in normal form.

    Over each move (E, H) of h, the atoms of E are cut by which move of g meets shift^k(x) for the unit steps k
    crossed by H; there the composite fiber is the line map of g over [H(0), H(1)] composed with H.

    Raises:
        ValueError: On different subshifts, or when a refinement exceeds `piece_limit`.
    """
    _same_sft(g, h)
    if g.chart_form is not None and h.chart_form is not None and same_chart(g.chart_form.chart, h.chart_form.chart):
        return g.chart_form.compose(h.chart_form).atlas
    limit = _piece_limit()
    raw: list[Move] = []
    for clopen, fiber in h.moves:
        lo, hi = fiber(ZERO), fiber(ONE)
        items = [
            (moved.image_shift(-k), (k, j))
            for k in range(lo.floor(), hi.ceil())
            for j, (moved, _) in enumerate(g.moves)
        ]
        for atom, labels in refine(clopen, items, limit):
            outer = _line_map({k: g.moves[j][1] for k, j in labels}, lo, hi)
            raw.append((atom, d_compose(outer, fiber)))
        if len(raw) > limit:
            raise ValueError(f"refinement explosion: more than {limit} pieces composing {g.name} and {h.name}")
    if h.moves:
        support = h.moves[0][0]
        for clopen, _ in h.moves[1:]:
            support = support | clopen
        raw.extend((clopen - support, fiber) for clopen, fiber in g.moves)
    else:
        raw.extend(g.moves)
    return Atlas.from_moves(g.sft, raw, g.equivariant and h.equivariant, _product_name(g.name, h.name))


def elem_invert(g: Atlas) -> Atlas:
    """Returns g^-1.

    Elements with a chart form are inverted cell by cell on their chart. Otherwise the cocycle of g is bounded by
    D, so the inverse fiber over x on [0, 1] only depends on the moves met at the unit steps -ceil(D) .. ceil(D);
    on each atom of that refinement the line map is inverted and cut back to [0, 1].
    """
    if g.chart_form is not None:
        return g.chart_form.inverse().atlas
    if not g.moves:
        return g
    reach = max(cocycle_bound(f) for _, f in g.moves).ceil()
    lo, hi = dy(-reach), dy(reach + 1)
    steps = range(-reach, reach + 1)
    items = [(clopen.image_shift(-k), (k, i)) for k in steps for i, (clopen, _) in enumerate(g.moves)]
    raw = []
    for atom, labels in refine(None, items):
        line = _line_map({k: g.moves[i][1] for k, i in labels}, lo, hi)
        raw.append((atom, d_restrict(d_invert(line), 0, 1)))
    return Atlas.from_moves(g.sft, raw, g.equivariant, f"{g.name}^-1" if g.name else "")


def _mismatch(first: Sequence[Move], second: Sequence[Move]) -> Clopen | None:
    """An atom where two move lists disagree, or None when they define the same element."""
    items = [(clopen, ("a", i)) for i, (clopen, _) in enumerate(first)]
    items += [(clopen, ("b", j)) for j, (clopen, _) in enumerate(second)]
    for atom, labels in refine(None, items):
        fibers = {side: (first if side == "a" else second)[i][1] for side, i in labels}
        a, b = fibers.get("a"), fibers.get("b")
        if a is None or b is None or not d_equal(a, b):
            return atom
    return None


def elem_equal(g: Atlas, h: Atlas) -> bool:
    _same_sft(g, h)
    return _mismatch(g.moves, h.moves) is None


def _mirrored(g: Atlas) -> list[Move]:
    # hat_sigma o g o hat_sigma: (x, t) in E x [0, 1] lands on sigma(E) x [-1, 0], renormalized by one step
    return [(clopen.image_reversal().image_shift(-1), d_shift(d_mirror(fiber), 1)) for clopen, fiber in g.moves]


def cocycle_bound(f: TypeDMap) -> Dyadic:
    """max |f(t) - t|, attained at an outer node, an annulus node or a singular point."""
    nodes = [node for piece in f.outer for node in piece.nodes]
    for germ in f.germs:
        nodes.append((germ.x0, germ.y0))
        for annulus in (germ.left, germ.right):
            if annulus is not None:
                nodes.extend(annulus.nodes)
    return max((abs(y - x) for x, y in nodes), default=ZERO)


def _overlap_witness(pieces: Sequence[AtlasPiece]) -> str:
    for p, q in itertools.combinations(pieces, 2):
        times = p.interval.intersect(q.interval)
        if times is None:
            continue
        common = p.clopen & q.clopen
        if not common.is_empty():
            return _at(common, times.lo)
    return ""


def _boundary_witness(clopen: Clopen, value: Dyadic, neighbours, default: Dyadic, t: Dyadic) -> str:
    """Compares the value of a piece at an end with the neighbouring pieces, and with the identity elsewhere."""
    rest = clopen
    for other, other_value in neighbours:
        common = clopen & other
        if common.is_empty():
            continue
        if other_value != value:
            return _at(common, t)
        rest = rest - other
    if value != default and not rest.is_empty():
        return _at(rest, t)
    return ""


def _continuity_witness(pieces: Sequence[AtlasPiece]) -> str:
    for p in pieces:
        a, b = p.interval.lo, p.interval.hi
        if b < ONE:
            found = [(q.clopen, q.fiber(b)) for q in pieces if q.interval.contains(b)]
            witness = _boundary_witness(p.clopen, p.fiber(b), found, b, b)
        else:
            found = [(q.clopen.image_shift(-1), q.fiber(ZERO) + 1) for q in pieces if q.interval.lo == ZERO]
            witness = _boundary_witness(p.clopen, p.fiber(ONE), found, ONE, ONE)
        if witness:
            return witness
        if a > ZERO:
            found = [(q.clopen, q.fiber(a)) for q in pieces if q.interval.lo < a <= q.interval.hi]
            witness = _boundary_witness(p.clopen, p.fiber(a), found, a, a)
        else:
            found = [(q.clopen.image_shift(1), q.fiber(ONE) - 1) for q in pieces if q.interval.hi == ONE]
            witness = _boundary_witness(p.clopen, p.fiber(ZERO), found, ZERO, ZERO)
        if witness:
            return witness
    return ""


def _fiber_certificate(g: Atlas, samples: int, rng) -> Certificate:
    parts = []
    for i, piece in enumerate(g.pieces):
        closure = piece.interval.closure()
        if piece.fiber.domain != closure:
            return Certificate(
                name="atlas.fibers",
                passed=False,
                witness=f"piece {i}: fiber domain {piece.fiber.domain} is not {closure}",
            )
        parts.append(d_verify(piece.fiber, samples, rng))
    return Certificate.combine("atlas.fibers", parts)


def _antisymmetry(g: Atlas, samples: int, rng) -> list[Certificate]:
    mismatch = _mismatch(g.moves, _mirrored(g))
    structural = Certificate(
        name="atlas.antisymmetry.structural",
        passed=mismatch is None,
        witness="" if mismatch is None else f"(x: {mismatch.witness()})",
    )

    def flips(y: PointY) -> bool:
        return cocycle_eval(g, hat_sigma(y, g.sft)) == -cocycle_eval(g, y)

    sampled = verify_samples("atlas.antisymmetry.sampled", flips, random_points(g.sft, [g], samples, rng))
    return [structural, sampled]


def elem_validate(g: Atlas, samples: int | None = None, rng=None) -> Report:
    """Checks an atlas and returns one certificate per property.

    Certificates: `atlas.partition` (piece domains are disjoint), `atlas.fibers` (fiber domains match and every
    fiber passes d_verify), `atlas.continuity` (values agree across every piece end, including the wrap from t = 1
    to t = 0 on the next symbol, and with the identity where no piece continues), `atlas.cocycle_bound`
    (max |tau| per piece, in the details) and, for elements claiming hat_sigma-equivariance,
    `atlas.antisymmetry.structural` and `atlas.antisymmetry.sampled`. Witnesses read "(x: word@lo, t: time)".
    """
    samples = samples or Container.config.get("samples", 200)
    rng = rng or provide_rng()
    report = Report(subject=g.name or "atlas")
    witness = _overlap_witness(g.pieces)
    report.add(
        Certificate(name="atlas.partition", passed=not witness, witness=witness, details={"pieces": len(g.pieces)})
    )
    fibers = report.add(_fiber_certificate(g, samples, rng))
    if witness or not fibers.passed:
        return report
    witness = _continuity_witness(g.pieces)
    report.add(Certificate(name="atlas.continuity", passed=not witness, witness=witness))
    bounds = [cocycle_bound(p.fiber) for p in g.pieces]
    report.add(
        Certificate(
            name="atlas.cocycle_bound",
            details={"bounds": [str(b) for b in bounds], "max": str(max(bounds, default=ZERO))},
        )
    )
    if g.equivariant and not witness:
        for certificate in _antisymmetry(g, samples, rng):
            report.add(certificate)
    return report


@dataclass(frozen=True)
class Block:
    """The set clopen x (lo, hi) with per-end closedness; lo == hi is allowed for a closed point."""

    clopen: Clopen
    lo: Dyadic
    hi: Dyadic
    lo_closed: bool = True
    hi_closed: bool = True

    def contains_time(self, t: Dyadic) -> bool:
        above = self.lo <= t if self.lo_closed else self.lo < t
        below = t <= self.hi if self.hi_closed else t < self.hi
        return above and below

    def __str__(self) -> str:
        left = "[" if self.lo_closed else "("
        right = "]" if self.hi_closed else ")"
        return f"{self.clopen} x {left}{self.lo}, {self.hi}{right}"


@dataclass(frozen=True, eq=False)
class Region:
    """A finite union of blocks in normalized coordinates (x, t), t in [0, 1]."""

    sft: Sft
    blocks: tuple[Block, ...] = ()

    def is_empty(self) -> bool:
        return not self.blocks

    def _wrapped(self) -> list[Block]:
        # (x, 1) and (shift(x), 0) are the same point of Y
        blocks = list(self.blocks)
        for block in self.blocks:
            if block.hi == ONE and block.hi_closed:
                blocks.append(Block(block.clopen.image_shift(1), ZERO, ZERO))
            if block.lo == ZERO and block.lo_closed:
                blocks.append(Block(block.clopen.image_shift(-1), ONE, ONE))
        return blocks

    def uncovered(self, other: "Region") -> str:
        """A point of self outside other, rendered as a witness, or "" when self is inside other.

        On each atom, membership in a union of intervals is constant between consecutive block ends, so the ends
        and the midpoints between them decide the inclusion exactly.
        """
        mine, theirs = self._wrapped(), other._wrapped()
        items = [(b.clopen, ("a", i)) for i, b in enumerate(mine)]
        items += [(b.clopen, ("b", j)) for j, b in enumerate(theirs)]
        for atom, labels in refine(None, items):
            inner = [mine[i] for side, i in labels if side == "a"]
            if not inner:
                continue
            outer = [theirs[j] for side, j in labels if side == "b"]
            ends = sorted({e for block in inner + outer for e in (block.lo, block.hi)})
            checkpoints = ends + [(s + t).half() for s, t in zip(ends, ends[1:])]
            for t in checkpoints:
                if any(b.contains_time(t) for b in inner) and not any(b.contains_time(t) for b in outer):
                    return _at(atom, t)
        return ""

    def is_subset(self, other: "Region") -> bool:
        return not self.uncovered(other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Region):
            return NotImplemented
        return self.is_subset(other) and other.is_subset(self)

    __hash__ = None

    def records(self) -> list[str]:
        return [str(b) for b in self.blocks]


def support_region(g: Atlas) -> Region:
    """Closed blocks covering the closure of {tau_g != 0}.

    Away from singular fixed points the blocks are exact. Near a singular point whose germ moves points on one
    side, the moved set accumulates and is reported by its hull between the singular point and the farthest moved
    point of the germ's annulus.
    """
    blocks = [Block(clopen, lo, hi) for clopen, fiber in g.moves for lo, hi in moved_intervals(fiber)]
    return Region(g.sft, tuple(blocks))


def chart_region(chart: Chart, closed: bool = False) -> Region:
    """The image of C x I in normalized coordinates, with the mirror sigma(C) x (-I) for Z-charts."""
    interval = chart.interval.closure() if closed else chart.interval
    sides = [(chart.clopen, interval)]
    if chart.kind == "Z":
        sides.append((chart.clopen.image_reversal(), interval.negate()))
    blocks = []
    for clopen, I in sides:
        for k in range(I.lo.floor(), I.hi.ceil()):
            lo, hi = dy(max(I.lo, k)), dy(min(I.hi, k + 1))
            if lo >= hi:
                continue
            blocks.append(
                Block(
                    clopen.image_shift(k),
                    lo - k,
                    hi - k,
                    lo_closed=lo > I.lo or I.lo_closed,
                    hi_closed=hi < I.hi or I.hi_closed,
                )
            )
    return Region(chart.clopen.sft, tuple(blocks))


def _lift(clopen: Clopen, f: TypeDMap) -> list[AtlasPiece]:
    # (x, t) with t in [k, k + 1) is (shift^k(x), t - k)
    pieces = []
    for k in range(f.lo.floor(), f.hi.ceil()):
        a, b = dy(max(f.lo, k)), dy(min(f.hi, k + 1))
        if a >= b:
            continue
        part = f if (a, b) == (f.lo, f.hi) else d_restrict(f, a, b)
        pieces.append(AtlasPiece(clopen.image_shift(k), DyInterval.half_open(a - k, b - k), d_shift(part, -k)))
    return pieces


def same_chart(a: Chart, b: Chart) -> bool:
    return a is b or (a.kind == b.kind and a.interval == b.interval and a.clopen == b.clopen)


@dataclass(frozen=True, eq=False)
class ChartElement:
    """An element acting on the chart C x I by cells: (x, t) -> (x, f(t)) for x in E and t in I.

    Cells have disjoint clopens inside C and type-D maps of closure(I) fixing both ends. On a Z-chart the element
    also acts on the mirror sigma(C) x (-I) by t -> -f(-t), so its lift commutes with hat_sigma.
    """

    chart: Chart
    cells: tuple[tuple[Clopen, TypeDMap], ...]
    name: str = ""

    def __post_init__(self):
        closure = self.chart.interval.closure()
        for clopen, f in self.cells:
            if not clopen.is_subset(self.chart.clopen):
                raise ValueError(f"cell {clopen} is not inside the chart clopen {self.chart.clopen}")
            if f.domain != closure:
                raise ValueError(f"cell map domain {f.domain} is not {closure}")
            if f(closure.lo) != closure.lo or f(closure.hi) != closure.hi:
                raise ValueError(f"cell map on {closure} does not fix the ends")

    @classmethod
    def single(cls, chart: Chart, f: TypeDMap, name: str = "") -> "ChartElement":
        return cls(chart, ((chart.clopen, f),), name)

    @cached_property
    def atlas(self) -> Atlas:
        pieces = []
        for clopen, f in self.cells:
            pieces.extend(_lift(clopen, f))
            if self.chart.kind == "Z":
                pieces.extend(_lift(clopen.image_reversal(), d_mirror(f)))
        return Atlas(self.chart.clopen.sft, tuple(pieces), self.chart.kind == "Z", self.name, chart_form=self)

    def inverse(self) -> "ChartElement":
        cells = tuple((clopen, d_invert(f)) for clopen, f in self.cells)
        return ChartElement(self.chart, cells, f"{self.name}^-1" if self.name else "")

    def compose(self, other: "ChartElement") -> "ChartElement":
        """self o other, cell by cell on a common refinement.

        Raises:
            ValueError: When the two elements live on different charts.
        """
        if not same_chart(self.chart, other.chart):
            raise ValueError(f"cannot compose chart elements on {self.chart.label()} and {other.chart.label()}")
        identity = TypeDMap.identity(self.chart.interval.closure())
        items = [(clopen, ("a", i)) for i, (clopen, _) in enumerate(self.cells)]
        items += [(clopen, ("b", j)) for j, (clopen, _) in enumerate(other.cells)]
        cells = []
        for atom, labels in refine(None, items):
            maps = {side: (self.cells if side == "a" else other.cells)[i][1] for side, i in labels}
            f = d_compose(maps.get("a", identity), maps.get("b", identity))
            if not f.is_identity():
                cells.append((atom, f))
        return ChartElement(self.chart, tuple(cells), _product_name(self.name, other.name))

    def record(self) -> dict:
        return {
            "name": self.name,
            "clopen": self.chart.clopen.record(),
            "interval": str(self.chart.interval),
            "kind": self.chart.kind,
            "cells": [{"clopen": clopen.record(), "map": f.to_dict()} for clopen, f in self.cells],
        }

    @classmethod
    def from_record(cls, sft: Sft, data: dict) -> "ChartElement":
        chart = make_chart(sft, Clopen.from_record(sft, data["clopen"]), DyInterval.parse(data["interval"]), data.get("kind", "Z"))
        cells = tuple(
            (Clopen.from_record(sft, cell["clopen"]), TypeDMap.from_dict(cell["map"])) for cell in data.get("cells", [])
        )
        return cls(chart, cells, data.get("name", ""))


def random_points(sft: Sft, atlases: Sequence[Atlas], count: int, rng=None, depth: int = 10) -> list[PointY]:
    """Random points of Y; every other one is drawn inside a moved clopen of one of the given elements."""
    rng = rng or provide_rng()
    moves = [move for g in atlases for move in g.moves]
    points = []
    for i in range(count):
        if moves and i % 2 == 0:
            clopen, _ = rng.choice(moves)
            if clopen.has_window:
                x = sft.point_through(rng.choice(sorted(clopen.words)), clopen.lo, rng)
            else:
                x = sft.random_point(rng)
            points.append(PointY(x, random_dyadic(rng, 0, 1, depth=depth, open_ends=False)))
        else:
            points.append(random_point_y(sft, rng, depth=depth))
    return points

