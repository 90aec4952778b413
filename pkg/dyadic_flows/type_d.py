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
Type-D maps: dyadic PL homeomorphisms of an interval away from finitely many singular points, and
self-similar at each singular point x0, i.e. f o h_{x0} = h_{f(x0)} o f near x0.

A singular point is stored by its fundamental annuli: on the right, the PL map on [x0 + d/2, x0 + d]; on the
left, the PL map on [x0 - d, x0 - d/2]. Every other point of the neighborhood is reached by doubling towards
the annulus, applying it, and halving back, which makes evaluation exact and the data finite. The two sides
carry independent scales because inversion sends them to unrelated scales.

Classes:
    SelfSimilarGerm: a singular point with its left and right annuli (either may be absent at an endpoint).
    TypeDMap: germs plus outer PL pieces covering the rest of a closed dyadic interval.

Functions:
    d_eval, d_compose, d_invert, d_equal: evaluation and the group operations.
    d_verify(f, samples, rng) -> Certificate: structural invariants plus the sampled self-similarity identity.
    d_restrict(f, a, b), d_concat(maps): restriction to a sub-interval and gluing.
    d_shift(f, s), d_mirror(f): conjugates by the translation t -> t + s and by the flip t -> -t.
    d_fragment(f, I1, I2) -> (f1, f2): f = f1 o f2 with supports in I1 and I2.
    moved_intervals(f): closed intervals covering the support of f.
    scriptF_generators(I, x) -> list[TypeDMap]: F on I, germ generators at x, one-sided germ generators at the ends.
"""

import bisect
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Iterable, Sequence

from dyadic_flows.common.ioc_container import provide_rng
from dyadic_flows.common.model import Certificate
from dyadic_flows.common.sampling import verify_samples
from dyadic_flows.core_numeric import ONE, Dyadic, DyInterval, DyadicLike, doubling_map, dy, random_dyadic
from dyadic_flows.pl_maps import (
    PlMap,
    conjugate_on,
    germ_conjugator,
    pl_bridge,
    pl_mirror,
    pl_shift,
    pl_through,
    thompson_generators,
)

Breaks = Callable[[Dyadic, Dyadic], Iterable[Dyadic]]


def _log2_floor(d: Dyadic) -> int:
    return d.numerator.bit_length() - 1 - d.exponent


def _pow2_at_most(d: Dyadic) -> Dyadic:
    """Largest power of two not exceeding d > 0."""
    return ONE.mul_pow2(_log2_floor(d))


def _descent(d: Dyadic, half: Dyadic) -> int:
    """Smallest n >= 0 with d * 2^n >= half."""
    n = max(0, _log2_floor(half) - _log2_floor(d) - 1)
    while d.mul_pow2(n) < half:
        n += 1
    return n


def _pl_from(fn: Callable[[Dyadic], Dyadic], breaks: Breaks, a: Dyadic, b: Dyadic) -> PlMap:
    xs = sorted({a, b, *(x for x in breaks(a, b) if a <= x <= b)})
    return PlMap(tuple((x, fn(x)) for x in xs)).normalize()


def _same(p: PlMap | None, q: PlMap | None) -> bool:
    if p is None or q is None:
        return p is q
    return p.normalize() == q.normalize()


@dataclass(frozen=True)
class SelfSimilarGerm:
    """Singular point x0 -> y0 with fundamental annuli.

    Attributes:
        x0: Singular point.
        y0: Its image.
        left: PL map on [x0 - d, x0 - d/2], or None when x0 is the left end of the domain.
        right: PL map on [x0 + d/2, x0 + d], or None when x0 is the right end of the domain.
    """

    x0: Dyadic
    y0: Dyadic
    left: PlMap | None = None
    right: PlMap | None = None

    def __post_init__(self):
        object.__setattr__(self, "x0", dy(self.x0))
        object.__setattr__(self, "y0", dy(self.y0))
        if self.left is None and self.right is None:
            raise ValueError(f"germ at {self.x0} needs at least one annulus")
        if self.left is not None:
            lo, hi = self.left.nodes[0][0], self.left.nodes[-1][0]
            if not (hi < self.x0 and self.x0 - lo == (self.x0 - hi).mul_pow2(1)):
                raise ValueError(f"left annulus [{lo}, {hi}] is not of the form [x0 - d, x0 - d/2] for x0={self.x0}")
        if self.right is not None:
            lo, hi = self.right.nodes[0][0], self.right.nodes[-1][0]
            if not (self.x0 < lo and hi - self.x0 == (lo - self.x0).mul_pow2(1)):
                raise ValueError(f"right annulus [{lo}, {hi}] is not of the form [x0 + d/2, x0 + d] for x0={self.x0}")

    @property
    def delta_left(self) -> Dyadic | None:
        return None if self.left is None else self.x0 - self.left.nodes[0][0]

    @property
    def delta_right(self) -> Dyadic | None:
        return None if self.right is None else self.right.nodes[-1][0] - self.x0

    @property
    def lo(self) -> Dyadic:
        return self.x0 if self.left is None else self.left.nodes[0][0]

    @property
    def hi(self) -> Dyadic:
        return self.x0 if self.right is None else self.right.nodes[-1][0]

    def covers(self, x: Dyadic) -> bool:
        return self.lo <= x <= self.hi

    def __call__(self, x: DyadicLike) -> Dyadic:
        x = dy(x)
        if not self.covers(x):
            raise ValueError(f"{x} is outside the germ neighborhood of {self.x0}")
        if x == self.x0:
            return self.y0
        if x > self.x0:
            annulus, n = self.right, _descent(x - self.x0, self.delta_right.half())
        else:
            annulus, n = self.left, _descent(self.x0 - x, self.delta_left.half())
        return doubling_map(self.y0, annulus(doubling_map(self.x0, x, n)), -n)

    def breakpoints_in(self, a: Dyadic, b: Dyadic) -> list[Dyadic]:
        """Nodes of the germ's PL restriction to [a, b], an interval on one side of x0 away from it."""
        if b <= self.x0:
            annulus, a = self.left, max(a, self.lo)
            near = self.x0 - b
        elif a >= self.x0:
            annulus, b = self.right, min(b, self.hi)
            near = a - self.x0
        else:
            raise ValueError(f"[{a}, {b}] contains the singular point {self.x0}")
        if annulus is None or a > b:
            return []
        if near <= 0:
            raise ValueError(f"[{a}, {b}] touches the singular point {self.x0}")
        delta = self.delta_left if b <= self.x0 else self.delta_right
        result = []
        for n in range(_descent(near, delta.half()) + 1):
            for p, _ in annulus.nodes:
                q = doubling_map(self.x0, p, -n)
                if a <= q <= b:
                    result.append(q)
        return result

    def inverse(self) -> "SelfSimilarGerm":
        left = None if self.left is None else self.left.inverse()
        right = None if self.right is None else self.right.inverse()
        return SelfSimilarGerm(self.y0, self.x0, left, right)

    def side_is_linear(self, side: str) -> bool:
        """True when the side is a single segment on a line through (x0, y0)."""
        annulus = self.left if side == "left" else self.right
        if annulus is None:
            return True
        if len(set(annulus.slopes)) != 1:
            return False
        x, y = annulus.nodes[0]
        return y - self.y0 == (x - self.x0).mul_pow2(annulus.slopes[0])

    def is_removable(self) -> bool:
        return self.side_is_linear("left") and self.side_is_linear("right")

    def recut(self, delta_left: Dyadic | None = None, delta_right: Dyadic | None = None) -> "SelfSimilarGerm":
        """Same germ stored at smaller scales."""
        left, right = self.left, self.right
        if delta_left is not None and left is not None and delta_left != self.delta_left:
            if delta_left > self.delta_left:
                raise ValueError(f"cannot grow the left scale of the germ at {self.x0}")
            left = _pl_from(self, self.breakpoints_in, self.x0 - delta_left, self.x0 - delta_left.half())
        if delta_right is not None and right is not None and delta_right != self.delta_right:
            if delta_right > self.delta_right:
                raise ValueError(f"cannot grow the right scale of the germ at {self.x0}")
            right = _pl_from(self, self.breakpoints_in, self.x0 + delta_right.half(), self.x0 + delta_right)
        return SelfSimilarGerm(self.x0, self.y0, left, right)

    def to_dict(self) -> dict:
        data = {"x0": str(self.x0), "y0": str(self.y0)}
        if self.left is not None:
            data["left"] = self.left.to_dict()
        if self.right is not None:
            data["right"] = self.right.to_dict()
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "SelfSimilarGerm":
        left = PlMap.from_dict(data["left"]) if "left" in data else None
        right = PlMap.from_dict(data["right"]) if "right" in data else None
        return cls(dy(data["x0"]), dy(data["y0"]), left, right)


@dataclass(frozen=True)
class TypeDMap:
    """A type-D homeomorphism of a closed dyadic interval.

    Attributes:
        domain: Closed interval [lo, hi].
        germs: Singular points sorted by x0, with disjoint neighborhoods inside the domain. A germ is
            one-sided exactly when it sits at an end of the domain.
        outer: PL pieces covering the closure of the domain minus the open germ neighborhoods, sorted.
    """

    domain: DyInterval
    germs: tuple[SelfSimilarGerm, ...] = ()
    outer: tuple[PlMap, ...] = ()
    _starts: tuple[Dyadic, ...] = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        domain = self.domain.closure()
        germs = tuple(sorted(self.germs, key=lambda g: g.x0))
        outer = tuple(sorted(self.outer, key=lambda p: p.nodes[0][0]))
        object.__setattr__(self, "domain", domain)
        object.__setattr__(self, "germs", germs)
        object.__setattr__(self, "outer", outer)
        object.__setattr__(self, "_starts", tuple(p.nodes[0][0] for p in outer))
        pieces = list(outer)
        cursor = domain.lo
        for germ in germs:
            if (germ.left is None) != (germ.x0 == domain.lo) or (germ.right is None) != (germ.x0 == domain.hi):
                raise ValueError(f"germ at {germ.x0} must be one-sided exactly at the domain ends")
            self._consume(pieces, cursor, germ.lo)
            cursor = germ.hi
        self._consume(pieces, cursor, domain.hi)
        if pieces:
            raise ValueError(f"outer piece {pieces[0]} overlaps a germ neighborhood or the domain end")

    @staticmethod
    def _consume(pieces: list[PlMap], cursor: Dyadic, until: Dyadic) -> None:
        while cursor < until:
            if not pieces or pieces[0].nodes[0][0] != cursor:
                raise ValueError(f"gap at {cursor}: outer pieces must cover the complement of the germs")
            cursor = pieces.pop(0).nodes[-1][0]
        if cursor != until:
            raise ValueError(f"outer pieces overrun {until}")

    @classmethod
    def from_pl(cls, f: PlMap) -> "TypeDMap":
        return cls(f.domain, (), (f,))

    @classmethod
    def identity(cls, interval: DyInterval) -> "TypeDMap":
        return cls.from_pl(PlMap.identity(interval.closure()))

    @property
    def lo(self) -> Dyadic:
        return self.domain.lo

    @property
    def hi(self) -> Dyadic:
        return self.domain.hi

    @property
    def image(self) -> DyInterval:
        return DyInterval.closed(self(self.lo), self(self.hi))

    @property
    def singular_points(self) -> tuple[Dyadic, ...]:
        return tuple(g.x0 for g in self.germs if not g.is_removable())

    def germ_at(self, x: Dyadic) -> SelfSimilarGerm | None:
        for germ in self.germs:
            if germ.x0 == x:
                return germ
        return None

    def __call__(self, x: DyadicLike) -> Dyadic:
        x = dy(x)
        if not self.lo <= x <= self.hi:
            raise ValueError(f"{x} is outside the domain {self.domain}")
        for germ in self.germs:
            if germ.covers(x):
                return germ(x)
        i = max(bisect.bisect_right(self._starts, x) - 1, 0)
        return self.outer[i](x)

    def breakpoints_in(self, a: Dyadic, b: Dyadic) -> list[Dyadic]:
        """Nodes of the PL restriction of self to [a, b].

        Raises:
            ValueError: When [a, b] reaches an essential singular point from a side where it has a germ.
        """
        result = []
        for piece in self.outer:
            if piece.nodes[-1][0] >= a and piece.nodes[0][0] <= b:
                result.extend(piece.breakpoints_in(a, b))
        for germ in self.germs:
            if germ.hi < a or germ.lo > b or not a < b:
                continue
            if germ.is_removable():
                result.extend(x for x in (germ.lo, germ.x0, germ.hi) if a <= x <= b)
                continue
            reaches_left = a < germ.x0 <= b and germ.left is not None
            reaches_right = a <= germ.x0 < b and germ.right is not None
            if reaches_left or reaches_right:
                raise ValueError(f"[{a}, {b}] reaches the singular point {germ.x0}")
            result.extend(germ.breakpoints_in(a, b))
        return result

    def affine_near(self, s: Dyadic, side: str, delta: Dyadic) -> bool:
        """True when, on the one-sided interval of length delta at s, self is affine or inside its germ at s."""
        germ = self.germ_at(s)
        if germ is not None:
            reach = germ.delta_right if side == "right" else germ.delta_left
            return reach is not None and delta <= reach
        a, b = (s, s + delta) if side == "right" else (s - delta, s)
        if a < self.lo or b > self.hi:
            return False
        if any(g.lo < b and g.hi > a for g in self.germs):
            return False
        return all(x in (a, b) for x in self.breakpoints_in(a, b))

    @cached_property
    def inverse_map(self) -> "TypeDMap":
        return d_invert(self)

    def is_identity(self) -> bool:
        return d_equal(self, TypeDMap.identity(self.domain))

    def support_hull(self) -> DyInterval | None:
        """Smallest closed interval outside which self is the identity, or None for the identity."""
        moved = moved_intervals(self)
        if not moved:
            return None
        return DyInterval.closed(moved[0][0], moved[-1][1])

    def to_dict(self) -> dict:
        return {
            "domain": [str(self.lo), str(self.hi)],
            "germs": [g.to_dict() for g in self.germs],
            "outer": [p.to_dict() for p in self.outer],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "TypeDMap":
        return cls(
            DyInterval.closed(*data["domain"]),
            tuple(SelfSimilarGerm.from_dict(g) for g in data.get("germs", [])),
            tuple(PlMap.from_dict(p) for p in data["outer"]),
        )

    def __eq__(self, other):
        if not isinstance(other, TypeDMap):
            return NotImplemented
        return d_equal(self, other)

    def __hash__(self):
        return hash((self.domain, self.singular_points))

    def __str__(self):
        germs = ", ".join(f"{g.x0}->{g.y0}" for g in self.germs)
        return f"TypeD[{self.domain}; germs: {germs or 'none'}; {len(self.outer)} pieces]"


def _build(
    domain: DyInterval, germs: Sequence[SelfSimilarGerm], fn: Callable[[Dyadic], Dyadic], breaks: Breaks
) -> TypeDMap:
    """Assembles a TypeDMap from germs and an evaluable function whose breakpoints off the germs are known.

    Removable germs are dissolved into the outer pieces; `breaks` is only asked about intervals that avoid
    every germ neighborhood.
    """
    domain = domain.closure()
    kept = []
    segments: list[set[Dyadic]] = [set()]
    cursor = domain.lo
    for germ in [*sorted(germs, key=lambda g: g.x0), None]:
        end = domain.hi if germ is None else germ.lo
        if cursor < end:
            segments[-1].update((cursor, end))
            segments[-1].update(x for x in breaks(cursor, end) if cursor <= x <= end)
        if germ is None:
            break
        if germ.is_removable():
            segments[-1].update((germ.lo, germ.x0, germ.hi))
        else:
            kept.append(germ)
            segments.append(set())
        cursor = germ.hi
    outer = tuple(PlMap(tuple((x, fn(x)) for x in sorted(xs))).normalize() for xs in segments if len(xs) >= 2)
    return TypeDMap(domain, tuple(kept), outer)


def d_eval(f: TypeDMap, x: DyadicLike) -> Dyadic:
    return f(x)


def d_invert(f: TypeDMap) -> TypeDMap:
    """Inverts germs (x0 and y0 exchanged, annuli inverted) and outer pieces."""
    return TypeDMap(f.image, tuple(g.inverse() for g in f.germs), tuple(p.inverse() for p in f.outer))


def _side_delta(f: TypeDMap, g: TypeDMap, s: Dyadic, side: str, cap: Dyadic) -> Dyadic:
    # largest power of two where g is affine or germ-like at s, and f likewise at g(s) on the image
    delta = _pow2_at_most(cap)
    while True:
        if g.affine_near(s, side, delta):
            end = s + delta if side == "right" else s - delta
            if f.affine_near(g(s), side, abs(g(end) - g(s))):
                return delta
        delta = delta.half()


def d_compose(f: TypeDMap, g: TypeDMap) -> TypeDMap:
    """Returns f o g.

    The candidate singular set is BP2(g) together with g^-1(BP2(f)). At each candidate the composite germ is
    cut at the largest power-of-two scale on which each factor is either affine or inside its own germ, so
    the composite commutes with doubling there; germs that turn out locally affine are dissolved.

    Raises:
        ValueError: When the image of g is not the domain of f.
    """
    if g.image != f.domain:
        raise ValueError(f"interval mismatch: image of g is {g.image}, domain of f is {f.domain}")
    g_inv = g.inverse_map
    points = sorted({germ.x0 for germ in g.germs} | {g_inv(germ.x0) for germ in f.germs})

    def fn(x: Dyadic) -> Dyadic:
        return f(g(x))

    def breaks(a: Dyadic, b: Dyadic) -> list[Dyadic]:
        return [*g.breakpoints_in(a, b), *(g_inv(y) for y in f.breakpoints_in(g(a), g(b)))]

    germs = []
    for i, s in enumerate(points):
        spacing = []
        if i > 0:
            spacing.append((s - points[i - 1]).half())
        if i + 1 < len(points):
            spacing.append((points[i + 1] - s).half())
        left = right = None
        if s > g.lo:
            delta = _side_delta(f, g, s, "left", min(spacing + [s - g.lo]))
            left = _pl_from(fn, breaks, s - delta, s - delta.half())
        if s < g.hi:
            delta = _side_delta(f, g, s, "right", min(spacing + [g.hi - s]))
            right = _pl_from(fn, breaks, s + delta.half(), s + delta)
        germs.append(SelfSimilarGerm(s, fn(s), left, right))
    return _build(g.domain, germs, fn, breaks)


def d_restrict(f: TypeDMap, a: DyadicLike, b: DyadicLike) -> TypeDMap:
    """Restriction of f to [a, b] inside its domain; germs crossing a or b are cut down."""
    a, b = dy(a), dy(b)
    if not f.lo <= a < b <= f.hi:
        raise ValueError(f"[{a}, {b}] is not inside the domain {f.domain}")
    germs = []
    for germ in f.germs:
        if not a <= germ.x0 <= b:
            continue
        left = None if germ.x0 == a else germ.left
        right = None if germ.x0 == b else germ.right
        germ = SelfSimilarGerm(germ.x0, germ.y0, left, right)
        delta_left = _pow2_at_most(germ.x0 - a) if germ.lo < a else None
        delta_right = _pow2_at_most(b - germ.x0) if germ.hi > b else None
        germs.append(germ.recut(delta_left, delta_right))
    return _build(DyInterval.closed(a, b), germs, f, f.breakpoints_in)


def d_shift(f: TypeDMap, s: DyadicLike) -> TypeDMap:
    """Returns t -> f(t - s) + s on the domain of f translated by s."""
    s = dy(s)
    if not s:
        return f
    germs = tuple(
        SelfSimilarGerm(
            g.x0 + s,
            g.y0 + s,
            None if g.left is None else pl_shift(g.left, s),
            None if g.right is None else pl_shift(g.right, s),
        )
        for g in f.germs
    )
    return TypeDMap(f.domain.translate(s), germs, tuple(pl_shift(p, s) for p in f.outer))


def d_mirror(f: TypeDMap) -> TypeDMap:
    """Returns t -> -f(-t) on the negated domain; left and right annuli trade places."""
    germs = tuple(
        SelfSimilarGerm(
            -g.x0,
            -g.y0,
            None if g.right is None else pl_mirror(g.right),
            None if g.left is None else pl_mirror(g.left),
        )
        for g in f.germs
    )
    return TypeDMap(f.domain.negate(), germs, tuple(pl_mirror(p) for p in f.outer))


def _affine_annulus(m: TypeDMap, s: Dyadic, side: str, room: Dyadic | None = None) -> PlMap:
    width = m.hi - s if side == "right" else s - m.lo
    delta = _pow2_at_most(width if room is None else min(width, room))
    while not m.affine_near(s, side, delta):
        delta = delta.half()
    a, b = (s + delta.half(), s + delta) if side == "right" else (s - delta, s - delta.half())
    return _pl_from(m, m.breakpoints_in, a, b)


def d_concat(maps: Sequence[TypeDMap]) -> TypeDMap:
    """Glues maps on consecutive domains [a0, a1], [a1, a2], ... that agree at the joints.

    A joint that is singular on one side only keeps its germ, completed on the other side by the neighbour's
    affine germ.

    Raises:
        ValueError: When domains are not consecutive or values disagree at a joint.
    """
    maps = list(maps)
    for left, right in zip(maps, maps[1:]):
        if left.hi != right.lo:
            raise ValueError(f"domains {left.domain} and {right.domain} are not consecutive")
        if left(left.hi) != right(right.lo):
            raise ValueError(f"values disagree at the joint {left.hi}")
    starts = [m.lo for m in maps]
    lo, hi = maps[0].lo, maps[-1].hi

    def right_owner(x: Dyadic) -> TypeDMap:
        return maps[max(bisect.bisect_right(starts, x) - 1, 0)]

    def left_owner(x: Dyadic) -> TypeDMap:
        return maps[max(bisect.bisect_left(starts, x) - 1, 0)]

    def fn(x: Dyadic) -> Dyadic:
        return right_owner(x)(x) if x < hi else maps[-1](x)

    def breaks(a: Dyadic, b: Dyadic) -> list[Dyadic]:
        result = []
        for m in maps:
            start, end = max(a, m.lo), min(b, m.hi)
            if start < end:
                result.extend((start, end, *m.breakpoints_in(start, end)))
        return result

    found: dict[Dyadic, list] = {}
    for m in maps:
        for germ in m.germs:
            entry = found.setdefault(germ.x0, [germ.y0, None, None])
            entry[1] = entry[1] or germ.left
            entry[2] = entry[2] or germ.right
    # a completed annulus stays clear of the neighbouring junction germ and of its own annulus
    def room(x0: Dyadic, other: Dyadic | None, annulus: PlMap | None, side: str) -> Dyadic | None:
        if other is None:
            return None
        if annulus is not None:
            end = annulus.nodes[-1][0] if side == "left" else annulus.nodes[0][0]
            return abs(x0 - end)
        return abs(x0 - other).half()

    points = sorted(found)
    germs = []
    for k, x0 in enumerate(points):
        y0, left, right = found[x0]
        before = points[k - 1] if k > 0 else None
        after = points[k + 1] if k + 1 < len(points) else None
        if left is None and x0 > lo:
            near = room(x0, before, None if before is None else found[before][2], "left")
            left = _affine_annulus(left_owner(x0), x0, "left", near)
        if right is None and x0 < hi:
            near = room(x0, after, None if after is None else found[after][1], "right")
            right = _affine_annulus(right_owner(x0), x0, "right", near)
        germs.append(SelfSimilarGerm(x0, y0, left, right))
    return _build(DyInterval.closed(lo, hi), germs, fn, breaks)


def d_equal(f: TypeDMap, g: TypeDMap) -> bool:
    """Equality after cutting matched germs to a common scale per side."""
    if f.domain != g.domain:
        return False
    fg = [x for x in f.germs if not x.is_removable()]
    gg = [x for x in g.germs if not x.is_removable()]
    if [(a.x0, a.y0) for a in fg] != [(b.x0, b.y0) for b in gg]:
        return False
    cuts = []
    for a, b in zip(fg, gg):
        delta_left = None if a.left is None else min(a.delta_left, b.delta_left)
        delta_right = None if a.right is None else min(a.delta_right, b.delta_right)
        ra, rb = a.recut(delta_left, delta_right), b.recut(delta_left, delta_right)
        if not (_same(ra.left, rb.left) and _same(ra.right, rb.right)):
            return False
        cuts.append((ra.lo, ra.hi))
    cursor = f.lo
    for lo, hi in [*cuts, (f.hi, f.hi)]:
        if cursor < lo:
            points = {cursor, lo, *f.breakpoints_in(cursor, lo), *g.breakpoints_in(cursor, lo)}
            if any(f(x) != g(x) for x in points):
                return False
        cursor = hi
    return True


def moved_intervals(f: TypeDMap) -> list[tuple[Dyadic, Dyadic]]:
    """Sorted disjoint closed intervals whose union contains the closure of {x : f(x) != x}.

    Outer segments are reported exactly. A germ side is reported by its hull [x0, farthest moved annulus
    point], since the moved set repeats at every doubling level.
    """
    pieces: list[tuple[Dyadic, Dyadic]] = []
    for piece in f.outer:
        for (x0, y0), (x1, y1) in zip(piece.nodes, piece.nodes[1:]):
            if x0 != y0 or x1 != y1:
                pieces.append((x0, x1))
    for germ in f.germs:
        if germ.left is not None:
            nodes = germ.left.nodes
            moved = [x0 for (x0, y0), (x1, y1) in zip(nodes, nodes[1:]) if x0 != y0 or x1 != y1]
            if moved:
                pieces.append((min(moved), germ.x0))
        if germ.right is not None:
            nodes = germ.right.nodes
            moved = [x1 for (x0, y0), (x1, y1) in zip(nodes, nodes[1:]) if x0 != y0 or x1 != y1]
            if moved:
                pieces.append((germ.x0, max(moved)))
    pieces.sort()
    merged: list[tuple[Dyadic, Dyadic]] = []
    for lo, hi in pieces:
        if merged and lo <= merged[-1][1]:
            merged[-1] = (merged[-1][0], max(merged[-1][1], hi))
        else:
            merged.append((lo, hi))
    return merged


def _structure_witness(f: TypeDMap) -> tuple[Dyadic, str] | None:
    for germ in f.germs:
        if germ.right is not None:
            (xa, ya), (_, yb) = germ.right.nodes[0], germ.right.nodes[-1]
            if not germ.y0 < ya or (ya - germ.y0).mul_pow2(1) != yb - germ.y0:
                return xa, f"right annulus of {germ.x0} is inconsistent"
        if germ.left is not None:
            (_, ya), (xb, yb) = germ.left.nodes[0], germ.left.nodes[-1]
            if not yb < germ.y0 or (yb - germ.y0).mul_pow2(1) != ya - germ.y0:
                return xb, f"left annulus of {germ.x0} is inconsistent"
    values: dict[Dyadic, Dyadic] = {}
    joints = [(g.lo, g(g.lo)) for g in f.germs] + [(g.hi, g(g.hi)) for g in f.germs]
    joints += [p.nodes[0] for p in f.outer] + [p.nodes[-1] for p in f.outer]
    for x, y in joints:
        if values.setdefault(x, y) != y:
            return x, "discontinuous"
    ordered = sorted(values.items())
    for (_, y0), (x1, y1) in zip(ordered, ordered[1:]):
        if not y0 < y1:
            return x1, "not increasing"
    return None


def d_verify(f: TypeDMap, samples: int = 200, rng=None) -> Certificate:
    """Checks the structural invariants of f and samples the self-similarity identity at every germ.

    Structural checks: annulus endpoint consistency, annuli on the correct side of y0, continuity and
    monotonicity across every gluing point. Sampled check: f(h_{x0}(x)) == h_{y0}(f(x)) for random dyadic x
    with x and h_{x0}(x) in the neighborhood.

    Returns:
        Certificate: passed, or failed with the first offending point as witness.
    """
    rng = rng or provide_rng()
    structural = _structure_witness(f)
    if structural is not None:
        point, reason = structural
        return Certificate(name="typeD.verify", passed=False, witness=str(point), details={"reason": reason})
    points = []
    for germ in f.germs:
        if germ.right is not None:
            reach = germ.delta_right.half()
            for _ in range(samples):
                points.append((germ, random_dyadic(rng, germ.x0, germ.x0 + reach, depth=reach.exponent + 16)))
        if germ.left is not None:
            reach = germ.delta_left.half()
            for _ in range(samples):
                points.append((germ, random_dyadic(rng, germ.x0 - reach, germ.x0, depth=reach.exponent + 16)))

    def commutes(sample) -> bool:
        germ, x = sample
        return f(doubling_map(germ.x0, x)) == doubling_map(germ.y0, f(x))

    certificate = verify_samples("typeD.verify", commutes, points, render=lambda s: str(s[1]))
    certificate.details["germs"] = len(f.germs)
    return certificate


def d_fragment(f: TypeDMap, I1: DyInterval, I2: DyInterval) -> tuple[TypeDMap, TypeDMap]:
    """Splits f = f1 o f2 with supp(f1) in I1 and supp(f2) in I2, for overlapping open intervals.

    With I1 on the left, f2 agrees with f right of a cut point d in the overlap and is bridged to the
    identity inside the overlap; f1 = f o f2^-1 is then the identity right of f(d). With I1 on the right the
    factorization is read off the inverse.

    Raises:
        ValueError: When the support of f is not compactly inside I1 and I2 together, or when no cut point d
            with f(d) in the overlap exists; the message names the offending point.
    """
    overlap = I1.intersect(I2)
    if overlap is None:
        raise ValueError(f"{I1} and {I2} do not overlap")
    if I2.lo < I1.lo:
        g1, g2 = d_fragment(f.inverse_map, I2, I1)
        return g2.inverse_map, g1.inverse_map
    identity = TypeDMap.identity(f.domain)
    moved = moved_intervals(f)
    if not moved:
        return identity, identity
    if not (I1.lo < moved[0][0] and moved[-1][1] < I2.hi):
        bad = moved[0][0] if moved[0][0] <= I1.lo else moved[-1][1]
        raise ValueError(f"support of f reaches {bad}, outside {I1} and {I2}")
    if moved[-1][1] < I1.hi:
        return f, identity
    if moved[0][0] > I2.lo:
        return identity, f
    cut = _cut_point(f, overlap)
    image = f(cut)
    a = (overlap.lo + min(cut, image)).half()
    f2 = d_concat(
        [
            TypeDMap.identity(DyInterval.closed(f.lo, a)),
            TypeDMap.from_pl(pl_bridge(a, cut, a, image)),
            d_restrict(f, cut, f.hi),
        ]
    )
    return d_compose(f, f2.inverse_map), f2


def _cut_point(f: TypeDMap, overlap: DyInterval) -> Dyadic:
    depth = max(overlap.lo.exponent, overlap.hi.exponent) + 2
    mid = overlap.midpoint
    for level in range(depth, depth + 8):
        step = ONE.mul_pow2(-level)
        candidates = []
        x = overlap.lo + step
        while x < overlap.hi:
            candidates.append(x)
            x = x + step
        for d in sorted(candidates, key=lambda c: abs(c - mid)):
            if any(g.lo <= d <= g.hi for g in f.germs):
                continue
            if overlap.lo < f(d) < overlap.hi:
                return d
    raise ValueError(f"f displaces every point of the overlap {overlap}, e.g. {mid} -> {f(mid)}")


def _annulus(x0: Dyadic, p: PlMap, side: str, delta: Dyadic) -> PlMap:
    chart = germ_conjugator(x0, side)
    if side == "left":
        return conjugate_on(chart, p, x0 - delta, x0 - delta.half())
    return conjugate_on(chart, p, x0 + delta.half(), x0 + delta)


def _germ_generator(interval: DyInterval, x: Dyadic, p: PlMap, side: str | None) -> TypeDMap:
    # germ of p (through the germ chart) at x, bridged back to the identity halfway to the ends
    lo, hi = interval.lo, interval.hi
    if x == lo:
        delta = _pow2_at_most((hi - lo).mul_pow2(-4))
        germ = SelfSimilarGerm(x, x, None, _annulus(x, p, "right", delta))
        mid = interval.midpoint
        return TypeDMap(interval, (germ,), (pl_through([(x + delta, germ(x + delta)), (mid, mid), (hi, hi)]),))
    if x == hi:
        delta = _pow2_at_most((hi - lo).mul_pow2(-4))
        germ = SelfSimilarGerm(x, x, _annulus(x, p, "left", delta), None)
        mid = interval.midpoint
        return TypeDMap(interval, (germ,), (pl_through([(lo, lo), (mid, mid), (x - delta, germ(x - delta))]),))
    delta = _pow2_at_most(min(x - lo, hi - x).mul_pow2(-4))
    identity = PlMap.identity()
    germ = SelfSimilarGerm(
        x,
        x,
        _annulus(x, p if side == "left" else identity, "left", delta),
        _annulus(x, p if side == "right" else identity, "right", delta),
    )
    left_mid, right_mid = (lo + x).half(), (x + hi).half()
    outer = (
        pl_through([(lo, lo), (left_mid, left_mid), (x - delta, germ(x - delta))]),
        pl_through([(x + delta, germ(x + delta)), (right_mid, right_mid), (hi, hi)]),
    )
    return TypeDMap(interval, (germ,), outer)


def scriptF_generators(interval: DyInterval, x: DyadicLike) -> list[TypeDMap]:
    """Finite generating list for the type-D group of the closure of `interval`.

    Order: the two F generators on the interval; then, for each generator p of T~ (A~, B~, C~, t_1), the
    germ generator at x acting as p on the left side only and on the right side only; then the one-sided germ
    generators at the left end for each p, and at the right end for each p.

    Raises:
        ValueError: When x is not an interior point of the interval.
    """
    x = dy(x)
    if not interval.lo < x < interval.hi:
        raise ValueError(f"{x} is not interior to {interval}")
    closed = interval.closure()
    result = [TypeDMap.from_pl(f) for f in thompson_generators("F", closed)]
    lifts = thompson_generators("Ttilde")
    for p in lifts:
        result.append(_germ_generator(closed, x, p, "left"))
        result.append(_germ_generator(closed, x, p, "right"))
    result.extend(_germ_generator(closed, closed.lo, p, None) for p in lifts)
    result.extend(_germ_generator(closed, closed.hi, p, None) for p in lifts)
    return result
