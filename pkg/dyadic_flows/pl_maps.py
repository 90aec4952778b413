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
Dyadic piecewise-linear homeomorphisms.

A `PlMap` is stored by its node list (x_i, y_i): it is affine between consecutive nodes with slope a power of
two, and the nodes are dyadic. Interval maps carry the nodes of their whole domain; line maps commuting with
the unit translation (the lifts forming T~) carry one period over [0, 1] and a `periodic` flag.

The normal form drops collinear interior nodes, and structural equality of normal forms is the equality test.

Classes:
    PlMap: dyadic PL homeomorphism between dyadic intervals, or 1-periodic line map.
    GermConjugator: the PL chart conjugating h_{x0} on one side of x0 to a unit translation of the line.

Functions:
    pl_eval, pl_compose, pl_invert: evaluation, composition f o g, inversion.
    pl_bridge(a, b, c, d): a dyadic PL homeomorphism [a, b] -> [c, d].
    pl_through(points): the PL map through increasing nodes, bridged between consecutive nodes.
    pl_shift(f, s), pl_mirror(f): conjugates by a translation and by the flip x -> -x.
    thompson_generators(kind, interval): F's standard pair on an interval, or the generators of T~.
    germ_conjugator(x0, side): the chart used to transport T~ to germs at x0.
    conjugate_on(chart, p, a, b): the restriction of chart^-1 o p o chart to [a, b] as a PlMap.
"""

import bisect
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from dyadic_flows.core_numeric import ONE, ZERO, Dyadic, DyInterval, DyadicLike, dy

Node = tuple[Dyadic, Dyadic]


def _slope_exponent(x0: Dyadic, y0: Dyadic, x1: Dyadic, y1: Dyadic) -> int:
    ratio = (y1 - y0).to_fraction() / (x1 - x0).to_fraction()
    num, den = ratio.numerator, ratio.denominator
    if num <= 0 or num & (num - 1) or den & (den - 1):
        raise ValueError(f"segment ({x0}, {y0}) -> ({x1}, {y1}) has slope {ratio}, not a power of two")
    return (num.bit_length() - 1) - (den.bit_length() - 1)


@dataclass(frozen=True)
class PlMap:
    """Dyadic PL homeomorphism given by its nodes.

    Attributes:
        nodes: (x, y) pairs, strictly increasing in both coordinates, including both domain endpoints.
        periodic: When set, nodes span x in [0, 1] with y(1) = y(0) + 1 and the map is extended by
            f(x + 1) = f(x) + 1 to the whole line.
    """

    nodes: tuple[Node, ...]
    periodic: bool = False
    slopes: tuple[int, ...] = field(init=False, compare=False, repr=False)
    _xs: tuple[Dyadic, ...] = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        nodes = tuple((dy(x), dy(y)) for x, y in self.nodes)
        if len(nodes) < 2:
            raise ValueError("a PL map needs at least two nodes")
        slopes = []
        for (x0, y0), (x1, y1) in zip(nodes, nodes[1:]):
            if not (x0 < x1 and y0 < y1):
                raise ValueError(f"nodes must increase strictly: ({x0}, {y0}) then ({x1}, {y1})")
            slopes.append(_slope_exponent(x0, y0, x1, y1))
        if self.periodic:
            if nodes[0][0] != ZERO or nodes[-1][0] != ONE or nodes[-1][1] != nodes[0][1] + 1:
                raise ValueError("periodic maps are stored on [0, 1] with f(1) = f(0) + 1")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "slopes", tuple(slopes))
        object.__setattr__(self, "_xs", tuple(x for x, _ in nodes))

    @classmethod
    def identity(cls, interval: DyInterval | None = None) -> "PlMap":
        if interval is None:
            return cls(((ZERO, ZERO), (ONE, ONE)), periodic=True)
        return cls(((interval.lo, interval.lo), (interval.hi, interval.hi)))

    @classmethod
    def translation(cls, s: DyadicLike) -> "PlMap":
        s = dy(s)
        return cls(((ZERO, s), (ONE, s + 1)), periodic=True)

    @classmethod
    def affine(cls, lo: DyadicLike, hi: DyadicLike, image_lo: DyadicLike, exponent: int) -> "PlMap":
        lo, hi, image_lo = dy(lo), dy(hi), dy(image_lo)
        return cls(((lo, image_lo), (hi, image_lo + (hi - lo).mul_pow2(exponent))))

    @property
    def domain(self) -> DyInterval | None:
        """Closed domain interval; None for line maps."""
        if self.periodic:
            return None
        return DyInterval.closed(self.nodes[0][0], self.nodes[-1][0])

    @property
    def image(self) -> DyInterval | None:
        if self.periodic:
            return None
        return DyInterval.closed(self.nodes[0][1], self.nodes[-1][1])

    def _locate(self, x: Dyadic) -> int:
        i = bisect.bisect_right(self._xs, x) - 1
        return min(max(i, 0), len(self.slopes) - 1)

    def __call__(self, x: DyadicLike) -> Dyadic:
        x = dy(x)
        if self.periodic:
            k = x.floor()
            x = x - k
            i = self._locate(x)
            x0, y0 = self.nodes[i]
            return y0 + (x - x0).mul_pow2(self.slopes[i]) + k
        if not self.nodes[0][0] <= x <= self.nodes[-1][0]:
            raise ValueError(f"{x} is outside the domain {self.domain}")
        i = self._locate(x)
        x0, y0 = self.nodes[i]
        return y0 + (x - x0).mul_pow2(self.slopes[i])

    def slope_at(self, x: DyadicLike, side: str = "right") -> int:
        """Slope exponent of the segment on the given side of x."""
        x = dy(x)
        shift = x.floor() if self.periodic else 0
        x = x - shift
        i = bisect.bisect_right(self._xs, x) - 1 if side == "right" else bisect.bisect_left(self._xs, x) - 1
        if self.periodic:
            i %= len(self.slopes)
        return self.slopes[min(max(i, 0), len(self.slopes) - 1)]

    def breakpoints_in(self, a: DyadicLike, b: DyadicLike) -> list[Dyadic]:
        """All node abscissae in [a, b], unrolling periods for line maps."""
        a, b = dy(a), dy(b)
        if not self.periodic:
            return [x for x in self._xs if a <= x <= b]
        result = []
        for k in range(a.floor(), b.floor() + 1):
            for x in self._xs[:-1]:
                if a <= x + k <= b:
                    result.append(x + k)
        return result

    def inverse(self) -> "PlMap":
        nodes = tuple((y, x) for x, y in self.nodes)
        if not self.periodic:
            return PlMap(nodes)
        return _periodic_from_samples(self.inverse_eval, self._inverse_breaks())

    def _inverse_breaks(self) -> list[Dyadic]:
        return [y - y.floor() for _, y in self.nodes]

    def inverse_eval(self, y: DyadicLike) -> Dyadic:
        """Evaluates the inverse without building it."""
        y = dy(y)
        if self.periodic:
            k = (y - self.nodes[0][1]).floor()
            y = y - k
            ys = [v for _, v in self.nodes]
            i = min(max(bisect.bisect_right(ys, y) - 1, 0), len(self.slopes) - 1)
            x0, y0 = self.nodes[i]
            return x0 + (y - y0).mul_pow2(-self.slopes[i]) + k
        ys = [v for _, v in self.nodes]
        if not ys[0] <= y <= ys[-1]:
            raise ValueError(f"{y} is outside the image {self.image}")
        i = min(max(bisect.bisect_right(ys, y) - 1, 0), len(self.slopes) - 1)
        x0, y0 = self.nodes[i]
        return x0 + (y - y0).mul_pow2(-self.slopes[i])

    def normalize(self) -> "PlMap":
        """Drops interior nodes where the slope does not change."""
        kept = [self.nodes[0]]
        for i in range(1, len(self.nodes) - 1):
            if self.slopes[i - 1] != self.slopes[i]:
                kept.append(self.nodes[i])
        kept.append(self.nodes[-1])
        if len(kept) == len(self.nodes):
            return self
        return PlMap(tuple(kept), self.periodic)

    def restrict(self, a: DyadicLike, b: DyadicLike) -> "PlMap":
        a, b = dy(a), dy(b)
        xs = sorted({a, b, *self.breakpoints_in(a, b)})
        return PlMap(tuple((x, self(x)) for x in xs)).normalize()

    def is_identity(self) -> bool:
        return all(x == y for x, y in self.nodes) and all(s == 0 for s in self.slopes)

    def commutes_with_unit_translation(self, samples: Iterable[Dyadic]) -> bool:
        return all(self(x + 1) == self(x) + 1 for x in samples)

    def to_dict(self) -> dict:
        data = {"nodes": [[str(x), str(y)] for x, y in self.nodes]}
        if self.periodic:
            data["periodic"] = True
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "PlMap":
        return cls(tuple((dy(x), dy(y)) for x, y in data["nodes"]), bool(data.get("periodic", False)))

    def __str__(self):
        body = " ".join(f"({x},{y})" for x, y in self.nodes)
        return f"PL[{body}]{'~' if self.periodic else ''}"


def _periodic_from_samples(fn, breaks: Iterable[Dyadic]) -> PlMap:
    xs = sorted({ZERO, ONE, *(b for b in breaks if ZERO <= b <= ONE)})
    start = fn(ZERO)
    nodes = [(x, fn(x)) for x in xs[:-1]] + [(ONE, start + 1)]
    return PlMap(tuple(nodes), periodic=True).normalize()


def pl_eval(f: PlMap, x: DyadicLike) -> Dyadic:
    return f(x)


def pl_invert(f: PlMap) -> PlMap:
    return f.inverse().normalize()


def pl_compose(f: PlMap, g: PlMap) -> PlMap:
    """Returns f o g in normal form.

    Raises:
        ValueError: When the image of g is not the domain of f (interval maps), or when a line map is
            composed with an interval map whose image leaves the line map's domain.
    """
    if f.periodic and g.periodic:
        breaks = list(g.breakpoints_in(ZERO, ONE))
        image_lo, image_hi = g(ZERO), g(ONE)
        breaks += [g.inverse_eval(v) for v in f.breakpoints_in(image_lo, image_hi)]
        return _periodic_from_samples(lambda x: f(g(x)), breaks)
    if g.periodic:
        raise ValueError("cannot precompose an interval map with a line map")
    image = g.image
    if not f.periodic and f.domain != image:
        raise ValueError(f"interval mismatch: image of g is {image}, domain of f is {f.domain}")
    xs = set(g._xs)
    xs.update(g.inverse_eval(v) for v in f.breakpoints_in(image.lo, image.hi))
    return PlMap(tuple((x, f(g(x))) for x in sorted(xs))).normalize()


def pl_equal(f: PlMap, g: PlMap) -> bool:
    return f.normalize() == g.normalize()


def _power_pieces(length: Dyadic) -> list[int]:
    """Splits a positive dyadic length into powers of two; returns their exponents, largest first."""
    num, exp = length.numerator, length.exponent
    return [bit - exp for bit in range(num.bit_length() - 1, -1, -1) if num >> bit & 1]


def pl_bridge(a: DyadicLike, b: DyadicLike, c: DyadicLike, d: DyadicLike) -> PlMap:
    """Builds a dyadic PL homeomorphism from [a, b] onto [c, d].

    Both intervals are cut into power-of-two pieces; the side with fewer pieces has its largest piece halved
    until the counts agree, and corresponding pieces are matched affinely, so every slope is a power of two.
    When the lengths differ by a power of two the result is affine.
    """
    a, b, c, d = dy(a), dy(b), dy(c), dy(d)
    if not (a < b and c < d):
        raise ValueError(f"bridge needs nondegenerate intervals, got [{a}, {b}] -> [{c}, {d}]")
    left, right = _power_pieces(b - a), _power_pieces(d - c)
    while len(left) != len(right):
        shorter = left if len(left) < len(right) else right
        top = shorter.pop(0)
        shorter[:0] = [top - 1, top - 1]
    nodes = [(a, c)]
    x, y = a, c
    for p, q in zip(left, right):
        x, y = x + ONE.mul_pow2(p), y + ONE.mul_pow2(q)
        nodes.append((x, y))
    return PlMap(tuple(nodes)).normalize()


def pl_through(points: Sequence[tuple[DyadicLike, DyadicLike]]) -> PlMap:
    """Interpolates increasing dyadic nodes, inserting bridges where the chord slope is not a power of two."""
    pts = [(dy(x), dy(y)) for x, y in points]
    nodes = [pts[0]]
    for (x0, y0), (x1, y1) in zip(pts, pts[1:]):
        nodes.extend(pl_bridge(x0, x1, y0, y1).nodes[1:])
    return PlMap(tuple(nodes)).normalize()


def transport(f: PlMap, lo: DyadicLike, hi: DyadicLike) -> PlMap:
    """Conjugates a map on [0, 1] to [lo, hi] by the affine map x -> lo + (hi - lo) x."""
    lo, hi = dy(lo), dy(hi)
    scale = hi - lo
    return PlMap(tuple((lo + scale * x, lo + scale * y) for x, y in f.nodes))


def pl_shift(f: PlMap, s: DyadicLike) -> PlMap:
    """The conjugate x -> f(x - s) + s, carried to the domain translated by s."""
    s = dy(s)
    return PlMap(tuple((x + s, y + s) for x, y in f.nodes), f.periodic)


def pl_mirror(f: PlMap) -> PlMap:
    """The conjugate x -> -f(-x) of an interval map by the flip."""
    if f.periodic:
        raise ValueError("line maps are not mirrored")
    return PlMap(tuple((-x, -y) for x, y in reversed(f.nodes)))


_F_A = (("0", "0"), ("1/2", "1/4"), ("3/4", "1/2"), ("1", "1"))
_F_B = (("0", "0"), ("1/2", "1/2"), ("3/4", "5/8"), ("7/8", "3/4"), ("1", "1"))
_T_C = (("0", "3/4"), ("1/2", "1"), ("3/4", "3/2"), ("1", "7/4"))


def thompson_generators(kind: str, interval: DyInterval | None = None) -> list[PlMap]:
    """Returns a finite generating set.

    Args:
        kind: "F" for the standard pair A, B of Thompson's F on the closure of `interval` (default [0, 1]);
            "Ttilde" for the lifts A~, B~, C~ of T's standard generators together with the unit translation t_1.
        interval: Target interval for the F case.

    Raises:
        ValueError: For an unknown kind.
    """
    a = PlMap(tuple((dy(x), dy(y)) for x, y in _F_A))
    b = PlMap(tuple((dy(x), dy(y)) for x, y in _F_B))
    if kind == "F":
        if interval is None:
            return [a, b]
        return [transport(a, interval.lo, interval.hi), transport(b, interval.lo, interval.hi)]
    if kind == "Ttilde":
        c = PlMap(tuple((dy(x), dy(y)) for x, y in _T_C), periodic=True)
        return [PlMap(a.nodes, periodic=True), PlMap(b.nodes, periodic=True), c, PlMap.translation(1)]
    raise ValueError(f"Not implemented generator family: {kind}")


class GermConjugator:
    """PL chart from one side of x0 onto the line conjugating h_{x0} to a unit translation.

    On the left side it sends x0 - 2^-n to n, on the right side x0 + 2^-n to -n, and is affine between
    consecutive nodes; then c o h_{x0} = t_{-1} o c on the left and t_{+1} o c on the right.
    """

    def __init__(self, x0: DyadicLike, side: str):
        if side not in ("left", "right"):
            raise ValueError(f"side must be 'left' or 'right', got {side!r}")
        self.x0 = dy(x0)
        self.side = side

    def _level(self, d: Dyadic) -> int:
        # n with 2^-(n+1) < d <= 2^-n
        num, exp = d.numerator, d.exponent
        log_floor = num.bit_length() - 1 - exp
        ceil_log = log_floor if num & (num - 1) == 0 else log_floor + 1
        return -ceil_log

    def __call__(self, x: DyadicLike) -> Dyadic:
        x = dy(x)
        if self.side == "left":
            if not x < self.x0:
                raise ValueError(f"{x} is not left of {self.x0}")
            n = self._level(self.x0 - x)
            node = self.x0 - ONE.mul_pow2(-n)
            return Dyadic(n) + (x - node).mul_pow2(n + 1)
        if not x > self.x0:
            raise ValueError(f"{x} is not right of {self.x0}")
        n = self._level(x - self.x0)
        node = self.x0 + ONE.mul_pow2(-n - 1)
        return Dyadic(-n - 1) + (x - node).mul_pow2(n + 1)

    def inverse(self, v: DyadicLike) -> Dyadic:
        v = dy(v)
        m = v.floor()
        if self.side == "left":
            node = self.x0 - ONE.mul_pow2(-m)
            return node + (v - m).mul_pow2(-m - 1)
        n = -m - 1
        node = self.x0 + ONE.mul_pow2(-n - 1)
        return node + (v - m).mul_pow2(-n - 1)


def germ_conjugator(x0: DyadicLike, side: str) -> GermConjugator:
    return GermConjugator(x0, side)


def conjugate_on(chart: GermConjugator, p: PlMap, a: DyadicLike, b: DyadicLike) -> PlMap:
    """Restricts chart^-1 o p o chart to [a, b] (a sub-interval of the chart's side) as a PlMap."""
    a, b = dy(a), dy(b)
    ca, cb = chart(a), chart(b)
    values = set(Dyadic(k) for k in range(ca.ceil(), cb.floor() + 1))
    values.update(p.breakpoints_in(ca, cb))
    pa, pb = p(ca), p(cb)
    values.update(p.inverse_eval(Dyadic(k)) for k in range(pa.ceil(), pb.floor() + 1))
    xs = {a, b}
    xs.update(chart.inverse(v) for v in values if ca <= v <= cb)
    return PlMap(tuple((x, chart.inverse(p(chart(x)))) for x in sorted(xs))).normalize()
