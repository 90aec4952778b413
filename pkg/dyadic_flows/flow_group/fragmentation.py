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
Fragmentation of chart elements along an open cover by charts.

An element given on a host chart C x I is read in host coordinates: every cover chart D x J shows up on C x I
as clopen conditions x in shift^-k(D) with t in J + k, and for Z-charts also x in shift^n(sigma(D)) with
t in -J - n. On each atom of these conditions the fiber map is cut into factors supported in single cover
intervals; fibers that displace points too far for a direct cut are first written as a product of small steps
along the straight-line homotopy to the identity.

Functions:
    fragment_element(g, cover) -> list[Atlas]: factors g_1, ..., g_r with g = g_1 o ... o g_r.
    fragment_map(f, cover) -> list[(map, cover index)]
    interpolation_chain(f, eps) -> list[TypeDMap]
    default_cover(sft) -> list[Chart]: the chart decomposition with every chart widened to its extension.
"""

from typing import Sequence

from dyadic_flows.common.ioc_container import Container
from dyadic_flows.common.measure_utils import trace_on
from dyadic_flows.core_numeric import ONE, Dyadic, DyInterval
from dyadic_flows.flow_group.atlas import (
    Atlas,
    ChartElement,
    chart_region,
    cocycle_bound,
    refine,
    support_region,
)
from dyadic_flows.flow_group.rewriting import rehost
from dyadic_flows.pl_maps import PlMap, pl_through
from dyadic_flows.subshifts.clopen import Clopen
from dyadic_flows.subshifts.sft import Sft
from dyadic_flows.suspension import Chart, chart_decomposition, make_chart, reflect
from dyadic_flows.type_d import (
    SelfSimilarGerm,
    TypeDMap,
    d_compose,
    d_concat,
    d_equal,
    d_fragment,
    d_restrict,
    moved_intervals,
)

Piece = tuple[DyInterval, int]


def default_cover(sft: Sft) -> list[Chart]:
    """Open Z-chart cover: each chart C x I of the decomposition replaced by C x J, J its extension interval."""
    cover = []
    for chart in chart_decomposition(sft):
        if chart.extendable is None:
            raise ValueError(f"{sft.name}: chart {chart.label()} has no extension")
        cover.append(make_chart(sft, chart.clopen, chart.extendable, "Z"))
    return cover


def _images(host: Chart, cover: Sequence[Chart]) -> list[tuple[Clopen, DyInterval, int]]:
    """Cover charts in host coordinates, as (clopen inside C, open interval of times, cover index)."""
    closure = host.interval.closure()
    images = []
    for j, chart in enumerate(cover):
        K = chart.interval
        for k in range((closure.lo - K.hi).floor(), (closure.hi - K.lo).ceil() + 1):
            U = K.translate(k)
            if U.hi > closure.lo and U.lo < closure.hi:
                images.append((chart.clopen.image_shift(-k) & host.clopen, U, j))
        if chart.kind != "Z":
            continue
        for n in range((-K.hi - closure.hi).floor(), (-K.lo - closure.lo).ceil() + 1):
            U = K.negate().translate(-n)
            if U.hi > closure.lo and U.lo < closure.hi:
                images.append((reflect(chart.clopen, n) & host.clopen, U, j))
    return [(clopen, U, j) for clopen, U, j in images if not clopen.is_empty()]


def _components(pieces: Sequence[Piece]) -> list[tuple[Dyadic, Dyadic, list[Piece]]]:
    # connected components of a union of open intervals; touching ends leave the common point uncovered
    components: list[tuple[Dyadic, Dyadic, list[Piece]]] = []
    for piece in sorted(pieces, key=lambda p: (p[0].lo, p[0].hi)):
        U = piece[0]
        if components and U.lo < components[-1][1]:
            lo, hi, members = components[-1]
            components[-1] = (lo, max(hi, U.hi), members + [piece])
        else:
            components.append((U.lo, U.hi, [piece]))
    return components


def _chain(members: Sequence[Piece], a: Dyadic, b: Dyadic) -> list[Piece]:
    """Greedy chain of overlapping members from one containing a to one reaching past b."""
    chain: list[Piece] = []
    reach = a
    while True:
        candidates = [m for m in members if m[0].lo < reach]
        best = max(candidates, key=lambda m: m[0].hi, default=None)
        if best is None or best[0].hi <= reach:
            raise ValueError(f"cover does not reach past {reach}")
        chain.append(best)
        reach = best[0].hi
        if reach > b:
            return chain


def _keep(f: TypeDMap, parts: Sequence[tuple[Dyadic, Dyadic]]) -> TypeDMap:
    """f on the given moved intervals, the identity elsewhere."""
    maps, cursor = [], f.lo
    for a, b in parts:
        if cursor < a:
            maps.append(TypeDMap.identity(DyInterval.closed(cursor, a)))
        maps.append(d_restrict(f, a, b))
        cursor = b
    if cursor < f.hi:
        maps.append(TypeDMap.identity(DyInterval.closed(cursor, f.hi)))
    return maps[0] if len(maps) == 1 else d_concat(maps)


def _grid(a: Dyadic, b: Dyadic, level: int) -> list[Dyadic]:
    k = a.mul_pow2(level).floor() + 1
    points = []
    while Dyadic(k, level) < b:
        points.append(Dyadic(k, level))
        k += 1
    return points


def _interpolated(p: PlMap, lam: Dyadic, level: int) -> PlMap:
    # nodes x -> x + lam (p(x) - x); gridding both sides keeps consecutive images within 2^-level
    (a, fa), (b, fb) = p.nodes[0], p.nodes[-1]
    inverse = p.inverse()
    xs = {a, b, *p.breakpoints_in(a, b), *_grid(a, b, level), *(inverse(y) for y in _grid(fa, fb, level))}
    return pl_through([(x, x + lam * (p(x) - x)) for x in sorted(xs)])


def interpolate(f: TypeDMap, lam: Dyadic, level: int) -> TypeDMap:
    """The type-D map through the nodes of (1 - lam) id + lam f.

    Convex combinations commute with the doublings h_{x0}, so each germ x0 -> y0 becomes a germ
    x0 -> x0 + lam (y0 - x0) with interpolated annuli. lam = 0 gives the identity and lam = 1 gives f.
    """
    germs = tuple(
        SelfSimilarGerm(
            g.x0,
            g.x0 + lam * (g.y0 - g.x0),
            None if g.left is None else _interpolated(g.left, lam, level),
            None if g.right is None else _interpolated(g.right, lam, level),
        )
        for g in f.germs
    )
    return TypeDMap(f.domain, germs, tuple(_interpolated(p, lam, level) for p in f.outer))


def interpolation_chain(f: TypeDMap, eps: Dyadic) -> list[TypeDMap]:
    """Steps b_N, ..., b_1 with f = b_N o ... o b_1 and every |b_j(t) - t| below eps / 2.

    b_j = a_j o a_{j-1}^-1 for the interpolations a_j at lam = j / N, N a power of two with
    max |f(t) - t| / N <= eps / 16, on a node grid of mesh at most eps / 8.
    """
    bound = cocycle_bound(f)
    exponent = 0
    while bound.mul_pow2(4) > eps.mul_pow2(exponent):
        exponent += 1
    level = 3
    while ONE.mul_pow2(-level) > eps.mul_pow2(-3):
        level += 1
    stages = [interpolate(f, Dyadic(j, exponent), level) for j in range(2**exponent + 1)]
    steps = [d_compose(after, before.inverse_map) for before, after in zip(stages, stages[1:])]
    return steps[::-1]


def _split_along(f: TypeDMap, chain: Sequence[Piece]) -> list[tuple[TypeDMap, int]]:
    factors, rest = [], f
    for k, (U, j) in enumerate(chain[:-1]):
        remaining = DyInterval(chain[k + 1][0].lo, max(V.hi for V, _ in chain[k + 1 :]))
        first, rest = d_fragment(rest, U, remaining)
        factors.append((first, j))
    factors.append((rest, chain[-1][1]))
    return factors


def _split_component(f: TypeDMap, a: Dyadic, b: Dyadic, members: Sequence[Piece]) -> list[tuple[TypeDMap, int]]:
    chain = _chain(members, a, b)
    if len(chain) == 1:
        return [(f, chain[0][1])]
    try:
        return _split_along(f, chain)
    except ValueError as e:
        Container.logger().info(msg=f"direct cut failed ({e}); interpolating")
    eps = min(U.intersect(V).length for (U, _), (V, _) in zip(chain, chain[1:]))
    factors = []
    for step in interpolation_chain(f, eps):
        factors.extend(_split_along(step, chain))
    return factors


def fragment_map(f: TypeDMap, cover: Sequence[Piece]) -> list[tuple[TypeDMap, int]]:
    """Writes f = f_1 o ... o f_r, each f_i supported compactly inside one cover interval.

    Factors are returned with the cover index of their interval, on a domain widened by one on each side so
    that cover intervals may reach past the ends of f's domain.

    Raises:
        ValueError: When a moved interval of f is not compactly inside one connected piece of the cover.
    """
    moved = moved_intervals(f)
    if not moved:
        return []
    f = rehost(f, DyInterval(f.lo - 1, f.hi + 1))
    components = _components(cover)
    groups: dict[int, list[tuple[Dyadic, Dyadic]]] = {}
    for a, b in moved:
        index = next((i for i, (lo, hi, _) in enumerate(components) if lo < a and b < hi), None)
        if index is None:
            raise ValueError(f"moved interval [{a}, {b}] is not inside the cover")
        groups.setdefault(index, []).append((a, b))
    factors = []
    for index, parts in sorted(groups.items()):
        piece = _keep(f, parts)
        factors.extend(_split_component(piece, parts[0][0], parts[-1][1], components[index][2]))
    return factors


def _product(maps: Sequence[TypeDMap], domain: DyInterval) -> TypeDMap:
    result = TypeDMap.identity(domain)
    for m in maps:
        result = d_compose(result, m)
    return result


@trace_on("Fragmentation", measure_time=True)
def fragment_element(g: Atlas, cover: Sequence[Chart]) -> list[Atlas]:
    """Factors g = g_1 o ... o g_r with every support inside the region of one cover chart.

    Args:
        g: An element with a chart form (a generator, or a product of elements on one chart).
        cover: Open charts; Z-charts when the host chart is a Z-chart.

    Returns:
        The factors as atlases, in product order; [g] when g already sits inside one cover chart.

    Raises:
        ValueError: When g has no chart form, the cover kinds do not fit the host, or some moved point of g
            lies outside the cover; the message names the point.
    """
    element = g.chart_form
    if element is None:
        raise ValueError(f"{g.name or 'element'} has no chart form to fragment")
    host = element.chart
    if host.kind == "Z" and any(chart.kind != "Z" for chart in cover):
        raise ValueError("a Z-chart element needs a cover by Z-charts")
    support = support_region(g)
    for chart in cover:
        if support.is_subset(chart_region(chart)):
            return [g]
    images = _images(host, cover)
    closure = host.interval.closure()
    slots: dict[tuple[int, int], list[tuple[Clopen, TypeDMap]]] = {}
    for cell, f in element.cells:
        items = [(clopen, i) for i, (clopen, _, _) in enumerate(images)]
        for atom, labels in refine(cell, items):
            pieces = [(images[i][1], images[i][2]) for i in labels]
            try:
                factors = fragment_map(f, pieces)
            except ValueError as e:
                raise ValueError(f"x: {atom.witness()}: {e}") from e
            maps = [d_restrict(m, closure.lo, closure.hi) for m, _ in factors]
            if not d_equal(_product(maps, closure), f):
                raise ValueError(f"x: {atom.witness()}: fragment product differs from the fiber")
            for position, (m, (_, j)) in enumerate(zip(maps, factors)):
                if not m.is_identity():
                    slots.setdefault((position, j), []).append((atom, m))
    result = []
    for (position, j), cells in sorted(slots.items()):
        name = f"{g.name}#{position}.{j}" if g.name else ""
        result.append(ChartElement(host, tuple(cells), name).atlas)
    Container.logger().info(msg=f"{g.name or 'element'}: {len(result)} fragments over {len(cover)} charts")
    return result
