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
Explicit words for the constructive half of the generation argument.

For charts C x I and D x J meeting in C & D and I & J, an element supported on (C & D) x I is a product of
elements supported on C x I and on D x J: on an interval L inside I & J that avoids the half-integers the two
charts only meet in (C & D) x L, a commutator with a self-similar element isolates a bump there, and a
conjugation on C x I moves the target into that bump. The completeness replay chains this rewrite with the
chart identification (D, L - 1) ~ (shift^-1(D), L) to write generators of F^c_{D, J}, for cylinder
intersections D = shift^m(C_{i_m}) & ... & shift^n(C_{i_n}), as words in the groups of the generating charts.

Classes:
    Word: a product of chart elements, stored as steps (letter index, +1 or -1) into a letter table.

Functions:
    intersection_rewrite(C, D, I, J, target) -> Word
    completeness(sft, depth, max_sequences) -> Report
"""

import itertools
from dataclasses import dataclass, field
from typing import Callable, Sequence

from dyadic_flows.common.ioc_container import Container
from dyadic_flows.common.measure_utils import trace_on
from dyadic_flows.common.model import Certificate, Report
from dyadic_flows.core_numeric import Dyadic, DyInterval, dy
from dyadic_flows.flow_group.atlas import Atlas, ChartElement, elem_compose, elem_equal, identity_atlas, same_chart
from dyadic_flows.flow_group.generators import generating_charts, generator_intervals
from dyadic_flows.pl_maps import PlMap, pl_through, thompson_generators
from dyadic_flows.subshifts.clopen import Clopen
from dyadic_flows.subshifts.sft import Sft
from dyadic_flows.suspension import Chart, make_chart
from dyadic_flows.type_d import (
    SelfSimilarGerm,
    TypeDMap,
    d_compose,
    d_concat,
    d_invert,
    d_restrict,
    d_shift,
    moved_intervals,
)


@dataclass
class Word:
    """The product letters[i_1]^e_1 o ... o letters[i_k]^e_k; the last step acts first."""

    letters: list[ChartElement] = field(default_factory=list)
    steps: list[tuple[int, int]] = field(default_factory=list)

    @classmethod
    def of(cls, *elements: ChartElement) -> "Word":
        return cls(list(elements), [(i, 1) for i in range(len(elements))])

    def __len__(self) -> int:
        return len(self.steps)

    def _index(self, element: ChartElement) -> int:
        for i, letter in enumerate(self.letters):
            if letter is element:
                return i
        self.letters.append(element)
        return len(self.letters) - 1

    def _extend(self, other: "Word", inverted: bool = False) -> None:
        steps = reversed(other.steps) if inverted else other.steps
        for i, e in steps:
            self.steps.append((self._index(other.letters[i]), -e if inverted else e))

    def inverse(self) -> "Word":
        return Word(list(self.letters), [(i, -e) for i, e in reversed(self.steps)])

    def __mul__(self, other: "Word") -> "Word":
        result = Word(list(self.letters), list(self.steps))
        result._extend(other)
        return result

    def substitute(self, expand: Callable[[ChartElement], "Word | None"]) -> "Word":
        """Replaces every letter for which `expand` returns a word by that word."""
        expansions: dict[int, Word] = {}
        result = Word()
        for i, e in self.steps:
            if i not in expansions:
                expansions[i] = expand(self.letters[i]) or Word.of(self.letters[i])
            result._extend(expansions[i], inverted=e < 0)
        return result

    def atlas(self, sft: Sft | None = None) -> Atlas:
        """Composes the word; runs of letters on one chart are multiplied on the chart first.

        Raises:
            ValueError: For an empty word without a subshift to build the identity on.
        """
        if sft is None:
            if not self.letters:
                raise ValueError("the empty word needs a subshift")
            sft = self.letters[0].chart.clopen.sft
        inverses: dict[int, ChartElement] = {}
        result, pending = identity_atlas(sft), None
        for i, e in self.steps:
            letter = self.letters[i] if e > 0 else inverses.setdefault(i, self.letters[i].inverse())
            if pending is not None and same_chart(pending.chart, letter.chart):
                pending = pending.compose(letter)
                continue
            if pending is not None:
                result = elem_compose(result, pending.atlas)
            pending = letter
        if pending is not None:
            result = elem_compose(result, pending.atlas)
        return result

    def render(self) -> str:
        return " ".join(f"{self.letters[i].name or f'x{i}'}{'' if e > 0 else '^-1'}" for i, e in self.steps)

    def record(self) -> dict:
        return {"letters": [letter.record() for letter in self.letters], "steps": [[i, e] for i, e in self.steps]}

    @classmethod
    def from_record(cls, sft: Sft, data: dict) -> "Word":
        letters = [ChartElement.from_record(sft, row) for row in data.get("letters", [])]
        return cls(letters, [(int(i), int(e)) for i, e in data.get("steps", [])])


def support_hull(f: TypeDMap) -> tuple[Dyadic, Dyadic] | None:
    moved = moved_intervals(f)
    if not moved:
        return None
    return moved[0][0], moved[-1][1]


def shrunk(interval: DyInterval) -> tuple[Dyadic, Dyadic]:
    """The middle half of an interval."""
    quarter = interval.length.mul_pow2(-2)
    return interval.lo + quarter, interval.hi - quarter


def rehost(f: TypeDMap, interval: DyInterval) -> TypeDMap:
    """The same compactly supported map, given on the closure of another interval containing its support.

    Raises:
        ValueError: When the support of f is not compactly inside `interval`.
    """
    closure = interval.closure()
    if f.domain == closure:
        return f
    hull = support_hull(f)
    if hull is None:
        return TypeDMap.identity(closure)
    if not (closure.lo < hull[0] and hull[1] < closure.hi):
        raise ValueError(f"support [{hull[0]}, {hull[1]}] is not compactly inside {interval}")
    lo, hi = max(f.lo, closure.lo), min(f.hi, closure.hi)
    parts = []
    if closure.lo < lo:
        parts.append(TypeDMap.identity(DyInterval.closed(closure.lo, lo)))
    parts.append(f if (lo, hi) == (f.lo, f.hi) else d_restrict(f, lo, hi))
    if hi < closure.hi:
        parts.append(TypeDMap.identity(DyInterval.closed(hi, closure.hi)))
    return parts[0] if len(parts) == 1 else d_concat(parts)


def squeeze(interval: DyInterval, hull: tuple[Dyadic, Dyadic], into: tuple[Dyadic, Dyadic]) -> TypeDMap:
    """A PL map of closure(interval), the identity near both ends, carrying [s1, s2] onto [k1, k2]."""
    closure = interval.closure()
    (s1, s2), (k1, k2) = hull, into
    if (s1, s2) == (k1, k2):
        return TypeDMap.identity(closure)
    e1 = (closure.lo + min(s1, k1)).half()
    e2 = (max(s2, k2) + closure.hi).half()
    nodes = [(closure.lo, closure.lo), (e1, e1), (s1, k1), (s2, k2), (e2, e2), (closure.hi, closure.hi)]
    return TypeDMap.from_pl(pl_through(nodes))


def conjugate(c: TypeDMap, f: TypeDMap) -> TypeDMap:
    """c o f o c^-1."""
    return d_compose(d_compose(c, f), d_invert(c))


def lattice_free(overlap: DyInterval) -> tuple[Dyadic, Dyadic]:
    """A closed interval inside `overlap` avoiding (1/2)Z: the longest gap between half-integers, middle half."""
    cuts = [dy(k).half() for k in range(overlap.lo.mul_pow2(1).floor() + 1, overlap.hi.mul_pow2(1).ceil())]
    ends = [overlap.lo, *cuts, overlap.hi]
    gap = max(zip(ends, ends[1:]), key=lambda ab: ab[1] - ab[0])
    return shrunk(DyInterval(*gap))


def _require_chart(sft: Sft, C: Clopen, I: DyInterval, kind: str) -> Chart:
    chart = make_chart(sft, C, I, kind)
    if not chart.valid:
        raise ValueError(f"{chart.label()} is not a chart: {chart.certificate.witness}")
    return chart


def intersection_rewrite(C: Clopen, D: Clopen, I: DyInterval, J: DyInterval, target: ChartElement) -> Word:
    """Writes a compactly supported element on (C & D) x I or (C - D) x I in elements on C x I and D x J.

    With L = [l1, l2] inside I & J avoiding (1/2)Z, lambda = |L|, p = l1 + 3 lambda/4 and delta = lambda/2:
    b on D x J is the halving h_p^-1 on [p - delta, p], F on C x I repeats f' = u f u^-1 on every halving of the
    annulus [p - delta, p - delta/2] towards p, and the commutator F b F^-1 b^-1 is f' on (C & D) x L and the
    identity elsewhere. The word is u^-1 F b F^-1 b^-1 u.

    Args:
        C, D: Clopen factors of the two charts.
        I, J: Their intervals.
        target: A single-cell PL element on the chart C x I with cell C & D or C - D.

    Raises:
        ValueError: When C & D or I & J is empty, when C x I or D x J is not a chart, or when the target is not
            a compactly supported PL element with one of the two admissible cells.
    """
    sft = C.sft
    common = C & D
    if common.is_empty():
        raise ValueError(f"{C} and {D} do not meet")
    overlap = I.intersect(J)
    if overlap is None:
        raise ValueError(f"{I} and {J} do not meet")
    kind = target.chart.kind
    home = _require_chart(sft, C, I, kind)
    if not same_chart(home, target.chart):
        raise ValueError(f"target lives on {target.chart.label()}, not on {home.label()}")
    if len(target.cells) != 1:
        raise ValueError(f"target must have a single cell, got {len(target.cells)}")
    cell, f = target.cells[0]
    if C.is_subset(D):
        return Word.of(target)
    if f.germs:
        raise ValueError("target map must be piecewise linear")
    hull = support_hull(f)
    if hull is None:
        return Word()
    if not (I.lo < hull[0] and hull[1] < I.hi):
        raise ValueError(f"support [{hull[0]}, {hull[1]}] of the target is not compactly inside {I}")
    if cell != common:
        if cell != C - D:
            raise ValueError(f"target cell {cell} is neither C & D nor C - D")
        whole_cell = ChartElement(home, ((C, f),), f"{target.name}|C" if target.name else "")
        inside = ChartElement(home, ((common, f),), target.name)
        return Word.of(whole_cell) * intersection_rewrite(C, D, I, J, inside).inverse()

    other = _require_chart(sft, D, J, kind)
    l1, l2 = lattice_free(overlap)
    lam = l2 - l1
    delta = lam.half()
    p = l1 + delta + lam.mul_pow2(-2)
    eighth = delta.mul_pow2(-3)
    u_map = squeeze(I, hull, (p - delta + eighth, p - delta.half() - eighth))
    bump = conjugate(u_map, f)
    annulus = d_restrict(bump, p - delta, p - delta.half()).outer[0]
    right = lam.mul_pow2(-2)
    closure = I.closure()
    f_inf = TypeDMap(
        closure,
        (SelfSimilarGerm(p, p, annulus, PlMap.identity(DyInterval.closed(p + right.half(), p + right))),),
        (PlMap.identity(DyInterval.closed(closure.lo, p - delta)), PlMap.identity(DyInterval.closed(p + right, closure.hi))),
    )
    jc = J.closure()
    b_nodes = [(jc.lo, jc.lo), (l1, l1), (l1 + lam.mul_pow2(-3), l1 + lam.mul_pow2(-3))]
    b_nodes += [(p - delta, p - delta.half()), (p, p), (jc.hi, jc.hi)]
    u = ChartElement.single(home, u_map, "u")
    F = ChartElement.single(home, f_inf, "F_inf")
    b = ChartElement.single(other, TypeDMap.from_pl(pl_through(b_nodes)), "b")
    return Word([u, F, b], [(0, -1), (1, 1), (2, 1), (1, -1), (2, -1), (0, 1)])


IndexSequence = tuple[int, tuple[int, ...]]


class _Replay:
    """Writes elements on shifted cylinder intersections as words in the generating chart groups.

    Every rewriting step is checked on its own as it is taken: conjugations on one chart, chart identifications
    and commutator rewrites on atlases of at most six letters. A word whose steps all hold equals its target.
    """

    def __init__(self, sft: Sft, L: DyInterval):
        self.sft = sft
        self.L = L
        self.intervals = generator_intervals()
        self.charts: dict[tuple[int, int], Chart] = {}
        for entry in generating_charts(sft, self.intervals):
            self.charts[(entry.index, entry.omega)] = entry.chart
        self.pieces = [self.charts[(i, 0)].clopen for i in range(len(self.charts) // 3)]
        self.bridges = {w: self.intervals[0].intersect(self.intervals[w]) for w in (-1, 1)}
        for w in (-1, 1):
            if not self.L.translate(w).compactly_inside(self.intervals[w]):
                raise ValueError(f"{self.L} + {w} is not compactly inside I_{w} = {self.intervals[w]}")
        if not self.L.compactly_inside(self.intervals[0]):
            raise ValueError(f"{self.L} is not compactly inside I_0 = {self.intervals[0]}")
        self.steps = 0
        self.failures: list[str] = []

    def reset(self) -> None:
        self.steps = 0
        self.failures = []

    def _check(self, passed: bool, what: str) -> None:
        self.steps += 1
        if not passed:
            self.failures.append(what)

    def domain(self, seq: IndexSequence) -> Clopen:
        m, indices = seq
        result = self.pieces[indices[0]].image_shift(m)
        for j, i in enumerate(indices[1:], start=m + 1):
            result = result & self.pieces[i].image_shift(j)
        return result

    def element(self, i: int, w: int, cell: Clopen, g: TypeDMap, name: str) -> ChartElement:
        chart = self.charts[(i, w)]
        return ChartElement(chart, ((cell, rehost(g, chart.interval)),), name)

    def _conjugation(self, c: ChartElement, cell: Clopen, moved: TypeDMap, target: ChartElement) -> None:
        # c^-1 o moved o c == target, read on the chart of c
        inner = ChartElement(c.chart, ((cell, rehost(moved, c.chart.interval)),))
        product = c.inverse().compose(inner.compose(c))
        self._check(not product.compose(target.inverse()).cells, f"conjugation by {c.name} on {cell.witness()}")

    def _identification(self, current: ChartElement, moved: ChartElement) -> None:
        self._check(
            elem_equal(current.atlas, moved.atlas),
            f"{current.chart.label()} and {moved.chart.label()} do not identify",
        )

    def into_base(self, i: int, w: int, cell: Clopen, h: TypeDMap, recurse: Callable[[TypeDMap], Word]) -> Word:
        """Word for h acting on the clopen `cell` inside C_i over I_w, given words for elements on cell x L.

        The support is pushed into I_0 & I_w by a conjugator of F^c_{C_i, I_w}, then into L by one of
        F^c_{C_i, I_0}.
        """
        hull = support_hull(h)
        if hull is None:
            return Word()
        target = self.element(i, w, cell, h, "h")
        if w != 0:
            interval = self.intervals[w]
            c = self.element(i, w, self.pieces[i], squeeze(interval, hull, shrunk(self.bridges[w])), f"c{w}")
            moved = rehost(conjugate(c.cells[0][1], rehost(h, interval)), self.intervals[0])
            self._conjugation(c, cell, moved, target)
            return Word.of(c).inverse() * self.into_base(i, 0, cell, moved, recurse) * Word.of(c)
        if self.L.lo < hull[0] and hull[1] < self.L.hi:
            return recurse(rehost(h, self.L))
        interval = self.intervals[0]
        c = self.element(i, 0, self.pieces[i], squeeze(interval, hull, shrunk(self.L)), "c0")
        moved = rehost(conjugate(c.cells[0][1], rehost(h, interval)), self.L)
        self._conjugation(c, cell, moved, target)
        return Word.of(c).inverse() * recurse(moved) * Word.of(c)

    @staticmethod
    def index_at(seq: IndexSequence, j: int) -> int:
        return seq[1][j - seq[0]]

    def claim(self, seq: IndexSequence, g: TypeDMap) -> Word:
        """Word for g, compactly supported in L, acting on D(seq) x L."""
        m, indices = seq
        n = m + len(indices) - 1
        if m == n == 0:
            return Word.of(self.element(indices[0], 0, self.pieces[indices[0]], g, f"C{indices[0]},I0"))
        return self.climb(seq, 0, g, 1 if n > 0 else -1)

    def climb(self, seq: IndexSequence, k: int, g: TypeDMap, side: int) -> Word:
        # g on shift^-k(D) x L equals d_shift(g, side) on shift^-(k + side)(D) x (L + side)
        m, indices = seq
        end = m + len(indices) - 1 if side > 0 else m
        if k == end:
            return self.intersect(seq, g, side)
        nxt = k + side
        i = self.index_at(seq, nxt)
        cell = self.domain(seq).image_shift(-nxt)
        shifted = d_shift(g, side)
        current = self.element(self.index_at(seq, k), 0, self.domain(seq).image_shift(-k), g, "g")
        self._identification(current, self.element(i, side, cell, shifted, "g"))
        return self.into_base(i, side, cell, shifted, lambda inner: self.climb(seq, nxt, inner, side))

    def intersect(self, seq: IndexSequence, g: TypeDMap, side: int) -> Word:
        m, indices = seq
        end = m + len(indices) - 1 if side > 0 else m
        sub = (m, indices[:-1]) if side > 0 else (m + 1, indices[1:])
        i = self.index_at(seq, end)
        cell = self.domain(seq).image_shift(-end)
        outer = self.domain(sub).image_shift(-end)
        target = self.element(i, 0, cell, g, f"C{i},I0")
        word = intersection_rewrite(self.pieces[i], outer, self.intervals[0], self.L, target)
        self._check(elem_equal(word.atlas(self.sft), target.atlas), f"commutator on {cell.witness()}")
        home = self.charts[(i, 0)]

        def expand(letter: ChartElement) -> Word | None:
            if same_chart(letter.chart, home):
                return None
            return self.descend(sub, end, letter.cells[0][1], side, letter)

        return word.substitute(expand)

    def descend(
        self, sub: IndexSequence, j: int, g: TypeDMap, side: int, current: ChartElement | None = None
    ) -> Word:
        # g on shift^-j(D') x L equals d_shift(g, -side) on shift^-(j - side)(D') x (L - side)
        if j == 0:
            return self.claim(sub, g)
        prev = j - side
        i = self.index_at(sub, prev)
        cell = self.domain(sub).image_shift(-prev)
        shifted = d_shift(g, -side)
        if current is None:
            current = self.element(self.index_at(sub, j), 0, self.domain(sub).image_shift(-j), g, "g")
        self._identification(current, self.element(i, -side, cell, shifted, "g"))
        return self.into_base(i, -side, cell, shifted, lambda inner: self.descend(sub, prev, inner, side))


def _sequences(replay: _Replay, depth: int, max_sequences: int):
    """Index sequences with nonempty intersections, at most `max_sequences` per shape (m, n)."""
    count = len(replay.pieces)
    for n in range(depth + 1):
        for m in range(0, -depth - 1, -1):
            found = 0
            for indices in itertools.product(range(count), repeat=n - m + 1):
                if found >= max_sequences:
                    break
                seq = (m, indices)
                if not replay.domain(seq).is_empty():
                    found += 1
                    yield seq


def _targets(replay: _Replay, i0: int, cell: Clopen, omegas: Sequence[int]) -> list[tuple[int, str, ChartElement]]:
    targets = []
    for w in omegas:
        chart = replay.charts[(i0, w)]
        K = DyInterval(*shrunk(chart.interval))
        for label, pl in zip(("F.A", "F.B"), thompson_generators("F", K)):
            f = rehost(TypeDMap.from_pl(pl), chart.interval)
            targets.append((w, label, ChartElement(chart, ((cell, f),), f"{label} on I{w}")))
    return targets


@trace_on("Generation replay", measure_time=True)
def completeness(
    sft: Sft,
    depth: int | None = None,
    max_sequences: int | None = None,
    omegas: Sequence[int] = (-1, 0, 1),
) -> Report:
    """Replays the generation argument on cylinder intersections and checks each produced word exactly.

    For every index sequence (i_m, ..., i_n) with |m|, n <= depth and nonempty D, and for each w, the two F
    generators on the middle half of I_w acting on D are written as words in the groups of the generating
    charts. Each rewriting step is checked as it is taken; words of at most `completeness_direct_limit`
    letters are also composed and compared with their target as atlases.

    Args:
        sft: A reversible subshift meeting the standing assumptions.
        depth: Bound on |m| and n; defaults to the configured `completeness_depth`.
        max_sequences: Sequences tried per shape (m, n); defaults to `completeness_max_sequences`.
        omegas: The intervals I_w whose targets are replayed.
    """
    depth = Container.config.get("completeness_depth", 2) if depth is None else depth
    max_sequences = max_sequences or Container.config.get("completeness_max_sequences", 2)
    direct_limit = Container.config.get("completeness_direct_limit", 12)
    L = DyInterval.parse(Container.config.get("completeness_interval", ["-1/8", "1/8"]))
    replay = _Replay(sft, L)
    report = Report(subject=f"{sft.name}: generation replay", facts={"depth": depth, "pieces": len(replay.pieces)})
    for seq in _sequences(replay, depth, max_sequences):
        m, indices = seq
        cell = replay.domain(seq)
        i0 = indices[-m]
        for w, label, target in _targets(replay, i0, cell, omegas):
            details = {"m": m, "indices": list(indices), "omega": w, "target": label}
            replay.reset()
            try:
                word = replay.into_base(i0, w, cell, target.cells[0][1], lambda g, s=seq: replay.claim(s, g))
                details.update(length=len(word), steps=replay.steps, direct=len(word) <= direct_limit)
                passed = not replay.failures
                witness = replay.failures[0] if replay.failures else ""
                if passed and len(word) <= direct_limit:
                    passed = elem_equal(word.atlas(sft), target.atlas)
                    witness = "" if passed else f"word for {label} on {cell.witness()} differs from its target"
            except ValueError as e:
                passed, witness = False, f"{type(e).__name__}: {e}"
            report.add(Certificate(name="completeness.word", passed=passed, witness=witness, details=details))
    Container.logger().info(msg=f"{report.subject}: {len(report.certificates)} words checked")
    return report
