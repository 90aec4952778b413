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
The suspension Y = (X x R)/Z of a subshift and the dihedral suspension Z = Y / hat_sigma of a reversible one.

A point of Y is stored as (x, t) with t in [0, 1); the class of (x, t) also contains (shift^k(x), t - k). The
infinite dihedral group acts on coordinates by the translations (x, t) -> (shift^k(x), t - k) and the
reflections (x, t) -> (shift^n(sigma(x)), -t - n); a chart C x I is injective in Y (resp. Z) exactly when every
nontrivial translation (resp. translation or reflection) that moves I onto itself partly moves C off itself.

Classes:
    PointY: a normalized point of Y.
    PointZ: a point of Z held by its two lifts, one of them distinguished.
    Chart: a clopen set times an open interval, with its validity certificate.

Functions:
    flow(y, s), hat_sigma(y, sft): the suspension flow and the flow-reversing involution.
    project_lift(y, sft), lifts(z): the quotient map Y -> Z and its fibers.
    chart_validate(sft, C, I, kind, extend) -> Certificate
    reflection_partition(sft, enclosing) -> list[Clopen]: letter cylinders split until reflections move pieces off.
    chart_decomposition(sft) -> list[Chart]: extendable Z-charts over that partition and the quarter intervals.
    check_sides(charts) -> Certificate: distinct chart closures meet in at most one side.
"""

import itertools
from dataclasses import dataclass, field

from dyadic_flows.common.ioc_container import Container, provide_rng
from dyadic_flows.common.measure_utils import trace_on
from dyadic_flows.common.model import Certificate, Report
from dyadic_flows.core_numeric import HALF, ZERO, Dyadic, DyInterval, DyadicLike, dy, random_dyadic
from dyadic_flows.subshifts.clopen import Clopen, cylinder, whole
from dyadic_flows.subshifts.points import EventuallyPeriodic, SymPoint
from dyadic_flows.subshifts.sft import Sft

KINDS = ("Y", "Z")
LIFT_RADIUS_CAP = 64


def _same_x(a: SymPoint, b: SymPoint) -> bool:
    if a is b:
        return True
    if isinstance(a, EventuallyPeriodic) and isinstance(b, EventuallyPeriodic):
        return a == b
    radius = 4 * Container.config.get("window", 8)
    return a.window(-radius, radius) == b.window(-radius, radius)


@dataclass(frozen=True, eq=False)
class PointY:
    """The class of (x, t) in Y, normalized on construction so that t lies in [0, 1).

    Equality is exact for eventually periodic coordinates and read on a finite window for lazy ones.
    """

    x: SymPoint
    t: Dyadic

    def __post_init__(self):
        t = dy(self.t)
        k = t.floor()
        object.__setattr__(self, "x", self.x.shift(k) if k else self.x)
        object.__setattr__(self, "t", t - k)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PointY):
            return NotImplemented
        return self.t == other.t and _same_x(self.x, other.x)

    def __hash__(self) -> int:
        # equal points agree on every window that equality reads
        return hash((self.t, tuple(self.x.window(-1, 1))))

    def __str__(self) -> str:
        return f"({self.x}, {self.t})"


def flow(y: PointY, s: DyadicLike) -> PointY:
    """The suspension flow Phi^s."""
    return PointY(y.x, y.t + dy(s))


def _reversal_of(sft):
    reversal = getattr(sft, "reversal", sft)
    if reversal is None:
        raise ValueError(f"{getattr(sft, 'name', sft)}: no involution data for the reversal")
    return reversal


def hat_sigma(y: PointY, sft) -> PointY:
    """The involution (x, t) -> (sigma(x), -t); for 0 < t < 1 the normal form is (shift^-1(sigma(x)), 1 - t).

    Args:
        y: A point of Y.
        sft: The ambient subshift, or its Reversal.

    Raises:
        ValueError: If the subshift carries no involution data.
    """
    return PointY(y.x.reverse(_reversal_of(sft)), -y.t)


def random_point_y(sft: Sft, rng=None, depth: int = 8) -> PointY:
    rng = rng or provide_rng()
    return PointY(sft.random_point(rng), random_dyadic(rng, 0, 1, depth=depth, open_ends=False))


@dataclass(frozen=True, eq=False)
class PointZ:
    """A point of Z given by its two lifts to Y.

    Attributes:
        lift: The distinguished lift.
        partner: Its image under hat_sigma.
        radius: Window radius at which the two x-coordinates first differ, or None when they agree up to the cap
            and the lifts were told apart by t (or coincide).
    """

    lift: PointY
    partner: PointY
    radius: int | None = None

    def __eq__(self, other) -> bool:
        if not isinstance(other, PointZ):
            return NotImplemented
        return (self.lift == other.lift and self.partner == other.partner) or (
            self.lift == other.partner and self.partner == other.lift
        )

    def __hash__(self) -> int:
        return hash(frozenset((self.lift.t, self.partner.t)))


def _radii():
    yield 0
    r = 1
    while r <= LIFT_RADIUS_CAP:
        yield r
        r *= 2


def project_lift(y: PointY, sft) -> PointZ:
    """The quotient map p: Y -> Z.

    The lift whose x-coordinate reads the lexicographically smaller window on [-r, r], for the first radius r in
    0, 1, 2, 4, ... where the windows differ, is distinguished; remaining ties go to the smaller t.
    """
    partner = hat_sigma(y, sft)
    for r in _radii():
        mine, theirs = y.x.window(-r, r), partner.x.window(-r, r)
        if mine != theirs:
            return PointZ(y, partner, r) if mine < theirs else PointZ(partner, y, r)
    if partner.t < y.t:
        return PointZ(partner, y)
    return PointZ(y, partner)


def lifts(z: PointZ) -> tuple[PointY, PointY]:
    return z.lift, z.partner


@trace_on("Flipping check", measure_time=True)
def check_flipping(sft: Sft, period: int = 6, samples: int = 100, rng=None) -> Certificate:
    """Checks that hat_sigma fixes no point over periodic points up to `period` and random aperiodic points.

    A fixed point needs t = 0 or t = 1/2, so those two times are tested per point.
    """
    rng = rng or provide_rng()
    points = [sft.cycle_point(w) for w in sft.periodic_words(period)]
    points += [sft.random_point(rng) for _ in range(samples)]
    for x in points:
        for t in (ZERO, HALF):
            y = PointY(x, t)
            if hat_sigma(y, sft) == y:
                return Certificate(name="suspension.no_fixed_points", passed=False, witness=str(y))
    return Certificate(name="suspension.no_fixed_points", passed=True, details={"points": len(points)})


@dataclass
class Chart:
    """The chart C x I of Y, or its image in Z.

    Attributes:
        clopen: The clopen factor C.
        interval: The open interval I.
        kind: "Y" or "Z".
        extendable: An interval J with closure(I) inside J for which the J-chart is valid, or None.
        certificate: The validity certificate from chart_validate.
    """

    clopen: Clopen
    interval: DyInterval
    kind: str = "Z"
    extendable: DyInterval | None = None
    certificate: Certificate | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"Chart kind must be one of {KINDS}, got {self.kind}")

    @property
    def valid(self) -> bool:
        return self.certificate is not None and self.certificate.passed

    def contains(self, y: PointY) -> bool:
        """True when y (or, for a Z-chart, hat_sigma(y)) has a representative in C x I."""
        candidates = [y]
        if self.kind == "Z":
            candidates.append(hat_sigma(y, self.clopen.sft))
        for point in candidates:
            for k in range((self.interval.lo - point.t).floor(), (self.interval.hi - point.t).ceil() + 1):
                if self.interval.contains(point.t + k) and self.clopen.contains(point.x.shift(-k)):
                    return True
        return False

    def label(self) -> str:
        return f"{self.clopen} x {self.interval}"

    def record(self) -> dict:
        row = {"clopen": str(self.clopen), "interval": str(self.interval), "kind": self.kind}
        if self.extendable is not None:
            row["extendable"] = str(self.extendable)
        if self.certificate is not None:
            row["valid"] = self.certificate.passed
            if self.certificate.witness:
                row["witness"] = self.certificate.witness
        return row


def translations(interval: DyInterval) -> list[int]:
    """Positive k with interval - k meeting interval; the negative ones give the same clopen conditions."""
    return [k for k in range(1, interval.length.ceil() + 1) if k < interval.length]


def reflections(interval: DyInterval) -> list[int]:
    """Integers n with -interval - n meeting interval, i.e. n in the open interval (-2 hi, -2 lo)."""
    lo, hi = -interval.hi.mul_pow2(1), -interval.lo.mul_pow2(1)
    return [n for n in range(lo.floor(), hi.ceil() + 1) if lo < n < hi]


def reflect(C: Clopen, n: int) -> Clopen:
    """The image of C under shift^n o sigma."""
    return C.image_reversal().image_shift(n)


def _validate(C: Clopen, I: DyInterval, kind: str) -> tuple[str, dict]:
    found_t = translations(I)
    for k in found_t:
        if not (C.image_shift(k) & C).is_empty():
            return f"translation {k}", {"translations": found_t}
    found_r = reflections(I) if kind == "Z" else []
    for n in found_r:
        if not (reflect(C, n) & C).is_empty():
            return f"reflection {n}", {"translations": found_t, "reflections": found_r}
    return "", {"translations": found_t, "reflections": found_r}


def chart_validate(sft: Sft, C: Clopen, I: DyInterval, kind: str = "Z", extend: DyInterval | None = None) -> Certificate:
    """Decides whether C x I is a chart, and optionally whether it extends to C x J.

    The candidates are the translations by k with |k| < |I| and, for Z-charts, the reflections
    (x, t) -> (shift^n(sigma(x)), -t - n) with n in -I - I. The chart is valid when each candidate maps C to a
    set disjoint from C.

    Returns:
        Certificate: passed, or failed with the first violating element as witness ("translation 1",
        "reflection 0"); an extension failure is reported as "extension: ..." .
    """
    if kind not in KINDS:
        raise ValueError(f"Chart kind must be one of {KINDS}, got {kind}")
    if C.sft is not sft:
        raise ValueError(f"Clopen set lives in {C.sft.name}, not in {sft.name}")
    if kind == "Z" and sft.reversal is None:
        raise ValueError(f"{sft.name}: Z-charts need involution data")
    witness, details = _validate(C, I, kind)
    if witness:
        return Certificate(name="chart.validate", passed=False, witness=witness, details=details)
    if extend is not None:
        details["extendable"] = str(extend)
        if not I.compactly_inside(extend):
            return Certificate(
                name="chart.validate", passed=False, witness=f"extension: {I} is not inside {extend}", details=details
            )
        witness, _ = _validate(C, extend, kind)
        if witness:
            return Certificate(name="chart.validate", passed=False, witness=f"extension: {witness}", details=details)
    return Certificate(name="chart.validate", passed=True, details=details)


def make_chart(sft: Sft, C: Clopen, I: DyInterval, kind: str = "Z", extend: DyInterval | None = None) -> Chart:
    certificate = chart_validate(sft, C, I, kind, extend)
    return Chart(C, I, kind, extend if certificate.passed else None, certificate)


def configured_intervals(key: str) -> list[DyInterval]:
    raw = Container.config[key]
    if isinstance(raw, dict):
        raw = [raw[name] for name in sorted(raw, key=int)]
    return [DyInterval.parse(pair) for pair in raw]


def widen(I: DyInterval, margin: DyadicLike) -> DyInterval:
    margin = dy(margin)
    return DyInterval(I.lo - margin, I.hi + margin)


def _symmetric_window(lo: int, hi: int, axis: int) -> tuple[int, int]:
    # smallest window containing [lo, hi] with new_lo + new_hi == axis
    top = max(hi, axis - lo)
    return axis - top, top


def split_by_reflection(C: Clopen, n: int) -> list[Clopen]:
    """Splits C into pieces that shift^n o sigma maps off themselves.

    With B = C & gamma(C) and A = C - B, B is gamma-invariant. On a window with lo + hi = center - n, gamma
    acts on window words as the reversal of words, so B splits into B1 (the lesser word of each pair) and
    B2 = gamma(B1). The pieces are A | B1 and B2.

    Raises:
        ValueError: When no window up to `chart_max_window` letters separates the pairs.
    """
    sft = C.sft
    reversal = _reversal_of(sft)
    gamma_c = reflect(C, n)
    B = C & gamma_c
    if B.is_empty():
        return [C]
    A = C - B
    axis = reversal.center - n
    lo, hi = _symmetric_window(B.lo, B.hi, axis) if B.has_window else _symmetric_window(0, 0, axis)
    limit = Container.config.get("chart_max_window", 16)
    while hi - lo + 1 <= limit:
        words = B.extend(lo, hi).words if B.has_window else sft.language(hi - lo + 1)
        if all(reversal.word(w) != w for w in words):
            lesser = [w for w in words if w < reversal.word(w)]
            B1 = Clopen(sft, lo, hi, frozenset(lesser))
            B2 = Clopen(sft, lo, hi, frozenset(reversal.word(w) for w in lesser))
            return [piece for piece in (A | B1, B2) if not piece.is_empty()]
        lo, hi = lo - 1, hi + 1
    raise ValueError(f"{sft.name}: no window of at most {limit} letters separates {C} from its reflection {n}")


def reflection_partition(sft: Sft, enclosing: list[DyInterval]) -> list[Clopen]:
    """Refines the letter cylinders until every reflection moving some interval of `enclosing` onto itself maps
    each piece off itself.

    Pieces that are already disjoint from their image stay so under refinement, so one pass per reflection
    suffices.
    """
    needed = sorted({n for J in enclosing for n in reflections(J)})
    pieces = [cylinder(sft, (a,)) for a in sft.alphabet.letters]
    pieces = [p for p in pieces if not p.is_empty()]
    for n in needed:
        refined = []
        for piece in pieces:
            refined.extend(split_by_reflection(piece, n))
        pieces = refined
    Container.logger().info(msg=f"{sft.name}: {len(pieces)} clopen pieces after refinement by reflections {needed}")
    return pieces


@trace_on("Chart decomposition", measure_time=True)
def chart_decomposition(sft: Sft, intervals: list[DyInterval] | None = None, margin: DyadicLike | None = None) -> list[Chart]:
    """Builds extendable Z-charts C_i x I_j covering Z over the reflection partition.

    Args:
        sft: A reversible subshift.
        intervals: The intervals I_j; defaults to the configured quarters of [0, 1].
        margin: How far J_j extends I_j on each side; defaults to the configured `chart_margin`.

    Raises:
        ValueError: If the subshift has no reversal or is empty.
    """
    _reversal_of(sft)
    if sft.is_empty:
        raise ValueError(f"{sft.name}: cannot decompose the suspension of an empty subshift")
    intervals = intervals or configured_intervals("chart_intervals")
    margin = dy(margin if margin is not None else Container.config.get("chart_margin", "1/8"))
    enclosing = [widen(I, margin) for I in intervals]
    pieces = reflection_partition(sft, enclosing)
    return [make_chart(sft, C, I, "Z", J) for C in pieces for I, J in zip(intervals, enclosing)]


def _images(p: Chart):
    """Yields (gamma, power, image clopen, closed image interval) for the dihedral elements acting on p's closure."""
    a, b = p.interval.lo, p.interval.hi
    span = b - a
    for k in range(-span.ceil() - 1, span.ceil() + 2):
        yield f"translation {k}", k, p.clopen.image_shift(k), (a - k, b - k)
    if p.kind == "Z":
        for n in range((-b - b).floor() - 2, (-a - a).ceil() + 3):
            yield f"reflection {n}", n, reflect(p.clopen, n), (-b - n, -a - n)


def _contacts(p: Chart, q: Chart):
    """Yields (gamma, u, v, same) for every element moving p's closure onto q's closure along [u, v]."""
    c, d = q.interval.lo, q.interval.hi
    for gamma, power, image, (lo, hi) in _images(p):
        if p is q and gamma == "translation 0":
            continue
        u, v = max(lo, c), min(hi, d)
        if u > v or (image & q.clopen).is_empty():
            continue
        yield gamma, u, v, (lo, hi) == (c, d) and image == q.clopen


def check_sides(charts: list[Chart]) -> Certificate:
    """Checks that distinct chart closures meet only in a single side.

    Two charts whose images in Z coincide (a Z-chart and its hat_sigma image) count as one. Otherwise the
    closures may touch only at points, and all contact points of an ordered pair must share one time
    coordinate, i.e. lie on one side of the second chart. A contact of positive length means the interiors
    overlap.
    """
    touching = duplicates = 0
    for (i, p), (j, q) in itertools.product(enumerate(charts), repeat=2):
        contacts = list(_contacts(p, q))
        if any(same for *_, same in contacts):
            duplicates += i != j
            continue
        sides = set()
        for gamma, u, v, _ in contacts:
            if u < v:
                return Certificate(
                    name="charts.sides",
                    passed=False,
                    witness=f"chart {i} meets chart {j} on [{u}, {v}] via {gamma}",
                )
            sides.add(u)
        if len(sides) > 1:
            return Certificate(
                name="charts.sides",
                passed=False,
                witness=f"chart {i} meets chart {j} at times {sorted(str(s) for s in sides)}",
            )
        touching += bool(sides)
    return Certificate(
        name="charts.sides",
        passed=True,
        details={"charts": len(charts), "touching_pairs": touching, "coinciding_pairs": duplicates},
    )


def check_partition(sft: Sft, charts: list[Chart]) -> Certificate:
    """The clopen factors partition X and the interval closures cover [0, 1]."""
    pieces = []
    for chart in charts:
        if not any(chart.clopen == p for p in pieces):
            pieces.append(chart.clopen)
    for p, q in itertools.combinations(pieces, 2):
        overlap = p & q
        if not overlap.is_empty():
            return Certificate(name="charts.partition", passed=False, witness=overlap.witness())
    union = pieces[0]
    for p in pieces[1:]:
        union = union | p
    missing = whole(sft) - union
    if not missing.is_empty():
        return Certificate(name="charts.partition", passed=False, witness=f"uncovered {missing.witness()}")
    spans = sorted({(c.interval.lo, c.interval.hi) for c in charts})
    cursor = ZERO
    for lo, hi in spans:
        if lo > cursor:
            return Certificate(name="charts.partition", passed=False, witness=f"time {cursor} uncovered")
        cursor = max(cursor, hi)
    if cursor < 1:
        return Certificate(name="charts.partition", passed=False, witness=f"time {cursor} uncovered")
    return Certificate(name="charts.partition", passed=True, details={"pieces": len(pieces)})


def charts_report(sft: Sft, charts: list[Chart]) -> Report:
    report = Report(subject=sft.name)
    report.add(check_partition(sft, charts))
    report.add(
        Certificate.combine("charts.valid_extendable", [c.certificate for c in charts if c.certificate is not None])
    )
    report.add(check_sides(charts))
    report.facts["charts"] = len(charts)
    return report
