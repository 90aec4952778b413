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
The standard finite generating set of the reversible flow group.

Three intervals I_-1, I_0, I_1 of length below 1 contain -1, 0 and 1 and together cover a neighbourhood of
[-1, 1]. The letter cylinders are refined until every C_i x I_w is a Z-chart extending to I_w widened by
`generator_margin`; each such chart then contributes the finite generating list of its type-D group, lifted to
hat_sigma-equivariant atlases.

Usage:
    elements = generator_elements(sft)           # ChartElements, named "C<i>,I<w>,<label>"
    atlases = standard_generators(sft)           # their lifts
"""

from dataclasses import dataclass

from dyadic_flows.common.ioc_container import Container
from dyadic_flows.common.measure_utils import trace_on
from dyadic_flows.common.model import Certificate
from dyadic_flows.core_numeric import DyInterval, dy
from dyadic_flows.flow_group.atlas import Atlas, ChartElement
from dyadic_flows.subshifts.sft import Sft
from dyadic_flows.suspension import Chart, configured_intervals, make_chart, reflection_partition, widen
from dyadic_flows.type_d import scriptF_generators

OMEGAS = (-1, 0, 1)
LABELS = (
    ("F.A", "F.B")
    + tuple(f"S.{p}.{side}" for p in "ABCt" for side in ("left", "right"))
    + tuple(f"L.{p}" for p in "ABCt")
    + tuple(f"R.{p}" for p in "ABCt")
)


@dataclass(frozen=True)
class GeneratingChart:
    index: int
    omega: int
    chart: Chart


def generator_intervals() -> dict[int, DyInterval]:
    return dict(zip(OMEGAS, configured_intervals("generator_intervals")))


def check_generator_intervals(intervals: dict[int, DyInterval] | None = None) -> Certificate:
    """Checks |I_w| < 1, w in I_w, and that the union of the intervals covers a neighbourhood of [-1, 1]."""
    intervals = intervals or generator_intervals()
    for w, I in sorted(intervals.items()):
        if not I.length < 1:
            return Certificate(name="generators.intervals", passed=False, witness=f"|I_{w}| = {I.length}")
        if not I.contains(w):
            return Certificate(name="generators.intervals", passed=False, witness=f"{w} is not in I_{w} = {I}")
    ordered = sorted(intervals.values(), key=lambda I: I.lo)
    for left, right in zip(ordered, ordered[1:]):
        if not right.lo < left.hi:
            return Certificate(name="generators.intervals", passed=False, witness=f"gap between {left} and {right}")
    lo, hi = ordered[0].lo, max(I.hi for I in ordered)
    if not (lo < -1 and 1 < hi):
        return Certificate(name="generators.intervals", passed=False, witness=f"({lo}, {hi}) does not cover [-1, 1]")
    return Certificate(name="generators.intervals", details={"cover": f"({lo}, {hi})"})


def generating_charts(sft: Sft, intervals: dict[int, DyInterval] | None = None) -> list[GeneratingChart]:
    """The admissible charts C_i x I_w over the generating partition, ordered by piece then by w.

    Raises:
        ValueError: When a chart is not admissible (the subshift fails the standing assumptions).
    """
    intervals = intervals or generator_intervals()
    margin = dy(Container.config.get("generator_margin", "1/32"))
    enclosing = {w: widen(I, margin) for w, I in intervals.items()}
    pieces = reflection_partition(sft, list(enclosing.values()))
    charts = []
    for i, C in enumerate(pieces):
        for w in sorted(intervals):
            chart = make_chart(sft, C, intervals[w], "Z", enclosing[w])
            if not chart.valid:
                raise ValueError(f"{sft.name}: chart {chart.label()} is not admissible: {chart.certificate.witness}")
            charts.append(GeneratingChart(i, w, chart))
    return charts


def generator_elements(sft: Sft, intervals: dict[int, DyInterval] | None = None) -> list[ChartElement]:
    elements = []
    for entry in generating_charts(sft, intervals):
        maps = scriptF_generators(entry.chart.interval, entry.omega)
        for label, f in zip(LABELS, maps):
            elements.append(ChartElement.single(entry.chart, f, f"C{entry.index},I{entry.omega},{label}"))
    return elements


@trace_on("Standard generators", measure_time=True)
def standard_generators(sft: Sft, intervals: dict[int, DyInterval] | None = None) -> list[Atlas]:
    """Lifts of the generators of every F_{C_i, I_w} to hat_sigma-equivariant atlases.

    Raises:
        ValueError: When the subshift has no reversal or a generating chart is not admissible.
    """
    atlases = [element.atlas for element in generator_elements(sft, intervals)]
    Container.logger().info(msg=f"{sft.name}: {len(atlases)} standard generators")
    return atlases
