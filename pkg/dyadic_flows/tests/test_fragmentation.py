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
"""This module provides tests for flow_group/fragmentation.py"""

import functools

import pytest

from dyadic_flows.common import common
from dyadic_flows.common.ioc_container import Container, provide_rng
from dyadic_flows.core_numeric import DyInterval, dy
from dyadic_flows.flow_group import (
    Atlas,
    ChartElement,
    chart_region,
    default_cover,
    elem_compose,
    elem_equal,
    fragment_element,
    identity_atlas,
    interpolation_chain,
    support_region,
)
from dyadic_flows.flow_group.atlas import cocycle_bound
from dyadic_flows.flow_group.fragmentation import fragment_map
from dyadic_flows.flow_group.generators import generator_elements
from dyadic_flows.pl_maps import PlMap
from dyadic_flows.subshifts import cylinder, whole
from dyadic_flows.suspension import chart_decomposition, make_chart
from dyadic_flows.type_d import TypeDMap, d_compose, d_equal


def _load(name: str):
    return Container.subshift_provider()(common.load_yaml(common.resource_path(name)))


@pytest.fixture(scope="module")
def xred4():
    return _load("xred4")


def _pl(*nodes) -> TypeDMap:
    return TypeDMap.from_pl(PlMap(tuple((dy(x), dy(y)) for x, y in nodes)))


def _bump() -> TypeDMap:
    return _pl((0, 0), ("1/8", "1/8"), ("1/4", "3/8"), ("1/2", "1/2"), ("3/4", "3/4"))


def _host_element(sft) -> Atlas:
    host = make_chart(sft, cylinder(sft, ("a",)), DyInterval(0, "3/4"), "Y")
    return ChartElement.single(host, _bump(), "f").atlas


def _two_charts(sft):
    return [
        make_chart(sft, whole(sft), DyInterval("-1/8", "3/8"), "Y"),
        make_chart(sft, whole(sft), DyInterval("1/4", "7/8"), "Y"),
    ]


def test_interpolation_chain_multiplies_back():
    f = _pl((0, 0), ("1/4", "1/2"), ("1/2", "3/4"), (1, 1))
    eps = dy("1/4")
    steps = interpolation_chain(f, eps)
    assert len(steps) == 16
    product = TypeDMap.identity(f.domain)
    for step in steps:
        product = d_compose(product, step)
    assert d_equal(product, f)
    assert all(cocycle_bound(step) < eps.half() for step in steps)


def test_fragment_map_single_piece():
    f = _bump()
    factors = fragment_map(f, [(DyInterval(0, 1), 3)])
    assert [j for _, j in factors] == [3]
    assert fragment_map(TypeDMap.identity(f.domain), [(DyInterval(0, 1), 0)]) == []
    with pytest.raises(ValueError):
        fragment_map(f, [(DyInterval("1/4", 1), 0)])


def test_fragment_map_splits_across_overlap():
    f = _bump()
    factors = fragment_map(f, [(DyInterval("-1/8", "3/8"), 0), (DyInterval("1/4", "7/8"), 1)])
    assert {j for _, j in factors} == {0, 1}
    product = TypeDMap.identity(factors[0][0].domain)
    for m, _ in factors:
        product = d_compose(product, m)
    assert product(dy("1/4")) == dy("3/8")
    assert product(dy("1/8")) == dy("1/8")


def test_fragment_element_stays_whole_inside_one_chart(xred4):
    g = _host_element(xred4)
    cover = [make_chart(xred4, whole(xred4), DyInterval("-1/8", "7/8"), "Y")]
    assert fragment_element(g, cover) == [g]


def test_fragment_element_factors(xred4):
    g = _host_element(xred4)
    cover = _two_charts(xred4)
    factors = fragment_element(g, cover)
    assert len(factors) >= 2
    product = identity_atlas(xred4)
    for factor in factors:
        product = elem_compose(product, factor)
        region = support_region(factor)
        assert any(region.is_subset(chart_region(chart)) for chart in cover)
    assert elem_equal(product, g)
    assert factors[0].name.startswith("f#0.")


def test_fragment_element_errors(xred4):
    with pytest.raises(ValueError, match="no chart form"):
        fragment_element(Atlas(xred4), _two_charts(xred4))
    g = _host_element(xred4)
    with pytest.raises(ValueError, match="x: a@0"):
        fragment_element(g, _two_charts(xred4)[1:])
    z_host = make_chart(xred4, cylinder(xred4, ("a",)), DyInterval("1/4", "3/4"), "Z")
    z_element = ChartElement.single(z_host, _pl(("1/4", "1/4"), ("3/8", "1/2"), ("1/2", "5/8"), ("3/4", "3/4")))
    with pytest.raises(ValueError, match="Z-charts"):
        fragment_element(z_element.atlas, _two_charts(xred4))


def test_default_cover(xred4):
    cover = default_cover(xred4)
    assert len(cover) == len(chart_decomposition(xred4))
    assert all(chart.kind == "Z" and chart.valid for chart in cover)
    assert cover[0].interval == DyInterval("-1/8", "3/8")


def test_generated_elements_fragment_over_the_default_cover(xred4):
    cover = default_cover(xred4)
    by_chart: dict[str, list[ChartElement]] = {}
    for element in generator_elements(xred4):
        by_chart.setdefault(element.name.rsplit(",", 1)[0], []).append(element)
    charts = sorted(by_chart)
    rng = provide_rng(7)
    checked = 0
    for n in range(20):
        group = by_chart[charts[n % len(charts)]]
        g = rng.choice(group).compose(rng.choice(group)).atlas
        if g.is_identity():
            continue
        factors = fragment_element(g, cover)
        for factor in factors:
            region = support_region(factor)
            assert any(region.is_subset(chart_region(chart)) for chart in cover), factor.name
        assert elem_equal(functools.reduce(elem_compose, factors), g), g.name
        checked += 1
    assert checked >= 15
