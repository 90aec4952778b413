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
"""This module provides tests for line_actions.py"""

import pytest

from dyadic_flows.common import common
from dyadic_flows.common.ioc_container import Container
from dyadic_flows.core_numeric import DyInterval, dy
from dyadic_flows.flow_group import ChartElement
from dyadic_flows.line_actions import LineAction, action_report, compare_actions, orbit_dump, rho_eval, translation_ops
from dyadic_flows.pl_maps import PlMap
from dyadic_flows.subshifts import cylinder
from dyadic_flows.suspension import PointY, flow, hat_sigma, make_chart
from dyadic_flows.type_d import TypeDMap


def _load(name: str):
    return Container.subshift_provider()(common.load_yaml(common.resource_path(name)))


@pytest.fixture(scope="module")
def xred4():
    return _load("xred4")


def _push() -> TypeDMap:
    nodes = [("1/4", "1/4"), ("3/8", "1/2"), ("1/2", "5/8"), ("3/4", "3/4")]
    return TypeDMap.from_pl(PlMap(tuple((dy(x), dy(y)) for x, y in nodes)))


def _generator(sft, letter: str):
    chart = make_chart(sft, cylinder(sft, (letter,)), DyInterval("1/4", "3/4"), "Z")
    return ChartElement.single(chart, _push(), f"push_{letter}").atlas


@pytest.fixture(scope="module")
def on_a(xred4) -> LineAction:
    generators = (_generator(xred4, "a"), _generator(xred4, "b"))
    return LineAction(PointY(xred4.cycle_point("a"), 0), xred4, generators)


def test_rho_eval(on_a):
    g = on_a.generators[0]
    assert rho_eval(on_a, g, "3/8") == dy("1/2")
    assert rho_eval(on_a, g, "11/8") == dy("3/2")
    assert rho_eval(on_a, g, "-5/8") == dy("-1/2")
    assert rho_eval(on_a, on_a.generators[1], "3/8") == dy("3/8")


def test_translation_ops(on_a):
    moved = translation_ops(on_a, "flow", s="1/4")
    assert moved.base == flow(on_a.base, "1/4")
    acted = translation_ops(on_a, "act", g=on_a.generators[0])
    assert acted.base == on_a.base
    mirrored = translation_ops(on_a, "reflect")
    assert mirrored.base == hat_sigma(on_a.base, on_a.sft)
    assert mirrored.generators == on_a.generators


@pytest.mark.parametrize("mode, kwargs", [("flow", {}), ("act", {}), ("twist", {"s": 1})])
def test_translation_ops_errors(on_a, mode, kwargs):
    with pytest.raises(ValueError):
        translation_ops(on_a, mode, **kwargs)


def test_compare_actions(xred4, on_a):
    on_b = LineAction(PointY(xred4.cycle_point("b"), 0), xred4, on_a.generators)
    distinguished = compare_actions(on_a, on_b)
    assert distinguished.passed
    assert distinguished.witness.startswith("push_a at t=")
    assert distinguished.details["verdict"] == "distinguished"

    same = compare_actions(on_a, translation_ops(on_a, "flow", s=1))
    assert not same.passed
    assert same.details["verdict"] == "indistinguishable at this resolution"


def test_action_report(on_a):
    report = action_report(on_a, samples=16)
    assert report.passed, report.render_text()
    names = [c.name for c in report.certificates]
    assert "actions.reversibility" in names
    assert "actions.periodic_lift" in names
    assert report.facts["period"] == 1
    assert report.facts["generators"] == 2


def test_action_report_without_generators(xred4):
    report = action_report(LineAction(PointY(xred4.cycle_point("b"), 0), xred4), samples=4)
    assert report.certificates == []
    assert report.facts == {"generators": 0}


def test_orbit_dump(on_a):
    frame = orbit_dump(on_a, ["3/8", 0])
    assert list(frame.columns) == ["generator", "t", "image"]
    assert len(frame) == 4
    assert frame.iloc[0].to_dict() == {"generator": 0, "t": "3/2^3", "image": "1/2^1"}
