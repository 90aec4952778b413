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
"""This module provides tests for the suspension and its chart decomposition"""

import pytest

from dyadic_flows.common import common
from dyadic_flows.common.ioc_container import Container, provide_rng
from dyadic_flows.core_numeric import DyInterval, dy
from dyadic_flows.subshifts import EventuallyPeriodic, InvAlphabet, Sft, cylinder, whole
from dyadic_flows.suspension import (
    Chart,
    PointY,
    chart_decomposition,
    chart_validate,
    charts_report,
    check_flipping,
    check_partition,
    check_sides,
    flow,
    hat_sigma,
    lifts,
    project_lift,
    random_point_y,
    reflect,
    reflection_partition,
    reflections,
    split_by_reflection,
    translations,
)


def _load(name: str) -> Sft:
    return Container.subshift_provider()(common.load_yaml(common.resource_path(name)))


@pytest.fixture(scope="module")
def xred4() -> Sft:
    return _load("xred4")


@pytest.fixture(scope="module")
def fixed_sigma() -> Sft:
    return _load("fullshift_with_fixed_sigma")


def _ray() -> EventuallyPeriodic:
    return EventuallyPeriodic(("a",), (), ("b",), 0)


def test_point_normal_form():
    y = PointY(_ray(), "5/4")
    assert y.t == dy("1/4")
    assert y.x == _ray().shift(1)
    assert y == PointY(_ray().shift(1), "1/4")
    assert PointY(_ray(), "-1/4") == PointY(_ray().shift(-1), "3/4")


def test_point_hash_separates_coordinates_at_the_same_time():
    y = PointY(_ray(), "1/4")
    assert hash(y) == hash(PointY(_ray().shift(-1), "5/4"))
    assert hash(y) != hash(PointY(_ray().shift(2), "1/4"))
    assert len({PointY(_ray().shift(k), "1/4") for k in range(-2, 3)}) == 5


def test_flow_is_additive():
    y = PointY(_ray(), "1/8")
    assert flow(flow(y, "3/4"), "5/8") == flow(y, "11/8")
    assert flow(y, 0) == y
    assert flow(flow(y, 3), -3) == y


def test_hat_sigma_is_an_involution_reversing_the_flow(xred4):
    rng = provide_rng(7)
    for _ in range(20):
        y = random_point_y(xred4, rng)
        assert hat_sigma(hat_sigma(y, xred4), xred4) == y
        assert hat_sigma(flow(y, "3/8"), xred4) == flow(hat_sigma(y, xred4), "-3/8")


def test_hat_sigma_needs_a_reversal():
    plain = Sft(InvAlphabet.from_pairs(["a", "b"]), name="plain")
    with pytest.raises(ValueError):
        hat_sigma(PointY(plain.cycle_point("a"), 0), plain)


def test_project_lift_picks_the_same_lift(xred4):
    y = PointY(_ray(), "1/4")
    z = project_lift(y, xred4)
    assert set(map(str, lifts(z))) == {str(y), str(hat_sigma(y, xred4))}
    other = project_lift(hat_sigma(y, xred4), xred4)
    assert other == z
    assert other.lift == z.lift


def test_flipping(xred4, fixed_sigma):
    assert check_flipping(xred4, period=4, samples=10).passed
    certificate = check_flipping(fixed_sigma, period=2, samples=0)
    assert not certificate.passed
    assert certificate.witness


def test_translation_and_reflection_candidates():
    assert translations(DyInterval(0, 1)) == []
    assert translations(DyInterval(0, "3/2")) == [1]
    assert translations(DyInterval(0, "5/2")) == [1, 2]
    assert reflections(DyInterval(0, 1)) == [-1]
    assert reflections(DyInterval("1/4", "1/2")) == []
    assert reflections(DyInterval("-1/8", "3/8")) == [0]


def test_chart_validate(xred4, fixed_sigma):
    a = cylinder(xred4, ("a",))
    assert chart_validate(xred4, a, DyInterval(0, 1), "Y").passed
    assert chart_validate(xred4, a, DyInterval(0, 1), "Z").passed
    long = chart_validate(xred4, a, DyInterval(0, 2), "Y")
    assert not long.passed
    assert long.witness == "translation 1"

    fixed = chart_validate(fixed_sigma, cylinder(fixed_sigma, ("a",)), DyInterval(0, 1), "Z")
    assert not fixed.passed
    assert fixed.witness == "reflection -1"


def test_chart_validate_extension(xred4):
    a = cylinder(xred4, ("a",))
    assert chart_validate(xred4, a, DyInterval("1/4", "3/4"), "Z", extend=DyInterval(0, 1)).passed
    touching = chart_validate(xred4, a, DyInterval("1/4", "3/4"), "Z", extend=DyInterval("1/4", 1))
    assert not touching.passed
    assert touching.witness.startswith("extension:")
    too_long = chart_validate(xred4, a, DyInterval("1/4", "3/4"), "Y", extend=DyInterval(-1, 2))
    assert too_long.witness == "extension: translation 1"


def test_chart_validate_errors(xred4, fixed_sigma):
    with pytest.raises(ValueError):
        chart_validate(xred4, cylinder(xred4, ("a",)), DyInterval(0, 1), "W")
    with pytest.raises(ValueError):
        chart_validate(xred4, cylinder(fixed_sigma, ("a",)), DyInterval(0, 1))
    plain = Sft(InvAlphabet.from_pairs(["a", "b"]), name="plain")
    with pytest.raises(ValueError):
        chart_validate(plain, cylinder(plain, ("a",)), DyInterval(0, 1), "Z")
    with pytest.raises(ValueError):
        Chart(cylinder(xred4, ("a",)), DyInterval(0, 1), kind="W")


def test_chart_contains(xred4):
    y_chart = Chart(cylinder(xred4, ("a",)), DyInterval(0, 1), kind="Y")
    z_chart = Chart(cylinder(xred4, ("a",)), DyInterval(0, 1), kind="Z")
    on_a = PointY(xred4.cycle_point("a"), "1/2")
    on_inverse = PointY(xred4.cycle_point("A"), "1/2")
    assert y_chart.contains(on_a)
    assert not y_chart.contains(on_inverse)
    assert z_chart.contains(on_inverse)
    assert not z_chart.contains(PointY(xred4.cycle_point("b"), "1/2"))


def test_split_by_reflection(xred4):
    a = cylinder(xred4, ("a",))
    for n in (-2, -1, 0, 1):
        pieces = split_by_reflection(a, n)
        union = pieces[0]
        for piece in pieces[1:]:
            union = union | piece
        assert union == a
        for piece in pieces:
            assert (reflect(piece, n) & piece).is_empty()


def test_reflection_partition(xred4):
    enclosing = [DyInterval("-1/8", "3/8"), DyInterval("1/8", "5/8")]
    pieces = reflection_partition(xred4, enclosing)
    union = pieces[0]
    for piece in pieces[1:]:
        union = union | piece
    assert union == whole(xred4)
    for i, p in enumerate(pieces):
        for q in pieces[i + 1 :]:
            assert (p & q).is_empty()
        for n in (-1, 0):
            assert (reflect(p, n) & p).is_empty()


def test_chart_decomposition(xred4):
    charts = chart_decomposition(xred4)
    assert len(charts) == 16
    assert all(chart.valid and chart.extendable is not None for chart in charts)
    assert check_partition(xred4, charts).passed
    assert charts[0].record()["kind"] == "Z"
    report = charts_report(xred4, charts)
    assert report.passed, report.render_text()
    assert report.facts["charts"] == 16


def test_chart_decomposition_errors(fixed_sigma):
    plain = Sft(InvAlphabet.from_pairs(["a", "b"]), name="plain")
    with pytest.raises(ValueError):
        chart_decomposition(plain)
    with pytest.raises(ValueError):
        chart_decomposition(Sft(InvAlphabet.from_pairs(["a"]), [("a",)], fixed_sigma.reversal, name="empty"))


def test_check_sides(xred4):
    a_half = Chart(cylinder(xred4, ("a",)), DyInterval(0, "1/2"), kind="Y")
    b_half = Chart(cylinder(xred4, ("b",)), DyInterval(0, "1/2"), kind="Y")
    assert check_sides([a_half, b_half]).passed

    overlapping = Chart(whole(xred4), DyInterval("1/4", "3/4"), kind="Y")
    certificate = check_sides([a_half, overlapping])
    assert not certificate.passed
    assert certificate.witness.startswith("chart 0 meets chart 1 on")

    upper = Chart(cylinder(xred4, ("a",)), DyInterval("1/2", 1), kind="Y")
    two_sides = check_sides([a_half, upper])
    assert not two_sides.passed
    assert "at times" in two_sides.witness


def test_check_partition_reports_gaps(xred4):
    a = Chart(cylinder(xred4, ("a",)), DyInterval(0, 1), kind="Y")
    certificate = check_partition(xred4, [a])
    assert not certificate.passed
    assert certificate.witness.startswith("uncovered")
