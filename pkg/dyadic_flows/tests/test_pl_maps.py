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
"""This module provides tests for pl_maps.py"""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dyadic_flows.core_numeric import Dyadic, DyInterval, dy
from dyadic_flows.pl_maps import (
    PlMap,
    conjugate_on,
    germ_conjugator,
    pl_bridge,
    pl_compose,
    pl_equal,
    pl_invert,
    pl_mirror,
    pl_shift,
    pl_through,
    thompson_generators,
)

UNIT = DyInterval.closed(0, 1)
A, B = thompson_generators("F")
points = st.builds(Dyadic, st.integers(0, 2**10), st.just(10))


def _word(indices):
    letters = [A, B, pl_invert(A), pl_invert(B)]
    result = PlMap.identity(UNIT)
    for i in indices:
        result = pl_compose(result, letters[i])
    return result


def test_generator_values():
    assert A(dy("1/2")) == dy("1/4")
    assert B(dy("7/8")) == dy("3/4")
    assert A.slope_at("1/4") == -1
    assert A.slope_at("3/4", side="left") == 0
    assert A.slope_at("3/4") == 1


def test_constructor_rejects_bad_slopes():
    with pytest.raises(ValueError):
        PlMap(((dy(0), dy(0)), (dy(1), dy(3))))
    with pytest.raises(ValueError):
        PlMap(((dy(0), dy(1)), (dy(1), dy(0))))
    with pytest.raises(ValueError):
        PlMap(((dy(0), dy(0)), (dy(1), dy(2))), periodic=True)


def test_compose_with_inverse_is_identity():
    assert pl_equal(pl_compose(A, pl_invert(A)), PlMap.identity(UNIT))
    assert pl_compose(B, pl_invert(B)).is_identity()


def test_compose_interval_mismatch():
    with pytest.raises(ValueError):
        pl_compose(A, pl_shift(B, 1))


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(0, 3), max_size=4), st.lists(st.integers(0, 3), max_size=4), points)
def test_composition_evaluates_pointwise(u, v, x):
    f, g = _word(u), _word(v)
    assert pl_compose(f, g)(x) == f(g(x))
    assert pl_invert(f)(f(x)) == x


def test_bridge_has_power_of_two_slopes():
    bridge = pl_bridge(0, 3, 0, 1)
    assert bridge(0) == 0 and bridge(3) == 1
    assert bridge.nodes == ((dy(0), dy(0)), (dy(2), dy("1/2")), (dy(3), dy(1)))
    assert pl_bridge(0, 1, 5, 9).slopes == (2,)
    with pytest.raises(ValueError):
        pl_bridge(1, 1, 0, 1)


def test_through_passes_through_points():
    f = pl_through([(0, 0), (3, 1), (4, 5)])
    assert [f(x) for x in (0, 3, 4)] == [0, 1, 5]


def test_restrict_and_normalize():
    f = A.restrict("1/2", 1)
    assert f.domain == DyInterval.closed("1/2", 1)
    assert f(dy("3/4")) == dy("1/2")
    collinear = PlMap(((dy(0), dy(0)), (dy("1/2"), dy("1/2")), (dy(1), dy(1))))
    assert collinear.normalize().nodes == ((dy(0), dy(0)), (dy(1), dy(1)))


def test_shift_and_mirror_conjugate():
    shifted = pl_shift(A, 2)
    mirrored = pl_mirror(A)
    for x in (dy("1/8"), dy("5/8"), dy("15/16")):
        assert shifted(x + 2) == A(x) + 2
        assert mirrored(-x) == -A(x)
    with pytest.raises(ValueError):
        pl_mirror(PlMap.translation(1))


def test_line_generators_commute_with_unit_translation():
    lifts = thompson_generators("Ttilde")
    assert len(lifts) == 4
    samples = [dy("-3/8"), dy("1/4"), dy("5/2")]
    for f in lifts:
        assert f.commutes_with_unit_translation(samples)
    c = lifts[2]
    assert c(dy(1)) == dy("7/4")
    assert c(dy(-1)) == dy("-1/4")
    with pytest.raises(ValueError):
        thompson_generators("G")


def test_line_maps_compose_and_invert():
    total = pl_compose(PlMap.translation("1/2"), PlMap.translation("1/4"))
    assert pl_equal(total, PlMap.translation("3/4"))
    c = thompson_generators("Ttilde")[2]
    assert pl_compose(c, pl_invert(c)).is_identity()
    with pytest.raises(ValueError):
        pl_compose(A, PlMap.translation(1))


def test_transported_generators():
    a, _ = thompson_generators("F", DyInterval(2, 4))
    assert a.domain == DyInterval.closed(2, 4)
    assert a(3) == dy("5/2")


@given(st.integers(1, 2**12), st.integers(1, 12), st.sampled_from(["left", "right"]))
def test_germ_conjugator_turns_doubling_into_translation(n, e, side):
    x0 = dy("1/2")
    d = Dyadic(n, e + 12)
    x = x0 - d if side == "left" else x0 + d
    chart = germ_conjugator(x0, side)
    doubled = 2 * (x - x0) + x0
    assert chart(doubled) == chart(x) + (-1 if side == "left" else 1)
    assert chart.inverse(chart(x)) == x


def test_germ_conjugator_rejects_wrong_side():
    with pytest.raises(ValueError):
        germ_conjugator(0, "right")(dy("-1/4"))
    with pytest.raises(ValueError):
        germ_conjugator(0, "up")


def test_conjugate_translation_to_doubling():
    chart = germ_conjugator(0, "left")
    conjugated = conjugate_on(chart, PlMap.translation(-1), "-1/2", "-1/4")
    assert conjugated == PlMap.affine("-1/2", "-1/4", -1, 1)
