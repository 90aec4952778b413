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
"""This module provides tests for flow_group/rewriting.py"""

import pytest

from dyadic_flows.common import common
from dyadic_flows.common.ioc_container import Container
from dyadic_flows.core_numeric import DyInterval, dy
from dyadic_flows.flow_group import ChartElement, Word, completeness, elem_equal, intersection_rewrite
from dyadic_flows.flow_group.rewriting import lattice_free, rehost, squeeze
from dyadic_flows.pl_maps import PlMap
from dyadic_flows.subshifts import cylinder
from dyadic_flows.suspension import make_chart
from dyadic_flows.type_d import TypeDMap


def _load(name: str):
    return Container.subshift_provider()(common.load_yaml(common.resource_path(name)))


@pytest.fixture(scope="module")
def xred4():
    return _load("xred4")


def _pl(*nodes) -> TypeDMap:
    return TypeDMap.from_pl(PlMap(tuple((dy(x), dy(y)) for x, y in nodes)))


I = DyInterval(0, "3/4")
J = DyInterval("1/4", 1)


def _bump() -> TypeDMap:
    return _pl((0, 0), ("1/8", "1/8"), ("1/4", "3/8"), ("1/2", "1/2"), ("3/4", "3/4"))


def _letters(sft):
    push = _pl(("1/4", "1/4"), ("3/8", "1/2"), ("1/2", "5/8"), ("3/4", "3/4"))
    x = ChartElement.single(make_chart(sft, cylinder(sft, ("a",)), DyInterval("1/4", "3/4"), "Y"), push, "x")
    y = ChartElement.single(make_chart(sft, cylinder(sft, ("b",)), DyInterval("1/4", "3/4"), "Y"), push, "y")
    return x, y


def test_word_algebra(xred4):
    x, y = _letters(xred4)
    word = Word.of(x, y)
    assert len(word) == 2
    assert word.inverse().render() == "y^-1 x^-1"
    product = word * word.inverse()
    assert len(product) == 4
    assert len(product.letters) == 2
    assert product.atlas(xred4).is_identity()
    doubled = word.substitute(lambda e: Word.of(e, e) if e is x else None)
    assert doubled.render() == "x x y"


def test_word_atlas(xred4):
    x, y = _letters(xred4)
    assert elem_equal(Word.of(x, x.inverse(), y).atlas(), y.atlas)
    assert Word().atlas(xred4).is_identity()
    with pytest.raises(ValueError):
        Word().atlas()


def test_word_record(xred4):
    x, y = _letters(xred4)
    word = Word.of(x, y).inverse()
    again = Word.from_record(xred4, word.record())
    assert again.steps == word.steps
    assert elem_equal(again.atlas(xred4), word.atlas(xred4))


def test_lattice_free_avoids_half_integers():
    assert lattice_free(DyInterval("1/4", "3/4")) == (dy("5/16"), dy("7/16"))
    lo, hi = lattice_free(DyInterval("-1/8", "1/8"))
    assert (lo, hi) == (dy("-3/32"), dy("-1/32"))


def test_squeeze_and_rehost():
    unit = DyInterval(0, 1)
    c = squeeze(unit, (dy("1/4"), dy("1/2")), (dy("1/2"), dy("5/8")))
    assert c(dy("1/4")) == dy("1/2")
    assert c(dy("1/2")) == dy("5/8")
    assert c(0) == 0 and c(1) == 1
    f = _bump()
    wide = rehost(f, DyInterval(-1, 1))
    assert wide.domain == DyInterval.closed(-1, 1)
    assert wide(dy("1/4")) == dy("3/8")
    assert wide(dy("-1/2")) == dy("-1/2")
    with pytest.raises(ValueError):
        rehost(f, DyInterval("1/4", 1))


def test_rewrite_on_the_intersection(xred4):
    C, D = cylinder(xred4, ("a",)), cylinder(xred4, ("a", "b"))
    home = make_chart(xred4, C, I, "Y")
    target = ChartElement(home, ((C & D, _bump()),), "f")
    word = intersection_rewrite(C, D, I, J, target)
    assert len(word) == 6
    assert elem_equal(word.atlas(xred4), target.atlas)


def test_rewrite_off_the_intersection(xred4):
    C, D = cylinder(xred4, ("a",)), cylinder(xred4, ("a", "b"))
    home = make_chart(xred4, C, I, "Y")
    target = ChartElement(home, ((C - D, _bump()),), "f")
    word = intersection_rewrite(C, D, I, J, target)
    assert elem_equal(word.atlas(xred4), target.atlas)


def test_rewrite_inside_the_other_chart(xred4):
    C, D = cylinder(xred4, ("a", "b")), cylinder(xred4, ("a",))
    target = ChartElement.single(make_chart(xred4, C, I, "Y"), _bump(), "f")
    word = intersection_rewrite(C, D, I, J, target)
    assert word.render() == "f"


def test_rewrite_errors(xred4):
    C = cylinder(xred4, ("a",))
    target = ChartElement.single(make_chart(xred4, C, I, "Y"), _bump(), "f")
    with pytest.raises(ValueError):
        intersection_rewrite(C, cylinder(xred4, ("b",)), I, J, target)
    with pytest.raises(ValueError):
        intersection_rewrite(C, cylinder(xred4, ("a", "b")), I, DyInterval(1, 2), target)
    with pytest.raises(ValueError):
        intersection_rewrite(C, cylinder(xred4, ("a", "b")), I, J, target)


def test_completeness_replay(xred4):
    report = completeness(xred4, depth=0, max_sequences=1)
    assert report.facts["depth"] == 0
    assert len(report.certificates) == 6
    assert report.passed, report.render_text()
    assert all(c.details["direct"] and c.details["length"] <= 5 for c in report.certificates)


def test_completeness_replay_at_depth_two(xred4):
    report = completeness(xred4, depth=2, max_sequences=1, omegas=(0,))
    shapes = {(c.details["m"], c.details["m"] + len(c.details["indices"]) - 1) for c in report.certificates}
    assert shapes == {(m, n) for m in range(-2, 1) for n in range(3)}
    assert len(report.certificates) == 18
    assert report.passed, report.render_text()
    deepest = [c for c in report.certificates if len(c.details["indices"]) == 5]
    assert all(c.details["steps"] > 0 for c in deepest)
