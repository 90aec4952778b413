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
"""This module provides tests for flow_group/atlas.py"""

import functools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dyadic_flows.common import common
from dyadic_flows.common.ioc_container import Container, provide_rng
from dyadic_flows.core_numeric import DyInterval, dy
from dyadic_flows.flow_group.atlas import (
    Atlas,
    AtlasPiece,
    ChartElement,
    chart_region,
    cocycle_eval,
    elem_compose,
    elem_equal,
    elem_eval,
    elem_invert,
    elem_validate,
    identity_atlas,
    random_points,
    refine,
    support_region,
)
from dyadic_flows.flow_group.generators import standard_generators
from dyadic_flows.pl_maps import PlMap
from dyadic_flows.subshifts import cylinder, whole
from dyadic_flows.suspension import PointY, hat_sigma, make_chart
from dyadic_flows.type_d import TypeDMap


def _load(name: str):
    return Container.subshift_provider()(common.load_yaml(common.resource_path(name)))


@pytest.fixture(scope="module")
def xred4():
    return _load("xred4")


def _pl(*nodes) -> TypeDMap:
    return TypeDMap.from_pl(PlMap(tuple((dy(x), dy(y)) for x, y in nodes)))


def _push() -> TypeDMap:
    return _pl(("1/4", "1/4"), ("3/8", "1/2"), ("1/2", "5/8"), ("3/4", "3/4"))


def _element(sft, kind: str = "Y", letter: str = "a") -> Atlas:
    chart = make_chart(sft, cylinder(sft, (letter,)), DyInterval("1/4", "3/4"), kind)
    return ChartElement.single(chart, _push(), name=f"push_{letter}").atlas


def _by_name(report) -> dict:
    return {c.name: c for c in report.certificates}


def test_refine_partitions_items(xred4):
    a, ab = cylinder(xred4, ("a",)), cylinder(xred4, ("a", "b"))
    atoms = refine(None, [(a, "a"), (ab, "ab")])
    labels = sorted(labels for _, labels in atoms)
    assert labels == [("a",), ("a", "ab")]
    atoms = refine(whole(xred4), [(a, "a")])
    assert sorted(labels for _, labels in atoms) == [(), ("a",)]
    with pytest.raises(ValueError):
        refine(None, [(cylinder(xred4, (x,)), x) for x in "aAbB"], limit=2)


def test_chart_element_evaluation(xred4):
    g = _element(xred4)
    on_a = PointY(xred4.cycle_point("a"), "3/8")
    assert elem_eval(g, on_a) == PointY(xred4.cycle_point("a"), "1/2")
    assert cocycle_eval(g, on_a) == dy("1/8")
    on_b = PointY(xred4.cycle_point("b"), "3/8")
    assert elem_eval(g, on_b) == on_b
    assert cocycle_eval(g, on_b) == 0
    assert not g.equivariant


def test_chart_elements_validate(xred4):
    y_report = elem_validate(_element(xred4), samples=16)
    assert y_report.passed, y_report.render_text()
    z_report = elem_validate(_element(xred4, "Z"), samples=16)
    assert z_report.passed, z_report.render_text()
    assert "atlas.antisymmetry.structural" in _by_name(z_report)


def test_equivariant_element_commutes_with_hat_sigma(xred4):
    g = _element(xred4, "Z")
    for y in random_points(xred4, [g], 12, provide_rng(3)):
        assert elem_eval(g, hat_sigma(y, xred4)) == hat_sigma(elem_eval(g, y), xred4)


def test_compose_and_invert(xred4):
    g, h = _element(xred4, "Z", "a"), _element(xred4, "Z", "b")
    assert elem_compose(g, elem_invert(g)).is_identity()
    assert elem_equal(elem_compose(elem_invert(g), g), identity_atlas(xred4))
    assert elem_equal(elem_compose(g, identity_atlas(xred4)), g)
    gh = elem_compose(g, h)
    assert gh.name == "push_a*push_b"
    assert gh.equivariant
    for y in random_points(xred4, [g, h], 12, provide_rng(5)):
        assert elem_eval(gh, y) == elem_eval(g, elem_eval(h, y))
    assert not elem_equal(g, h)


def test_compose_rejects_other_subshifts(xred4):
    other = _load("xred4")
    with pytest.raises(ValueError):
        elem_compose(_element(xred4), _element(other))


def test_chart_element_rules(xred4):
    chart = make_chart(xred4, cylinder(xred4, ("a",)), DyInterval("1/4", "3/4"), "Y")
    with pytest.raises(ValueError):
        ChartElement(chart, ((cylinder(xred4, ("b",)), _push()),))
    with pytest.raises(ValueError):
        ChartElement.single(chart, _pl((0, 0), ("1/2", "1/4"), ("3/4", "1/2"), (1, 1)))
    with pytest.raises(ValueError):
        ChartElement.single(chart, _pl(("1/4", "1/4"), ("1/2", "3/8"), ("3/4", "5/8")))

    element = ChartElement.single(chart, _push(), "g")
    assert element.compose(element.inverse()).cells == ()
    other = make_chart(xred4, cylinder(xred4, ("b",)), DyInterval("1/4", "3/4"), "Y")
    with pytest.raises(ValueError):
        element.compose(ChartElement.single(other, _push()))


def test_atlas_record_keeps_the_chart_form(xred4):
    g = _element(xred4, "Z")
    record = g.record()
    assert "chart" in record
    assert elem_equal(Atlas.from_record(xred4, record), g)


def test_overlapping_pieces_fail_validation(xred4):
    a = cylinder(xred4, ("a",))
    identity = TypeDMap.identity(DyInterval.closed(0, "1/2"))
    piece = AtlasPiece(a, DyInterval.half_open(0, "1/2"), identity)
    report = elem_validate(Atlas(xred4, (piece, piece)), samples=4)
    partition = _by_name(report)["atlas.partition"]
    assert not partition.passed
    assert partition.witness.startswith("(x: a@0")


def test_discontinuous_piece_fails_validation(xred4):
    piece = AtlasPiece(cylinder(xred4, ("a",)), DyInterval.half_open(0, "1/2"), _pl((0, 0), ("1/2", "1/4")))
    report = elem_validate(Atlas(xred4, (piece,)), samples=4)
    continuity = _by_name(report)["atlas.continuity"]
    assert not continuity.passed
    assert continuity.witness.startswith("(x: a@0")


def test_piece_interval_must_stay_in_unit():
    with pytest.raises(ValueError):
        AtlasPiece(None, DyInterval("-1/2", "1/2"), TypeDMap.identity(DyInterval.closed("-1/2", "1/2")))


def test_support_region(xred4):
    g = _element(xred4)
    chart = make_chart(xred4, cylinder(xred4, ("a",)), DyInterval("1/4", "3/4"), "Y")
    assert support_region(g).is_subset(chart_region(chart, closed=True))
    elsewhere = make_chart(xred4, cylinder(xred4, ("b",)), DyInterval(0, "1/2"), "Y")
    assert support_region(g).uncovered(chart_region(elsewhere, closed=True)).startswith("(x: a")
    assert support_region(identity_atlas(xred4)).is_empty()


def test_random_points_count(xred4):
    points = random_points(xred4, [_element(xred4)], 9, provide_rng(11))
    assert len(points) == 9
    assert all(0 <= p.t < 1 for p in points)


@pytest.fixture(scope="module")
def generators(xred4):
    return standard_generators(xred4)


def test_every_standard_generator_inverts(generators, xred4):
    assert len(generators) == 216
    for g in generators:
        inverse = elem_invert(g)
        assert g.moves, g.name
        assert elem_compose(g, inverse).is_identity(), g.name
        assert elem_equal(elem_compose(inverse, g), identity_atlas(xred4)), g.name


@pytest.mark.parametrize(
    "name",
    ["C0,I-1,S.A.right", "C0,I-1,S.C.right", "C0,I-1,L.A", "C0,I0,F.A", "C0,I0,L.t", "C1,I1,R.B"],
)
def test_generators_invert_without_their_chart_form(generators, xred4, name):
    g = next(g for g in generators if g.name == name)
    plain = Atlas(xred4, g.pieces, g.equivariant, g.name)
    inverse = elem_invert(plain)
    assert inverse.chart_form is None
    assert elem_equal(inverse, elem_invert(g))
    assert elem_compose(plain, inverse).is_identity()
    assert elem_compose(inverse, plain).is_identity()


letters = st.tuples(st.integers(0, 215), st.sampled_from((1, -1)))
words = st.lists(letters, min_size=1, max_size=4)


def _product(generators, word) -> Atlas:
    factors = [generators[i] if e == 1 else elem_invert(generators[i]) for i, e in word]
    return functools.reduce(elem_compose, factors)


@settings(max_examples=8, deadline=None)
@given(st.tuples(letters, letters, letters))
def test_composition_is_associative(generators, triple):
    g, h, k = (_product(generators, [letter]) for letter in triple)
    assert elem_equal(elem_compose(elem_compose(g, h), k), elem_compose(g, elem_compose(h, k)))


@settings(max_examples=8, deadline=None)
@given(words)
def test_words_have_inverses_and_a_unit(generators, xred4, word):
    g = _product(generators, word)
    identity = identity_atlas(xred4)
    assert elem_equal(elem_compose(g, identity), g)
    assert elem_equal(elem_compose(identity, g), g)
    assert elem_compose(g, elem_invert(g)).is_identity()
    assert elem_compose(elem_invert(g), g).is_identity()


@settings(max_examples=8, deadline=None)
@given(words, words, st.integers(0, 2**16))
def test_cocycle_identities_on_words(generators, xred4, first, second, seed):
    g, h = _product(generators, first), _product(generators, second)
    gh = elem_compose(g, h)
    for y in random_points(xred4, [g, h], 6, provide_rng(seed)):
        assert cocycle_eval(gh, y) == cocycle_eval(g, elem_eval(h, y)) + cocycle_eval(h, y)
        assert cocycle_eval(g, hat_sigma(y, xred4)) == -cocycle_eval(g, y)
        assert elem_eval(gh, y) == elem_eval(g, elem_eval(h, y))
