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
"""This module provides tests for the subshifts package"""

import pytest

from dyadic_flows.common import common
from dyadic_flows.common.ioc_container import Container, provide_rng
from dyadic_flows.subshifts import (
    Clopen,
    EventuallyPeriodic,
    InvAlphabet,
    Reversal,
    SaloFamily,
    Sft,
    build_doubling,
    build_prescribed_rigidity,
    build_reduced,
    check_irreducible_and_clopen_invariants,
    check_reversibility,
    check_topological_freeness,
    clopen_ops,
    cylinder,
    disjoint_union,
    full_shift,
    orbits,
    reversal,
    sft_scheme,
    shift_apply,
    transitive_point,
    whole,
)
from dyadic_flows.subshifts.checks import bruteforce_flipped_points, flipped_point, scheme_of
from dyadic_flows.subshifts.salo import coded_point, parse_pattern
from dyadic_flows.subshifts.substitution import Substitution

FREE = InvAlphabet.from_pairs(["a", "A", "b", "B"], [("a", "A"), ("b", "B")])


def _load(name: str):
    return Container.subshift_provider()(common.load_yaml(common.resource_path(name)))


@pytest.fixture(scope="module")
def xred4() -> Sft:
    return _load("xred4")


def _a_then_b() -> Sft:
    return Sft(InvAlphabet.from_pairs(["a", "b"]), [("b", "a")], name="a_then_b")


def test_alphabet_validation():
    assert FREE.inverse("a") == "A"
    assert FREE.formal_inverse(("a", "b")) == ("B", "A")
    assert FREE.fixed_point_free
    with pytest.raises(ValueError):
        InvAlphabet.from_pairs(["a", "a"])
    with pytest.raises(ValueError):
        InvAlphabet.from_pairs(["a", "b"], [("a", "c")])


def test_sft_rejects_unknown_letters():
    with pytest.raises(ValueError):
        Sft(FREE, [("a", "z")])
    with pytest.raises(ValueError):
        Sft(FREE, [()])


def test_reduced_words_language(xred4):
    assert xred4.memory == 1
    assert len(xred4.language(2)) == 12
    assert len(xred4.language(3)) == 36
    assert not xred4.is_allowed(("a", "b", "B"))
    assert xred4.is_allowed(("a", "b", "a"))
    with pytest.raises(ValueError):
        build_reduced(InvAlphabet.from_pairs(["a", "A"], [("a", "A")]))


def test_from_edges_matches_forbidden_words():
    edges = Sft.from_edges(InvAlphabet.from_pairs(["a", "b"]), [("a", "a"), ("a", "b"), ("b", "b")])
    assert edges.language(4) == _a_then_b().language(4)


def test_eventually_periodic_points():
    x = EventuallyPeriodic(("a",), ("b", "a"), ("b",), 2)
    assert x.window(0, 5) == ("a", "a", "b", "a", "b", "b")
    assert shift_apply(x, 2).letter(0) == "b"
    assert x.shift(1).shift(-1) == x
    assert EventuallyPeriodic(("a", "b"), (), ("a", "b"), 0).least_period() == 2
    assert x.least_period() is None
    assert str(x) == "(a)^oo [ba]@2 (b)^oo"
    with pytest.raises(ValueError):
        EventuallyPeriodic((), (), ("a",), 0)


def test_reversal_is_involution_and_flips_the_shift(xred4):
    rng = provide_rng(11)
    for _ in range(20):
        x = xred4.random_point(rng)
        assert xred4.contains(x)
        assert reversal(reversal(x, xred4), xred4) == x
        assert reversal(x.shift(1), xred4).shift(1) == reversal(x, xred4)


def test_point_through_reads_the_word(xred4):
    x = xred4.point_through(("a", "b", "A"), offset=3)
    assert x.window(3, 5) == ("a", "b", "A")
    assert xred4.contains(x)
    with pytest.raises(ValueError):
        xred4.point_through(("a", "A"))


def test_reduced_words_are_reversible(xred4):
    report = check_reversibility(xred4)
    assert report.passed, report.render_text()
    assert flipped_point(xred4, 0) is None
    assert flipped_point(xred4, 1) is None


def test_fixed_sigma_is_reported_with_a_witness():
    sft = _load("fullshift_with_fixed_sigma")
    report = check_reversibility(sft)
    assert not report.passed
    failing = {c.name: c for c in report.certificates if not c.passed}
    assert "reversibility.no_fixed_points" in failing
    witness = flipped_point(sft, 0)
    assert failing["reversibility.no_fixed_points"].witness == str(witness)
    assert witness.reverse(sft.reversal) == witness


def test_formal_inverse_on_the_four_letter_full_shift_has_a_fixed_point():
    sft = _load("fullshift4_formal_inverse")
    assert sft.reversal.center == -1
    report = check_reversibility(sft)
    assert not report.passed
    failing = {c.name: c for c in report.certificates if not c.passed}
    assert failing["reversibility.no_fixed_points"].witness == "(a)^oo [aaAA]@-2 (A)^oo"
    assert "reversibility.language_invariant" not in failing


@pytest.mark.parametrize("center", [-1, 0])
def test_reversibility_reports_instead_of_raising_off_the_language(center):
    sft = Sft(InvAlphabet.from_pairs(["a", "b", "c"]), [("a", "a"), ("a", "b")], Reversal((), center), name="skewed")
    report = check_reversibility(sft, samples=8)
    assert not report.passed
    failing = {c.name for c in report.certificates if not c.passed}
    assert "reversibility.language_invariant" in failing
    for power in (0, 1):
        point = flipped_point(sft, power)
        assert point is None or sft.contains(point)


def test_flipped_points_agree_with_bruteforce():
    sft = full_shift(["a", "b"], center=0)
    found = bruteforce_flipped_points(sft, size=1, reach=1)
    assert found
    assert flipped_point(sft, 0) is not None
    assert not bruteforce_flipped_points(_load("xred4"), size=1, reach=1)


def test_reversibility_needs_involution_data():
    with pytest.raises(ValueError):
        check_reversibility(_a_then_b())


def test_language_invariance_failure():
    sft = Sft(InvAlphabet.from_pairs(["a", "b"]), [("b", "a")], Reversal((), 0), name="one_way")
    report = check_reversibility(sft)
    certificate = next(c for c in report.certificates if c.name == "reversibility.language_invariant")
    assert not certificate.passed
    assert certificate.witness == "ab"


def test_doubling_is_reversible_and_splits_in_two():
    doubled = build_doubling(full_shift(["a", "b"]))
    assert check_reversibility(doubled).passed
    invariants = check_irreducible_and_clopen_invariants(doubled)
    assert not invariants.passed
    assert invariants.facts["piece_count"] == 2
    assert _load("doubling_full2").alphabet.letters == ("a+", "b+", "a-", "b-")


def test_topological_freeness():
    assert check_topological_freeness(full_shift(["a", "b"])).passed
    certificate = check_topological_freeness(_load("two_fixed_points"))
    assert not certificate.passed
    assert certificate.witness == "a"
    assert certificate.details == {"periodic_orbit": "a", "period": 1}


def test_irreducibility_and_pieces(xred4):
    report = check_irreducible_and_clopen_invariants(xred4)
    assert report.passed
    assert report.facts["piece_count"] == 1
    union = disjoint_union([_load("fixed_point"), _load("fixed_point")])
    assert check_irreducible_and_clopen_invariants(union).facts["piece_count"] == 2


def test_transitive_point_visits_every_word(xred4):
    point = transitive_point(xred4)
    text = point.window(0, 400)
    assert xred4.is_allowed(point.window(-20, 400))
    for word in xred4.language(3):
        assert any(text[i : i + 3] == word for i in range(len(text) - 2))
    with pytest.raises(ValueError):
        transitive_point(_load("two_fixed_points"))


def test_clopen_algebra(xred4):
    a = cylinder(xred4, "a")
    big_a = cylinder(xred4, "A")
    assert (a | ~a).is_whole()
    assert (a & ~a).is_empty()
    assert (a & big_a).is_empty()
    assert cylinder(xred4, "aA").is_empty()
    assert a.is_subset(a | big_a)
    assert whole(xred4).is_whole()
    assert clopen_ops(a, big_a, "union") == a | big_a
    assert clopen_ops(a, op="is_empty") is False
    with pytest.raises(ValueError):
        clopen_ops(a, op="union")
    with pytest.raises(ValueError):
        clopen_ops(a, op="xor")


def test_clopen_images(xred4):
    ab = cylinder(xred4, "ab")
    shifted = ab.image_shift(2)
    assert (shifted.lo, shifted.hi) == (-2, -1)
    mirrored = ab.image_reversal()
    assert mirrored == cylinder(xred4, "BA", offset=-2)
    x = xred4.point_through(("a", "b"), offset=0)
    assert ab.contains(x)
    assert mirrored.contains(reversal(x, xred4))
    assert shifted.contains(x.shift(2))


def test_clopen_record_round_trip(xred4):
    c = cylinder(xred4, "ab") | cylinder(xred4, "ba")
    assert Clopen.from_record(xred4, c.record()) == c


def test_periodic_orbits(xred4):
    found = orbits(xred4, mode="periodic", period=2)
    names = [o.name for o in found]
    assert names == ["A", "B", "a", "b", "AB", "Ab", "Ba", "ab"]
    assert all(o.status == "periodic" for o in found)
    with pytest.raises(TypeError):
        orbits(scheme_of(xred4), mode="periodic")
    with pytest.raises(ValueError):
        orbits(xred4, mode="wandering")


def test_sft_scheme_of_a_heteroclinic_orbit():
    scheme = sft_scheme(_a_then_b())
    assert sorted(scheme.classes) == ["C0", "C0>C1", "C1"]
    layers, kernel = scheme.derivatives()
    assert layers == [["C0>C1"], ["C0", "C1"]] and kernel == []
    certificate = scheme.certify("C0>C1")
    assert certificate.passed
    assert certificate.witness == "[-1, 1]:abb"
    assert not scheme.certify("C0").passed


def test_reduced_words_scheme_is_perfect(xred4):
    scheme = sft_scheme(xred4)
    assert [c.kind for c in scheme.classes.values()] == ["perfect"]
    assert scheme.derivatives() == ([], ["C0"])


def test_scheme_of_rejects_plain_objects():
    with pytest.raises(TypeError):
        scheme_of(object())


def test_salo_descriptor_must_be_closed():
    with pytest.raises(ValueError, match="not closed"):
        SaloFamily.from_config(["b", "c"], [[["b", "n"], ["c", "oo"]]])
    with pytest.raises(ValueError):
        parse_pattern([["b", 2]])
    with pytest.raises(ValueError):
        SaloFamily.from_config(["b", "*"], [[["b", "oo"]]])


def test_salo_coded_points():
    family = _load("salo_rank2")
    assert family.descriptor_rank == 2
    pattern = parse_pattern([["b", "n"], ["c", "oo"]])
    x = coded_point(pattern, (2,))
    assert x.window(0, 8) == ("*", "b", "b", "*", "c", "*", "*", "*", "c")
    assert family.in_code_window(x)


def test_salo_representatives_keep_finite_blocks_nonempty():
    scheme = _load("salo_rank3").scheme
    name = "x[b^n c^m b^oo]"
    assert scheme.classes[name].representative_params == (1, 1)
    assert scheme.representative(name).window(0, 4) == ("*", "b", "c", "*", "b")
    certificate = scheme.certify(name, max_radius=8)
    assert certificate.passed, certificate.details


def test_substitution_language_is_reversal_invariant():
    substitution = Substitution.default()
    assert substitution.apply(("a",), 2) == tuple("ababAbaba")
    assert substitution.is_reversal_invariant(Reversal.formal_inverse(FREE), 6) is None
    point = substitution.fixed_point("a", "b")
    assert point.window(-3, -1) == ("a", "b", "a")
    assert point.window(0, 2) == ("b", "A", "b")
    with pytest.raises(ValueError):
        Substitution.from_mapping({"a": "ab", "b": "b"})


@pytest.mark.parametrize("n", [1, 2, 3])
def test_prescribed_rigidity_has_2n_isolated_orbits(n):
    family = build_prescribed_rigidity(n)
    assert all(c.passed for c in family.certificates())
    found = orbits(family)
    assert sorted(o.name for o in found) == sorted([f"x{j}" for j in range(n)] + [f"sigma(x{j})" for j in range(n)])
    assert all(o.status == "isolated" for o in found)


def test_prescribed_rigidity_range():
    with pytest.raises(ValueError):
        build_prescribed_rigidity(0)
