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
"""This module provides tests for analysis.py"""

import pytest

from dyadic_flows.analysis import FLEXIBLE, bruteforce_layers, cb_rank, dynamics_report, minimality, rigidity_report
from dyadic_flows.common import common
from dyadic_flows.common.ioc_container import Container
from dyadic_flows.subshifts import build_prescribed_rigidity
from dyadic_flows.subshifts.checks import scheme_of


def _load(name: str):
    return Container.subshift_provider()(common.load_yaml(common.resource_path(name)))


@pytest.fixture(scope="module")
def prescribed():
    return build_prescribed_rigidity(1)


@pytest.mark.parametrize(
    "name, rank", [("fixed_point", 1), ("salo_rank1", 3), ("salo_rank2", 4), ("salo_rank3", 5)]
)
def test_cb_rank(name, rank):
    report = cb_rank(_load(name))
    assert report.facts["rank"] == rank
    assert len(report.facts["layers"]) == rank
    assert report.passed, report.render_text()


def test_cb_rank_last_layer_is_the_background():
    report = cb_rank(_load("salo_rank2"))
    assert report.facts["layers"][-1] == ["*"]


def test_cb_rank_rejects_perfect_kernels():
    with pytest.raises(ValueError, match="perfect kernel"):
        cb_rank(_load("xred4"))
    with pytest.raises(TypeError):
        cb_rank(42)


def test_bruteforce_layers_agree_with_scheme():
    scheme = scheme_of(_load("salo_rank1"))
    assert bruteforce_layers(scheme) == scheme.derivatives()


def test_rigidity_report_for_prescribed_family(prescribed):
    report = rigidity_report(prescribed)
    assert report.facts["isolated_orbits"] == ["sigma(x0)", "x0"]
    assert report.facts["rigid_classes"] == 2
    assert report.facts["non_isolated"] == ["M"]
    names = [c.name for c in report.certificates]
    assert "rigidity.first_derivative" in names
    assert "prescribed.x0_in_M0_not_M1" in names
    assert report.passed, report.render_text()


def test_rigidity_report_for_a_salo_family():
    report = rigidity_report(_load("salo_rank1"))
    assert report.facts["rigid_classes"] == 1
    assert "*" in report.facts["non_isolated"]


def test_minimality(prescribed):
    assert minimality(_load("fixed_point")) == "minimal"
    assert minimality(_load("salo_rank1")) == "unique minimal subset = *"
    assert minimality(_load("xred4")) == "several minimal subsets"
    assert minimality(_load("two_fixed_points")) == "several minimal subsets"
    assert minimality(prescribed) == "unique minimal subset = M"


def test_dynamics_report_for_reduced_words():
    report = dynamics_report(_load("xred4"))
    assert report.facts["minimality"] == "several minimal subsets"
    assert report.facts["flexibility"] == "not determined"
    assert report.facts["rep_space_connected"] is True
    assert report.facts["dense_classes"] == "exist"
    assert len(report.facts["transitive_point"]) == 32


def test_dynamics_report_for_the_doubling():
    report = dynamics_report(_load("doubling_full2"))
    assert report.facts["piece_count"] == 2
    assert report.facts["rep_space_connected"] is False
    assert report.facts["dense_classes"] == "none certified"


def test_dynamics_report_for_families(prescribed):
    salo = dynamics_report(_load("salo_rank1"))
    assert salo.facts["flexibility"] == FLEXIBLE
    assert salo.facts["invariant_clopen_pieces"] == "not computed"
    fixed = dynamics_report(_load("fixed_point"))
    assert fixed.facts["dense_classes"] == "every class"
    assert dynamics_report(prescribed).facts["minimality"] == "unique minimal subset = M"
