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
"""This module provides tests for the shared container, verdict and sampling helpers"""

import os

import pytest

from dyadic_flows.common import common
from dyadic_flows.common.ioc_container import Container, provide_rng
from dyadic_flows.common.model import Certificate, Report, transform_to_dictionary
from dyadic_flows.common.sampling import sample_many, verify_samples


def test_resource_path_resolves_shipped_names():
    path = common.resource_path("xred4")
    assert os.path.isfile(path)
    assert common.resource_path("xred4.cfg") == path
    assert common.resource_path(path) == path


def test_resource_path_unknown_name():
    with pytest.raises(ValueError):
        common.resource_path("no_such_subshift")


def test_yaml_round_trip(tmp_path):
    target = tmp_path / "doc.yaml"
    common.dump_yaml(str(target), {"b": 1, "a": ["1/2", "3/4"]})
    assert common.load_yaml(str(target)) == {"b": 1, "a": ["1/2", "3/4"]}
    assert target.read_text(encoding="utf-8").startswith("b: 1")


def test_provide_rng_is_seeded():
    assert provide_rng(5).random() == provide_rng(5).random()
    assert provide_rng().random() == provide_rng(Container.config["seed"]).random()


def test_certificate_records_drop_defaults():
    report = Report(subject="s")
    report.add(Certificate(name="ok"))
    report.add(Certificate(name="bad", passed=False, witness="w"))
    report.facts["count"] = 2
    rows = report.records()
    assert rows[0] == {"subject": "s", "name": "ok"}
    assert rows[1] == {"subject": "s", "name": "bad", "passed": False, "witness": "w"}
    assert rows[2] == {"subject": "s", "facts": {"count": 2}}
    assert not report.passed
    assert transform_to_dictionary(Certificate(name="x")) == {"name": "x"}


def test_render_text():
    report = Report(subject="xred4")
    report.add(Certificate(name="reversibility.sigma_fixed", passed=False, witness="(a)^oo"))
    report.facts["rank"] = 3
    assert report.render_text().splitlines() == [
        "subject: xred4",
        "  reversibility.sigma_fixed: fail witness=(a)^oo",
        "  rank: 3",
    ]


def test_certificate_combine_keeps_first_failure():
    parts = [Certificate(name="a"), Certificate(name="b", passed=False, witness="wb"), Certificate(name="c", passed=False)]
    combined = Certificate.combine("all", parts)
    assert not combined
    assert combined.witness == "wb"
    assert combined.details["failed"] == "b"
    assert Certificate.combine("all", parts[:1]).details == {"checks": ["a"]}


def test_verify_samples_reports_first_failure_in_input_order():
    certificate = verify_samples("even", lambda n: n % 2 == 0, [2, 4, 7, 8, 9], render=lambda n: f"n={n}")
    assert not certificate.passed
    assert certificate.witness == "n=7"
    assert certificate.details == {"samples": 5, "failures": 2}


def test_verify_samples_counts_raising_checks_as_failures():
    certificate = verify_samples("inverse", lambda n: 1 / n > 0, [1, 0, 2])
    assert certificate.witness == "0"
    assert certificate.details["error"].startswith("ZeroDivisionError")


def test_verify_samples_passes():
    certificate = verify_samples("positive", lambda n: n > 0, sample_many(provide_rng(3), lambda r: r.randint(1, 9), 10))
    assert certificate.passed
    assert certificate.details == {"samples": 10}
