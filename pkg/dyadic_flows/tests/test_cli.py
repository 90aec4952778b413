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
"""This module provides tests for the command line interface"""

import inspect
import json

import pytest
from click.testing import CliRunner

from dyadic_flows import cli as cli_module
from dyadic_flows.cli import cli, parse_point, parse_word
from dyadic_flows.common import common
from dyadic_flows.common.ioc_container import Container
from dyadic_flows.core_numeric import DyInterval, dy
from dyadic_flows.flow_group import ChartElement
from dyadic_flows.pl_maps import PlMap
from dyadic_flows.subshifts import cylinder, whole
from dyadic_flows.suspension import make_chart
from dyadic_flows.type_d import TypeDMap

POINT = "(a)^oo [b]@0 (A)^oo, 1/4"


@pytest.fixture
def runner() -> CliRunner:
    return CliRunner()


@pytest.fixture(autouse=True)
def keep_config():
    saved = dict(Container.config)
    yield
    Container.config.clear()
    Container.config.update(saved)


def test_check_passes_on_reduced_words(runner):
    result = runner.invoke(cli, ["check", "xred4"])
    assert result.exit_code == 0, result.output
    assert "reversibility.involution: pass" in result.output


def test_check_fails_with_a_witness(runner):
    result = runner.invoke(cli, ["check", "fullshift_with_fixed_sigma"])
    assert result.exit_code == 1
    assert "fail witness=" in result.output


def test_input_errors_exit_two(runner, tmp_path):
    assert runner.invoke(cli, ["check", "no_such_subshift"]).exit_code == 2
    assert runner.invoke(cli, ["check", "salo_rank1"]).exit_code == 2
    broken = tmp_path / "broken.yaml"
    broken.write_text("alphabet: [a, b]\nforbidden: [az]\n", encoding="utf-8")
    assert runner.invoke(cli, ["check", str(broken)]).exit_code == 2


def test_records_format(runner):
    result = runner.invoke(cli, ["--format", "records", "check", "xred4"])
    assert result.exit_code == 0
    rows = [json.loads(line) for line in result.output.splitlines() if line.strip()]
    assert rows
    assert all(row["subject"] for row in rows)
    assert "facts" in rows[-1]


def test_seed_option_updates_config(runner):
    result = runner.invoke(cli, ["--seed", "7", "--samples", "5", "check", "xred4"])
    assert result.exit_code == 0
    assert Container.config["seed"] == 7
    assert Container.config["samples"] == 5


def test_cbrank(runner):
    result = runner.invoke(cli, ["cbrank", "salo_rank1"])
    assert result.exit_code == 0, result.output
    assert "rank: 3" in result.output


def test_cbrank_on_perfect_kernel_fails(runner):
    result = runner.invoke(cli, ["cbrank", "xred4"])
    assert result.exit_code == 1
    assert "cbrank.error: fail" in result.output


def test_report_notes_the_perfect_kernel(runner):
    result = runner.invoke(cli, ["report", "xred4"])
    assert result.exit_code == 0, result.output
    assert "perfect kernel" in result.output


def test_charts_dump(runner, tmp_path):
    out = tmp_path / "charts.yaml"
    result = runner.invoke(cli, ["--out", str(out), "charts", "xred4"])
    assert result.exit_code == 0, result.output
    assert len(common.load_yaml(str(out))["charts"]) == 16


def test_gens_and_eval(runner, tmp_path):
    atlas_file = tmp_path / "gens.yaml"
    result = runner.invoke(cli, ["--out", str(atlas_file), "gens", "xred4"])
    assert result.exit_code == 0, result.output
    assert "generators.intervals: pass" in result.output
    assert common.load_yaml(str(atlas_file))["elements"]

    dump = tmp_path / "orbit.csv"
    result = runner.invoke(cli, ["--out", str(dump), "eval", "xred4", "0,-0", POINT, "--atlas", str(atlas_file)])
    assert result.exit_code == 0, result.output
    assert "cocycle: 0" in result.output
    assert dump.read_text(encoding="utf-8").startswith("generator,t,image")


def test_eval_rejects_bad_literals(runner):
    assert runner.invoke(cli, ["eval", "xred4", "0", "not a point"]).exit_code == 2


def _pl(*nodes) -> TypeDMap:
    return TypeDMap.from_pl(PlMap(tuple((dy(x), dy(y)) for x, y in nodes)))


def test_fragment(runner, tmp_path):
    sft = Container.subshift_provider()(common.load_yaml(common.resource_path("xred4")))
    host = make_chart(sft, cylinder(sft, ("a",)), DyInterval(0, "3/4"), "Y")
    bump = _pl((0, 0), ("1/8", "1/8"), ("1/4", "3/8"), ("1/2", "1/2"), ("3/4", "3/4"))
    atlas_file = tmp_path / "atlas.yaml"
    common.dump_yaml(str(atlas_file), {"elements": [ChartElement.single(host, bump, "f").atlas.record()]})
    cover_file = tmp_path / "cover.yaml"
    rows = [
        {"clopen": whole(sft).record(), "interval": ["-1/8", "3/8"], "kind": "Y"},
        {"clopen": whole(sft).record(), "interval": ["1/4", "7/8"], "kind": "Y"},
    ]
    common.dump_yaml(str(cover_file), {"charts": rows})
    out = tmp_path / "factors.yaml"
    result = runner.invoke(cli, ["--out", str(out), "fragment", "xred4", str(atlas_file), str(cover_file)])
    assert result.exit_code == 0, result.output
    assert "fragment.f: pass" in result.output
    assert len(common.load_yaml(str(out))["elements"]) >= 2


def test_parse_point_forms():
    long_form = parse_point(POINT)
    compact = parse_point("a|b|A@0:1/4")
    assert long_form == compact
    assert long_form.t == dy("1/4")
    assert parse_point("a||a@0").t == 0
    with pytest.raises(ValueError):
        parse_point("a b c")


def test_parse_word_checks_indices():
    with pytest.raises(ValueError):
        parse_word("0", [])


def test_selftest(runner):
    result = runner.invoke(cli, ["selftest"])
    assert result.exit_code == 0, result.output
    assert "selftest.cb_rank: pass" in result.output
    assert "fullshift4_formal_inverse" in result.output


def test_cli_module_opens_with_the_license_header():
    lines = inspect.getsource(cli_module).splitlines()
    assert lines[0] == "# Copyright 2024 Google LLC"
    assert not any(line.startswith("#!") for line in lines)
