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
"""
Command line interface of the dyadic_flows package.

Every command prints one or more reports, as indented text or as JSON records (one per line with
`--format records`), and exits with 0 when every certificate passed, 1 when a verification failed (the witness is
printed) and 2 when the input could not be read.

Commands:
    check CFG                 reversibility, topological freeness, irreducibility and invariant clopen pieces
    charts CFG                the chart decomposition and its certificates
    gens CFG                  the standard generators, written as an atlas file with --out
    eval CFG WORD POINT       g(y), tau_g(y) and rho_y(g) at a point; --out writes an orbit dump as CSV
    fragment CFG ATLAS COVER  fragments every element of an atlas file over a cover file (or "default")
    cbrank CFG                the Cantor-Bendixson rank
    report CFG                rigidity, dynamics and (for countable inputs) rank reports
    selftest                  the acceptance suite on the shipped resources

Usage:
    dyadic-flows --seed 7 check xred4
    dyadic-flows --out xred4_gens.yaml gens xred4
    dyadic-flows eval xred4 "0,-5,12" "(a)^oo [b]@0 (A)^oo, 1/4"
"""

import functools
import json
import re

import click
import yaml

from dyadic_flows.analysis import cb_rank, dynamics_report, rigidity_report
from dyadic_flows.common import common
from dyadic_flows.common.ioc_container import Container, provide_rng
from dyadic_flows.common.model import Certificate, Report
from dyadic_flows.core_numeric import Dyadic, DyInterval, dy
from dyadic_flows.flow_group.atlas import Atlas, elem_compose, elem_equal, elem_eval, elem_invert, identity_atlas
from dyadic_flows.flow_group.atlas import cocycle_eval, elem_validate
from dyadic_flows.flow_group.fragmentation import default_cover, fragment_element
from dyadic_flows.flow_group.generators import check_generator_intervals, generator_elements
from dyadic_flows.flow_group.rewriting import completeness
from dyadic_flows.line_actions import LineAction, orbit_dump, rho_eval
from dyadic_flows.subshifts.checks import (
    check_irreducible_and_clopen_invariants,
    check_reversibility,
    check_topological_freeness,
)
from dyadic_flows.subshifts.clopen import Clopen
from dyadic_flows.subshifts.points import EventuallyPeriodic
from dyadic_flows.subshifts.sft import Sft
from dyadic_flows.suspension import PointY, chart_decomposition, charts_report, make_chart

POINT_PATTERN = re.compile(r"^\(?\((\S*)\)\^oo \[(\S*)\]@(-?\d+) \((\S*)\)\^oo(?:,\s*(\S+?))?\)?$")
COMPACT_POINT_PATTERN = re.compile(r"^(\S+)\|(\S*)\|(\S+)@(-?\d+)(?::(\S+))?$")
SELFTEST_RESOURCES = (
    "xred4",
    "fullshift_with_fixed_sigma",
    "fullshift4_formal_inverse",
    "salo_rank1",
    "salo_rank2",
    "salo_rank3",
)
NOT_REVERSIBLE = ("fullshift_with_fixed_sigma", "fullshift4_formal_inverse")


def load_source(cfg: str):
    """Builds the subshift or family described by a config path or shipped resource name.

    Raises:
        click.UsageError: On a missing file, malformed YAML or an invalid description.
    """
    try:
        return Container.subshift_provider()(common.load_yaml(common.resource_path(cfg)))
    except (ValueError, TypeError, KeyError, yaml.YAMLError, OSError) as e:
        raise click.UsageError(f"cannot load {cfg}: {e}") from e


def _require_sft(source, cfg: str) -> Sft:
    if not isinstance(source, Sft):
        raise click.UsageError(f"{cfg} does not describe a subshift of finite type")
    return source


def _letters(text: str) -> tuple[str, ...]:
    return tuple(text.split()) if " " in text else tuple(text)


def parse_point(text: str) -> PointY:
    """Reads "(L)^oo [C]@k (R)^oo, t" as printed in witnesses, or the compact form "L|C|R@k:t"."""
    text = text.strip()
    match = POINT_PATTERN.match(text)
    if match:
        left, center, offset, right, t = match.groups()
    else:
        match = COMPACT_POINT_PATTERN.match(text)
        if not match:
            raise ValueError(f"invalid point literal {text!r}")
        left, center, right, offset, t = match.groups()
    x = EventuallyPeriodic(_letters(left), _letters(center), _letters(right), int(offset))
    return PointY(x, Dyadic.parse(t) if t else dy(0))


def parse_word(text: str, letters: list[Atlas]) -> Atlas:
    """The product of generators named by comma-separated indices, "-i" for an inverse; the last acts first."""
    if not letters:
        raise ValueError("no generators to build a word from")
    result = identity_atlas(letters[0].sft)
    for token in (t.strip() for t in text.split(",") if t.strip()):
        index = int(token)
        position = abs(index)
        if position >= len(letters):
            raise ValueError(f"generator index {position} out of range (0..{len(letters) - 1})")
        g = letters[position]
        result = elem_compose(result, elem_invert(g) if token.startswith("-") else g)
    return result


def _read(loader, *args):
    try:
        return loader(*args)
    except (ValueError, KeyError, yaml.YAMLError, OSError) as e:
        raise click.UsageError(f"cannot read {args[-1]}: {e}") from e


def load_atlases(sft: Sft, path: str) -> list[Atlas]:
    data = common.load_yaml(path)
    return [Atlas.from_record(sft, row) for row in data.get("elements", [])]


def load_cover(sft: Sft, path: str):
    if path == "default":
        return default_cover(sft)
    data = common.load_yaml(path)
    return [
        make_chart(sft, Clopen.from_record(sft, row["clopen"]), DyInterval.parse(row["interval"]), row.get("kind", "Z"))
        for row in data.get("charts", [])
    ]


def emit(reports: list[Report], fmt: str) -> None:
    for report in reports:
        if fmt == "records":
            for row in report.records():
                click.echo(json.dumps(row, default=str))
        else:
            click.echo(report.render_text())


def finish(ctx: click.Context, reports: list[Report]) -> None:
    emit(reports, ctx.obj["format"])
    ctx.exit(0 if all(r.passed for r in reports) else 1)


def failures_exit_one(command):
    """Turns a ValueError raised while verifying into a failed report and exit status 1."""

    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        ctx = click.get_current_context()
        try:
            return command(*args, **kwargs)
        except ValueError as e:
            report = Report(subject=ctx.command.name)
            report.add(Certificate(name=f"{ctx.command.name}.error", passed=False, witness=str(e)))
            finish(ctx, [report])

    return wrapper


@click.group()
@click.option("--seed", type=int, default=None, help="Seed of the sampled checks.")
@click.option("--samples", type=int, default=None, help="Number of samples per sampled check.")
@click.option("--window", type=int, default=None, help="Window radius for isolation and comparisons.")
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="Output file for dumps.")
@click.option("--format", "fmt", type=click.Choice(["text", "records"]), default="text", help="Report rendering.")
@click.pass_context
def cli(ctx: click.Context, seed, samples, window, out, fmt):
    for key, value in (("seed", seed), ("samples", samples), ("window", window)):
        if value is not None:
            Container.config[key] = value
    ctx.obj = {"out": out, "format": fmt}


@cli.command()
@click.argument("cfg")
@click.pass_context
@failures_exit_one
def check(ctx: click.Context, cfg: str):
    """Reversibility, freeness, irreducibility and invariant clopen pieces of a subshift."""
    sft = _require_sft(load_source(cfg), cfg)
    report = check_reversibility(sft)
    report.add(check_topological_freeness(sft))
    invariants = check_irreducible_and_clopen_invariants(sft)
    report.facts["irreducible"] = invariants.passed
    report.facts.update(invariants.facts)
    finish(ctx, [report])


@cli.command(name="charts")
@click.argument("cfg")
@click.pass_context
@failures_exit_one
def chart_dump(ctx: click.Context, cfg: str):
    """The chart decomposition over the reflection partition and the quarter intervals."""
    sft = _require_sft(load_source(cfg), cfg)
    found = chart_decomposition(sft)
    report = charts_report(sft, found)
    if ctx.obj["out"]:
        common.dump_yaml(ctx.obj["out"], {"subshift": cfg, "charts": [c.record() for c in found]})
    finish(ctx, [report])


@cli.command()
@click.argument("cfg")
@click.pass_context
@failures_exit_one
def gens(ctx: click.Context, cfg: str):
    """The standard generators; --out writes them as an atlas file."""
    sft = _require_sft(load_source(cfg), cfg)
    report = Report(subject=sft.name)
    report.add(check_generator_intervals())
    elements = generator_elements(sft)
    report.facts["generators"] = len(elements)
    report.facts["names"] = [e.name for e in elements[:18]]
    if ctx.obj["out"]:
        common.dump_yaml(ctx.obj["out"], {"subshift": cfg, "elements": [e.atlas.record() for e in elements]})
    finish(ctx, [report])


@cli.command(name="eval")
@click.argument("cfg")
@click.argument("word")
@click.argument("point")
@click.option("--atlas", "atlas_path", type=click.Path(exists=True), default=None, help="Atlas file of the letters.")
@click.option("--span", type=int, default=2, help="Half-width of the orbit dump grid.")
@click.pass_context
@failures_exit_one
def evaluate(ctx: click.Context, cfg: str, word: str, point: str, atlas_path, span: int):
    """Evaluates a word in the generators at a point of the suspension."""
    sft = _require_sft(load_source(cfg), cfg)
    letters = _read(load_atlases, sft, atlas_path) if atlas_path else [e.atlas for e in generator_elements(sft)]
    try:
        y = parse_point(point)
        g = parse_word(word, letters)
    except ValueError as e:
        raise click.UsageError(str(e)) from e
    report = elem_validate(g, rng=provide_rng())
    report.facts["image"] = str(elem_eval(g, y))
    report.facts["cocycle"] = str(cocycle_eval(g, y))
    action = LineAction(y, sft, (g,))
    report.facts["rho(0)"] = str(rho_eval(action, g, 0))
    if ctx.obj["out"]:
        ts = [Dyadic(k, 3) for k in range(-8 * span, 8 * span + 1)]
        orbit_dump(action, ts).to_csv(ctx.obj["out"], index=False)
    finish(ctx, [report])


@cli.command()
@click.argument("cfg")
@click.argument("atlas_path", type=click.Path(exists=True))
@click.argument("cover")
@click.pass_context
@failures_exit_one
def fragment(ctx: click.Context, cfg: str, atlas_path: str, cover: str):
    """Fragments every element of an atlas file over the charts of a cover file."""
    sft = _require_sft(load_source(cfg), cfg)
    cover_charts = _read(load_cover, sft, cover)
    report = Report(subject=sft.name)
    written = []
    for g in _read(load_atlases, sft, atlas_path):
        factors = fragment_element(g, cover_charts)
        product = identity_atlas(sft)
        for factor in factors:
            product = elem_compose(product, factor)
        report.add(
            Certificate(
                name=f"fragment.{g.name or 'element'}",
                passed=elem_equal(product, g),
                details={"factors": len(factors)},
            )
        )
        written.extend(f.record() for f in factors)
    if ctx.obj["out"]:
        common.dump_yaml(ctx.obj["out"], {"subshift": cfg, "elements": written})
    finish(ctx, [report])


@cli.command()
@click.argument("cfg")
@click.pass_context
@failures_exit_one
def cbrank(ctx: click.Context, cfg: str):
    """The Cantor-Bendixson rank, cross-checked by window search."""
    report = cb_rank(load_source(cfg), Container.config.get("bruteforce_radius"))
    if ctx.obj["format"] == "text":
        click.echo(f"rank: {report.facts['rank']}")
    finish(ctx, [report])


@cli.command(name="report")
@click.argument("cfg")
@click.pass_context
@failures_exit_one
def full_report(ctx: click.Context, cfg: str):
    """Rigidity, dynamics and rank reports."""
    source = load_source(cfg)
    reports = [rigidity_report(source), dynamics_report(source)]
    try:
        reports.append(cb_rank(source))
    except ValueError as e:
        reports[0].facts["cb_rank"] = str(e)
    finish(ctx, reports)


@cli.command()
@click.pass_context
def selftest(ctx: click.Context):
    """Runs the acceptance checks on the shipped resources."""
    reports = []
    for name in SELFTEST_RESOURCES:
        source = load_source(name)
        if isinstance(source, Sft):
            result = check_reversibility(source)
            expected = name not in NOT_REVERSIBLE
            verdict = Report(subject=name)
            verdict.add(
                Certificate(
                    name="selftest.reversibility",
                    passed=result.passed == expected,
                    witness=next((c.witness for c in result.certificates if not c.passed), ""),
                )
            )
            reports.append(verdict)
        else:
            rank = cb_rank(source)
            verdict = Report(subject=name)
            verdict.add(rank.certificates[0])
            expected = source.descriptor_rank + 2
            verdict.add(
                Certificate(
                    name="selftest.cb_rank",
                    passed=rank.facts["rank"] == expected,
                    witness="" if rank.facts["rank"] == expected else str(rank.facts["rank"]),
                )
            )
            reports.append(verdict)
    xred = load_source("xred4")
    found = chart_decomposition(xred)
    reports.append(charts_report(xred, found))
    reports.append(completeness(xred))
    finish(ctx, reports)


if __name__ == "__main__":
    cli()  # pylint: disable=E1120
