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
Actions of the flow group on the real line, read along flow orbits.

For a base point y of Y, rho_y(g)(t) = t + tau_g(Phi^t(y)). The translation flow rebases the action along the
flow, the translation action of g rebases it at g(y), and the reflection rebases it at hat_sigma(y). Actions
are evaluated pointwise at dyadic times only.

Classes:
    LineAction: a base point with its ambient subshift and a list of generators.

Functions:
    rho_eval(a, g, t) -> Dyadic
    translation_ops(a, mode, s, g) -> LineAction
    compare_actions(a, b, radius, samples) -> Certificate
    action_report(a, samples) -> Report: the homomorphism, monotonicity and rebasing identities on samples.
    orbit_dump(a, ts) -> pandas.DataFrame
"""

import itertools
from dataclasses import dataclass
from typing import Sequence

import pandas as pd

from dyadic_flows.common.ioc_container import Container, provide_rng
from dyadic_flows.common.measure_utils import trace_on
from dyadic_flows.common.model import Certificate, Report
from dyadic_flows.common.sampling import verify_samples
from dyadic_flows.core_numeric import ZERO, Dyadic, DyadicLike, dy, random_dyadic
from dyadic_flows.flow_group.atlas import Atlas, cocycle_eval, elem_compose, elem_eval
from dyadic_flows.subshifts.points import EventuallyPeriodic
from dyadic_flows.subshifts.sft import Sft
from dyadic_flows.suspension import PointY, flow, hat_sigma

MODES = ("flow", "act", "reflect")


@dataclass(frozen=True)
class LineAction:
    """rho_y for the base point y; `generators` are the elements used by comparisons and dumps."""

    base: PointY
    sft: Sft
    generators: tuple[Atlas, ...] = ()


def rho_eval(a: LineAction, g: Atlas, t: DyadicLike) -> Dyadic:
    t = dy(t)
    return t + cocycle_eval(g, flow(a.base, t))


def translation_ops(a: LineAction, mode: str, s: DyadicLike | None = None, g: Atlas | None = None) -> LineAction:
    """Rebases an action.

    Args:
        a: The action.
        mode: "flow" (base Phi^s(y)), "act" (base g(y)) or "reflect" (base hat_sigma(y)).
        s: Flow time for "flow".
        g: Group element for "act".

    Raises:
        ValueError: On an unknown mode or a missing argument.
    """
    if mode == "flow":
        if s is None:
            raise ValueError("the flow mode needs a time s")
        return LineAction(flow(a.base, s), a.sft, a.generators)
    if mode == "act":
        if g is None:
            raise ValueError("the act mode needs a group element g")
        return LineAction(elem_eval(g, a.base), a.sft, a.generators)
    if mode == "reflect":
        return LineAction(hat_sigma(a.base, a.sft), a.sft, a.generators)
    raise ValueError(f"Not implemented translation mode: {mode}, expected one of {MODES}")


def _sign(d: Dyadic) -> int:
    return (d > 0) - (d < 0)


def compare_actions(
    a: LineAction, b: LineAction, radius: int | None = None, samples: int | None = None, rng=None
) -> Certificate:
    """Looks for a generator g and a dyadic t where rho_a(g) and rho_b(g) move t in different directions.

    Times are t = 0, the half-integers within the radius, and random dyadics in [-radius, radius]. A sign that
    is zero on one side and not on the other is a stabilizer difference.

    Returns:
        Certificate: passed ("distinguished") with the generator and time as witness, or failed
        ("indistinguishable") when the search runs out.
    """
    radius = radius or Container.config.get("window", 8)
    samples = samples or Container.config.get("samples", 200)
    rng = rng or provide_rng()
    generators = a.generators or b.generators
    times = [ZERO] + [dy(k).half() for k in range(-2 * radius, 2 * radius + 1) if k]
    times += [random_dyadic(rng, -radius, radius) for _ in range(samples)]
    for t, (i, g) in itertools.product(times, enumerate(generators)):
        sa, sb = _sign(rho_eval(a, g, t) - t), _sign(rho_eval(b, g, t) - t)
        if sa != sb:
            name = g.name or f"generator {i}"
            return Certificate(
                name="actions.distinguished",
                witness=f"{name} at t={t}",
                details={"verdict": "distinguished", "signs": [sa, sb], "generator": i, "t": str(t)},
            )
    return Certificate(
        name="actions.distinguished",
        passed=False,
        details={"verdict": "indistinguishable at this resolution", "radius": radius, "times": len(times)},
    )


def _period(y: PointY) -> int | None:
    return y.x.least_period() if isinstance(y.x, EventuallyPeriodic) else None


@trace_on("Line action checks", measure_time=True)
def action_report(a: LineAction, samples: int | None = None, rng=None, span: int = 4) -> Report:
    """Checks the action identities at random generator pairs and dyadic times in [-span, span].

    Certificates: homomorphism rho(gh) = rho(g) rho(h), monotonicity, flow equivariance
    rho_{Phi^s y}(g)(t) = rho_y(g)(t + s) - s, the translation action g.rho_y = rho_{g(y)}, the reversibility
    identity rho_{hat_sigma y}(g)(t) = -rho_y(g)(-t) for equivariant generators, and the lift identity
    rho_y(g)(t + m) = rho_y(g)(t) + m when the base is periodic with period m.
    """
    samples = samples or Container.config.get("samples", 200)
    rng = rng or provide_rng()
    generators = list(a.generators)
    report = Report(subject=f"line action at {a.base}")
    if not generators:
        report.facts["generators"] = 0
        return report

    def draw() -> tuple[Atlas, Atlas, Dyadic, Dyadic]:
        return rng.choice(generators), rng.choice(generators), random_dyadic(rng, -span, span), random_dyadic(rng, -1, 1)

    draws = [draw() for _ in range(samples)]
    products = {(id(g), id(h)): elem_compose(g, h) for g, h, _, _ in draws}

    def render(sample) -> str:
        g, h, t, s = sample
        return f"g={g.name}, h={h.name}, t={t}, s={s}"

    def homomorphism(sample) -> bool:
        g, h, t, _ = sample
        return rho_eval(a, products[id(g), id(h)], t) == rho_eval(a, g, rho_eval(a, h, t))

    def monotone(sample) -> bool:
        g, _, t, s = sample
        u = t + abs(s) + 1
        return rho_eval(a, g, t) < rho_eval(a, g, u)

    def flow_equivariance(sample) -> bool:
        g, _, t, s = sample
        return rho_eval(translation_ops(a, "flow", s=s), g, t) == rho_eval(a, g, t + s) - s

    def translation_action(sample) -> bool:
        g, _, _, _ = sample
        return translation_ops(a, "act", g=g).base == flow(a.base, cocycle_eval(g, a.base))

    report.add(verify_samples("actions.homomorphism", homomorphism, draws, render))
    report.add(verify_samples("actions.monotone", monotone, draws, render))
    report.add(verify_samples("actions.flow_equivariance", flow_equivariance, draws, render))
    report.add(verify_samples("actions.translation_action", translation_action, draws, render))

    equivariant = [d for d in draws if d[0].equivariant]
    if equivariant and a.sft.reversal is not None:
        mirror = translation_ops(a, "reflect")

        def reversibility(sample) -> bool:
            g, _, t, _ = sample
            return rho_eval(mirror, g, t) == -rho_eval(a, g, -t)

        report.add(verify_samples("actions.reversibility", reversibility, equivariant, render))

    period = _period(a.base)
    if period is not None:

        def lift(sample) -> bool:
            g, _, t, _ = sample
            return rho_eval(a, g, t + period) == rho_eval(a, g, t) + period

        report.add(verify_samples("actions.periodic_lift", lift, draws, render))
        report.facts["period"] = period
    report.facts["generators"] = len(generators)
    return report


def orbit_dump(a: LineAction, ts: Sequence[DyadicLike], generators: Sequence[Atlas] | None = None) -> pd.DataFrame:
    """Rows (generator index, t, rho_y(g)(t)) with dyadics rendered as "n/2^e" strings."""
    generators = list(generators if generators is not None else a.generators)
    rows = [
        {"generator": i, "t": str(dy(t)), "image": str(rho_eval(a, g, t))}
        for i, g in enumerate(generators)
        for t in ts
    ]
    return pd.DataFrame(rows, columns=["generator", "t", "image"])
