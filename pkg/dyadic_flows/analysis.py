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
Invariants of the representation space read off the subshift.

* Rigid semi-conjugacy classes correspond to isolated shift orbits, so `rigidity_report` lists the certified
  isolated orbits and the classes left over.
* The Cantor-Bendixson rank of the representation space equals the rank of the subshift; `cb_rank` runs the
  derivatives of an orbit scheme and replays them with window certificates as a brute-force oracle.
* `dynamics_report` collects irreducibility (dense classes, with an explicit transitive point), minimality
  (universal flexibility of non-rigid classes) and the shift-invariant clopen pieces (connectedness).

The group is perfect, so its actions have no global fixed points; nothing here computes them.
"""

from dyadic_flows.common.ioc_container import Container
from dyadic_flows.common.measure_utils import trace_on
from dyadic_flows.common.model import Certificate, Report
from dyadic_flows.subshifts.checks import check_irreducible_and_clopen_invariants, orbits, scheme_of
from dyadic_flows.subshifts.constructions import transitive_point
from dyadic_flows.subshifts.points import render_word
from dyadic_flows.subshifts.prescribed import PrescribedRigidity
from dyadic_flows.subshifts.schemes import OrbitScheme
from dyadic_flows.subshifts.sft import Sft

FLEXIBLE = "non-rigid representations are universally flexible"


def _subject(source) -> str:
    return getattr(source, "name", type(source).__name__)


def bruteforce_layers(scheme: OrbitScheme, radius: int | None = None) -> tuple[list[list[str]], list[str]]:
    """Derivatives decided by window search alone: a class is removed when an isolating window of radius at most
    `radius` separates its representative from every enumerated point of the classes still alive."""
    radius = radius or Container.config.get("bruteforce_radius", 12)
    alive = set(scheme.classes)
    layers = []
    while alive:
        layer = sorted(name for name in alive if scheme.certify(name, alive, max_radius=radius).passed)
        if not layer:
            break
        layers.append(layer)
        alive -= set(layer)
    return layers, sorted(alive)


@trace_on("CB rank", measure_time=True)
def cb_rank(source, radius: int | None = None) -> Report:
    """The Cantor-Bendixson rank of a countable subshift given by an orbit scheme.

    Returns:
        Report: facts `rank` and `layers` (the classes removed by each derivative), and the certificate
        `cb_rank.bruteforce` comparing the layers with the window-search oracle.

    Raises:
        ValueError: When the scheme has a perfect kernel, so the space is not countable.
        TypeError: When the source carries no orbit scheme.
    """
    scheme = scheme_of(source)
    layers, kernel = scheme.derivatives()
    if kernel:
        raise ValueError(f"{scheme.name}: perfect kernel {kernel}; the rank is outside the decidable class")
    report = Report(subject=_subject(source))
    report.facts["rank"] = len(layers)
    report.facts["layers"] = layers
    oracle, leftover = bruteforce_layers(scheme, radius)
    if (oracle, leftover) == (layers, kernel):
        report.add(Certificate(name="cb_rank.bruteforce", details={"layers": len(oracle)}))
    else:
        index = next((i for i, (a, b) in enumerate(zip(layers, oracle)) if a != b), min(len(layers), len(oracle)))
        report.add(
            Certificate(
                name="cb_rank.bruteforce",
                passed=False,
                witness=f"layer {index}",
                details={"scheme": layers[index : index + 1], "oracle": oracle[index : index + 1], "left": leftover},
            )
        )
    Container.logger().info(msg=f"{scheme.name}: CB rank {len(layers)}")
    return report


@trace_on("Rigidity report", measure_time=True)
def rigidity_report(source, radius: int | None = None) -> Report:
    """Rigid classes are the certified isolated orbits, one class per orbit.

    Certificates: one isolation certificate per isolated orbit, and `rigidity.first_derivative` checking that
    the isolated orbits are exactly the first Cantor-Bendixson layer.
    """
    scheme = scheme_of(source)
    report = Report(subject=_subject(source))
    found = orbits(scheme, mode="isolated", max_radius=radius)
    for orbit in found:
        report.add(orbit.certificate)
    isolated = sorted(o.name for o in found if o.status == "isolated")
    layers, _ = scheme.derivatives()
    first = layers[0] if layers else []
    report.add(
        Certificate(
            name="rigidity.first_derivative",
            passed=isolated == first,
            witness="" if isolated == first else ", ".join(sorted(set(isolated) ^ set(first))),
        )
    )
    report.facts["isolated_orbits"] = isolated
    report.facts["rigid_classes"] = len(isolated)
    report.facts["non_isolated"] = sorted(set(scheme.classes) - set(isolated))
    if isinstance(source, PrescribedRigidity):
        report.certificates.extend(source.certificates())
    return report


def minimality(source) -> str:
    """"minimal", "unique minimal subset = <class>", "several minimal subsets" or "unknown"."""
    if isinstance(source, PrescribedRigidity):
        return "unique minimal subset = M"
    scheme = scheme_of(source)
    if any(c.kind == "perfect" for c in scheme.classes.values()):
        # a component with more edges than vertices holds two periodic orbits
        return "several minimal subsets" if isinstance(source, Sft) else "unknown"
    closed = [
        name for name, c in scheme.classes.items() if c.kind == "orbit" and not scheme.accumulates_on(name) - {name}
    ]
    if len(closed) != 1:
        return "several minimal subsets"
    if len(scheme.classes) == 1:
        return "minimal"
    return f"unique minimal subset = {closed[0]}"


@trace_on("Dynamics report", measure_time=True)
def dynamics_report(source) -> Report:
    """Density, flexibility and connectedness facts for a subshift or a shipped family."""
    report = Report(subject=_subject(source))
    status = minimality(source)
    report.facts["minimality"] = status
    report.facts["flexibility"] = FLEXIBLE if status == "minimal" or status.startswith("unique") else "not determined"
    if isinstance(source, Sft):
        base = check_irreducible_and_clopen_invariants(source)
        report.certificates.extend(base.certificates)
        report.facts.update(base.facts)
        irreducible = base.passed
        if irreducible:
            point = transitive_point(source)
            report.facts["transitive_point"] = render_word(point.window(0, 31))
        report.facts["rep_space_connected"] = base.facts["piece_count"] == 1
    else:
        irreducible = status == "minimal"
        report.facts["invariant_clopen_pieces"] = "not computed"
    if status == "minimal":
        report.facts["dense_classes"] = "every class"
    else:
        report.facts["dense_classes"] = "exist" if irreducible else "none certified"
    return report
