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
Decidable checks on reversible subshifts of finite type.

* `check_reversibility`: the reversal is an involution conjugating the shift to its inverse, and it preserves
  no shift orbit. The last property reduces to the absence of points with `sigma(x) = x` or
  `sigma(x) = shift(x)`. Such a point satisfies `x_n = tau(x_{d-n})` for a fixed d, so it is determined by its
  right half; it exists exactly when some allowed word glued to its mirror image across the center is allowed.
* `check_topological_freeness`: aperiodic points are dense. A cylinder on a vertex of the trimmed transition
  graph contains only periodic points exactly when the weakly connected component of the vertex is one cycle.
* `check_irreducible_and_clopen_invariants`: strong connectivity, and the minimal shift-invariant clopen sets,
  one per weakly connected component.
* `orbits`: periodic orbits up to a period, or isolated orbits of an orbit scheme with their windows.
"""

import itertools
from dataclasses import dataclass

import networkx as nx

from dyadic_flows.common.ioc_container import Container, provide_rng
from dyadic_flows.common.measure_utils import trace_on
from dyadic_flows.common.model import Certificate, Report
from dyadic_flows.common.sampling import sample_many, verify_samples
from dyadic_flows.subshifts.clopen import Clopen
from dyadic_flows.subshifts.points import EventuallyPeriodic, SymPoint, render_word
from dyadic_flows.subshifts.schemes import OrbitScheme, sft_scheme
from dyadic_flows.subshifts.sft import Sft, Word


def _require_reversal(sft: Sft):
    if sft.reversal is None:
        raise ValueError(f"{sft.name}: no involution data for the reversal")
    return sft.reversal


def _forward_cycle(sft: Sft, word: Word) -> tuple[Word, Word]:
    """Extends `word` to the right along the first successors until a vertex repeats.

    Returns:
        The letters added before the cycle and the letters of the cycle.
    """
    m = sft.memory
    vertex = word[-m:]
    seen = {vertex: 0}
    added: list[str] = []
    while True:
        nxt = min(sft.graph.successors(vertex))
        added.append(sft.graph.edges[vertex, nxt]["label"])
        vertex = nxt
        if vertex in seen:
            start = seen[vertex]
            return tuple(added[:start]), tuple(added[start:])
        seen[vertex] = len(added)


def flipped_point(sft: Sft, power: int) -> EventuallyPeriodic | None:
    """A point with `sigma(x) = shift^power(x)` for power 0 or 1, or None when there is none."""
    reversal = _require_reversal(sft)
    d = reversal.center + power
    m = sft.memory
    for word in sorted(sft.language(m + 1)):
        if d % 2 == 0:
            if reversal.tau(word[0]) != word[0]:
                continue
            glued = reversal.word(word[1:]) + word
        else:
            glued = reversal.word(word) + word
        if not sft.is_allowed(glued):
            continue
        prefix, cycle = _forward_cycle(sft, word)
        right = word + prefix
        if d % 2 == 0:
            h = d // 2
            center = reversal.word(right[1:]) + right
            offset = h - (len(right) - 1)
        else:
            h = (d - 1) // 2
            center = reversal.word(right) + right
            offset = h - len(right) + 1
        point = EventuallyPeriodic(reversal.word(cycle), center, cycle, offset)
        if not sft.contains(point):
            # the mirrored tail can use words the forward language forbids
            continue
        if point.reverse(reversal) != point.shift(power):
            raise ValueError(f"{sft.name}: mirrored point {point} does not satisfy its defining identity")
        return point
    return None


def bruteforce_flipped_points(sft: Sft, size: int = 2, reach: int = 3) -> list[EventuallyPeriodic]:
    """All eventually periodic points with short cycles and center that the reversal maps into their orbit
    through at most one shift. Used to cross-check `flipped_point` on small alphabets."""
    reversal = _require_reversal(sft)
    words = [w for k in range(1, size + 1) for w in itertools.product(sft.alphabet.letters, repeat=k)]
    centers = [()] + words
    found = []
    for left, center, right in itertools.product(words, centers, words):
        for offset in range(-reach, reach + 1):
            x = EventuallyPeriodic(left, center, right, offset)
            if not sft.contains(x):
                continue
            image = x.reverse(reversal)
            if image == x or image == x.shift(1):
                found.append(x)
    return found


@trace_on("Reversibility check", measure_time=True)
def check_reversibility(sft: Sft, samples: int | None = None, rng=None) -> Report:
    """Checks that the reversal is a flipping involution of the subshift.

    Args:
        sft: A subshift with involution data.
        samples: Number of random eventually periodic points for the sampled identities.
        rng: Random generator; defaults to one seeded from the configuration.

    Returns:
        Report: certificates for letter involution, language invariance, the two sampled identities, and the
        exact absence of points with `sigma(x) = x` or `sigma(x) = shift(x)` (witness point on failure).

    Raises:
        ValueError: If the subshift carries no involution data.
    """
    reversal = _require_reversal(sft)
    samples = samples if samples is not None else Container.config.get("samples", 200)
    rng = rng or provide_rng()
    report = Report(subject=sft.name)

    bad_letters = [a for a in sft.alphabet.letters if reversal.tau(reversal.tau(a)) != a]
    report.add(Certificate(name="reversibility.tau_involution", passed=not bad_letters, witness=" ".join(bad_letters)))
    bad_word = sft.is_reversal_invariant()
    report.add(
        Certificate(
            name="reversibility.language_invariant",
            passed=bad_word is None,
            witness=render_word(bad_word) if bad_word else "",
        )
    )
    if sft.is_empty:
        report.add(Certificate(name="reversibility.nonempty", passed=False, witness=sft.name))
        return report

    points = sample_many(rng, sft.random_point, samples)
    report.add(
        verify_samples("reversibility.involution", lambda x: x.reverse(reversal).reverse(reversal) == x, points)
    )
    report.add(
        verify_samples(
            "reversibility.flips_shift",
            lambda x: x.shift(1).reverse(reversal).shift(1) == x.reverse(reversal),
            points,
        )
    )
    for power, name in ((0, "reversibility.no_fixed_points"), (1, "reversibility.no_shift_flipped_points")):
        witness = flipped_point(sft, power)
        report.add(
            Certificate(
                name=name,
                passed=witness is None,
                witness=str(witness) if witness is not None else "",
                details={"center": reversal.center + power},
            )
        )
    return report


def check_topological_freeness(sft: Sft) -> Certificate:
    """Decides whether aperiodic points are dense.

    Returns:
        Certificate: passed, or failed with the first vertex word whose cylinder holds a single periodic orbit;
        the details name that orbit.
    """
    graph = sft.graph
    for component in sorted(nx.weakly_connected_components(graph), key=min):
        sub = graph.subgraph(component)
        if sub.number_of_edges() != len(component) or not nx.is_strongly_connected(sub):
            continue
        vertex = min(component)
        cycle = [vertex]
        while True:
            nxt = next(iter(sub.successors(cycle[-1])))
            if nxt == vertex:
                break
            cycle.append(nxt)
        orbit = render_word(tuple(v[-1] for v in cycle))
        return Certificate(
            name="topological_freeness",
            passed=False,
            witness=render_word(vertex),
            details={"periodic_orbit": orbit, "period": len(cycle)},
        )
    return Certificate(name="topological_freeness", passed=True, details={"vertices": graph.number_of_nodes()})


def check_irreducible_and_clopen_invariants(sft: Sft) -> Report:
    """Reports strong connectivity and the minimal shift-invariant clopen pieces.

    A shift-invariant clopen set is a union of weakly connected components of the trimmed graph; each piece is
    returned as a clopen set on the window `[0, m-1]`.
    """
    graph = sft.graph
    report = Report(subject=sft.name)
    irreducible = graph.number_of_nodes() > 0 and nx.is_strongly_connected(graph)
    report.add(
        Certificate(
            name="irreducible",
            passed=irreducible,
            details={"components": nx.number_strongly_connected_components(graph)},
        )
    )
    pieces = invariant_pieces(sft)
    report.facts["invariant_clopen_pieces"] = [str(piece) for piece in pieces]
    report.facts["piece_count"] = len(pieces)
    return report


def invariant_pieces(sft: Sft) -> list[Clopen]:
    return [Clopen.of(sft, 0, sft.memory - 1, c) for c in sorted(nx.weakly_connected_components(sft.graph), key=min)]


@dataclass
class OrbitDescriptor:
    """One orbit (or orbit family) found by `orbits`.

    Attributes:
        name (str): Class name, or the cycle word for periodic orbits.
        status (str): "periodic", "isolated" or "unknown".
        point (SymPoint | None): A representative.
        certificate (Certificate | None): The isolating window, for isolated classes.
    """

    name: str
    status: str
    point: SymPoint | None = None
    certificate: Certificate | None = None
    period: int | None = None

    def record(self) -> dict:
        row = {"orbit": self.name, "status": self.status}
        if self.period is not None:
            row["period"] = self.period
        if self.certificate is not None and self.certificate.witness:
            row["window"] = self.certificate.witness
        return row


def scheme_of(source) -> OrbitScheme:
    """The orbit scheme of a subshift of finite type or of a family carrying one."""
    if isinstance(source, OrbitScheme):
        return source
    if isinstance(source, Sft):
        return sft_scheme(source)
    scheme = getattr(source, "scheme", None)
    if isinstance(scheme, OrbitScheme):
        return scheme
    raise TypeError(f"Cannot build an orbit scheme from {type(source).__name__}")


@trace_on("Orbit enumeration", measure_time=True)
def orbits(source, mode: str = "isolated", period: int = 1, max_radius: int | None = None) -> list[OrbitDescriptor]:
    """Lists orbits of a subshift.

    Args:
        source: An Sft, an OrbitScheme, or a family with a `scheme` attribute.
        mode: "periodic" (orbits of least period at most `period`, Sft only) or "isolated".
        period: Period bound for the periodic mode.
        max_radius: Largest window radius tried by isolation certificates.

    Raises:
        ValueError: On an unknown mode.
        TypeError: If the periodic mode gets something other than an Sft.
    """
    if mode == "periodic":
        if not isinstance(source, Sft):
            raise TypeError("Periodic orbits are enumerated on subshifts of finite type")
        return [
            OrbitDescriptor(render_word(w), "periodic", point=source.cycle_point(w), period=len(w))
            for w in source.periodic_words(period)
        ]
    if mode != "isolated":
        raise ValueError(f"Not implemented orbit mode: {mode}")
    scheme = scheme_of(source)
    found = []
    for name in scheme.isolated():
        certificate = scheme.certify(name, max_radius=max_radius)
        status = "isolated" if certificate.passed else "unknown"
        found.append(OrbitDescriptor(name, status, point=scheme.representative(name), certificate=certificate))
    return found
