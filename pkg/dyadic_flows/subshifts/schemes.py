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
Orbit schemes: countable subshifts described by finitely many classes of orbits.

A scheme lists orbit classes. A class is a single orbit, a family of orbits indexed by integer parameters, or a
perfect piece (never isolated). Each class records the classes its points accumulate on; the relation is closed
transitively when the scheme is built. Cantor-Bendixson derivatives then act on classes: a class is isolated in
an alive set when it is not perfect and no alive class accumulates on it.

Isolation is also certified on windows. For a representative point x of the class, the certificate is the
smallest radius r such that no enumerated point of another alive class (bounded parameters, bounded shifts) and
no other point of the orbit of x reads the same word on `[-r, r]`. Perfect classes answer window queries
through a membership predicate instead of enumeration.

Functions:
    sft_scheme(sft) -> OrbitScheme: Itineraries through the condensation of a transition graph.

Classes:
    OrbitClass, OrbitScheme
"""

import itertools
from dataclasses import dataclass
from typing import Callable

import networkx as nx

from dyadic_flows.common.ioc_container import Container
from dyadic_flows.common.model import Certificate
from dyadic_flows.subshifts.points import EventuallyPeriodic, SymPoint, render_word
from dyadic_flows.subshifts.sft import Sft, Word

KINDS = ("orbit", "family", "perfect")


@dataclass(frozen=True)
class OrbitClass:
    """One class of an orbit scheme.

    Attributes:
        name (str): Unique name inside the scheme.
        kind (str): "orbit", "family" or "perfect".
        params (int): Number of integer parameters of a family.
        accumulates_on (frozenset[str]): Classes met by the closure of this class.
        point (Callable): Maps a parameter tuple to a representative point.
        span (Callable): Maps (parameters, radius) to a shift bound beyond which radius-windows of the shifted
            representative are windows of the classes it accumulates on.
        param_bound (Callable): Maps a radius to the largest parameter worth enumerating.
        admits (Callable): For perfect classes, whether a window word occurs in the class closure.
        base (tuple[int, ...]): Parameters of the representative point; zeros when unset.
    """

    name: str
    kind: str = "orbit"
    params: int = 0
    accumulates_on: frozenset[str] = frozenset()
    point: Callable[[tuple[int, ...]], SymPoint] | None = None
    span: Callable[[tuple[int, ...], int], int] | None = None
    param_bound: Callable[[int], int] | None = None
    admits: Callable[[Word], bool] | None = None
    base: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"Class {self.name}: kind must be one of {KINDS}, got {self.kind}")
        if self.kind == "family" and self.params < 1:
            raise ValueError(f"Class {self.name}: a family needs at least one parameter")
        if self.kind != "perfect" and self.point is None:
            raise ValueError(f"Class {self.name}: non-perfect classes need a representative point")
        if self.base is not None and len(self.base) != self.params:
            raise ValueError(f"Class {self.name}: base parameters {self.base} do not match {self.params} parameters")

    @property
    def representative_params(self) -> tuple[int, ...]:
        return self.base if self.base is not None else (0,) * self.params

    def members(self, radius: int) -> list[tuple[int, ...]]:
        bound = self.param_bound(radius) if self.param_bound else radius + 2
        return list(itertools.product(range(bound + 1), repeat=self.params))


class OrbitScheme:
    """A finite set of orbit classes with a transitive accumulation relation.

    Args:
        name: Display name.
        classes: The classes; `accumulates_on` may name any class of the scheme.

    Raises:
        ValueError: On repeated names or references to unknown classes.
    """

    def __init__(self, name: str, classes: list[OrbitClass]):
        self.name = name
        self.classes: dict[str, OrbitClass] = {}
        for c in classes:
            if c.name in self.classes:
                raise ValueError(f"{name}: repeated orbit class {c.name}")
            self.classes[c.name] = c
        graph = nx.DiGraph()
        graph.add_nodes_from(self.classes)
        for c in classes:
            for target in c.accumulates_on:
                if target not in self.classes:
                    raise ValueError(f"{name}: class {c.name} accumulates on unknown class {target}")
                graph.add_edge(c.name, target)
        self._closure = {c: frozenset(nx.descendants(graph, c)) for c in self.classes}

    def accumulates_on(self, name: str) -> frozenset[str]:
        return self._closure[name]

    def isolated(self, alive: set[str] | None = None) -> list[str]:
        """Names of the classes whose points are isolated in the union of the alive classes."""
        alive = set(self.classes) if alive is None else set(alive)
        return sorted(
            name
            for name in alive
            if self.classes[name].kind != "perfect"
            and not any(name in self._closure[other] for other in alive if other != name)
        )

    def derivatives(self) -> tuple[list[list[str]], list[str]]:
        """The classes removed by each Cantor-Bendixson derivative, and the classes left in the perfect kernel."""
        alive = set(self.classes)
        layers = []
        while alive:
            layer = self.isolated(alive)
            if not layer:
                break
            layers.append(layer)
            alive -= set(layer)
        return layers, sorted(alive)

    def representative(self, name: str, params: tuple[int, ...] | None = None) -> SymPoint:
        c = self.classes[name]
        if c.point is None:
            raise ValueError(f"{self.name}: class {name} has no representative point")
        return c.point(params if params is not None else c.representative_params)

    def _collides(self, name: str, params: tuple[int, ...], x: SymPoint, radius: int, alive: set[str]) -> bool:
        target = x.window(-radius, radius)
        period = x.least_period() if isinstance(x, EventuallyPeriodic) else None
        for other in sorted(alive):
            c = self.classes[other]
            if c.kind == "perfect":
                if c.admits is not None and c.admits(target):
                    return True
                continue
            for member in c.members(radius):
                y = c.point(member)
                bound = c.span(member, radius) if c.span else radius
                for k in range(-bound, bound + 1):
                    if other == name and member == params and (k == 0 or (period and k % period == 0)):
                        continue
                    if y.window(k - radius, k + radius) == target:
                        return True
        return False

    def certify(
        self,
        name: str,
        alive: set[str] | None = None,
        max_radius: int | None = None,
        params: tuple[int, ...] | None = None,
    ) -> Certificate:
        """Searches for an isolating window around the representative of a class.

        Returns:
            Certificate: passed with the isolating window as witness; failed with status "unknown" when no
            radius up to `max_radius` separates the point from its competitors.
        """
        alive = set(self.classes) if alive is None else set(alive)
        max_radius = max_radius or Container.config.get("bruteforce_radius", 12)
        c = self.classes[name]
        if c.kind == "perfect":
            return Certificate(name=f"isolated.{name}", passed=False, details={"status": "perfect"})
        params = params if params is not None else c.representative_params
        x = c.point(params)
        for radius in range(max_radius + 1):
            if not self._collides(name, params, x, radius, alive):
                word = render_word(x.window(-radius, radius))
                return Certificate(
                    name=f"isolated.{name}",
                    passed=True,
                    witness=f"[{-radius}, {radius}]:{word}",
                    details={"radius": radius, "params": list(params)},
                )
        return Certificate(
            name=f"isolated.{name}", passed=False, details={"status": "unknown", "max_radius": max_radius}
        )


def _is_cyclic(graph: nx.DiGraph, component: set) -> bool:
    vertex = next(iter(component))
    return len(component) > 1 or graph.has_edge(vertex, vertex)


def _cycle_order(graph: nx.DiGraph, component: set, start: Word) -> list[Word]:
    """Vertices of a single-cycle component in walking order, starting at `start`."""
    order = [start]
    while True:
        nxt = next(v for v in graph.successors(order[-1]) if v in component)
        if nxt == start:
            return order
        order.append(nxt)


def _routes(graph: nx.DiGraph, source: set, owner: dict) -> dict[int, list[list[Word]]]:
    """Paths leaving `source` through transient vertices, grouped by the cyclic component they enter."""
    found: dict[int, list[list[Word]]] = {}
    stack = [[v, w] for v in sorted(source) for w in sorted(graph.successors(v)) if w not in source]
    while stack:
        path = stack.pop()
        head = path[-1]
        if head in owner:
            found.setdefault(owner[head], []).append(path)
            continue
        stack.extend(path + [w] for w in sorted(graph.successors(head)))
    for paths in found.values():
        paths.sort()
    return found


def sft_scheme(sft: Sft) -> OrbitScheme:
    """The orbit scheme of a subshift of finite type.

    Cyclic strongly connected components of the transition graph are the recurrent pieces. A point is described
    by its itinerary: the sequence of components it visits and the transient route between consecutive ones.
    Itineraries through single-cycle components are single orbits (one component or two) or families whose
    parameters count the turns made in each intermediate cycle. An itinerary through a component with more edges
    than vertices is a perfect class.

    Raises:
        ValueError: If the number of itineraries exceeds `piece_limit`.
    """
    graph = sft.graph
    components = sorted((c for c in nx.strongly_connected_components(graph) if _is_cyclic(graph, c)), key=min)
    owner = {v: i for i, c in enumerate(components) for v in c}
    rich = [graph.subgraph(c).number_of_edges() > len(c) for c in components]
    routes = {i: _routes(graph, c, owner) for i, c in enumerate(components)}
    limit = Container.config.get("piece_limit", 4096)

    itineraries: list[tuple] = []
    stack = [(i,) for i in range(len(components))]
    while stack:
        itinerary = stack.pop()
        itineraries.append(itinerary)
        if len(itineraries) > limit:
            raise ValueError(f"{sft.name}: more than {limit} orbit itineraries")
        for target, paths in routes[itinerary[-1]].items():
            for r in range(len(paths)):
                stack.append(itinerary + (r, target))

    def label(itinerary: tuple) -> str:
        parts = [f"C{itinerary[0]}"]
        for k in range(1, len(itinerary), 2):
            source, r, target = itinerary[k - 1], itinerary[k], itinerary[k + 1]
            suffix = f"#{r}" if len(routes[source][target]) > 1 else ""
            parts.append(f">{suffix}C{target}")
        return "".join(parts)

    def build_point(itinerary: tuple) -> Callable[[tuple[int, ...]], SymPoint]:
        def point(params: tuple[int, ...]) -> SymPoint:
            if len(itinerary) == 1:
                cycle = _cycle_order(graph, components[itinerary[0]], min(components[itinerary[0]]))
                return sft.cycle_point(tuple(v[-1] for v in cycle))
            walk: list[Word] = []
            first = routes[itinerary[0]][itinerary[2]][itinerary[1]]
            left = _cycle_order(graph, components[itinerary[0]], first[0])
            left = left[1:] + left[:1]
            for k in range(1, len(itinerary), 2):
                path = routes[itinerary[k - 1]][itinerary[k + 1]][itinerary[k]]
                if walk and walk[-1] != path[0]:
                    cycle = _cycle_order(graph, components[itinerary[k - 1]], walk[-1])
                    walk.extend(cycle[1 : cycle.index(path[0]) + 1] if path[0] in cycle[1:] else [])
                walk.extend(path[1:])
                if k + 2 < len(itinerary):
                    cycle = _cycle_order(graph, components[itinerary[k + 1]], path[-1])
                    turns = params[(k - 1) // 2]
                    walk.extend((cycle[1:] + cycle[:1]) * turns)
            entry = walk.pop()
            right = _cycle_order(graph, components[itinerary[-1]], entry)
            return EventuallyPeriodic(
                tuple(v[-1] for v in left), tuple(v[-1] for v in walk), tuple(v[-1] for v in right), 0
            )

        return point

    def build_span(point: Callable) -> Callable[[tuple[int, ...], int], int]:
        def span(params: tuple[int, ...], radius: int) -> int:
            x = point(params)
            return len(x.left) + len(x.center) + len(x.right) + radius + 1

        return span

    by_key = {itinerary: label(itinerary) for itinerary in itineraries}
    classes = []
    for itinerary in itineraries:
        cyclic = itinerary[0::2]
        subs = {
            by_key[itinerary[i : j + 1]]
            for i in range(0, len(itinerary), 2)
            for j in range(i, len(itinerary), 2)
            if (i, j) != (0, len(itinerary) - 1)
        }
        if any(rich[c] for c in cyclic):
            vertices = set().union(*(components[c] for c in cyclic))
            for k in range(1, len(itinerary), 2):
                vertices.update(routes[itinerary[k - 1]][itinerary[k + 1]][itinerary[k]])
            piece = graph.subgraph(vertices)
            classes.append(
                OrbitClass(
                    by_key[itinerary],
                    "perfect",
                    accumulates_on=frozenset(subs | {by_key[itinerary]}),
                    admits=_path_predicate(piece, sft.memory),
                )
            )
            continue
        params = max(len(cyclic) - 2, 0)
        point = build_point(itinerary)
        classes.append(
            OrbitClass(
                by_key[itinerary],
                "family" if params else "orbit",
                params=params,
                accumulates_on=frozenset(subs),
                point=point,
                span=build_span(point),
            )
        )
    Container.logger().info(msg=f"{sft.name}: orbit scheme with {len(classes)} classes")
    return OrbitScheme(sft.name, classes)


def _path_predicate(piece: nx.DiGraph, memory: int) -> Callable[[Word], bool]:
    def admits(word: Word) -> bool:
        if len(word) <= memory:
            return any(v[: len(word)] == word for v in piece.nodes)
        windows = [word[i : i + memory] for i in range(len(word) - memory + 1)]
        return all(v in piece for v in windows) and all(piece.has_edge(a, b) for a, b in zip(windows, windows[1:]))

    return admits
