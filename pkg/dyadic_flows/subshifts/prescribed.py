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
Reversible subshifts with a prescribed number of isolated orbits.

Inside the reduced-words subshift on `{a, A, b, B}`, let M be the minimal subshift of the default substitution
and x its fixed point seeded `a.b`. With window lengths `l_0 = 2 < l_1 < ...`, the subshift `M_j` allows exactly
the words of length `l_j` of M; each `M_j` is closed under the reversal because the language of M is. The point
`x_j` follows x on the left, then a shortest detour all of whose `l_j`-windows are words of M but one of whose
`l_{j+1}`-windows is not, and then rejoins a shifted copy of x. So `x_j` lies in `M_j` but not in `M_{j+1}`, and
`l_{j+1}` is the first length for which such a detour exists.

The subshift `X_n` is the closure of M together with the orbits of `x_j` and `sigma(x_j)` for `j < n`; its
isolated points are exactly these `2n` orbits.
"""

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property

from dyadic_flows.common.ioc_container import Container
from dyadic_flows.common.measure_utils import trace_on
from dyadic_flows.common.model import Certificate
from dyadic_flows.subshifts.constructions import build_reduced
from dyadic_flows.subshifts.points import Lazy, SymPoint, render_word
from dyadic_flows.subshifts.schemes import OrbitClass, OrbitScheme
from dyadic_flows.subshifts.sft import InvAlphabet, Sft, Word
from dyadic_flows.subshifts.substitution import Substitution

REACH = 729
MAX_DETOUR = 8


@dataclass
class Splice:
    """A spliced point and the place of its defect."""

    point: Lazy
    detour: Word
    rejoin: int
    defect_start: int
    defect: Word

    @property
    def center(self) -> int:
        return self.defect_start + len(self.defect) // 2


@dataclass
class PrescribedRigidity:
    """The subshift `X_n` with its designated pieces.

    Attributes:
        n (int): Number of spliced points (each contributes two isolated orbits).
        ambient (Sft): The reduced-words subshift containing everything.
        substitution (Substitution): Generator of the minimal subshift M.
        base (Lazy): The fixed point of the substitution.
        lengths (list[int]): Window lengths `l_0, ..., l_n`.
        nested (list[Sft]): The subshifts `M_0, ..., M_n`.
        splices (list[Splice]): The points `x_0, ..., x_{n-1}`.
    """

    n: int
    ambient: Sft
    substitution: Substitution
    base: Lazy
    lengths: list[int] = field(default_factory=list)
    nested: list[Sft] = field(default_factory=list)
    splices: list[Splice] = field(default_factory=list)

    @property
    def name(self) -> str:
        return f"prescribed rigidity n={self.n}"

    def in_minimal(self, word: Word) -> bool:
        return tuple(word) in self.substitution.language(len(word))

    def point(self, j: int, reversed_: bool = False) -> SymPoint:
        """The spliced point `x_j` (or `sigma(x_j)`), shifted so that its defect sits near index 0."""
        centered = self.splices[j].point.shift(self.splices[j].center)
        return centered.reverse(self.ambient.reversal) if reversed_ else centered

    def _span(self, j: int):
        s = self.splices[j]
        reach = max(abs(s.center) + len(s.defect), abs(len(s.detour) + len(s.defect) - s.center))
        return lambda _params, radius: reach + radius + 2

    @cached_property
    def scheme(self) -> OrbitScheme:
        classes = [OrbitClass("M", "perfect", accumulates_on=frozenset({"M"}), admits=self.in_minimal)]
        for j in range(self.n):
            for reversed_, label in ((False, f"x{j}"), (True, f"sigma(x{j})")):
                classes.append(
                    OrbitClass(
                        label,
                        accumulates_on=frozenset({"M"}),
                        point=lambda _params, j=j, reversed_=reversed_: self.point(j, reversed_),
                        span=self._span(j),
                    )
                )
        return OrbitScheme(self.name, classes)

    def certificates(self) -> list[Certificate]:
        """Structural checks on the nested family and the spliced points."""
        found = []
        bad = self.substitution.is_reversal_invariant(self.ambient.reversal, self.lengths[-1])
        found.append(
            Certificate(
                name="prescribed.minimal_reversal_invariant",
                passed=bad is None,
                witness=render_word(bad) if bad else "",
            )
        )
        for j, s in enumerate(self.splices):
            lo, hi = -len(s.defect) - 2, len(s.detour) + len(s.defect) + 2
            window = s.point.window(lo, hi)
            inside = self.nested[j].is_allowed(window)
            outside = not self.nested[j + 1].is_allowed(window)
            found.append(
                Certificate(
                    name=f"prescribed.x{j}_in_M{j}_not_M{j + 1}",
                    passed=inside and outside,
                    witness=render_word(s.defect),
                    details={"defect_start": s.defect_start, "detour": len(s.detour)},
                )
            )
        return found


def _nested_sft(alphabet: InvAlphabet, substitution: Substitution, length: int, reversal, name: str) -> Sft:
    """The subshift whose words of length `length` are those of the substitution subshift."""
    forbidden = []
    for k in range(1, length):
        for u in substitution.language(k):
            for a in alphabet.letters:
                if u + (a,) not in substitution.language(k + 1):
                    forbidden.append(u + (a,))
    return Sft(alphabet, forbidden, reversal, name=name)


def _splice(base: Lazy, substitution: Substitution, letters, length: int, defect_length: int) -> Splice | None:
    """Breadth-first search for the shortest detour with an `defect_length`-window outside the language."""
    keep = defect_length - 1
    start = base.window(-keep, -1)
    targets = {}
    for q in range(REACH, -1, -1):
        targets[base.window(q - keep + 1, q)] = q
    allowed = substitution.language(length)
    clean = substitution.language(defect_length)
    root = (start, False)
    parent = {root: None}
    queue = deque([root])
    while queue:
        state = queue.popleft()
        tail, flagged = state
        for a in letters:
            if tail[keep - length + 1 :] + (a,) not in allowed:
                continue
            nxt = (tail[1:] + (a,), flagged or tail + (a,) not in clean)
            if nxt in parent:
                continue
            parent[nxt] = (state, a)
            if nxt[1] and nxt[0] in targets:
                detour = []
                node = nxt
                while parent[node] is not None:
                    node, letter = parent[node]
                    detour.append(letter)
                detour = tuple(reversed(detour))
                return _spliced_point(base, substitution, detour, targets[nxt[0]], defect_length)
            queue.append(nxt)
    return None


def _spliced_point(base: Lazy, substitution: Substitution, detour: Word, rejoin: int, defect_length: int) -> Splice:
    size = len(detour)

    def oracle(n: int) -> str:
        if n < 0:
            return base.letter(n)
        if n < size:
            return detour[n]
        return base.letter(rejoin + 1 + n - size)

    point = Lazy(oracle, name=f"splice({render_word(detour)})")
    for start in range(-defect_length, size + 1):
        word = point.window(start, start + defect_length - 1)
        if word not in substitution.language(defect_length):
            return Splice(point, detour, rejoin, start, word)
    raise ValueError(f"Detour {render_word(detour)} has no defect window")


@trace_on("Prescribed rigidity construction", measure_time=True)
def build_prescribed_rigidity(n: int, substitution: Substitution | None = None) -> PrescribedRigidity:
    """Builds `X_n` with exactly `2n` isolated orbits.

    Args:
        n: Number of spliced points, between 1 and the configured `prescribed_max_n`.
        substitution: Generator of the minimal subshift; defaults to the substitution of this module.

    Raises:
        ValueError: If n is out of range or no detour exists within the search bounds.
    """
    max_n = Container.config.get("prescribed_max_n", 4)
    if not 1 <= n <= max_n:
        raise ValueError(f"n must lie between 1 and {max_n}, got {n}")
    alphabet = InvAlphabet.from_pairs(["a", "A", "b", "B"], [("a", "A"), ("b", "B")])
    ambient = build_reduced(alphabet)
    substitution = substitution or Substitution.default()
    base = substitution.fixed_point("a", "b")
    result = PrescribedRigidity(n, ambient, substitution, base, lengths=[2])
    letters = sorted(alphabet.letters)
    for j in range(n):
        length = result.lengths[-1]
        for defect_length in range(length + 1, length + MAX_DETOUR + 1):
            splice = _splice(base, substitution, letters, length, defect_length)
            if splice is not None:
                break
        else:
            raise ValueError(f"No detour found for x{j} above window length {length}")
        result.splices.append(splice)
        result.lengths.append(defect_length)
        Container.logger().info(
            msg=f"x{j}: detour of length {len(splice.detour)} with defect {render_word(splice.defect)}"
        )
    result.nested = [
        _nested_sft(alphabet, substitution, length, ambient.reversal, f"M{j}") for j, length in enumerate(result.lengths)
    ]
    return result
