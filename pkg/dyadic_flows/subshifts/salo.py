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
Countable subshifts of prescribed Cantor-Bendixson rank built from countable sets of one-sided sequences.

A countable closed set C of one-sided sequences over an alphabet B is described by block patterns such as
`b^n c^m d^oo`: each block is a letter with a fixed exponent, a named parameter, or `oo` (last block only).
Every sequence `c = (c_0, c_1, ...)` of C is encoded as the point `x_c` over `B + {*}` that reads `c_n` at index
`2^n` and `*` elsewhere. The subshift is the closure of the orbits of these points. Besides the coded orbits it
contains the point `*^oo` and the points with a single non-`*` letter, which arise when a shift centers the
window on a far mark.

With `alpha_0` the rank of C (the largest number of parameters in a pattern, plus one), the subshift has rank
`alpha_0 + 2`.
"""

import math
from dataclasses import dataclass
from functools import cached_property

from dyadic_flows.subshifts.points import EventuallyPeriodic, Lazy, SymPoint
from dyadic_flows.subshifts.schemes import OrbitClass, OrbitScheme

STAR = "*"
INFINITY = "oo"

Block = tuple[str, int | str]
Pattern = tuple[Block, ...]


def parse_pattern(blocks) -> Pattern:
    """Parses `[[letter, exponent], ...]`, with exponents given as integers, parameter names or "oo"."""
    pattern = []
    for letter, exponent in blocks:
        if isinstance(exponent, int) and exponent < 0:
            raise ValueError(f"Negative exponent in block {letter}^{exponent}")
        pattern.append((str(letter), exponent if isinstance(exponent, int) else str(exponent)))
    if not pattern or pattern[-1][1] != INFINITY:
        raise ValueError(f"Pattern {render_pattern(pattern)} must end with an infinite block")
    if any(exponent == INFINITY for _, exponent in pattern[:-1]):
        raise ValueError(f"Pattern {render_pattern(pattern)} has an infinite block before its end")
    return tuple(pattern)


def render_pattern(pattern) -> str:
    return " ".join(f"{letter}^{exponent}" for letter, exponent in pattern)


def pattern_params(pattern: Pattern) -> list[str]:
    names = []
    for _, exponent in pattern:
        if isinstance(exponent, str) and exponent != INFINITY and exponent not in names:
            names.append(exponent)
    return names


def _shape(pattern: Pattern) -> tuple:
    """The pattern with parameter names forgotten and empty fixed blocks dropped."""
    return tuple(
        (letter, exponent if isinstance(exponent, int) or exponent == INFINITY else "#")
        for letter, exponent in pattern
        if exponent != 0
    )


def limits(pattern: Pattern) -> list[Pattern]:
    """Patterns reached when some parameters go to infinity: the first such block becomes infinite."""
    found = []
    for i, (letter, exponent) in enumerate(pattern[:-1]):
        if isinstance(exponent, str):
            found.append(pattern[:i] + ((letter, INFINITY),))
    return found


def sequence(pattern: Pattern, values: tuple[int, ...]):
    """The one-sided sequence of a pattern for the given parameter values, as a function of the index."""
    names = pattern_params(pattern)
    value_of = dict(zip(names, values))
    blocks = []
    for letter, exponent in pattern:
        if exponent == INFINITY:
            blocks.append((letter, math.inf))
        else:
            blocks.append((letter, exponent if isinstance(exponent, int) else value_of[exponent]))

    def at(n: int) -> str:
        for letter, length in blocks:
            if n < length:
                return letter
            n -= length
        raise ValueError("Sequence patterns end with an infinite block")

    return at


def coded_point(pattern: Pattern, values: tuple[int, ...]) -> Lazy:
    at = sequence(pattern, values)

    def oracle(n: int) -> str:
        if n >= 1 and n & (n - 1) == 0:
            return at(n.bit_length() - 1)
        return STAR

    return Lazy(oracle, name=f"x[{render_pattern(pattern)}]{list(values) if values else ''}")


def _unbounded_letters(pattern: Pattern) -> set[str]:
    """Letters seen at arbitrarily large indices over the members of a pattern."""
    letters = {pattern[-1][0]}
    moving = False
    for letter, exponent in pattern[:-1]:
        moving = moving or isinstance(exponent, str)
        if moving and exponent != 0:
            letters.add(letter)
    return letters


def _param_bound(radius: int) -> int:
    return max(6 * radius + 1, 2).bit_length() + 1


def _coded_span(_params, radius: int) -> int:
    return 5 * radius + 1


@dataclass(frozen=True)
class SaloFamily:
    """The subshift coding a countable closed set of sequences.

    Attributes:
        letters (tuple[str, ...]): The alphabet B of the coded sequences.
        patterns (tuple[Pattern, ...]): Patterns describing C; closed under parameter limits.
        name (str): Display name.
    """

    letters: tuple[str, ...]
    patterns: tuple[Pattern, ...]
    name: str = "salo"

    def __post_init__(self):
        if STAR in self.letters:
            raise ValueError(f"The letter {STAR} is reserved for the background")
        shapes = {_shape(p) for p in self.patterns}
        for pattern in self.patterns:
            unknown = [letter for letter, _ in pattern if letter not in self.letters]
            if unknown:
                raise ValueError(f"Pattern {render_pattern(pattern)} uses letters outside {self.letters}: {unknown}")
            for limit in limits(pattern):
                if _shape(limit) not in shapes:
                    raise ValueError(
                        f"Descriptor is not closed: {render_pattern(pattern)} accumulates on {render_pattern(limit)}"
                    )

    @classmethod
    def from_config(cls, letters, patterns, name: str = "salo") -> "SaloFamily":
        return cls(tuple(str(a) for a in letters), tuple(parse_pattern(p) for p in patterns), name)

    @property
    def alphabet(self) -> tuple[str, ...]:
        return self.letters + (STAR,)

    @property
    def descriptor_rank(self) -> int:
        """`alpha_0`: the Cantor-Bendixson rank of the coded set."""
        return max(len(pattern_params(p)) for p in self.patterns) + 1

    def _class_name(self, pattern: Pattern) -> str:
        return f"x[{render_pattern(pattern)}]"

    @cached_property
    def scheme(self) -> OrbitScheme:
        shapes = {_shape(p): p for p in self.patterns}
        singles = set()
        classes = []
        for pattern in self.patterns:
            letters = _unbounded_letters(pattern)
            singles |= letters
            targets = {self._class_name(shapes[_shape(limit)]) for limit in limits(pattern)}
            targets |= {f"single[{a}]" for a in letters} | {STAR}
            params = len(pattern_params(pattern))
            # nonempty parameter blocks; a collapsed block can land on a limit pattern
            classes.append(
                OrbitClass(
                    self._class_name(pattern),
                    "family" if params else "orbit",
                    params=params,
                    accumulates_on=frozenset(targets),
                    point=lambda values, pattern=pattern: coded_point(pattern, values),
                    span=_coded_span,
                    param_bound=_param_bound,
                    base=(1,) * params,
                )
            )
        for letter in sorted(singles):
            classes.append(
                OrbitClass(
                    f"single[{letter}]",
                    accumulates_on=frozenset({STAR}),
                    point=lambda _values, letter=letter: EventuallyPeriodic((STAR,), (letter,), (STAR,), 0),
                    span=lambda _params, radius: radius + 1,
                )
            )
        classes.append(
            OrbitClass(STAR, point=lambda _values: EventuallyPeriodic((STAR,), (), (STAR,), 0), span=lambda *_: 1)
        )
        return OrbitScheme(self.name, classes)

    def in_code_window(self, point: SymPoint) -> bool:
        """Membership in the clopen set of coded points: marks at indices 1, 2 and 4, none at 3."""
        return all(point.letter(n) != STAR for n in (1, 2, 4)) and point.letter(3) == STAR
