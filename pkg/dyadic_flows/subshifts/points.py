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
Symbolic points of a subshift.

Two presentations are supported. `EventuallyPeriodic` points are exact: they are closed under the shift and the
reversal, and equality between them is decidable. `Lazy` points wrap a window oracle `n -> letter`; the oracle
must be pure (repeated queries agree), and the wrapper memoizes answers behind a lock so that one point can be
read from several worker threads.

The shift acts by `shift(x)_n = x_{n+1}`, so `shift_apply(x, k)` moves the letter at index `k` to index 0.
"""

import math
import threading
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Callable, Sequence

Word = tuple[str, ...]


def render_word(word: Sequence[str]) -> str:
    if any(len(letter) != 1 for letter in word):
        return " ".join(word)
    return "".join(word)


def primitive_root(word: Word) -> Word:
    n = len(word)
    for d in range(1, n + 1):
        if n % d == 0 and word[:d] * (n // d) == word:
            return word[:d]
    return word


class SymPoint(ABC):
    """A bi-infinite sequence read through finite windows."""

    @abstractmethod
    def letter(self, n: int) -> str:
        pass

    def window(self, lo: int, hi: int) -> Word:
        return tuple(self.letter(n) for n in range(lo, hi + 1))

    @abstractmethod
    def shift(self, k: int) -> "SymPoint":
        pass

    @abstractmethod
    def reverse(self, reversal) -> "SymPoint":
        pass


@dataclass(frozen=True, eq=False)
class EventuallyPeriodic(SymPoint):
    """The point `...left left center right right...` with `center[0]` at index `offset`.

    Attributes:
        left (tuple): Left cycle; `left[-1]` sits at index `offset - 1`.
        center (tuple): Finite middle word, possibly empty.
        right (tuple): Right cycle; `right[0]` sits at index `offset + len(center)`.
        offset (int): Index of the first center letter.
    """

    left: Word
    center: Word
    right: Word
    offset: int = 0

    def __post_init__(self):
        if not self.left or not self.right:
            raise ValueError("Eventually periodic points need non-empty left and right cycles")
        object.__setattr__(self, "left", tuple(self.left))
        object.__setattr__(self, "center", tuple(self.center))
        object.__setattr__(self, "right", tuple(self.right))

    def letter(self, n: int) -> str:
        start = self.offset + len(self.center)
        if n >= start:
            return self.right[(n - start) % len(self.right)]
        if n >= self.offset:
            return self.center[n - self.offset]
        return self.left[(n - self.offset) % len(self.left)]

    def shift(self, k: int) -> "EventuallyPeriodic":
        return EventuallyPeriodic(self.left, self.center, self.right, self.offset - k)

    def reverse(self, reversal) -> "EventuallyPeriodic":
        return EventuallyPeriodic(
            reversal.word(self.right),
            reversal.word(self.center),
            reversal.word(self.left),
            reversal.center - self.offset - len(self.center) + 1,
        )

    def _span(self, other: "EventuallyPeriodic") -> tuple[int, int]:
        lo = min(self.offset - len(self.left), other.offset - len(other.left))
        hi = max(self.offset + len(self.center) + len(self.right), other.offset + len(other.center) + len(other.right))
        return lo - math.lcm(len(self.left), len(other.left)), hi + math.lcm(len(self.right), len(other.right))

    def __eq__(self, other) -> bool:
        if not isinstance(other, EventuallyPeriodic):
            return NotImplemented
        lo, hi = self._span(other)
        return self.window(lo, hi) == other.window(lo, hi)

    def __hash__(self) -> int:
        return hash((tuple(sorted(primitive_root(self.left))), tuple(sorted(primitive_root(self.right)))))

    def least_period(self) -> int | None:
        """The least period when the point is periodic, None otherwise."""
        p = len(primitive_root(self.left))
        if len(primitive_root(self.right)) != p:
            return None
        return p if self.shift(p) == self else None

    def __str__(self) -> str:
        middle = f"[{render_word(self.center)}]@{self.offset}"
        return f"({render_word(self.left)})^oo {middle} ({render_word(self.right)})^oo"


class Lazy(SymPoint):
    """A point given by a pure window oracle.

    Args:
        oracle: Maps an index to the letter at that index; must return the same letter on every call.
        name: Description used when rendering the point as a witness.
    """

    def __init__(self, oracle: Callable[[int], str], name: str = "lazy"):
        self._oracle = oracle
        self._memo: dict[int, str] = {}
        self._lock = threading.Lock()
        self.name = name

    def letter(self, n: int) -> str:
        with self._lock:
            if n in self._memo:
                return self._memo[n]
        value = self._oracle(n)
        with self._lock:
            return self._memo.setdefault(n, value)

    def shift(self, k: int) -> "Lazy":
        if k == 0:
            return self
        return Lazy(lambda n: self.letter(n + k), f"shift({self.name}, {k})")

    def reverse(self, reversal) -> "Lazy":
        return Lazy(lambda n: reversal.tau(self.letter(reversal.center - n)), f"reverse({self.name})")

    def __str__(self) -> str:
        return f"{self.name}: ...{render_word(self.window(-8, -1))}.{render_word(self.window(0, 8))}..."


def shift_apply(x: SymPoint, power: int) -> SymPoint:
    """Applies `shift^power`."""
    return x.shift(power)


def reversal(x: SymPoint, sft) -> SymPoint:
    """Applies the reversal of `sft` (or of a `Reversal` passed directly).

    Raises:
        ValueError: If the subshift carries no involution data.
    """
    data = getattr(sft, "reversal", sft)
    if data is None:
        raise ValueError(f"{getattr(sft, 'name', sft)}: no involution data for the reversal")
    return x.reverse(data)
