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
Clopen subsets of a subshift of finite type.

A clopen set is stored as a window `[lo, hi]` together with the set of allowed words that may occupy it. Only
words of the subshift's language are kept, so emptiness is relative to the ambient subshift: a clopen is empty
exactly when no window word extends to a bi-infinite point. An empty window (`lo > hi`) holds either the empty
word (the whole space) or nothing.

Functions:
    cylinder(sft, word, offset) -> Clopen
    whole(sft) -> Clopen
    clopen_ops(a, b, op, k) -> Clopen | bool: Dispatches the Boolean and dynamical operations by name.
"""

from dataclasses import dataclass
from typing import Sequence

from dyadic_flows.subshifts.points import SymPoint, render_word
from dyadic_flows.subshifts.sft import Sft, Word


@dataclass(frozen=True, eq=False)
class Clopen:
    sft: Sft
    lo: int
    hi: int
    words: frozenset[Word]

    def __post_init__(self):
        length = max(self.hi - self.lo + 1, 0)
        if any(len(w) != length for w in self.words):
            raise ValueError(f"Clopen words must have length {length} to fill the window [{self.lo}, {self.hi}]")

    @classmethod
    def of(cls, sft: Sft, lo: int, hi: int, words) -> "Clopen":
        """Normalizes a window and a word set by dropping words outside the language."""
        if lo > hi:
            lo, hi = 0, -1
        language = sft.language(hi - lo + 1)
        return cls(sft, lo, hi, frozenset(tuple(w) for w in words) & language)

    @property
    def has_window(self) -> bool:
        return self.lo <= self.hi

    def extend(self, lo: int, hi: int) -> "Clopen":
        """The same set described on the larger window `[lo, hi]`."""
        if not self.has_window:
            return Clopen(self.sft, lo, hi, self.sft.language(hi - lo + 1) if self.words else frozenset())
        if lo > self.lo or hi < self.hi:
            raise ValueError(f"Window [{lo}, {hi}] does not contain [{self.lo}, {self.hi}]")
        if (lo, hi) == (self.lo, self.hi):
            return self
        return Clopen(self.sft, lo, hi, self.sft.extend_words(self.words, self.lo - lo, hi - self.hi))

    def _common(self, other: "Clopen") -> tuple["Clopen", "Clopen"]:
        if self.sft is not other.sft:
            raise ValueError(f"Clopen sets live in different subshifts: {self.sft.name}, {other.sft.name}")
        windows = [(c.lo, c.hi) for c in (self, other) if c.has_window]
        if not windows:
            return self, other
        lo, hi = min(w[0] for w in windows), max(w[1] for w in windows)
        return self.extend(lo, hi), other.extend(lo, hi)

    def union(self, other: "Clopen") -> "Clopen":
        a, b = self._common(other)
        return Clopen(self.sft, a.lo, a.hi, a.words | b.words)

    def intersect(self, other: "Clopen") -> "Clopen":
        a, b = self._common(other)
        return Clopen(self.sft, a.lo, a.hi, a.words & b.words)

    def difference(self, other: "Clopen") -> "Clopen":
        a, b = self._common(other)
        return Clopen(self.sft, a.lo, a.hi, a.words - b.words)

    def is_subset(self, other: "Clopen") -> bool:
        return self.difference(other).is_empty()

    def witness(self) -> str:
        """The least window word, placed at its window start, or "empty"."""
        if not self.words:
            return "empty"
        if not self.has_window:
            return "whole"
        return f"{render_word(min(self.words))}@{self.lo}"

    def record(self) -> dict:
        return {"window": [self.lo, self.hi], "words": sorted(render_word(w) for w in self.words)}

    @classmethod
    def from_record(cls, sft: Sft, data: dict) -> "Clopen":
        """Reads `record()` output; words are letter strings, space-separated when letters are longer."""
        lo, hi = (int(v) for v in data["window"])
        words = [tuple(w.split()) if " " in w else tuple(w) for w in data.get("words", [])]
        return cls.of(sft, lo, hi, words)

    def complement(self) -> "Clopen":
        return Clopen(self.sft, self.lo, self.hi, self.sft.language(max(self.hi - self.lo + 1, 0)) - self.words)

    def image_shift(self, k: int) -> "Clopen":
        """The image under `shift^k`: the window condition moves to `[lo - k, hi - k]`."""
        if not self.has_window:
            return self
        return Clopen(self.sft, self.lo - k, self.hi - k, self.words)

    def image_reversal(self) -> "Clopen":
        reversal = self.sft.reversal
        if reversal is None:
            raise ValueError(f"{self.sft.name}: no involution data for the reversal")
        if not self.has_window:
            return self
        lo, hi = reversal.window(self.lo, self.hi)
        return Clopen.of(self.sft, lo, hi, [reversal.word(w) for w in self.words])

    def is_empty(self) -> bool:
        return not self.words

    def is_whole(self) -> bool:
        return self.complement().is_empty()

    def contains(self, point: SymPoint) -> bool:
        if not self.has_window:
            return bool(self.words)
        return point.window(self.lo, self.hi) in self.words

    def __eq__(self, other) -> bool:
        if not isinstance(other, Clopen):
            return NotImplemented
        a, b = self._common(other)
        return a.words == b.words

    def __hash__(self) -> int:
        return hash((id(self.sft), self.is_empty()))

    __or__ = union
    __and__ = intersect
    __sub__ = difference

    def __invert__(self) -> "Clopen":
        return self.complement()

    def __str__(self) -> str:
        if not self.has_window:
            return "whole" if self.words else "empty"
        words = ", ".join(render_word(w) for w in sorted(self.words))
        return f"[{self.lo}, {self.hi}]{{{words}}}"


def cylinder(sft: Sft, word: Sequence[str], offset: int = 0) -> Clopen:
    """The cylinder of points reading `word` from index `offset` on."""
    word = tuple(word)
    return Clopen.of(sft, offset, offset + len(word) - 1, [word])


def whole(sft: Sft) -> Clopen:
    return Clopen(sft, 0, -1, frozenset({()}))


def clopen_ops(a: Clopen, b: Clopen | None = None, op: str = "union", k: int = 0) -> Clopen | bool:
    """Applies a named operation.

    Args:
        a: First operand.
        b: Second operand, for union and intersect.
        op: One of union, intersect, complement, image_shift, image_reversal, is_empty.
        k: Shift power for image_shift.

    Raises:
        ValueError: On an unknown operation or a missing second operand.
    """
    if op in ("union", "intersect"):
        if b is None:
            raise ValueError(f"Operation {op} needs two clopen sets")
        return a.union(b) if op == "union" else a.intersect(b)
    if op == "complement":
        return a.complement()
    if op == "image_shift":
        return a.image_shift(k)
    if op == "image_reversal":
        return a.image_reversal()
    if op == "is_empty":
        return a.is_empty()
    raise ValueError(f"Not implemented clopen operation: {op}")
