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
Constant-length substitutions and the minimal subshifts they generate.

The default substitution on the reduced alphabet `{a, A, b, B}` is

    a -> aba,  b -> bAb,  A -> ABA,  B -> BaB.

It is primitive, every image starts and ends with its letter, and it commutes with the formal-inverse reversal
(the image of `a^{-1}` is the formal inverse of the image of `a`), so its subshift is closed under the reversal.
Its words avoid `aa`, `bb`, `AA` and `BB`, and in particular every factor `x x^{-1}`.
"""

from dataclasses import dataclass
from functools import cached_property, lru_cache

from dyadic_flows.subshifts.points import Lazy
from dyadic_flows.subshifts.sft import Word

DEFAULT_RULES = {"a": "aba", "b": "bAb", "A": "ABA", "B": "BaB"}


@dataclass(frozen=True)
class Substitution:
    """A substitution whose images all have the same length."""

    rules: tuple[tuple[str, Word], ...]

    def __post_init__(self):
        lengths = {len(image) for _, image in self.rules}
        if len(lengths) != 1 or 0 in lengths:
            raise ValueError(f"Substitution images must share one positive length, got {sorted(lengths)}")
        letters = set(self.table)
        stray = {a for _, image in self.rules for a in image} - letters
        if stray:
            raise ValueError(f"Substitution images use letters without a rule: {sorted(stray)}")

    @classmethod
    def from_mapping(cls, rules: dict[str, str | Word]) -> "Substitution":
        return cls(tuple((letter, tuple(image)) for letter, image in rules.items()))

    @classmethod
    def default(cls) -> "Substitution":
        return cls.from_mapping(DEFAULT_RULES)

    @cached_property
    def table(self) -> dict[str, Word]:
        return dict(self.rules)

    @property
    def length(self) -> int:
        return len(self.rules[0][1])

    def apply(self, word: Word, times: int = 1) -> Word:
        for _ in range(times):
            word = tuple(a for letter in word for a in self.table[letter])
        return word

    def right_letter(self, seed: str, n: int) -> str:
        """Letter `n >= 0` of the right-infinite fixed point starting with `seed`."""
        digits = []
        while n:
            n, digit = divmod(n, self.length)
            digits.append(digit)
        letter = seed
        for digit in reversed(digits):
            letter = self.table[letter][digit]
        return letter

    def left_letter(self, seed: str, n: int) -> str:
        """Letter `n >= 0` counted from the right end of the left-infinite fixed point ending with `seed`."""
        digits = []
        while n:
            n, digit = divmod(n, self.length)
            digits.append(digit)
        letter = seed
        for digit in reversed(digits):
            letter = self.table[letter][self.length - 1 - digit]
        return letter

    def fixed_point(self, left: str, right: str) -> Lazy:
        """The two-sided fixed point reading `left` at index -1 and `right` at index 0.

        Raises:
            ValueError: If the seeds are not preserved, or `left right` is not a word of the subshift.
        """
        if self.table[left][-1] != left or self.table[right][0] != right:
            raise ValueError(f"Seeds {left}.{right} are not fixed by the substitution")
        if (left, right) not in self.language(2):
            raise ValueError(f"Seed {left}{right} is not a word of the substitution subshift")

        def oracle(n: int) -> str:
            return self.right_letter(right, n) if n >= 0 else self.left_letter(left, -1 - n)

        return Lazy(oracle, name=f"fixed point {left}.{right}")

    @cached_property
    def _pairs(self) -> frozenset[Word]:
        start = next(iter(self.table))
        found = {w for w in _factors(self.table[start], 2)}
        while True:
            grown = found | {f for w in found for f in _factors(self.apply(w), 2)}
            if grown == found:
                return frozenset(found)
            found = grown

    @lru_cache(maxsize=64)
    def language(self, length: int) -> frozenset[Word]:
        """Words of the given length of the generated subshift (assumes primitivity)."""
        if length <= 2:
            return frozenset(w[:length] for w in self._pairs)
        times = 0
        while self.length**times < length:
            times += 1
        return frozenset(f for w in self._pairs for f in _factors(self.apply(w, times), length))

    def is_reversal_invariant(self, reversal, up_to: int) -> Word | None:
        """Returns a word whose reversal image is missing from the language, or None."""
        for length in range(1, up_to + 1):
            words = self.language(length)
            for w in sorted(words):
                if reversal.word(w) not in words:
                    return w
        return None


def _factors(word: Word, length: int) -> set[Word]:
    return {word[i : i + length] for i in range(len(word) - length + 1)}
