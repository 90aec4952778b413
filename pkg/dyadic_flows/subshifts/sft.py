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
Subshifts of finite type over alphabets with an involution.

A subshift is given by a finite list of forbidden words. It is presented by its memory-m transition graph: the
vertices are the allowed words of length m (m = longest forbidden word minus one), the edges the allowed words of
length m + 1. The graph is trimmed so that every vertex lies on a bi-infinite path, which makes every path in the
graph a word of the language and keeps the strongly connected components meaningful.

Words are tuples of letters; letters are strings, so doubled alphabets can use tagged names such as "0+".

Classes:
    InvAlphabet: Letters with an involution `a -> a^{-1}`.
    Reversal: Sliding-block reversal data, `sigma(x)_n = tau(x_{center - n})`.
    Sft: The subshift, its trimmed transition graph and its language.

Usage:
    alphabet = InvAlphabet.from_pairs(["a", "A", "b", "B"], [("a", "A"), ("b", "B")])
    sft = Sft(alphabet, forbidden=[("a", "A"), ("A", "a"), ("b", "B"), ("B", "b")])
    sft.is_allowed(("a", "b", "A"))
"""

import itertools
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import networkx as nx

from dyadic_flows.common.ioc_container import Container
from dyadic_flows.subshifts.points import EventuallyPeriodic, SymPoint, primitive_root, render_word

Word = tuple[str, ...]


def min_rotation(word: Word) -> Word:
    return min(word[i:] + word[:i] for i in range(len(word))) if word else word


@dataclass(frozen=True)
class InvAlphabet:
    """A finite alphabet with an involution.

    Attributes:
        letters (tuple[str, ...]): The letters, in display order.
        pairs (tuple[tuple[str, str], ...]): Swapped pairs; letters outside every pair are fixed.
    """

    letters: tuple[str, ...]
    pairs: tuple[tuple[str, str], ...] = ()

    def __post_init__(self):
        if len(set(self.letters)) != len(self.letters):
            raise ValueError(f"Alphabet has repeated letters: {self.letters}")
        seen = set()
        for a, b in self.pairs:
            for letter in (a, b):
                if letter not in self.letters:
                    raise ValueError(f"Involution pair ({a}, {b}) uses a letter outside the alphabet")
            if a in seen or b in seen:
                raise ValueError(f"Letter in ({a}, {b}) appears in two involution pairs")
            seen.update((a, b))

    @classmethod
    def from_pairs(cls, letters: Iterable[str], pairs: Iterable[Sequence[str]] = ()) -> "InvAlphabet":
        return cls(tuple(str(a) for a in letters), tuple((str(a), str(b)) for a, b in pairs))

    @cached_property
    def mapping(self) -> dict[str, str]:
        inv = {a: a for a in self.letters}
        for a, b in self.pairs:
            inv[a], inv[b] = b, a
        return inv

    def inverse(self, letter: str) -> str:
        return self.mapping[letter]

    def formal_inverse(self, word: Sequence[str]) -> Word:
        return tuple(self.mapping[a] for a in reversed(word))

    @property
    def fixed_point_free(self) -> bool:
        return all(self.mapping[a] != a for a in self.letters)

    def __len__(self) -> int:
        return len(self.letters)


@dataclass(frozen=True)
class Reversal:
    """Sliding-block reversal `sigma(x)_n = tau(x_{center - n})`.

    Any such map is an involution conjugating the shift to its inverse, provided `tau` is an involution.
    """

    pairs: tuple[tuple[str, str], ...]
    center: int = -1

    @classmethod
    def formal_inverse(cls, alphabet: InvAlphabet, center: int = -1) -> "Reversal":
        return cls(alphabet.pairs, center)

    @cached_property
    def mapping(self) -> dict[str, str]:
        tau = {}
        for a, b in self.pairs:
            tau[a], tau[b] = b, a
        return tau

    def tau(self, letter: str) -> str:
        return self.mapping.get(letter, letter)

    def word(self, word: Sequence[str]) -> Word:
        """Image of a window word: the letters of `[lo, hi]` land on `[center - hi, center - lo]`, reversed."""
        return tuple(self.tau(a) for a in reversed(word))

    def window(self, lo: int, hi: int) -> tuple[int, int]:
        return self.center - hi, self.center - lo


class Sft:
    """A subshift of finite type with an optional reversal.

    Args:
        alphabet: The alphabet with its involution.
        forbidden: Forbidden words.
        reversal: Sliding-block reversal data; required by the reversibility checks.
        name: Display name used in reports.

    Raises:
        ValueError: On empty forbidden words, unknown letters, or a reversal whose letter map leaves the alphabet.
    """

    def __init__(
        self,
        alphabet: InvAlphabet,
        forbidden: Iterable[Sequence[str]] = (),
        reversal: Reversal | None = None,
        name: str = "sft",
    ):
        self.alphabet = alphabet
        self.forbidden = frozenset(tuple(str(a) for a in w) for w in forbidden)
        self.reversal = reversal
        self.name = name
        for w in self.forbidden:
            if not w:
                raise ValueError(f"{name}: the empty word cannot be forbidden")
            unknown = [a for a in w if a not in alphabet.letters]
            if unknown:
                raise ValueError(f"{name}: forbidden word {render_word(w)} uses unknown letters {unknown}")
        if reversal is not None:
            outside = [a for pair in reversal.pairs for a in pair if a not in alphabet.letters]
            if outside:
                raise ValueError(f"{name}: reversal maps letters outside the alphabet: {outside}")
        self.memory = max(1, max((len(w) for w in self.forbidden), default=1) - 1)
        self._forbidden_lengths = sorted({len(w) for w in self.forbidden})
        self._languages: dict[int, frozenset[Word]] = {}

    @classmethod
    def from_allowed_words(
        cls,
        alphabet: InvAlphabet,
        allowed: Iterable[Sequence[str]],
        reversal: Reversal | None = None,
        name: str = "sft",
    ) -> "Sft":
        """Builds the subshift whose words of one fixed length are exactly `allowed`."""
        allowed = {tuple(w) for w in allowed}
        lengths = {len(w) for w in allowed}
        if len(lengths) != 1:
            raise ValueError(f"{name}: allowed words must share one length, got {sorted(lengths)}")
        length = lengths.pop()
        forbidden = [w for w in itertools.product(alphabet.letters, repeat=length) if w not in allowed]
        return cls(alphabet, forbidden, reversal, name)

    @classmethod
    def from_edges(
        cls,
        alphabet: InvAlphabet,
        edges: Iterable[Sequence[str]],
        reversal: Reversal | None = None,
        name: str = "sft",
    ) -> "Sft":
        """Builds the vertex shift on the letters with the given allowed transitions."""
        return cls.from_allowed_words(alphabet, [(str(a), str(b)) for a, b in edges], reversal, name)

    def __repr__(self) -> str:
        return f"Sft({self.name}, letters={len(self.alphabet)}, forbidden={len(self.forbidden)})"

    def is_clean(self, word: Sequence[str]) -> bool:
        """True when `word` contains no forbidden factor (it may still fail to extend to a point)."""
        word = tuple(word)
        for length in self._forbidden_lengths:
            for i in range(len(word) - length + 1):
                if word[i : i + length] in self.forbidden:
                    return False
        return True

    @cached_property
    def graph(self) -> nx.DiGraph:
        """The trimmed memory-m transition graph; edges carry the (m+1)-word and its last letter."""
        m = self.memory
        graph = nx.DiGraph()
        stack: list[Word] = [()]
        while stack:
            word = stack.pop()
            if len(word) == m + 1:
                graph.add_edge(word[:-1], word[1:], word=word, label=word[-1])
                continue
            for a in self.alphabet.letters:
                extended = word + (a,)
                if self.is_clean(extended):
                    stack.append(extended)
        trimmed = True
        while trimmed:
            stranded = [v for v in graph if graph.in_degree(v) == 0 or graph.out_degree(v) == 0]
            graph.remove_nodes_from(stranded)
            trimmed = bool(stranded)
        if graph.number_of_nodes() == 0:
            Container.logger().warning(msg=f"{self.name}: the subshift is empty")
        return graph

    @property
    def vertices(self) -> list[Word]:
        return sorted(self.graph.nodes)

    @property
    def is_empty(self) -> bool:
        return self.graph.number_of_nodes() == 0

    def language(self, length: int) -> frozenset[Word]:
        """Allowed words of the given length (factors of points of the subshift)."""
        if length in self._languages:
            return self._languages[length]
        m = self.memory
        if length <= m:
            words = frozenset(v[:length] for v in self.graph.nodes)
        else:
            words = frozenset(
                w + (self.graph.edges[w[-m:], succ]["label"],)
                for w in self.language(length - 1)
                for succ in self.graph.successors(w[-m:])
            )
        self._languages[length] = words
        return words

    def extend_words(self, words: Iterable[Sequence[str]], left: int, right: int) -> frozenset[Word]:
        """All allowed words that read one of `words` after `left` letters and before `right` more.

        Words of at least `memory` letters are extended along the transition graph; shorter ones are matched
        against the language of the final length.
        """
        words = {tuple(w) for w in words}
        if not words:
            return frozenset()
        m = self.memory
        length = len(next(iter(words)))
        if length < m:
            return frozenset(w for w in self.language(length + left + right) if w[left : left + length] in words)
        graph = self.graph
        current = {w for w in words if self.is_allowed(w)}
        for _ in range(right):
            current = {w + (graph.edges[w[-m:], succ]["label"],) for w in current for succ in graph.successors(w[-m:])}
        for _ in range(left):
            current = {graph.edges[pred, w[:m]]["word"][:1] + w for w in current for pred in graph.predecessors(w[:m])}
        return frozenset(current)

    def is_allowed(self, word: Sequence[str]) -> bool:
        word = tuple(word)
        m = self.memory
        if len(word) <= m:
            return word in self.language(len(word))
        windows = [word[i : i + m] for i in range(len(word) - m + 1)]
        return all(v in self.graph for v in windows) and all(
            self.graph.has_edge(a, b) for a, b in zip(windows, windows[1:])
        )

    def contains(self, point: SymPoint, radius: int = 32) -> bool:
        """Membership of a point.

        Eventually periodic points are decided exactly; for lazy points only the window `[-radius, radius]` is
        inspected.
        """
        if isinstance(point, EventuallyPeriodic):
            lo = point.offset - len(point.left) - self.memory - 1
            hi = point.offset + len(point.center) + len(point.right) + self.memory + 1
            return self.is_clean(point.window(lo, hi))
        return self.is_allowed(point.window(-radius, radius))

    def is_reversal_invariant(self) -> Word | None:
        """Returns an allowed word whose reversal image is not allowed, or None when the language is closed."""
        if self.reversal is None:
            raise ValueError(f"{self.name}: no involution data for the reversal")
        for w in sorted(self.language(self.memory + 1)):
            if not self.is_allowed(self.reversal.word(w)):
                return w
        return None

    def periodic_words(self, period: int) -> list[Word]:
        """Primitive words, one per periodic orbit of least period at most `period`, in minimal rotation."""
        found = []
        for q in range(1, period + 1):
            reps = math.ceil((self.memory + 1) / q) + 1
            for w in sorted(self.language(q)):
                if primitive_root(w) == w and min_rotation(w) == w and self.is_clean(w * reps):
                    found.append(w)
        return found

    def cycle_point(self, word: Sequence[str]) -> EventuallyPeriodic:
        word = tuple(word)
        point = EventuallyPeriodic(word, (), word, 0)
        if not self.contains(point):
            raise ValueError(f"{self.name}: the periodic point ({render_word(word)})^oo is not allowed")
        return point

    def _left_vertex(self, word: Word) -> Word:
        reps = math.ceil(self.memory / len(word)) + 1
        return (word * reps)[-self.memory :]

    def _right_vertex(self, word: Word) -> Word:
        reps = math.ceil(self.memory / len(word)) + 1
        return (word * reps)[: self.memory]

    def path_letters(self, path: Sequence[Word]) -> Word:
        return tuple(self.graph.edges[a, b]["label"] for a, b in zip(path, path[1:]))

    def splice(self, left: Sequence[str], right: Sequence[str], rng=None, walk: int = 0) -> EventuallyPeriodic | None:
        """An eventually periodic point asymptotic to `left^oo` on the left and to a rotation of `right^oo`.

        The connecting word follows an optional random walk of `walk` steps and then a shortest path of the
        transition graph. Returns None when the right cycle is unreachable.
        """
        left, right = tuple(left), tuple(right)
        start, target = self._left_vertex(left), self._right_vertex(right)
        if start not in self.graph or target not in self.graph:
            return None
        path = [start]
        for _ in range(walk if rng is not None else 0):
            path.append(rng.choice(sorted(self.graph.successors(path[-1]))))
        try:
            tail = nx.shortest_path(self.graph, path[-1], target)
        except nx.NetworkXNoPath:
            return None
        path.extend(tail[1:])
        shift = self.memory % len(right)
        return EventuallyPeriodic(left, self.path_letters(path), right[shift:] + right[:shift], 0)

    def point_through(self, word: Sequence[str], offset: int = 0, rng=None, size: int = 4) -> EventuallyPeriodic:
        """An eventually periodic point reading `word` on the window starting at `offset`.

        Raises:
            ValueError: When the word is not in the language or no periodic cycle reaches it.
        """
        word = tuple(word)
        m = self.memory
        if len(word) < m:
            longer = sorted(self.extend_words([word], 0, m - len(word)))
            if not longer:
                raise ValueError(f"{self.name}: {render_word(word)} is not in the language")
            word = rng.choice(longer) if rng is not None else longer[0]
        if not self.is_allowed(word):
            raise ValueError(f"{self.name}: {render_word(word)} is not in the language")
        first, last = word[:m], word[-m:]
        cycles = self.periodic_words(size)
        graph = self.graph
        lefts = [c for c in cycles if nx.has_path(graph, self._left_vertex(c), first)]
        rights = [c for c in cycles if nx.has_path(graph, last, self._right_vertex(c))]
        if not lefts or not rights:
            raise ValueError(f"{self.name}: no periodic cycle of length at most {size} reaches {render_word(word)}")
        left = rng.choice(lefts) if rng is not None else lefts[0]
        right = rng.choice(rights) if rng is not None else rights[0]
        head = self.path_letters(nx.shortest_path(self.graph, self._left_vertex(left), first))
        tail = self.path_letters(nx.shortest_path(self.graph, last, self._right_vertex(right)))
        shift = m % len(right)
        point = EventuallyPeriodic(left, head + word[m:] + tail, right[shift:] + right[:shift], 0)
        return point.shift(len(head) - m - offset)

    def random_point(self, rng, size: int = 4) -> EventuallyPeriodic:
        """A random eventually periodic point with cycles of length at most `size`."""
        cycles = self.periodic_words(size)
        if not cycles:
            raise ValueError(f"{self.name}: no periodic points of period at most {size}")
        for _ in range(64):
            point = self.splice(rng.choice(cycles), rng.choice(cycles), rng=rng, walk=rng.randrange(size + 1))
            if point is not None:
                return point.shift(rng.randrange(-size, size + 1))
        cycle = rng.choice(cycles)
        return self.cycle_point(cycle)
