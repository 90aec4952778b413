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
Builders for the standard reversible subshifts.

Functions:
    full_shift(letters, pairs=(), center=None) -> Sft
    build_reduced(alphabet) -> Sft: Reduced words over an alphabet with a fixed-point-free involution.
    build_doubling(base) -> Sft: Two copies of a subshift, the second read backwards, exchanged by the reversal.
    disjoint_union(parts) -> Sft: Disjoint union on tagged copies of the alphabets.
    transitive_point(sft) -> Lazy: A point with a dense forward orbit in an irreducible subshift.
"""

import threading
from typing import Sequence

import networkx as nx

from dyadic_flows.common.ioc_container import Container
from dyadic_flows.subshifts.points import Lazy
from dyadic_flows.subshifts.sft import InvAlphabet, Reversal, Sft, Word


def full_shift(letters: Sequence[str], pairs: Sequence[Sequence[str]] = (), center: int | None = None) -> Sft:
    """The full shift; with `center` set it carries the formal-inverse reversal around that center."""
    alphabet = InvAlphabet.from_pairs(letters, pairs)
    reversal = Reversal.formal_inverse(alphabet, center) if center is not None else None
    return Sft(alphabet, (), reversal, name=f"full shift on {len(alphabet)} letters")


def build_reduced(alphabet: InvAlphabet) -> Sft:
    """Reduced words: the subshift forbidding every factor `a a^{-1}`.

    The reversal is `sigma(x)_n = x_{-(n+1)}^{-1}`.

    Raises:
        ValueError: If the alphabet has fewer than four letters, an odd number of letters, or a fixed letter.
    """
    size = len(alphabet)
    if size < 4 or size % 2 or not alphabet.fixed_point_free:
        raise ValueError(
            f"Reduced words need an even alphabet of at least 4 letters without fixed letters, got {alphabet.letters}"
        )
    forbidden = [(a, alphabet.inverse(a)) for a in alphabet.letters]
    return Sft(alphabet, forbidden, Reversal.formal_inverse(alphabet, -1), name=f"reduced words on {size} letters")


def build_doubling(base: Sft) -> Sft:
    """The disjoint union of `base` and its mirror image.

    Letters are tagged `a+` (first copy) and `a-` (second copy). The second copy holds the reversed points of
    `base`, so the shift moves along it in the opposite direction; the reversal `sigma(x)_n = tau(x_{-n})`
    exchanges the tags and maps each copy onto the other.
    """
    plus = [f"{a}+" for a in base.alphabet.letters]
    minus = [f"{a}-" for a in base.alphabet.letters]
    pairs = list(zip(plus, minus))
    alphabet = InvAlphabet.from_pairs(plus + minus, pairs)
    forbidden = [(a, b) for a in plus for b in minus] + [(b, a) for a in plus for b in minus]
    for w in base.forbidden:
        forbidden.append(tuple(f"{a}+" for a in w))
        forbidden.append(tuple(f"{a}-" for a in reversed(w)))
    return Sft(alphabet, forbidden, Reversal(tuple(pairs), 0), name=f"doubling of {base.name}")


def disjoint_union(parts: Sequence[Sft]) -> Sft:
    """Disjoint union of subshifts; the letters of part i are renamed `letter:i`."""
    letters, pairs, forbidden = [], [], []
    for i, part in enumerate(parts):
        tag = {a: f"{a}:{i}" for a in part.alphabet.letters}
        letters.extend(tag.values())
        pairs.extend((tag[a], tag[b]) for a, b in part.alphabet.pairs)
        forbidden.extend(tuple(tag[a] for a in w) for w in part.forbidden)
    tags = [[f"{a}:{i}" for a in part.alphabet.letters] for i, part in enumerate(parts)]
    for i, own in enumerate(tags):
        for j, other in enumerate(tags):
            if i != j:
                forbidden.extend((a, b) for a in own for b in other)
    alphabet = InvAlphabet.from_pairs(letters, pairs)
    return Sft(alphabet, forbidden, name=" + ".join(part.name for part in parts))


def _occurs(word: Word, text: list[str]) -> bool:
    n = len(word)
    return any(tuple(text[i : i + n]) == word for i in range(len(text) - n + 1))


def transitive_point(sft: Sft) -> Lazy:
    """A point whose forward orbit is dense.

    The right half concatenates the allowed words in length-lexicographic order, skipping words that already
    occur, and joins consecutive words by shortest paths of the transition graph. The left half repeats a
    shortest cycle through the first vertex. Words are generated on demand; the oracle is deterministic.

    Raises:
        ValueError: If the subshift is empty or not irreducible.
    """
    graph = sft.graph
    if graph.number_of_nodes() == 0 or not nx.is_strongly_connected(graph):
        raise ValueError(f"{sft.name}: a transitive point needs an irreducible subshift")
    m = sft.memory
    text: list[str] = []
    lock = threading.Lock()
    state = {"length": m, "queue": []}

    def grow():
        if not state["queue"]:
            state["queue"] = sorted(sft.language(state["length"]), reverse=True)
            state["length"] += 1
        word = state["queue"].pop()
        if _occurs(word, text):
            return
        if not text:
            text.extend(word)
            return
        path = nx.shortest_path(graph, tuple(text[-m:]), word[:m])
        text.extend(sft.path_letters(path))
        text.extend(word[m:])

    with lock:
        grow()
    first = tuple(text[:m])
    cycle = min(
        (nx.shortest_path(graph, succ, first) for succ in graph.successors(first)),
        key=len,
    )
    loop = sft.path_letters([first] + cycle)

    def oracle(n: int) -> str:
        if n < 0:
            return loop[(n - m) % len(loop)]
        with lock:
            while len(text) <= n:
                grow()
            return text[n]

    Container.logger().info(msg=f"{sft.name}: transitive point with a left cycle of length {len(loop)}")
    return Lazy(oracle, name=f"transitive point of {sft.name}")
