"""Backtracking enumeration of (beta+, n)-free words."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterator, Optional

from .words import Alphabet, FreenessSpec, suffix_violation

COUNT = "count"
ENUMERATE = "enumerate-all"
LEX_LEAST = "lex-least"
SAMPLE = "sample"


@dataclass(frozen=True)
class EnumerationSpec:
    alphabet: Alphabet
    spec: FreenessSpec
    length: int
    mode: str = ENUMERATE

    def __post_init__(self):
        if self.length < 1:
            raise ValueError("length must be >= 1")
        if self.mode not in (COUNT, ENUMERATE, LEX_LEAST, SAMPLE):
            raise ValueError(f"unknown mode {self.mode!r}")


@dataclass
class EnumerationStats:
    count: int = 0
    max_depth_reached: int = 0
    nodes_visited: int = 0

    def merge(self, other: "EnumerationStats") -> "EnumerationStats":
        return EnumerationStats(
            self.count + other.count,
            max(self.max_depth_reached, other.max_depth_reached),
            self.nodes_visited + other.nodes_visited,
        )

    def to_json(self) -> dict:
        return {
            "count": self.count,
            "max_depth_reached": self.max_depth_reached,
            "nodes_visited": self.nodes_visited,
        }


class NoFreeWord(ValueError):
    def __init__(self, es: EnumerationSpec, depth: int):
        super().__init__(
            f"no {es.spec}-free word of length {es.length} over {es.alphabet.size} letters "
            f"(search died out at length {depth})"
        )
        self.max_depth_reached = depth


def iter_free(
    alphabet: Alphabet,
    spec: FreenessSpec,
    length: int,
    prefix: str = "",
    stats: Optional[EnumerationStats] = None,
) -> Iterator[str]:
    """Free words of exactly ``length`` extending ``prefix``, in lexicographic order.

    ``prefix`` is assumed free. Each extension only tests repetitions ending at
    the new last letter.
    """
    if stats is None:
        stats = EnumerationStats()
    letters = alphabet.letters
    stats.max_depth_reached = max(stats.max_depth_reached, len(prefix))
    if len(prefix) >= length:
        stats.count += 1
        yield prefix
        return
    stack = [prefix + c for c in reversed(letters)]
    while stack:
        w = stack.pop()
        stats.nodes_visited += 1
        if suffix_violation(w, spec) is not None:
            continue
        if len(w) > stats.max_depth_reached:
            stats.max_depth_reached = len(w)
        if len(w) == length:
            stats.count += 1
            yield w
        else:
            stack.extend(w + c for c in reversed(letters))


def enumerate_free(es: EnumerationSpec, visitor: Callable[[str], object] = None) -> EnumerationStats:
    """Call ``visitor`` on every free word of the requested length, in lexicographic order.

    A visitor returning True stops the walk early.
    """
    stats = EnumerationStats()
    for w in iter_free(es.alphabet, es.spec, es.length, stats=stats):
        if visitor is not None and visitor(w) is True:
            break
    return stats


def count_free(es: EnumerationSpec) -> int:
    return enumerate_free(es).count


def lex_least_free(es: EnumerationSpec) -> str:
    stats = EnumerationStats()
    for w in iter_free(es.alphabet, es.spec, es.length, stats=stats):
        return w
    raise NoFreeWord(es, stats.max_depth_reached)


def sample_free(es: EnumerationSpec, rng) -> str:
    """A free word found by randomized backtracking (child order shuffled by ``rng``)."""
    letters = list(es.alphabet.letters)
    best = 0
    stack = [""]
    while stack:
        w = stack.pop()
        if w and suffix_violation(w, es.spec) is not None:
            continue
        best = max(best, len(w))
        if len(w) == es.length:
            return w
        order = letters[:]
        rng.shuffle(order)
        stack.extend(w + c for c in order)
    raise NoFreeWord(es, best)


def subtree_prefixes(alphabet: Alphabet, spec: FreenessSpec, depth: int) -> list[str]:
    """Free prefixes of length ``depth``; the subtrees below them partition the search."""
    return list(iter_free(alphabet, spec, depth))
