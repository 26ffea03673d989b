"""Finite words, repetitions, directedness and a factor index.

Words are plain ``str`` values in the textual letter encoding: letter ``i``
is the ``i``-th character of ``0123456789abcdefghijklmnopqrstuvwxyz``.
Lexicographic order on letters therefore coincides with string order.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Optional

LETTERS = "0123456789abcdefghijklmnopqrstuvwxyz"


@dataclass(frozen=True)
class Alphabet:
    size: int

    def __post_init__(self):
        if not 1 <= self.size <= len(LETTERS):
            raise ValueError(f"alphabet size must be in 1..{len(LETTERS)}, got {self.size}")

    @property
    def letters(self) -> str:
        return LETTERS[: self.size]

    def __contains__(self, letter: str) -> bool:
        return len(letter) == 1 and letter in self.letters

    def check(self, word: str) -> str:
        """Return ``word`` unchanged, raising ValueError on a foreign letter."""
        allowed = self.letters
        for i, c in enumerate(word):
            if c not in allowed:
                raise ValueError(f"letter {c!r} at position {i} is outside an alphabet of size {self.size}")
        return word


def encode(letters) -> str:
    """Turn a sequence of letter indices into a word."""
    return "".join(LETTERS[i] for i in letters)


def decode(word: str) -> list[int]:
    return [LETTERS.index(c) for c in word]


def alphabet_of(word: str) -> Alphabet:
    """Smallest alphabet containing every letter of ``word``."""
    if not word:
        return Alphabet(1)
    return Alphabet(max(LETTERS.index(c) for c in word) + 1)


def reverse(w: str) -> str:
    return w[::-1]


@dataclass(frozen=True)
class FreenessSpec:
    """Forbids repetitions of exponent > ``beta`` with period >= ``min_period``."""

    beta: Fraction
    min_period: int = 1

    def __post_init__(self):
        object.__setattr__(self, "beta", Fraction(self.beta))
        if self.beta < 1:
            raise ValueError(f"beta must be >= 1, got {self.beta}")
        if self.min_period < 1:
            raise ValueError(f"min_period must be >= 1, got {self.min_period}")

    @classmethod
    def parse(cls, beta: str, min_period: int = 1) -> "FreenessSpec":
        return cls(Fraction(beta), int(min_period))

    def min_violating_length(self, period: int) -> int:
        """Shortest length whose exponent over ``period`` exceeds beta."""
        return (self.beta * period).__floor__() + 1

    def __str__(self):
        return f"({self.beta}+,{self.min_period})"


@dataclass(frozen=True)
class RepetitionWitness:
    start: int
    length: int
    period: int

    @property
    def exponent(self) -> Fraction:
        return Fraction(self.length, self.period)

    def factor(self, w: str) -> str:
        return w[self.start : self.start + self.length]

    def holds_in(self, w: str) -> bool:
        """Re-check against ``w`` that the factor really has this period."""
        if self.period < 1 or self.length < self.period or self.start + self.length > len(w):
            return False
        u = self.factor(w)
        return u[self.period :] == u[: -self.period]

    def to_json(self) -> dict:
        return {
            "start": self.start,
            "length": self.length,
            "period": self.period,
            "exponent": str(self.exponent),
        }


def max_exponent_violation(w: str, spec: FreenessSpec) -> Optional[RepetitionWitness]:
    """First repetition in ``w`` forbidden by ``spec``, or None if ``w`` is free.

    The witness has the smallest start, then the smallest period; its length is
    the longest run with that period starting there.
    """
    if not w:
        raise ValueError("max_exponent_violation needs a nonempty word")
    n = len(w)
    best = None  # (start, period, length)
    for p in range(spec.min_period, n):
        need = spec.min_violating_length(p) - p  # equal pairs w[i] == w[i+p] in a row
        if need > n - p:
            break
        run = 0
        for i in range(n - p):
            if best is not None and i - run >= best[0]:
                break
            if w[i] != w[i + p]:
                run = 0
                continue
            run += 1
            if run == need:
                start = i - run + 1
                j = i + 1
                while j < n - p and w[j] == w[j + p]:
                    j += 1
                best = (start, p, j - start + p)
                break
    if best is None:
        return None
    return RepetitionWitness(start=best[0], length=best[2], period=best[1])


def is_free(w: str, spec: FreenessSpec) -> bool:
    return not w or max_exponent_violation(w, spec) is None


def suffix_violation(w: str, spec: FreenessSpec) -> Optional[RepetitionWitness]:
    """A forbidden repetition ending at the last position of ``w``, if any.

    Enough for incremental checks: if ``w[:-1]`` is free, ``w`` is free iff
    this returns None.
    """
    n = len(w)
    for p in range(spec.min_period, n):
        length = spec.min_violating_length(p)
        if length > n:
            break
        s = n - length
        if w[s + p :] == w[s : n - p]:
            return RepetitionWitness(start=s, length=length, period=p)
    return None


def is_d_directed(w: str, d: int) -> Optional[str]:
    """None if ``w`` is d-directed, else the first length-d factor whose mirror also occurs."""
    if d < 1:
        raise ValueError(f"d must be >= 1, got {d}")
    seen = {w[i : i + d] for i in range(len(w) - d + 1)}
    for i in range(len(w) - d + 1):
        f = w[i : i + d]
        if f[::-1] in seen:
            return f
    return None


def directedness(w: str, max_d: Optional[int] = None) -> Optional[int]:
    """Smallest d for which ``w`` is d-directed (None if none up to ``max_d``)."""
    top = len(w) + 1 if max_d is None else max_d
    for d in range(1, top + 1):
        if is_d_directed(w, d) is None:
            return d
    return None


def periodic_word(k: int, length: int) -> str:
    """Prefix of (0 1 ... k)^omega."""
    if k < 1 or length < 1:
        raise ValueError("periodic_word needs k >= 1 and length >= 1")
    block = LETTERS[: k + 1]
    return (block * (length // (k + 1) + 1))[:length]


@dataclass
class _State:
    length: int = 0
    link: int = -1
    next: dict = field(default_factory=dict)


class FactorIndex:
    """Suffix automaton over a fixed word.

    ``contains(f)`` walks |f| transitions; every path from the root spells a
    distinct factor, which ``factors`` uses to list factors without duplicates.
    """

    def __init__(self, word: str):
        self.word = word
        states = [_State()]
        last = 0
        for c in word:
            cur = len(states)
            states.append(_State(length=states[last].length + 1))
            p = last
            while p != -1 and c not in states[p].next:
                states[p].next[c] = cur
                p = states[p].link
            if p == -1:
                states[cur].link = 0
            else:
                q = states[p].next[c]
                if states[p].length + 1 == states[q].length:
                    states[cur].link = q
                else:
                    clone = len(states)
                    states.append(_State(states[p].length + 1, states[q].link, dict(states[q].next)))
                    while p != -1 and states[p].next.get(c) == q:
                        states[p].next[c] = clone
                        p = states[p].link
                    states[q].link = clone
                    states[cur].link = clone
            last = cur
        self._states = states

    def __len__(self):
        return len(self.word)

    def contains(self, f: str) -> bool:
        states = self._states
        s = 0
        for c in f:
            s = states[s].next.get(c)
            if s is None:
                return False
        return True

    __contains__ = contains

    def factors(self, max_len: int, min_len: int = 1) -> Iterator[str]:
        """Distinct factors with lengths in [min_len, max_len], by length then lexicographically."""
        states = self._states
        level = [("", 0)]
        for length in range(1, max_len + 1):
            nxt = []
            for prefix, s in level:
                for c, t in sorted(states[s].next.items()):
                    nxt.append((prefix + c, t))
            if not nxt:
                return
            level = nxt
            if length >= min_len:
                for f, _ in level:
                    yield f

    def count_factors(self) -> int:
        """Number of distinct nonempty factors."""
        states = self._states
        return sum(st.length - states[st.link].length for st in states[1:])


def build_factor_index(w: str) -> FactorIndex:
    return FactorIndex(w)
