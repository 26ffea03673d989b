"""Deliberately naive reference implementations the fast code is checked against."""
from fractions import Fraction
from itertools import product


def all_words(letters: str, max_len: int, min_len: int = 1):
    for n in range(min_len, max_len + 1):
        for t in product(letters, repeat=n):
            yield "".join(t)


def naive_violation(w: str, beta: Fraction, min_period: int = 1):
    """(start, length, period) of the first factor with exponent > beta, by triple loop.

    Smallest start, then smallest period, then the longest such factor.
    """
    n = len(w)
    for start in range(n):
        for period in range(max(min_period, 1), n - start):
            best = None
            for length in range(period + 1, n - start + 1):
                u = w[start : start + length]
                if all(u[i] == u[i + period] for i in range(length - period)):
                    if Fraction(length, period) > beta:
                        best = length
                else:
                    break
            if best is not None:
                return start, best, period
    return None


def naive_directed(w: str, d: int) -> bool:
    factors = {w[i : i + d] for i in range(len(w) - d + 1)}
    return all(f[::-1] not in factors for f in factors)


def naive_count_free(letters: str, length: int, beta: Fraction, min_period: int = 1) -> int:
    return sum(1 for w in all_words(letters, length, length) if naive_violation(w, beta, min_period) is None)


def naive_has_occurrence(w: str, fragments, max_len=None) -> bool:
    """Try every assignment of factors to variables and every orientation of ^U occurrences.

    ``fragments`` is a list of lists of (variable, decoration) with decoration
    in {"", "R", "U"}.
    """
    max_len = len(w) if max_len is None else max_len
    factors = sorted({w[i:j] for i in range(len(w)) for j in range(i + 1, min(len(w), i + max_len) + 1)})
    variables = sorted({v for fr in fragments for v, _ in fr})
    for images in product(factors, repeat=len(variables)):
        h = dict(zip(variables, images))
        if all(_fragment_fits(w, fr, h) for fr in fragments):
            return True
    return False


def _fragment_fits(w, fragment, h) -> bool:
    choices = []
    for v, deco in fragment:
        img = h[v]
        if deco == "R":
            choices.append((img[::-1],))
        elif deco == "U":
            choices.append((img, img[::-1]))
        else:
            choices.append((img,))
    return any("".join(pieces) in w for pieces in product(*choices))


def naive_first_occurrence(w: str, fragments, max_len=None):
    """Images of the first occurrence in canonical order, or None.

    Variables are taken in order of first appearance, each image ranging over
    factors of ``w`` and their mirror images sorted by length then
    lexicographically; the last variable varies fastest.
    """
    max_len = len(w) if max_len is None else max_len
    facs = {w[i:j] for i in range(len(w)) for j in range(i + 1, min(len(w), i + max_len) + 1)}
    cands = sorted(facs | {f[::-1] for f in facs}, key=lambda f: (len(f), f))
    variables = list(dict.fromkeys(v for fr in fragments for v, _ in fr))
    for images in product(cands, repeat=len(variables)):
        h = dict(zip(variables, images))
        if all(_fragment_fits(w, fr, h) for fr in fragments):
            return h
    return None


def as_pairs(formula):
    return [[(o.variable, o.decoration) for o in fr] for fr in formula.fragments]
