"""Exact derivation of image-length caps from freeness and directedness.

Two fragment shapes are supported. ``thm2`` is x..x around y z y (the short
variable y appears twice between the two x), ``thm3`` is x..x around y z
(the short variable z appears once). In both, the short variable is capped
by directedness, d - 1, and the two long variables bound each other
through the repetition the fragment forces.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

THM2 = "thm2"
THM3 = "thm3"

# caps printed alongside the derivation, keyed by (template, beta, d)
PAPER_CAPS = {
    (THM2, Fraction(22, 15), 11): {"c": Fraction(35, 2), "long": 140, "short": 10},
    (THM3, Fraction(131, 90), 4): {"c": Fraction(129, 49), "long": 16, "short": 3},
}


def amplification_ratio(beta: Fraction) -> Fraction:
    """(beta - 1) / (2 - beta), the factor in |h(x)| <= r * |rest|."""
    beta = Fraction(beta)
    if not 1 < beta < 2:
        raise ValueError(f"beta must lie strictly between 1 and 2, got {beta}")
    return (beta - 1) / (2 - beta)


def solve_symmetric_system(c: Fraction, r: Fraction) -> Optional[Fraction]:
    """Least B with B = c + r*B, i.e. c / (1 - r); None when r >= 1 (no finite bound)."""
    c, r = Fraction(c), Fraction(r)
    if c < 0 or r < 0:
        raise ValueError("c and r must be nonnegative")
    if r >= 1:
        return None
    return c / (1 - r)


@dataclass(frozen=True)
class BoundReport:
    template: str
    beta: Fraction
    d: int
    r: Fraction
    c: Fraction
    fixed_point: Optional[Fraction]
    long_var_max: Optional[int]  # None: no finite bound
    short_var_max: int
    paper_c: Optional[Fraction] = None
    paper_long_var_max: Optional[int] = None
    paper_short_var_max: Optional[int] = None

    @property
    def bounded(self) -> bool:
        return self.long_var_max is not None

    def caps(self, which: str = "max") -> tuple[int, int]:
        """(long, short) caps: 'derived', 'paper', or their pointwise 'max'."""
        if not self.bounded:
            raise ValueError("no finite bound for these parameters")
        derived = (self.long_var_max, self.short_var_max)
        if which == "derived" or self.paper_long_var_max is None:
            if which == "paper":
                raise ValueError("no printed caps for these parameters")
            return derived
        paper = (self.paper_long_var_max, self.paper_short_var_max)
        if which == "paper":
            return paper
        if which == "max":
            return max(derived[0], paper[0]), max(derived[1], paper[1])
        raise ValueError(f"unknown cap choice {which!r}")

    def to_json(self) -> dict:
        def q(x):
            return None if x is None else str(x)

        return {
            "template": self.template,
            "beta": str(self.beta),
            "d": self.d,
            "r": str(self.r),
            "c": str(self.c),
            "fixed_point": q(self.fixed_point),
            "bounded": self.bounded,
            "long_var_max": self.long_var_max,
            "short_var_max": self.short_var_max,
            "paper_caps": None
            if self.paper_long_var_max is None
            else {
                "c": q(self.paper_c),
                "long_var_max": self.paper_long_var_max,
                "short_var_max": self.paper_short_var_max,
            },
        }


def derive_caps(template: str, beta: Fraction, d: int) -> BoundReport:
    beta = Fraction(beta)
    if template not in (THM2, THM3):
        raise ValueError(f"unknown template {template!r}")
    if d < 2:
        raise ValueError(f"d must be >= 2, got {d}")
    short = d - 1
    r = amplification_ratio(beta)
    c = r * (2 * short if template == THM2 else short)
    fp = solve_symmetric_system(c, r)
    long = None if fp is None else math.floor(fp)
    paper = PAPER_CAPS.get((template, beta, d))
    return BoundReport(
        template=template,
        beta=beta,
        d=d,
        r=r,
        c=c,
        fixed_point=fp,
        long_var_max=long,
        short_var_max=short,
        paper_c=paper and paper["c"],
        paper_long_var_max=paper and paper["long"],
        paper_short_var_max=paper and paper["short"],
    )
