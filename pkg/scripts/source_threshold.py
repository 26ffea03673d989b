"""Compare the transfer check for the two fixed morphisms under two source thresholds.

For each source length, reports whether images of all (7/4+)-free and all
(7/5+)-free 4-letter words meet the target freeness and directedness, and the
first source word that fails.

    python scripts/source_threshold.py [--max-len 10]
"""
import argparse
from fractions import Fraction

from revavoid.morphisms import paper_morphism_9, paper_morphism_21
from revavoid.replay import replay_transfer
from revavoid.words import FreenessSpec

TARGETS = {
    "21-uniform": (paper_morphism_21, FreenessSpec(Fraction(22, 15), 85), 11),
    "9-uniform": (paper_morphism_9, FreenessSpec(Fraction(131, 90), 28), 4),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--max-len", type=int, default=10)
    args = ap.parse_args()
    for name, (make, target, d) in TARGETS.items():
        for beta in (Fraction(7, 4), Fraction(7, 5)):
            for L in range(1, args.max_len + 1):
                rep = replay_transfer(make(), FreenessSpec(beta), L, target, d)
                line = f"{name:10s} src ({beta}+) len {L:2d}: {rep.verdict:12s} sources={rep.stats['source_words']}"
                if rep.witnesses:
                    w = rep.witnesses[0]
                    line += f" first={w['source']} {w['kind']} period={w.get('period')} exponent={w.get('exponent')}"
                print(line, flush=True)
                if rep.witnesses:
                    break


if __name__ == "__main__":
    main()
