"""Exhaustive search for the longest word avoiding a formula, with progress lines.

    python scripts/nonavoid_search.py [--formula 'xyzy^Ux.zy^Uxy^Uz'] [--max-len 1000] [--method levels|dfs]

``levels`` runs the level-by-level search used by ``replay nonavoid2`` and
prints one line per length: length, classes of avoiding words, searched
words, seconds. ``dfs`` walks every avoiding word starting with 0 depth-first,
a slower independent route to the same length; it prints visited words,
longest so far, current depth and seconds every ``--every`` words. The last
line is a JSON summary.
"""
import argparse
import json
import time

from revavoid.formulas import iter_avoiding, longest_avoiding, parse_formula
from revavoid.replay import NONAVOID2_FORMULA
from revavoid.words import Alphabet


def by_levels(f, alphabet, max_len, t0):
    def show(length, classes, nodes):
        print(length, classes, nodes, round(time.perf_counter() - t0, 1), flush=True)

    res = longest_avoiding(f, alphabet, max_len, on_level=show)
    return {**res.to_json(), "longest": res.length}


def depth_first(f, alphabet, max_len, every, t0):
    best, nodes, depth_hist = "", 0, {}
    for w in iter_avoiding(f, alphabet, max_len):
        nodes += 1
        depth_hist[len(w)] = depth_hist.get(len(w), 0) + 1
        if len(w) > len(best):
            best = w
        if nodes % every == 0:
            print(nodes, len(best), len(w), round(time.perf_counter() - t0, 1), flush=True)
    return {
        "longest": len(best),
        "witness": best,
        "exceeds_max_len": len(best) >= max_len,
        "nodes": nodes,
        "nodes_per_depth": depth_hist,
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--formula", default=NONAVOID2_FORMULA)
    ap.add_argument("--alphabet", type=int, default=2)
    ap.add_argument("--max-len", type=int, default=1000)
    ap.add_argument("--method", choices=("levels", "dfs"), default="levels")
    ap.add_argument("--every", type=int, default=2000)
    args = ap.parse_args()
    f = parse_formula(args.formula)
    alphabet = Alphabet(args.alphabet)
    t0 = time.perf_counter()
    if args.method == "levels":
        out = by_levels(f, alphabet, args.max_len, t0)
    else:
        out = depth_first(f, alphabet, args.max_len, args.every, t0)
    out = {"formula": str(f), "method": args.method, **out, "seconds": round(time.perf_counter() - t0, 1)}
    print(json.dumps(out))


if __name__ == "__main__":
    main()
