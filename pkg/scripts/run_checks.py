"""Run every replay pipeline at desk scale and print one line per check.

    python scripts/run_checks.py [--source-len 6] [--transfer-len 8] [--json out.json]
"""
import argparse
import json
from fractions import Fraction

from revavoid import replay as rp
from revavoid.morphisms import paper_morphism_9, paper_morphism_21
from revavoid.words import FreenessSpec


def checks(args):
    for k in range(2, 9):
        yield f"thm1-upper k={k}", lambda k=k: rp.replay_theorem1_upper(k, 10 * (k + 1), 2)
    for b in (1, 2, 3, 4):
        yield f"thm1-lower b={b}", lambda b=b: rp.replay_theorem1_lower(b, 30)
    for beta in (Fraction(7, 4), Fraction(7, 5)):
        src = FreenessSpec(beta)
        yield f"transfer 21-uniform src ({beta}+)", lambda src=src: rp.replay_transfer(
            paper_morphism_21(), src, args.transfer_len, FreenessSpec(Fraction(22, 15), 85), 11, threads=args.threads
        )
        yield f"transfer 9-uniform src ({beta}+)", lambda src=src: rp.replay_transfer(
            paper_morphism_9(), src, args.transfer_len, FreenessSpec(Fraction(131, 90), 28), 4, threads=args.threads
        )
    for template in ("thm2", "thm3"):
        for caps in ("paper", "cover"):
            yield f"{template} caps={caps}", lambda t=template, c=caps: rp.replay_theorem(t, args.source_len, c, threads=args.threads)
    yield "psi k=3", lambda: rp.replay_psi(3, 6, 12)
    yield "psi k=4", lambda: rp.replay_psi(4, 5, 10)


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--source-len", type=int, default=6)
    ap.add_argument("--transfer-len", type=int, default=8)
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--json", help="write all reports to this file")
    args = ap.parse_args()
    reports = []
    for name, run in checks(args):
        rep = run()
        reports.append(rep.to_json())
        wit = f"  first witness source={rep.witnesses[0].get('source')}" if rep.witnesses else ""
        print(f"{name:36s} {rep.verdict:13s} {rep.regime:6s} {rep.stats.get('wall_time', 0):8.2f}s{wit}", flush=True)
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(reports, fh, indent=1)


if __name__ == "__main__":
    main()
