"""Replay pipelines: each rebuilds one avoidability argument on finite data and reports a verdict.

A verdict is ``corroborated`` (the finite check found nothing against the
claim), ``violated`` (a re-verifiable witness against it) or ``inconclusive``
(a budget ran out, or the finite data cannot decide). Every report records
whether the check covered the claim in full (``paper`` regime) or only a
truncation of it (``desk`` regime).
"""
from __future__ import annotations

import math
import time
from collections import deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Optional, Sequence

from .bounds import THM2, THM3, derive_caps
from .formulas import (
    Assignment,
    Formula,
    SearchBudgetExceeded,
    SearchStats,
    _phi,
    find_occurrence,
    find_suffix_occurrence,
    is_occurrence,
    longest_avoiding,
    parse_formula,
    psi,
    reversal_symmetric,
)
from .generator import iter_free
from .morphisms import UniformMorphism, apply, paper_morphism_9, paper_morphism_21, psi_morphism
from .words import LETTERS, Alphabet, FreenessSpec, is_d_directed, max_exponent_violation, periodic_word

CORROBORATED = "corroborated"
VIOLATED = "violated"
INCONCLUSIVE = "inconclusive"
DESK = "desk"
PAPER = "paper"

EXIT_CODES = {CORROBORATED: 0, VIOLATED: 1, INCONCLUSIVE: 2}

THM2_FORMULA = "xyzy^Ux.zy^Uxy^Uz.y^R"
THM3_FORMULA = "xyzx.yz^Uxy.z^R"
NONAVOID2_FORMULA = "xyzy^Ux.zy^Uxy^Uz"

SOURCE_SPEC = FreenessSpec(Fraction(7, 4))


@dataclass
class ReplayReport:
    pipeline: str
    params: dict
    verdict: str
    regime: str = DESK
    witnesses: list = field(default_factory=list)
    stats: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    def __post_init__(self):
        if self.verdict not in EXIT_CODES:
            raise ValueError(f"unknown verdict {self.verdict!r}")
        if self.regime not in (DESK, PAPER):
            raise ValueError(f"unknown regime {self.regime!r}")
        if self.verdict == VIOLATED and not self.witnesses:
            raise ValueError("a violated report needs a witness")

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.verdict]

    def to_json(self) -> dict:
        return {
            "pipeline": self.pipeline,
            "params": self.params,
            "verdict": self.verdict,
            "regime": self.regime,
            "witnesses": self.witnesses,
            "stats": self.stats,
            "notes": self.notes,
        }

    def summary(self) -> str:
        return f"{self.pipeline}: {self.verdict} ({self.regime} regime)"


# ---------------------------------------------------------------- Rauzy graphs


@dataclass(frozen=True)
class RauzyGraph:
    vertices: tuple[str, ...]
    arcs: frozenset  # of (u, v) letter pairs

    def successors(self, u: str) -> list[str]:
        return sorted(v for a, v in self.arcs if a == u)


@dataclass(frozen=True)
class Circuit:
    vertices: tuple[str, ...]

    @property
    def length(self) -> int:
        return len(self.vertices)

    def __getitem__(self, j: int) -> str:
        return self.vertices[j % len(self.vertices)]


def rauzy_graph(w: str) -> RauzyGraph:
    if len(w) < 2:
        raise ValueError(f"a Rauzy graph needs a word of length >= 2, got {w!r}")
    return RauzyGraph(tuple(sorted(set(w))), frozenset(zip(w, w[1:])))


def shortest_circuit(g: RauzyGraph) -> Optional[Circuit]:
    """A minimum-length circuit, lexicographically least as a vertex sequence; None if acyclic."""
    succ = {u: g.successors(u) for u in g.vertices}
    girth = None
    for s in g.vertices:  # BFS back to s gives the shortest circuit through s
        dist = {s: 0}
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for v in succ[u]:
                if v == s:
                    girth = dist[u] + 1 if girth is None else min(girth, dist[u] + 1)
                elif v not in dist:
                    dist[v] = dist[u] + 1
                    queue.append(v)
    if girth is None:
        return None
    # the least sequence starts at its least vertex; walk successors in order
    for s in g.vertices:
        path = [s]

        def walk() -> bool:
            u = path[-1]
            if len(path) == girth:
                return s in succ[u]
            for v in succ[u]:
                if v > s and v not in path:
                    path.append(v)
                    if walk():
                        return True
                    path.pop()
            return False

        if walk():
            return Circuit(tuple(path))
    raise AssertionError("girth found but no circuit realizes it")  # pragma: no cover


def lcm_upto(b: int) -> int:
    if b < 1:
        raise ValueError(f"b must be >= 1, got {b}")
    return math.lcm(*range(1, b + 1))


def construct_phi_occurrence(w: str, b: int) -> Optional[Assignment]:
    """The occurrence x_j -> c_(j mod i) of phi_lcm(1..b) read off a shortest circuit of the Rauzy graph."""
    if len(set(w)) > b:
        raise ValueError(f"{w!r} uses more than {b} letters")
    if len(w) < 2:
        return None
    circuit = shortest_circuit(rauzy_graph(w))
    if circuit is None:
        return None
    k = lcm_upto(b)
    a = Assignment({f"x{j}": circuit[j] for j in range(k)})
    if not is_occurrence(w, _phi(k), a):  # pragma: no cover - holds by construction
        raise AssertionError(f"circuit {circuit} does not give an occurrence in {w!r}")
    return a


# ---------------------------------------------------------------- shared helpers


def _elapsed(t0: float) -> float:
    return round(time.perf_counter() - t0, 3)


def _chunks(items: Sequence, n: int) -> list[Sequence]:
    size = max(1, math.ceil(len(items) / n))
    return [items[i : i + size] for i in range(0, len(items), size)]


def _run_chunks(worker: Callable, items: Sequence, args: tuple, threads: int) -> list:
    """Run ``worker(chunk, *args)`` over contiguous chunks, results in chunk order."""
    if threads <= 1 or len(items) < 2:
        return [worker(items, *args)]
    chunks = _chunks(items, threads)
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(worker, chunks, *[[a] * len(chunks) for a in args]))


def _merge(results: list) -> tuple[Optional[dict], dict]:
    """First witness in chunk order (the lexicographically first source word) and summed counters."""
    witness = None
    totals: dict = {}
    for w, counts in results:
        if witness is None and w is not None:
            witness = w
        for key, val in counts.items():
            if key == "exhausted":
                totals[key] = totals.get(key, False) or val
            else:
                totals[key] = totals.get(key, 0) + val
    return witness, totals


# ---------------------------------------------------------------- phi_b over b letters


def replay_theorem1_upper(k: int, prefix_len: int, cap: int, word: Optional[str] = None) -> ReplayReport:
    """The (k+1)-letter periodic word is 2-directed and avoids phi_k (all images of length <= cap).

    The search runs once with cap 1, which 2-directedness justifies, and once
    with ``cap`` so the conclusion does not lean on that argument. A custom
    ``word`` replaces the periodic one.
    """
    if k < 2:
        raise ValueError(f"k must be >= 2, got {k}")
    t0 = time.perf_counter()
    w = periodic_word(k, prefix_len) if word is None else word
    f = _phi(k)
    params = {"k": k, "prefix_len": len(w), "cap": cap, "word": w if word is not None else None}
    witnesses = []
    bad = is_d_directed(w, 2)
    if bad is not None:
        witnesses.append({"kind": "directedness", "d": 2, "factor": bad})
    stats = SearchStats()
    for c in sorted({1, cap}):
        a = find_occurrence(w, f, c, stats=stats)
        if a is not None:
            witnesses.append({"kind": "occurrence", "cap": c, "word": w, "assignment": a.to_json()})
            break
    # every factor of length L of the periodic word shows up in any prefix of length L + k
    full = word is None and cap >= 1 and prefix_len >= 2 * cap + k
    return ReplayReport(
        "thm1-upper",
        params,
        VIOLATED if witnesses else CORROBORATED,
        PAPER if full and not witnesses else DESK,
        witnesses,
        {"nodes": stats.nodes, "wall_time": _elapsed(t0)},
    )


def replay_theorem1_lower(b: int, max_len: int, budget: Optional[int] = None) -> ReplayReport:
    """Backtrack over words on b letters; corroborated when every branch meets phi_lcm(1..b) before max_len.

    Words are generated up to renaming of letters (letters first appear in
    order 0, 1, ...), which is harmless since renaming letters maps
    occurrences to occurrences. A word reaching ``max_len`` without an
    occurrence leaves the verdict inconclusive: a finite avoiding word says
    nothing about infinite ones.
    """
    if b < 1:
        raise ValueError(f"b must be >= 1, got {b}")
    if max_len < 1:
        raise ValueError("max_len must be >= 1")
    t0 = time.perf_counter()
    k = lcm_upto(b)
    f = _phi(k)
    params = {"b": b, "k": k, "max_len": max_len, "budget": budget}
    letters = LETTERS[:b]
    stats = SearchStats()
    nodes = certified = searched = 0
    best = ""
    long_word = None
    stack = [letters[0]]
    while stack:
        w = stack.pop()
        nodes += 1
        if budget is not None and nodes > budget:
            return ReplayReport(
                "thm1-lower",
                params,
                INCONCLUSIVE,
                DESK,
                [],
                {"nodes": nodes, "longest_avoiding": len(best), "wall_time": _elapsed(t0)},
                [f"node budget {budget} exhausted"],
            )
        if len(w) >= 2 and construct_phi_occurrence(w, b) is not None:
            certified += 1
            continue
        try:
            a = find_suffix_occurrence(w, f, len(w), budget=budget, stats=stats)
        except SearchBudgetExceeded:
            return ReplayReport(
                "thm1-lower", params, INCONCLUSIVE, DESK, [], {"nodes": nodes, "wall_time": _elapsed(t0)},
                [f"occurrence search exceeded budget {budget}"],
            )
        if a is not None:
            searched += 1
            continue
        if len(w) > len(best):
            best = w
        if len(w) >= max_len:
            long_word = w
            break
        used = len(set(w))
        fresh = letters[: min(used + 1, b)]
        stack.extend(w + c for c in reversed(fresh))
    out = {
        "nodes": nodes,
        "certified_by_circuit": certified,
        "certified_by_search": searched,
        "longest_avoiding": len(best),
        "longest_avoiding_word": best,
        "search_nodes": stats.nodes,
        "wall_time": _elapsed(t0),
    }
    if long_word is not None:
        return ReplayReport(
            "thm1-lower", params, INCONCLUSIVE, DESK, [], out,
            [f"{long_word!r} of length {max_len} avoids phi_{k}; a finite word does not decide the claim"],
        )
    out["shortest_unavoidable_length"] = len(best) + 1
    # an exhausted tree covers every infinite word: each has a prefix in it
    return ReplayReport("thm1-lower", params, CORROBORATED, PAPER, [], out)


# ---------------------------------------------------------------- transfer


def _transfer_worker(sources, m, target_spec, d):
    checked = 0
    for u in sources:
        checked += 1
        img = apply(m, u)
        rep = max_exponent_violation(img, target_spec)
        if rep is not None:
            wit = {"kind": "repetition", "source": u, "image": img, **rep.to_json()}
            return wit, {"words_checked": checked, "images_checked": checked}
        bad = is_d_directed(img, d)
        if bad is not None:
            wit = {"kind": "directedness", "source": u, "image": img, "d": d, "factor": bad}
            return wit, {"words_checked": checked, "images_checked": checked}
    return None, {"words_checked": checked, "images_checked": checked}


def replay_transfer(
    m: UniformMorphism,
    source_spec: FreenessSpec,
    source_len: int,
    target_spec: FreenessSpec,
    d: int,
    *,
    threads: int = 1,
) -> ReplayReport:
    """Images of all free source words of one length are target-free and d-directed."""
    t0 = time.perf_counter()
    sources = list(iter_free(m.source_alphabet, source_spec, source_len))
    witness, counts = _merge(_run_chunks(_transfer_worker, sources, (m, target_spec, d), threads))
    params = {
        "morphism": list(m.images),
        "source_spec": str(source_spec),
        "source_len": source_len,
        "target_spec": str(target_spec),
        "d": d,
    }
    return ReplayReport(
        "transfer",
        params,
        VIOLATED if witness else CORROBORATED,
        DESK,
        [witness] if witness else [],
        {**counts, "source_words": len(sources), "wall_time": _elapsed(t0)},
    )


# ---------------------------------------------------------------- non-occurrence


def fragment_window(f: Formula, caps) -> int:
    """Longest instantiated fragment allowed by the caps."""
    return max(sum(caps[o.variable] for o in fr) for fr in f.fragments)


def _occurrence_worker(images, f, caps, budget):
    stats = SearchStats()
    checked = 0
    for u, img in images:
        checked += 1
        try:
            a = find_occurrence(img, f, caps, budget=budget, stats=stats)
        except SearchBudgetExceeded:
            return None, {"images_checked": checked, "nodes": stats.nodes, "exhausted": True}
        if a is not None:
            wit = {"kind": "occurrence", "source": u, "image": img, "assignment": a.to_json()}
            return wit, {"images_checked": checked, "nodes": stats.nodes}
    return None, {"images_checked": checked, "nodes": stats.nodes}


def replay_formula_nonoccurrence(
    m: UniformMorphism,
    f: Formula,
    caps,
    source_spec: FreenessSpec,
    source_len: int,
    *,
    budget: Optional[int] = None,
    threads: int = 1,
    sources: Optional[Iterable[str]] = None,
    pipeline: str = "nonoccurrence",
) -> ReplayReport:
    """No image of a free source word of length ``source_len`` contains ``f`` within ``caps``.

    Equal images are searched once. ``budget`` bounds the search nodes spent
    on each image; running out makes the verdict inconclusive.
    """
    t0 = time.perf_counter()
    if isinstance(caps, int):
        caps = {v: caps for v in f.variables}
    missing = [v for v in f.variables if v not in caps]
    if missing:
        raise ValueError(f"no cap for {missing}")
    if sources is None:
        sources = iter_free(m.source_alphabet, source_spec, source_len)
    seen: dict[str, str] = {}
    n_sources = 0
    for u in sources:
        n_sources += 1
        seen.setdefault(apply(m, u), u)
    images = [(u, img) for img, u in seen.items()]
    witness, counts = _merge(_run_chunks(_occurrence_worker, images, (f, dict(caps), budget), threads))
    window = fragment_window(f, caps)
    needed = -(-window // m.width) + 1
    params = {
        "morphism": list(m.images),
        "formula": str(f),
        "caps": dict(caps),
        "source_spec": str(source_spec),
        "source_len": source_len,
        "window": window,
        "paper_source_len": needed,
    }
    exhausted = counts.pop("exhausted", False)
    if witness is not None:
        verdict = VIOLATED
    elif exhausted:
        verdict = INCONCLUSIVE
    else:
        verdict = CORROBORATED
    notes = [f"search budget {budget} exhausted on some image"] if exhausted and witness is None else []
    return ReplayReport(
        pipeline,
        params,
        verdict,
        PAPER if source_len >= needed and verdict == CORROBORATED else DESK,
        [witness] if witness else [],
        {**counts, "words_checked": n_sources, "distinct_images": len(images), "wall_time": _elapsed(t0)},
        notes,
    )


# the shortest period a repetition forced by the fragment can have while still being
# excluded by the target freeness; occurrences below it escape the bound chain
_THEOREM_SETUP = {
    THM2: dict(
        morphism=paper_morphism_21,
        formula=THM2_FORMULA,
        beta=Fraction(22, 15),
        min_period=85,
        d=11,
        long_vars=("x", "z"),
        short_vars=("y",),
        period_others=3,  # |h(yzy)| >= 3 besides h(x) in the period h(xyzy)
    ),
    THM3: dict(
        morphism=paper_morphism_9,
        formula=THM3_FORMULA,
        beta=Fraction(131, 90),
        min_period=28,
        d=4,
        long_vars=("x", "y"),
        short_vars=("z",),
        period_others=2,  # |h(yz)| >= 2 besides h(x) in the period h(xyz)
    ),
}

CAP_CHOICES = ("paper", "derived", "max", "cover")


def theorem_caps(template: str, which: str = "max") -> dict[str, int]:
    """Variable caps for the two fixed-morphism checks.

    ``paper``, ``derived`` and ``max`` come from the bound chain. ``cover``
    additionally raises the long caps to include occurrences whose forced
    repetition has a period below the freeness threshold, which the chain
    does not bound.
    """
    setup = _THEOREM_SETUP[template]
    report = derive_caps(template, setup["beta"], setup["d"])
    if which not in CAP_CHOICES:
        raise ValueError(f"cap choice must be one of {CAP_CHOICES}, got {which!r}")
    long, short = report.caps("max" if which == "cover" else which)
    if which == "cover":
        long = max(long, setup["min_period"] - 1 - setup["period_others"])
    caps = {v: long for v in setup["long_vars"]}
    caps.update({v: short for v in setup["short_vars"]})
    return caps


def replay_theorem(
    template: str,
    source_len: int,
    caps: str = "max",
    *,
    source_spec: FreenessSpec = SOURCE_SPEC,
    budget: Optional[int] = None,
    threads: int = 1,
) -> ReplayReport:
    """Non-occurrence check of one of the two fixed-morphism formulas over free 4-letter sources."""
    setup = _THEOREM_SETUP[template]
    report = replay_formula_nonoccurrence(
        setup["morphism"](),
        parse_formula(setup["formula"]),
        theorem_caps(template, caps),
        source_spec,
        source_len,
        budget=budget,
        threads=threads,
        pipeline=template,
    )
    report.params["cap_choice"] = caps
    return report


# ---------------------------------------------------------------- psi


def replay_psi(
    k: int,
    source_len: int,
    x_cap: int,
    *,
    formula: Optional[Formula] = None,
    source_spec: FreenessSpec = SOURCE_SPEC,
    budget: Optional[int] = None,
    threads: int = 1,
) -> ReplayReport:
    """Search images of free ternary words under the (k+3)-uniform morphism for psi_k.

    Each y_i is capped at d - 1, where d is the largest directedness measured
    over the images, since y_i and its reverse are both factors. This only
    explores a conjecture: no bound on x is known.
    """
    if k < 3:
        raise ValueError(f"k must be >= 3, got {k}")
    t0 = time.perf_counter()
    m = psi_morphism(k)
    f = psi(k) if formula is None else formula
    sources = list(iter_free(m.source_alphabet, source_spec, source_len))
    d = 0
    for u in sources:
        img = apply(m, u)
        dd = next((e for e in range(max(d, 1), len(img) + 1) if is_d_directed(img, e) is None), None)
        if dd is None:
            return ReplayReport(
                "psi", {"k": k, "source_len": source_len, "x_cap": x_cap}, INCONCLUSIVE, DESK, [],
                {"wall_time": _elapsed(t0)}, [f"image of {u!r} is not d-directed for any d"],
            )
        d = max(d, dd)
    caps = {v: (x_cap if v == "x" else max(d - 1, 1)) for v in f.variables}
    report = replay_formula_nonoccurrence(
        m, f, caps, source_spec, source_len, budget=budget, threads=threads, sources=sources, pipeline="psi"
    )
    report.params.update({"k": k, "x_cap": x_cap, "measured_d": d})
    report.regime = DESK
    report.stats["wall_time"] = _elapsed(t0)
    report.notes.append("conjecture exploration: caps on x are a choice, not a proven bound")
    return report


# ---------------------------------------------------------------- binary non-avoidability


def replay_nonavoid2(max_len: int, *, budget: Optional[int] = None, formula: str = NONAVOID2_FORMULA) -> ReplayReport:
    """Exhaustive backtracking: every long enough binary word contains the formula."""
    t0 = time.perf_counter()
    f = parse_formula(formula)
    widths = {}
    res = longest_avoiding(f, Alphabet(2), max_len, budget=budget, on_level=lambda n, classes, _: widths.update({n: classes}))
    params = {"formula": str(f), "max_len": max_len, "budget": budget}
    stats = {
        **res.to_json(),
        "reversal_symmetric": reversal_symmetric(f),
        "widest_length": max(widths, key=widths.get, default=1),
        "widest_classes": max(widths.values(), default=1),
        "wall_time": _elapsed(t0),
    }
    if res.complete and not res.exceeded:
        stats["shortest_unavoidable_length"] = res.length + 1
        return ReplayReport("nonavoid2", params, CORROBORATED, PAPER, [], stats)
    note = "node budget exhausted" if not res.complete else f"an avoiding word of length {max_len} exists"
    return ReplayReport("nonavoid2", params, INCONCLUSIVE, DESK, [], stats, [note])
