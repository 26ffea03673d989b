"""Formulas with reversal: representation, parsing and occurrence search.

Text syntax::

    formula  := fragment ('.' fragment)*
    fragment := varocc+
    varocc   := var ('^R' | '^U')?
    var      := [a-z] [0-9]*

An occurrence ``h`` maps every variable to a nonempty word; ``h(x^R)`` is the
mirror image of ``h(x)`` and each textual ``x^U`` independently picks
``h(x)`` or its mirror image. ``h`` is an occurrence in ``w`` when the image
of every fragment is a factor of ``w``. Fragments are checked independently
of each other.
"""
from __future__ import annotations

import itertools
from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field
from typing import Callable, Iterator, Mapping, Optional, Union

from .words import Alphabet, FactorIndex

PLAIN = ""
REVERSED = "R"
UNDIRECTED = "U"
FORWARD = "F"
BACKWARD = "B"


class FormulaSyntaxError(ValueError):
    def __init__(self, message: str, text: str, position: int):
        super().__init__(f"{message} at position {position} in {text!r}")
        self.text = text
        self.position = position


class SearchBudgetExceeded(RuntimeError):
    """Raised when a search visits more nodes than its budget allows."""


@dataclass(frozen=True)
class VarOccurrence:
    variable: str
    decoration: str = PLAIN

    def __post_init__(self):
        if self.decoration not in (PLAIN, REVERSED, UNDIRECTED):
            raise ValueError(f"unknown decoration {self.decoration!r}")

    def __str__(self):
        return self.variable + (f"^{self.decoration}" if self.decoration else "")


@dataclass(frozen=True)
class Fragment:
    occurrences: tuple[VarOccurrence, ...]

    def __post_init__(self):
        if not self.occurrences:
            raise ValueError("a fragment needs at least one variable occurrence")

    def __len__(self):
        return len(self.occurrences)

    def __iter__(self):
        return iter(self.occurrences)

    def __str__(self):
        return "".join(map(str, self.occurrences))


@dataclass(frozen=True)
class Formula:
    fragments: tuple[Fragment, ...]

    def __post_init__(self):
        if not self.fragments:
            raise ValueError("a formula needs at least one fragment")

    @property
    def variables(self) -> tuple[str, ...]:
        """Variables in order of first appearance."""
        seen = {}
        for frag in self.fragments:
            for occ in frag:
                seen.setdefault(occ.variable, None)
        return tuple(seen)

    def undirected_positions(self) -> list[tuple[int, int]]:
        return [
            (k, j)
            for k, frag in enumerate(self.fragments)
            for j, occ in enumerate(frag)
            if occ.decoration == UNDIRECTED
        ]

    def is_classical(self) -> bool:
        return all(occ.decoration == PLAIN for frag in self.fragments for occ in frag)

    def __str__(self):
        return ".".join(map(str, self.fragments))


def parse_formula(text: str) -> Formula:
    s = "".join(text.split()).replace("·", ".")
    fragments = []
    current = []
    i = 0
    while i < len(s):
        c = s[i]
        if c == ".":
            if not current:
                raise FormulaSyntaxError("empty fragment", s, i)
            fragments.append(Fragment(tuple(current)))
            current = []
            i += 1
            continue
        if not ("a" <= c <= "z"):
            raise FormulaSyntaxError(f"unexpected character {c!r}", s, i)
        j = i + 1
        while j < len(s) and s[j].isdigit():
            j += 1
        name = s[i:j]
        deco = PLAIN
        if j < len(s) and s[j] == "^":
            if j + 1 >= len(s) or s[j + 1] not in (REVERSED, UNDIRECTED):
                raise FormulaSyntaxError("expected R or U after '^'", s, j + 1)
            deco = s[j + 1]
            j += 2
        current.append(VarOccurrence(name, deco))
        i = j
    if not current:
        raise FormulaSyntaxError("empty fragment", s, len(s))
    fragments.append(Fragment(tuple(current)))
    return Formula(tuple(fragments))


def serialize(f: Formula) -> str:
    return str(f)


def _formula(fragments) -> Formula:
    return Formula(tuple(Fragment(tuple(VarOccurrence(*o) for o in frag)) for frag in fragments))


def _phi(k: int) -> Formula:
    xs = [f"x{j}" for j in range(k)]
    cyc = [[(xs[j], PLAIN), (xs[(j + 1) % k], PLAIN)] for j in range(k)]
    rev = [[(x, REVERSED)] for x in xs]
    return _formula(cyc + rev)


def phi(k: int) -> Formula:
    """x0x1 . x1x2 . ... . x{k-1}x0 . x0^R . ... . x{k-1}^R"""
    if k < 2:
        raise ValueError(f"phi needs k >= 2, got {k}")
    return _phi(k)


def psi(k: int) -> Formula:
    """x y1 ... yk x . y1^R . ... . yk^R"""
    if k < 1:
        raise ValueError(f"psi needs k >= 1, got {k}")
    ys = [f"y{j}" for j in range(1, k + 1)]
    head = [("x", PLAIN)] + [(y, PLAIN) for y in ys] + [("x", PLAIN)]
    return _formula([head] + [[(y, REVERSED)] for y in ys])


def flatten(f: Formula) -> Formula:
    return Formula(tuple(Fragment(tuple(VarOccurrence(o.variable) for o in frag)) for frag in f.fragments))


_FLIP = {PLAIN: REVERSED, REVERSED: PLAIN, UNDIRECTED: UNDIRECTED}


def _equivalence_shape(f: Formula) -> list[tuple[tuple[str, str], ...]]:
    """Fragments with every variable of at most one fixed-direction occurrence made fully undirected.

    Such a variable only asks that all its realized images be h(v) or its
    mirror, whichever occurrence is taken as the reference.
    """
    fixed = {v: 0 for v in f.variables}
    for frag in f.fragments:
        for o in frag:
            fixed[o.variable] += o.decoration != UNDIRECTED
    return [
        tuple((o.variable, UNDIRECTED if fixed[o.variable] <= 1 else o.decoration) for o in frag)
        for frag in f.fragments
    ]


def reversal_symmetric(f: Formula, max_variables: int = 6) -> bool:
    """True when ``w`` avoids ``f`` exactly when the mirror image of ``w`` does.

    An occurrence in w gives one in the mirror of w of the formula with each
    fragment read backwards. This compares that formula with ``f`` up to
    renaming variables, swapping h(v) with its mirror for any v, and
    reordering fragments. False is a safe answer: it only means no symmetry
    is claimed.
    """
    shape = _equivalence_shape(f)
    target = frozenset(shape)
    backwards = [fr[::-1] for fr in shape]
    names = f.variables
    if len(names) > max_variables:
        return False
    for perm in itertools.permutations(names):
        rename = dict(zip(names, perm))
        for flips in itertools.product((False, True), repeat=len(names)):
            flip = {v for v, b in zip(perm, flips) if b}
            image = frozenset(
                tuple((rename[v], _FLIP[d] if rename[v] in flip else d) for v, d in fr) for fr in backwards
            )
            if image == target:
                return True
    return False


VarBounds = Mapping[str, int]


def uniform_bounds(f: Formula, cap: int) -> dict[str, int]:
    return {v: cap for v in f.variables}


@dataclass(frozen=True)
class Assignment:
    images: Mapping[str, str]
    orientations: Mapping[tuple[int, int], str] = field(default_factory=dict)

    def __post_init__(self):
        for v, img in self.images.items():
            if not img:
                raise ValueError(f"image of {v} is empty")

    def to_json(self) -> dict:
        return {
            "images": dict(self.images),
            "orientations": [[k, j, o] for (k, j), o in sorted(self.orientations.items())],
        }

    @classmethod
    def from_json(cls, data: dict) -> "Assignment":
        return cls(
            dict(data["images"]),
            {(int(k), int(j)): o for k, j, o in data.get("orientations", [])},
        )


def instantiate(fragment: Fragment, a: Assignment, fragment_index: int = 0) -> str:
    out = []
    for j, occ in enumerate(fragment):
        try:
            img = a.images[occ.variable]
        except KeyError:
            raise ValueError(f"assignment has no image for {occ.variable}") from None
        if occ.decoration == REVERSED:
            img = img[::-1]
        elif occ.decoration == UNDIRECTED:
            try:
                o = a.orientations[(fragment_index, j)]
            except KeyError:
                raise ValueError(f"no orientation for undirected occurrence {(fragment_index, j)}") from None
            if o == BACKWARD:
                img = img[::-1]
        out.append(img)
    return "".join(out)


def is_occurrence(w: str, f: Formula, a: Assignment) -> bool:
    """Check ``a`` against ``w`` fragment by fragment with plain substring tests."""
    if set(a.orientations) != set(f.undirected_positions()):
        return False
    return all(instantiate(frag, a, k) in w for k, frag in enumerate(f.fragments))


def _variants(img: str, deco: str) -> tuple[str, ...]:
    if deco == PLAIN:
        return (img,)
    rev = img[::-1]
    if deco == REVERSED:
        return (rev,)
    return (img,) if rev == img else (img, rev)


@dataclass
class SearchStats:
    nodes: int = 0

    def merge(self, other: "SearchStats") -> "SearchStats":
        return SearchStats(self.nodes + other.nodes)


class _OccurrenceSearch:
    """Backtracking over variables in formula order.

    Candidate images for the next variable come from the positions of
    already-assigned neighbours inside fragments (intersected over all
    occurrences); every fragment touched by a new image is then re-checked by
    placing its assigned runs in order with admissible gap lengths.
    """

    def __init__(self, w: str, f: Formula, bounds, budget=None, stats=None):
        self.w = w
        self.n = len(w)
        self.f = f
        self.order = f.variables
        if isinstance(bounds, int):
            bounds = uniform_bounds(f, bounds)
        missing = [v for v in self.order if v not in bounds]
        if missing:
            raise ValueError(f"no bound for variables {missing}")
        self.bounds = {v: min(int(bounds[v]), self.n) for v in self.order}
        self._repeated = {
            v for frag in f.fragments for v in {o.variable for o in frag} if sum(o.variable == v for o in frag) > 1
        }
        self.frags = [tuple((o.variable, o.decoration) for o in frag) for frag in f.fragments]
        self.frags_of = {v: sorted({k for k, fr in enumerate(self.frags) for u, _ in fr if u == v}) for v in self.order}
        self.occs_of = {
            v: [(k, j) for k, fr in enumerate(self.frags) for j, (u, _) in enumerate(fr) if u == v]
            for v in self.order
        }
        self.images: dict[str, str] = {}
        self.budget = budget
        self.stats = stats if stats is not None else SearchStats()
        self._pos: dict[str, tuple[int, ...]] = {}
        self._index: Optional[FactorIndex] = None
        self._plans: dict = {}
        self.vv: dict[str, dict[str, tuple[str, ...]]] = {}
        self.assigned: frozenset = frozenset()

    def positions(self, s: str) -> tuple[int, ...]:
        r = self._pos.get(s)
        if r is None:
            out = []
            w = self.w
            i = w.find(s)
            while i >= 0:
                out.append(i)
                i = w.find(s, i + 1)
            r = self._pos[s] = tuple(out)
        return r

    def run_positions(self, parts) -> tuple[int, ...]:
        vv = self.vv
        variants = [vv[v][d] for v, d in parts]
        if all(len(x) == 1 for x in variants):
            return self.positions("".join([x[0] for x in variants]))
        found = set()
        for combo in itertools.product(*variants):
            found.update(self.positions("".join(combo)))
        return tuple(sorted(found))

    def _plan(self, k: int, assigned: frozenset):
        """Assigned runs of fragment k with the (min, max) gap before each, plus the tail gap."""
        key = (k, assigned)
        plan = self._plans.get(key)
        if plan is not None:
            return plan
        runs = []
        parts = []
        gmin = gmax = 0
        for v, d in self.frags[k]:
            if v not in assigned:
                if parts:
                    runs.append((tuple(parts), gap))
                    parts = []
                    gmin = gmax = 0
                gmin += 1
                gmax += self.bounds[v]
            else:
                if not parts:
                    gap = (gmin, gmax)
                parts.append((v, d))
        if parts:
            runs.append((tuple(parts), gap))
            gmin = gmax = 0
        plan = self._plans[key] = (runs, gmin, gmax)
        return plan

    def feasible(self, k: int) -> bool:
        runs, tail, _ = self._plan(k, self.assigned)
        if not runs:
            return True
        images = self.images
        ends = None
        for parts, (gmin, gmax) in runs:
            length = sum([len(images[v]) for v, _ in parts])
            pos = self.run_positions(parts)
            if ends is None:
                starts = [p for p in pos if p >= gmin]
            else:
                starts = []
                for p in pos:
                    i = bisect_left(ends, p - gmax)
                    if i < len(ends) and ends[i] <= p - gmin:
                        starts.append(p)
            if not starts:
                return False
            ends = [p + length for p in starts]
        return ends[0] + tail <= self.n

    def max_length(self, v: str) -> int:
        cap = self.bounds[v]
        for k in self.frags_of[v]:
            count = 0
            other = 0
            for u, _ in self.frags[k]:
                if u == v:
                    count += 1
                else:
                    other += len(self.images[u]) if u in self.images else 1
            cap = min(cap, (self.n - other) // count)
        return cap

    def _neighbours(self, k: int, j: int):
        frag = self.frags[k]
        i = j - 1
        while i >= 0 and frag[i][0] in self.images:
            i -= 1
        left = frag[i + 1 : j]
        i = j + 1
        while i < len(frag) and frag[i][0] in self.images:
            i += 1
        right = frag[j + 1 : i]
        return left, right

    def _anchor(self, k: int, j: int):
        """Start positions allowed by the left neighbours and end positions allowed by the right."""
        left, right = self._neighbours(k, j)
        starts = ends = None
        if left:
            llen = sum(len(self.images[u]) for u, _ in left)
            starts = [p + llen for p in self.run_positions(left)]
        if right:
            ends = self.run_positions(right)
        return starts, ends

    def candidates(self, v: str) -> list[str]:
        cap = self.max_length(v)
        if cap < 1:
            return []
        w = self.w
        # generate from the most selective anchor; feasible() enforces the rest
        best = None
        anchored = []
        for k, j in self.occs_of[v]:
            starts, ends = self._anchor(k, j)
            if starts is None and ends is None:
                continue
            anchored.append((k, j))
            if starts is not None and ends is not None:
                size = sum(bisect_left(ends, a + cap + 1) - bisect_left(ends, a + 1) for a in starts)
            else:
                size = len(starts if starts is not None else ends) * cap
            if best is None or size < best[0]:
                best = (size, (k, j), starts, ends)
                if size == 0:
                    return []
        if best is None:
            if self._index is None:
                self._index = FactorIndex(self.w)
            decos = {self.frags[k][j][1] for k, j in self.occs_of[v]}
            factors = set(self._index.factors(cap))
            result = None
            for deco in decos:
                if deco == PLAIN:
                    s = factors
                elif deco == REVERSED:
                    s = {x[::-1] for x in factors}
                else:
                    s = factors | {x[::-1] for x in factors}
                result = s if result is None else result & s
            return sorted(result, key=lambda s: (len(s), s))
        _, chosen, starts, ends = best
        deco = self.frags[chosen[0]][chosen[1]][1]
        slices = set()
        if starts is not None and ends is not None:
            for a in starts:
                for q in ends[bisect_left(ends, a + 1) : bisect_left(ends, a + cap + 1)]:
                    slices.add(w[a:q])
        elif starts is not None:
            for a in starts:
                for q in range(a + 1, min(a + cap, self.n) + 1):
                    slices.add(w[a:q])
        else:
            for q in ends:
                for a in range(max(q - cap, 0), q):
                    slices.add(w[a:q])
        if deco == REVERSED:
            slices = {x[::-1] for x in slices}
        elif deco == UNDIRECTED:
            slices |= {x[::-1] for x in slices}
        for k, j in anchored:
            if (k, j) != chosen:
                slices = self._filter(slices, k, j)
        return sorted(slices, key=lambda s: (len(s), s))

    def _filter(self, cands, k: int, j: int):
        """Keep candidates that fit between the assigned neighbours of occurrence (k, j)."""
        left, right = self._neighbours(k, j)
        lefts = self._realizations(left)
        rights = self._realizations(right)
        deco = self.frags[k][j][1]
        w = self.w
        kept = set()
        for c in cands:
            for cv in _variants(c, deco):
                if any(l + cv + r in w for l in lefts for r in rights):
                    kept.add(c)
                    break
        return kept

    def _realizations(self, parts) -> list[str]:
        if not parts:
            return [""]
        variants = [self.vv[v][d] for v, d in parts]
        return ["".join(combo) for combo in itertools.product(*variants)]

    def orientations(self) -> dict[tuple[int, int], str]:
        chosen = {}
        for k, frag in enumerate(self.frags):
            uidx = [j for j, (_, d) in enumerate(frag) if d == UNDIRECTED]
            if not uidx:
                continue
            for combo in itertools.product((FORWARD, BACKWARD), repeat=len(uidx)):
                orient = dict(zip(uidx, combo))
                pieces = []
                for j, (v, d) in enumerate(frag):
                    img = self.images[v]
                    if d == REVERSED or (d == UNDIRECTED and orient[j] == BACKWARD):
                        img = img[::-1]
                    pieces.append(img)
                if "".join(pieces) in self.w:
                    chosen.update({(k, j): o for j, o in orient.items()})
                    break
            else:  # pragma: no cover - feasible() guarantees a realization
                raise AssertionError("no orientation realizes a fragment that passed the feasibility check")
        return chosen

    def run(self) -> Optional[Assignment]:
        if self.n == 0 or any(len(fr) > self.n for fr in self.frags):
            return None
        self.tighten()
        if self._search(0):
            return Assignment(dict(self.images), self.orientations())
        return None

    def _bind(self, v: str, img: str) -> None:
        rev = img[::-1]
        self.images[v] = img
        self.vv[v] = {PLAIN: (img,), REVERSED: (rev,), UNDIRECTED: (img,) if rev == img else (img, rev)}

    def _match(self, frag, lo: int, hi: int, binding: dict) -> Iterator[dict]:
        """Bindings under which the occurrences ``frag`` spell exactly w[lo:hi].

        Bound variables at either end are checked first, so a variable that
        opens and closes the fragment is pinned from both sides at once.
        """
        w = self.w
        while frag:
            v, d = frag[0]
            img = binding.get(v)
            if img is not None:
                if not any(w.startswith(cv, lo) for cv in _variants(img, d)):
                    return
                lo += len(img)
                frag = frag[1:]
                continue
            v, d = frag[-1]
            img = binding.get(v)
            if img is not None:
                if not any(w.startswith(cv, hi - len(img)) for cv in _variants(img, d)):
                    return
                hi -= len(img)
                frag = frag[:-1]
                continue
            break
        if not frag:
            if lo == hi:
                yield binding
            return
        if lo >= hi:
            return
        v, d = frag[0]
        fixed = 0
        count = 0
        others = False
        for u, _ in frag:
            if u in binding:
                fixed += len(binding[u])
            elif u == v:
                count += 1
            else:
                others = True
                fixed += 1
        room = hi - lo - fixed
        cap = self.bounds[v]
        if others:
            lengths = range(1, min(cap, room // count) + 1)
        elif room % count == 0 and 1 <= room // count <= cap:
            lengths = (room // count,)
        else:
            return
        d_last = frag[-1][1] if len(frag) > 1 and frag[-1][0] == v else None
        for length in lengths:
            piece = w[lo : lo + length]
            if d_last is not None:
                tail = w[hi - length : hi]
                if UNDIRECTED in (d, d_last):
                    if tail != piece and tail != piece[::-1]:
                        continue
                elif d == d_last:
                    if tail != piece:
                        continue
                elif tail != piece[::-1]:
                    continue
            for img in _variants(piece, d) if d != REVERSED else (piece[::-1],):
                binding[v] = img
                if self._runs_ok(v, binding):
                    yield from self._match(frag[1:], lo + length, hi, binding)
                del binding[v]

    def _runs_ok(self, v: str, binding: dict) -> bool:
        """Every bound run through v in the fragments not being matched is a factor of w."""
        w = self.w
        for k in self._check_frags.get(v, ()):
            frag = self.frags[k]
            run = []
            has_v = False
            for u, d in frag + (("", ""),):
                img = binding.get(u)
                if img is not None:
                    run.append(_variants(img, d))
                    has_v = has_v or u == v
                    continue
                if has_v and not any("".join(c) in w for c in itertools.product(*run)):
                    return False
                run = []
                has_v = False
        return True

    def repeat_cap(self) -> int:
        """Longest u such that u, or u with u reversed, occur at two non-overlapping places."""
        w, n = self.w, self.n
        best = 0
        for length in range(1, n // 2 + 1):
            found = False
            for i in range(n - 2 * length + 1):
                u = w[i : i + length]
                if w.find(u, i + length) >= 0 or w.find(u[::-1], i + length) >= 0:
                    found = True
                    break
            if not found:
                break
            best = length
        return best

    @staticmethod
    def _nested(frag) -> bool:
        """Variables read the same backwards and the outer pairs are distinct, as in x y z y^U x."""
        names = [u for u, _ in frag]
        half = names[: (len(names) + 1) // 2]
        return names == names[::-1] and len(set(half)) == len(half)

    def _iter_nested_bindings(self, frag, i: int, hi: int, starts, binding: dict) -> Iterator[dict]:
        """Bindings under which frag[i:len(frag)-i] spells w[lo:hi] for some lo in ``starts``.

        ``starts`` is None while nothing pins the left end. The last copy of
        an outer variable is the suffix of w[:hi]; its first copy must be an
        earlier occurrence of that suffix or its mirror, and once no such
        occurrence fits, none fits for longer suffixes either.
        """
        w = self.w
        j = len(frag) - 1 - i
        if i > j:
            if starts is None or hi in starts:
                yield binding
            return
        v, d = frag[i]
        cap = self.bounds[v]
        if i == j:
            los = range(max(0, hi - cap), hi) if starts is None else sorted(lo for lo in starts if 1 <= hi - lo <= cap)
            for lo in los:
                piece = w[lo:hi]
                for img in _variants(piece, d) if d != REVERSED else (piece[::-1],):
                    binding[v] = img
                    if self._runs_ok(v, binding):
                        yield binding
                    del binding[v]
            return
        d_last = frag[j][1]
        inner = j - i - 1
        floor = 0 if starts is None else min(starts, default=hi)
        for length in range(1, cap + 1):
            limit = hi - 2 * length - inner
            if limit < floor:
                return
            tail = w[hi - length : hi]
            room = False
            for img in _variants(tail, d_last) if d_last != REVERSED else (tail[::-1],):
                hits = set()
                for first in _variants(img, d) if d != REVERSED else (img[::-1],):
                    if starts is None or len(starts) > 16:
                        ps = self.positions(first)
                        ps = ps[: bisect_right(ps, limit)]
                        room = room or bool(ps)
                        hits.update(ps if starts is None else starts.intersection(ps))
                    else:
                        room = room or w.find(first, 0, limit + length) >= 0
                        hits.update(p for p in starts if p <= limit and w.startswith(first, p))
                if not hits:
                    continue
                binding[v] = img
                if self._runs_ok(v, binding):
                    yield from self._iter_nested_bindings(
                        frag, i + 1, hi - length, frozenset(p + length for p in hits), binding
                    )
                del binding[v]
            if not room:
                return

    def _iter_suffix_bindings(self, k: int) -> Iterator[dict]:
        frag = self.frags[k]
        w, n = self.w, self.n
        if self._nested(frag):
            yield from self._iter_nested_bindings(frag, 0, n, None, {})
            return
        v, d = frag[0]
        d_last = frag[-1][1]
        if len(frag) == 1 or frag[-1][0] != v:
            total_cap = sum(self.bounds[u] for u, _ in frag)
            for start in range(n - 1, max(n - total_cap, 0) - 1, -1):
                yield from self._match(frag, start, n, {})
            return
        # v opens and closes the fragment: its first copy is an earlier occurrence of
        # (a mirror of) the suffix; if no such occurrence exists, none exists for longer suffixes
        inner = len(frag) - 2
        for length in range(1, min(self.bounds[v], (n - inner) // 2) + 1):
            tail = w[n - length :]
            if UNDIRECTED in (d, d_last):
                firsts = {tail, tail[::-1]}
            elif d == d_last:
                firsts = {tail}
            else:
                firsts = {tail[::-1]}
            starts = sorted({p for f in firsts for p in self.positions(f) if p + 2 * length + inner <= n})
            if not starts:
                return
            binding = {}
            for p in starts:
                piece = w[p : p + length]
                for img in _variants(piece, d) if d != REVERSED else (piece[::-1],):
                    binding[v] = img
                    if self._runs_ok(v, binding):
                        yield from self._match(frag, p, n, binding)
                    del binding[v]

    def tighten(self, cap: Optional[int] = None) -> Optional[int]:
        """A variable repeated inside one fragment needs two disjoint copies in w."""
        if self._repeated:
            if cap is None:
                cap = self.repeat_cap()
            for v in self._repeated:
                self.bounds[v] = min(self.bounds[v], cap)
        return cap

    def run_suffix(self, k: int) -> Optional[Assignment]:
        """Occurrence whose fragment k realizes as a suffix of w."""
        fvars = tuple(dict.fromkeys(u for u, _ in self.frags[k]))
        self._check_frags = {v: [j for j in self.frags_of[v] if j != k] for v in fvars}
        self.order = fvars + tuple(v for v in self.f.variables if v not in fvars)
        self.assigned = frozenset(fvars)
        touched = sorted({j for v in fvars for j in self.frags_of[v]})
        complete = len(fvars) == len(self.order)
        others = [fr for j, fr in enumerate(self.frags) if j != k]
        w = self.w
        for binding in self._iter_suffix_bindings(k):
            self.stats.nodes += 1
            if self.budget is not None and self.stats.nodes > self.budget:
                raise SearchBudgetExceeded(f"occurrence search exceeded {self.budget} nodes")
            if complete and not all(
                any("".join(c) in w for c in itertools.product(*[_variants(binding[v], d) for v, d in fr]))
                for fr in others
            ):
                continue
            for v, img in binding.items():
                self._bind(v, img)
            if all(self.feasible(j) for j in touched) and self._search(len(fvars)):
                return Assignment(dict(self.images), self.orientations())
            self.images.clear()
            self.vv.clear()
            self.assigned = frozenset(fvars)
        return None

    def _search(self, depth: int) -> bool:
        if depth == len(self.order):
            return True
        v = self.order[depth]
        outer = self.assigned
        inner = outer | {v}
        stats = self.stats
        for img in self.candidates(v):
            stats.nodes += 1
            if self.budget is not None and stats.nodes > self.budget:
                raise SearchBudgetExceeded(f"occurrence search exceeded {self.budget} nodes")
            self._bind(v, img)
            self.assigned = inner
            if all(self.feasible(k) for k in self.frags_of[v]) and self._search(depth + 1):
                return True
            self.assigned = outer
            del self.images[v]
        return False


BoundsArg = Union[VarBounds, int]


def find_occurrence(
    w: str,
    f: Formula,
    bounds: BoundsArg,
    *,
    budget: Optional[int] = None,
    stats: Optional[SearchStats] = None,
) -> Optional[Assignment]:
    """First occurrence of ``f`` in ``w`` with |h(v)| <= bounds[v], or None.

    "First" orders assignments by variables in formula order, each image by
    length then lexicographically, and undirected orientations forward-first.
    ``bounds`` may be a single int applied to every variable.
    """
    return _OccurrenceSearch(w, f, bounds, budget, stats).run()


def avoids(w: str, f: Formula, bounds: BoundsArg, **kwargs) -> bool:
    return find_occurrence(w, f, bounds, **kwargs) is None


def find_suffix_occurrence(
    w: str,
    f: Formula,
    bounds: BoundsArg,
    *,
    budget: Optional[int] = None,
    stats: Optional[SearchStats] = None,
) -> Optional[Assignment]:
    """An occurrence of ``f`` in ``w`` in which some fragment image is a suffix of ``w``.

    If ``w[:-1]`` avoids ``f`` then ``w`` avoids ``f`` iff this returns None,
    which is what makes letter-by-letter backtracking cheap. The witness is
    not in canonical order.
    """
    if stats is None:
        stats = SearchStats()
    if not w:
        return None
    cap = None
    pos: dict[str, tuple[int, ...]] = {}
    for k in range(len(f.fragments)):
        search = _OccurrenceSearch(w, f, bounds, budget, stats)
        search._pos = pos
        cap = search.tighten(cap)
        a = search.run_suffix(k)
        if a is not None:
            return a
    return None


@dataclass
class LongestAvoiding:
    length: int
    witness: str
    exceeded: bool  # some word of length max_len avoids the formula
    complete: bool  # False when the node budget ran out
    nodes: int

    def to_json(self) -> dict:
        return {
            "length": self.length,
            "witness": self.witness,
            "exceeds_max_len": self.exceeded,
            "complete": self.complete,
            "nodes": self.nodes,
        }


def iter_avoiding(f: Formula, alphabet: Alphabet, max_len: int) -> Iterator[str]:
    """Depth-first, lexicographic walk over words starting with letter 0 that avoid ``f``."""
    letters = alphabet.letters
    stack = [letters[0]]
    while stack:
        w = stack.pop()
        if find_suffix_occurrence(w, f, len(w)) is not None:
            continue
        yield w
        if len(w) < max_len:
            stack.extend(w + c for c in reversed(letters))


def _first_occurrence_renaming(w: str, letters: str) -> str:
    order = "".join(dict.fromkeys(w))
    return w.translate(str.maketrans(order, letters[: len(order)]))


def longest_avoiding(
    f: Formula,
    alphabet: Alphabet,
    max_len: int,
    *,
    budget: Optional[int] = None,
    on_level: Optional[Callable[[int, int, int], None]] = None,
) -> LongestAvoiding:
    """Longest word over ``alphabet`` avoiding ``f``, by exhausting all avoiding words level by level.

    Words are kept up to renaming of letters, and up to reversal when
    :func:`reversal_symmetric` holds. A word of length m+1 is only searched
    when its prefix and its suffix of length m both avoid ``f`` (avoidance is
    closed under taking factors). ``nodes`` counts the searched words. The
    witness is the lexicographically least word of maximal length.
    ``on_level(length, classes, nodes)`` is called after each completed length.
    """
    if max_len < 1:
        raise ValueError("max_len must be >= 1")
    letters = alphabet.letters
    mirror = reversal_symmetric(f)

    def canon(u: str) -> str:
        c = _first_occurrence_renaming(u, letters)
        return min(c, _first_occurrence_renaming(u[::-1], letters)) if mirror else c

    nodes = 1
    if find_suffix_occurrence(letters[0], f, 1) is not None:
        return LongestAvoiding(0, "", False, True, nodes)
    level = {letters[0]}
    length = 1
    while length < max_len:
        fresh: dict[str, str] = {}
        for w in sorted(level):
            for base in (w, w[::-1]) if mirror else (w,):
                for c in letters:
                    v = base + c
                    key = canon(v)
                    if key not in fresh and canon(v[1:]) in level:
                        fresh[key] = v
        survivors = set()
        for key in sorted(fresh):
            if budget is not None and nodes >= budget:
                return LongestAvoiding(length, min(level), False, False, nodes)
            nodes += 1
            if find_suffix_occurrence(fresh[key], f, length + 1) is None:
                survivors.add(key)
        if not survivors:
            break
        level = survivors
        length += 1
        if on_level is not None:
            on_level(length, len(level), nodes)
    return LongestAvoiding(length, min(level), length == max_len, True, nodes)
