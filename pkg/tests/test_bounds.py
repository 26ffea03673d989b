from fractions import Fraction

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from revavoid.bounds import THM2, THM3, amplification_ratio, derive_caps, solve_symmetric_system
from revavoid.formulas import find_occurrence, parse_formula
from revavoid.words import is_d_directed


def test_amplification_ratio():
    assert amplification_ratio(Fraction(22, 15)) == Fraction(7, 8)
    assert amplification_ratio(Fraction(131, 90)) == Fraction(41, 49)
    assert amplification_ratio(Fraction(3, 2)) == 1
    for bad in (Fraction(1), Fraction(2), Fraction(5, 2)):
        with pytest.raises(ValueError):
            amplification_ratio(bad)


def test_fixed_points():
    assert solve_symmetric_system(Fraction(35, 2), Fraction(7, 8)) == 140
    assert solve_symmetric_system(Fraction(129, 49), Fraction(41, 49)) == Fraction(129, 8)
    assert solve_symmetric_system(0, Fraction(1, 2)) == 0
    assert solve_symmetric_system(1, 1) is None
    with pytest.raises(ValueError):
        solve_symmetric_system(-1, Fraction(1, 2))


def test_chain_intermediates():
    # two steps of the chain: c + r(c + r B) = c(1 + r) + r^2 B
    c, r = Fraction(35, 2), Fraction(7, 8)
    assert c * (1 + r) == Fraction(525, 16) and r * r == Fraction(49, 64)
    c, r = Fraction(129, 49), Fraction(41, 49)
    assert c * (1 + r) == Fraction(11610, 2401) and r * r == Fraction(1681, 2401)


def test_binary_template():
    rep = derive_caps(THM2, Fraction(22, 15), 11)
    assert (rep.short_var_max, rep.r, rep.c, rep.long_var_max) == (10, Fraction(7, 8), Fraction(35, 2), 140)
    assert rep.caps("paper") == rep.caps("derived") == rep.caps() == (140, 10)


def test_ternary_template_reports_both():
    rep = derive_caps(THM3, Fraction(131, 90), 4)
    assert (rep.short_var_max, rep.r, rep.c, rep.long_var_max) == (3, Fraction(41, 49), Fraction(123, 49), 15)
    assert rep.fixed_point == Fraction(123, 8)
    assert rep.paper_c == Fraction(129, 49)
    assert rep.caps("paper") == (16, 3)
    assert rep.caps("max") == (16, 3)
    assert rep.to_json()["paper_caps"] == {"c": "129/49", "long_var_max": 16, "short_var_max": 3}


def test_unbounded():
    rep = derive_caps(THM2, Fraction(3, 2), 11)
    assert not rep.bounded and rep.long_var_max is None
    with pytest.raises(ValueError):
        rep.caps()
    assert rep.to_json()["bounded"] is False


def test_errors():
    with pytest.raises(ValueError):
        derive_caps("thm9", Fraction(3, 2), 4)
    with pytest.raises(ValueError):
        derive_caps(THM2, Fraction(7, 5), 1)
    with pytest.raises(ValueError):
        derive_caps(THM2, Fraction(7, 5), 3).caps("paper")
    with pytest.raises(ValueError):
        derive_caps(THM2, Fraction(22, 15), 11).caps("median")


betas = st.fractions(min_value=Fraction(101, 100), max_value=Fraction(149, 100))


@given(st.sampled_from([THM2, THM3]), betas, betas, st.integers(2, 20), st.integers(0, 5))
def test_monotone(template, b1, b2, d, extra):
    lo, hi = sorted((b1, b2))
    a = derive_caps(template, lo, d)
    b = derive_caps(template, hi, d + extra)
    assert a.long_var_max <= b.long_var_max and a.short_var_max <= b.short_var_max


@given(st.fractions(min_value=0, max_value=100), st.fractions(min_value=0, max_value=Fraction(99, 100)))
def test_fixed_point_identity(c, r):
    b = solve_symmetric_system(c, r)
    assert b == c + r * b


def _ternary_template_occurrences(w):
    """All (x, y, z) with xyzx, y z^U x y and z^R factors of w, by direct position scan."""
    n = len(w)
    for s in range(n):
        for a in range(1, n):
            for b in range(1, n):
                for c in range(1, n - s - 2 * a - b + 1):
                    if w[s : s + a] != w[s + a + b + c : s + 2 * a + b + c]:
                        continue
                    x, y, z = w[s : s + a], w[s + a : s + a + b], w[s + a + b : s + a + b + c]
                    if z[::-1] in w and (y + z + x + y in w or y + z[::-1] + x + y in w):
                        yield x, y, z


def _max_exponent(w, n):
    best = Fraction(1)
    for i in range(len(w)):
        for p in range(n, len(w) - i):
            run = p
            while i + run < len(w) and w[i + run] == w[i + run - p]:
                run += 1
            best = max(best, Fraction(run, p))
    return best


@given(st.text(alphabet="012", min_size=6, max_size=14), st.integers(2, 6))
def test_caps_hold_for_occurrences_caught_by_freeness(w, n):
    # the word is (beta+, n)-free with beta its own largest exponent at periods >= n
    beta = max(_max_exponent(w, n), Fraction(101, 100))
    assume(beta < 2)
    d = next(d for d in range(2, len(w) + 2) if is_d_directed(w, d) is None)
    rep = derive_caps(THM3, beta, d)
    for x, y, z in _ternary_template_occurrences(w):
        assert len(z) <= rep.short_var_max
        if len(x + y + z) >= n and rep.bounded:
            assert len(x) <= rep.long_var_max and len(y) <= rep.long_var_max


def test_scan_agrees_with_search():
    f = parse_formula("xyzx.yz^Uxy.z^R")
    for w in ("0120120", "0102012021", "00110", "012210012"):
        assert (next(_ternary_template_occurrences(w), None) is None) == (find_occurrence(w, f, len(w)) is None)
