import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from oracles import all_words, as_pairs, naive_first_occurrence
from revavoid.formulas import (
    Assignment,
    FormulaSyntaxError,
    SearchBudgetExceeded,
    SearchStats,
    avoids,
    find_occurrence,
    find_suffix_occurrence,
    flatten,
    instantiate,
    is_occurrence,
    iter_avoiding,
    longest_avoiding,
    parse_formula,
    phi,
    psi,
    reversal_symmetric,
    serialize,
    uniform_bounds,
)
from revavoid.words import Alphabet, is_d_directed

PAPER_FORMULAS = ["xyzy^Ux.zy^Uxy^Uz.y^R", "xyzx.yz^Uxy.z^R", "xyzy^Ux.zy^Uxy^Uz", "xyzyx.zyxy^Rz", "xyx^Uy"]


class TestParsing:
    def test_three_fragments(self):
        f = parse_formula("xyzx.yz^Uxy.z^R")
        assert len(f.fragments) == 3
        assert f.variables == ("x", "y", "z")
        assert f.undirected_positions() == [(1, 1)]
        decos = [o.decoration for fr in f.fragments for o in fr]
        assert decos.count("R") == 1 and decos.count("U") == 1

    def test_phi_text(self):
        assert parse_formula("x0x1.x1x0.x0^R.x1^R") == phi(2)

    @pytest.mark.parametrize("text", ["x..y", ".x", "x.", "", "x^", "x^Q", "X", "x-y"])
    def test_syntax_errors(self, text):
        with pytest.raises(FormulaSyntaxError):
            parse_formula(text)

    def test_error_position(self):
        with pytest.raises(FormulaSyntaxError) as err:
            parse_formula("x..y")
        assert err.value.position == 2

    def test_middle_dot_and_spaces(self):
        assert parse_formula("xyzx · yz^Uxy · z^R") == parse_formula("xyzx.yz^Uxy.z^R")

    @pytest.mark.parametrize("text", PAPER_FORMULAS)
    def test_round_trip(self, text):
        assert serialize(parse_formula(text)) == text

    @pytest.mark.parametrize("k", range(2, 9))
    def test_round_trip_families(self, k):
        for f in (phi(k), psi(k)):
            assert parse_formula(serialize(f)) == f


class TestFamilies:
    def test_phi(self):
        assert str(phi(2)) == "x0x1.x1x0.x0^R.x1^R"
        assert str(phi(3)) == "x0x1.x1x2.x2x0.x0^R.x1^R.x2^R"
        assert len(phi(2).variables) == 2 and len(phi(2).fragments) == 4
        with pytest.raises(ValueError):
            phi(1)

    def test_psi(self):
        assert str(psi(1)) == "xy1x.y1^R"
        assert str(psi(2)) == "xy1y2x.y1^R.y2^R"
        assert len(psi(3).fragments) == 4
        with pytest.raises(ValueError):
            psi(0)

    def test_flatten(self):
        assert str(flatten(parse_formula("xyzy^Ux.zy^Uxy^Uz.y^R"))) == "xyzyx.zyxyz.y"
        assert str(flatten(parse_formula("xx"))) == "xx"
        assert str(flatten(parse_formula("x^R"))) == "x"
        assert flatten(parse_formula("x^Uy")).is_classical()


class TestInstantiate:
    def test_reversed(self):
        f = parse_formula("xy^R")
        assert instantiate(f.fragments[0], Assignment({"x": "01", "y": "01"})) == "0110"

    def test_undirected_backward(self):
        f = parse_formula("y^U")
        assert instantiate(f.fragments[0], Assignment({"y": "001"}, {(0, 0): "B"})) == "100"

    def test_plain(self):
        assert instantiate(phi(2).fragments[0], Assignment({"x0": "0", "x1": "1"})) == "01"

    def test_missing(self):
        f = parse_formula("xy^U")
        with pytest.raises(ValueError):
            instantiate(f.fragments[0], Assignment({"x": "0"}))
        with pytest.raises(ValueError):
            instantiate(f.fragments[0], Assignment({"x": "0", "y": "1"}))
        with pytest.raises(ValueError):
            Assignment({"x": ""})

    def test_json_round_trip(self):
        a = Assignment({"x": "01", "y": "1"}, {(1, 1): "B"})
        assert Assignment.from_json(a.to_json()) == a


class TestFindOccurrence:
    def test_square(self):
        assert find_occurrence("00", parse_formula("xx"), {"x": 2}).images == {"x": "0"}

    def test_mirror_pair_first_witness(self):
        # "0" is a factor whose mirror image "0" is a factor; it precedes "01"
        a = find_occurrence("0110", parse_formula("x.x^R"), {"x": 4})
        assert a.images == {"x": "0"}
        a = find_occurrence("0110", parse_formula("xx^R"), {"x": 4})
        assert a.images == {"x": "1"}

    def test_phi2_in_periodic_word(self):
        assert find_occurrence("012012012", phi(2), uniform_bounds(phi(2), 2)) is None
        assert avoids("012012012", phi(2), 2)

    def test_avoids(self):
        assert not avoids("00", parse_formula("xx"), {"x": 1})
        assert avoids("01", parse_formula("xx"), {"x": 2})
        assert avoids("", parse_formula("x"), 1)

    def test_undirected_orientation_recorded(self):
        f = parse_formula("xyx^Uy")
        a = find_occurrence("0110100", f, 7)
        assert a.images == {"x": "1", "y": "0"}
        assert a.orientations == {(0, 2): "F"}
        assert avoids("0110", f, 4)

    def test_budget(self):
        w = "0120210121020120210201210120" * 2
        f = parse_formula("xyzyx.zyxyz")
        with pytest.raises(SearchBudgetExceeded):
            find_occurrence(w, f, len(w), budget=3)

    def test_stats_count_nodes(self):
        stats = SearchStats()
        find_occurrence("0120", parse_formula("xyx"), 4, stats=stats)
        assert stats.nodes > 0
        assert stats.merge(SearchStats(5)).nodes == stats.nodes + 5

    @pytest.mark.parametrize("text", ["xx", "x.x^R", "xyx^Uy", "xyx", "xy^Rx.y", "xyz^Uy^Ux"])
    def test_first_witness_matches_oracle(self, text):
        f = parse_formula(text)
        for w in all_words("01", 8 if len(f.variables) < 3 else 6):
            a = find_occurrence(w, f, len(w))
            expected = naive_first_occurrence(w, as_pairs(f))
            assert (None if a is None else dict(a.images)) == expected, w
            if a is not None:
                assert is_occurrence(w, f, a)

    @given(st.text(alphabet="012", min_size=1, max_size=9), st.sampled_from(["xx", "xyx", "x.x^R", "xy^Ux", "x0x1.x1x0.x0^R.x1^R"]), st.integers(1, 4))
    @settings(max_examples=200)
    def test_bounded_search_matches_oracle(self, w, text, cap):
        f = parse_formula(text)
        a = find_occurrence(w, f, cap)
        expected = naive_first_occurrence(w, as_pairs(f), max_len=cap)
        if expected is not None and any(len(v) > cap for v in expected.values()):
            expected = None
        got = None if a is None else dict(a.images)
        if got is None or expected is None:
            assert got == expected
        else:
            assert is_occurrence(w, f, a) and all(len(v) <= cap for v in got.values())

    @given(st.text(alphabet="01", min_size=1, max_size=12), st.integers(1, 3), st.integers(0, 3))
    def test_monotone_in_bounds(self, w, cap, extra):
        f = parse_formula("xyx^U")
        if not avoids(w, f, cap):
            assert not avoids(w, f, cap + extra)

    @given(st.text(alphabet="012", min_size=2, max_size=14), st.sampled_from(["x.x^R", "xy.y^R", "xyx.y^R"]))
    def test_mirrored_variable_respects_directedness(self, w, text):
        f = parse_formula(text)
        d = next(d for d in range(1, len(w) + 2) if is_d_directed(w, d) is None)
        a = find_occurrence(w, f, len(w))
        assume(a is not None)
        v = "x" if text == "x.x^R" else "y"
        # v occurs both plain and mirrored, so its image and its mirror image are factors
        assert len(a.images[v]) <= d - 1

    @given(st.text(alphabet="01", min_size=1, max_size=12), st.sampled_from(["xyx", "xx.yxy", "xyzyx.zyxyz"]))
    def test_classical_flatten_agrees(self, w, text):
        f = parse_formula(text)
        assert avoids(w, f, len(w)) == avoids(w, flatten(f), len(w))


class TestIncremental:
    @pytest.mark.parametrize("text", ["xx", "x.x^R", "xyx^Uy", "xyzy^Ux.zy^Uxy^Uz", "xyzx.yz^Uxy.z^R"])
    def test_suffix_search_decides_extension(self, text):
        f = parse_formula(text)
        for w in all_words("01", 9, 2):
            if avoids(w[:-1], f, len(w)):
                assert (find_suffix_occurrence(w, f, len(w)) is None) == avoids(w, f, len(w)), w

    @pytest.mark.parametrize("text", ["xyyx", "xy^Rx", "x^Uyx.y^R", "xyzyx.zxz", "xyxy^R", "xy^Uzyx"])
    def test_suffix_search_ternary(self, text):
        f = parse_formula(text)
        for w in all_words("012", 6, 2):
            if avoids(w[:-1], f, len(w)):
                assert (find_suffix_occurrence(w, f, len(w)) is None) == avoids(w, f, len(w)), w

    @given(st.text(alphabet="01", min_size=2, max_size=40))
    @settings(max_examples=150, deadline=None)
    def test_suffix_search_long_words(self, w):
        f = parse_formula("xyzy^Ux.zy^Uxy^Uz")
        assume(avoids(w[:-1], f, len(w)))
        a = find_suffix_occurrence(w, f, len(w))
        assert (a is None) == avoids(w, f, len(w))
        assert a is None or is_occurrence(w, f, a)

    def test_suffix_witness_is_genuine(self):
        f = parse_formula("xyzx.yz^Uxy.z^R")
        w = "0120210120102"
        a = find_suffix_occurrence(w, f, len(w))
        assert a is None or is_occurrence(w, f, a)


class TestReversalSymmetry:
    @pytest.mark.parametrize(
        "text,expected",
        [
            ("xyzy^Ux.zy^Uxy^Uz", True),
            ("xx", True),
            ("xyx.y^R", True),
            ("xy^Rx", True),
            ("xyx^Uy", False),
            ("xyzx.yz^Uxy.z^R", False),
        ],
    )
    def test_detection(self, text, expected):
        assert reversal_symmetric(parse_formula(text)) is expected

    @pytest.mark.parametrize(
        "text", ["xyzy^Ux.zy^Uxy^Uz", "xyx.y^R", "xy^Rx", "xyzyx.zyxy^Rz", "xy.yx^R", "x^Uyx.y", "xyx^Uy", "xyzx.yz^Uxy.z^R"]
    )
    def test_claim_is_sound(self, text):
        f = parse_formula(text)
        if reversal_symmetric(f):
            for w in all_words("01", 10):
                assert avoids(w, f, len(w)) == avoids(w[::-1], f, len(w)), w


class TestLongestAvoiding:
    def test_squares_binary(self):
        res = longest_avoiding(parse_formula("xx"), Alphabet(2), 10)
        assert (res.length, res.witness, res.exceeded, res.complete) == (3, "010", False, True)

    def test_squares_ternary(self):
        res = longest_avoiding(parse_formula("xx"), Alphabet(3), 10)
        assert res.exceeded and res.length == 10

    def test_budget(self):
        res = longest_avoiding(parse_formula("xx"), Alphabet(3), 50, budget=5)
        assert not res.complete and res.nodes == 5

    @pytest.mark.parametrize(
        "text,size,max_len",
        [("xx", 3, 14), ("xyx^Uy", 2, 16), ("xyzy^Ux.zy^Uxy^Uz", 2, 14), ("xyx.y^R", 3, 10), ("xyzx.yz^Uxy.z^R", 2, 12)],
    )
    def test_levels_agree_with_depth_first_walk(self, text, size, max_len):
        f = parse_formula(text)
        res = longest_avoiding(f, Alphabet(size), max_len)
        walked = list(iter_avoiding(f, Alphabet(size), max_len))
        longest = max(map(len, walked), default=0)
        assert res.length == longest
        assert res.witness == min(w for w in walked if len(w) == longest)
        assert res.exceeded == (longest == max_len)

    def test_level_callback(self):
        seen = []
        longest_avoiding(parse_formula("xx"), Alphabet(2), 10, on_level=lambda *a: seen.append(a))
        assert [a[0] for a in seen] == [2, 3]

    def test_walk_matches_filter(self):
        f = parse_formula("xyx^Uy")
        walked = set(iter_avoiding(f, Alphabet(2), 7))
        expected = {w for w in all_words("01", 7) if w[0] == "0" and avoids(w, f, len(w))}
        assert walked == expected

    def test_rejects_bad_length(self):
        with pytest.raises(ValueError):
            longest_avoiding(parse_formula("xx"), Alphabet(2), 0)
