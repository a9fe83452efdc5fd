"""Geodesic automata: verification, pumping, and the depth cap."""

import pytest
from hypothesis import given
from hypothesis import strategies as st

from deadends.abelian import standard_zn
from deadends.core import DeadendError, GenAlphabet, Word
from deadends.geolang import (
    Dfa,
    FreeGroup,
    SoundnessUnverified,
    TooShort,
    builtin_dfas,
    depth_bound_check,
    dfa_accepts,
    dfa_run,
    extend_geodesic,
    free_reduced_dfa,
    pump_decompose,
    verify_language,
    zn_sorted_dfa,
)
from deadends.search import ball

AB = GenAlphabet(("a", "b"))


def loop_dfa():
    """Accepts (a|a-)*: not geodesic over Z^2, revisits product states."""
    return Dfa(1, 0, frozenset({0}),
               {(0, (0, 1)): 0, (0, (0, -1)): 0}, AB)


def detour_dfa():
    """Accepts exactly 'a a- b': every product state is fresh, still unsound."""
    return Dfa(4, 0, frozenset({3}),
               {(0, (0, 1)): 1, (1, (0, -1)): 2, (2, (1, 1)): 3}, AB)


def quadrant_dfa():
    """Accepts a^i b^j with i, j >= 0: sound over Z^2 but far from onto."""
    return Dfa(3, 0, frozenset({0, 1, 2}),
               {(0, (0, 1)): 1, (1, (0, 1)): 1,
                (0, (1, 1)): 2, (1, (1, 1)): 2, (2, (1, 1)): 2}, AB)


class TestDfa:
    def test_validation(self):
        with pytest.raises(DeadendError):
            Dfa(1, 1, frozenset(), {}, AB)
        with pytest.raises(DeadendError):
            Dfa(1, 0, frozenset({2}), {}, AB)
        with pytest.raises(DeadendError):
            Dfa(1, 0, frozenset({0}), {(0, (0, 1)): 5}, AB)
        with pytest.raises(DeadendError):
            Dfa(1, 0, frozenset({0}), {(0, (7, 1)): 0}, AB)

    def test_run_trace_stops_at_rejection(self):
        dfa = free_reduced_dfa(2)
        final, trace = dfa_run(dfa, Word.parse("a a-", dfa.alphabet))
        assert final is None
        assert len(trace) == 2 and trace[0] == dfa.start

    def test_accepts(self):
        dfa = free_reduced_dfa(2)
        assert dfa_accepts(dfa, Word.parse("a b a-", dfa.alphabet))
        assert not dfa_accepts(dfa, Word.parse("a a- b", dfa.alphabet))

    def test_json_round_trip_uses_inverse_tokens(self):
        dfa = free_reduced_dfa(2)
        obj = dfa.to_json_obj()
        assert any(row["letter"] == "a-" for row in obj["trans"])
        assert Dfa.from_json_obj(obj, dfa.alphabet) == dfa

    def test_json_rejects_duplicate_transition(self):
        dfa = zn_sorted_dfa(2)
        obj = dfa.to_json_obj()
        obj["trans"].append(dict(obj["trans"][0]))
        with pytest.raises(DeadendError):
            Dfa.from_json_obj(obj, dfa.alphabet)

    @given(st.lists(st.tuples(st.integers(0, 1), st.sampled_from((1, -1))),
                    max_size=10).map(lambda ls: Word(tuple(ls))))
    def test_free_dfa_accepts_exactly_reduced_words(self, w):
        dfa = free_reduced_dfa(2)
        assert dfa_accepts(dfa, w) == (w.free_reduce() == w)


class TestPump:
    def test_too_short(self):
        dfa = free_reduced_dfa(2)
        with pytest.raises(TooShort):
            pump_decompose(dfa, Word.parse("a b a b", dfa.alphabet))

    def test_rejected_word(self):
        dfa = free_reduced_dfa(2)
        with pytest.raises(DeadendError):
            pump_decompose(dfa, Word.parse("a a- a a- a", dfa.alphabet))

    def test_power_word(self):
        dfa = free_reduced_dfa(2)
        w = Word.parse("a a a a a", dfa.alphabet)
        a, b, c = pump_decompose(dfa, w)
        assert a + b + c == w and len(b) > 0
        assert len(b) + len(c) <= dfa.n_states
        assert dfa_accepts(dfa, a + b + b + c)
        # latest repeat wins: the loop is the final letter
        assert (len(a), len(b), len(c)) == (4, 1, 0)

    def test_mixed_word(self):
        dfa = zn_sorted_dfa(2)
        w = Word.parse("a a b b b", dfa.alphabet)
        a, b, c = pump_decompose(dfa, w)
        assert a + b + c == w
        assert b.letters == ((1, 1),) and len(c) == 0


class TestVerify:
    def test_builtin_f2(self):
        dfa, group = builtin_dfas()["f2_reduced"]
        index = ball(group, 6)
        report = verify_language(dfa, group, index)
        assert report.ok and report.sound and report.complete
        assert report.elements_covered == len(index) == 1457
        assert report.counterexample_word is None
        assert report.counterexample_element is None

    def test_builtin_z2(self):
        dfa, group = builtin_dfas()["z2_sorted"]
        index = ball(group, 6)
        report = verify_language(dfa, group, index)
        assert report.ok and report.elements_covered == 85

    def test_loop_dfa_convicted_by_revisit(self):
        group = standard_zn(2)
        index = ball(group, 4)
        report = verify_language(loop_dfa(), group, index)
        assert not report.sound and not report.ok
        w = report.counterexample_word
        assert w is not None and dfa_accepts(loop_dfa(), w)
        assert len(w) > index.distance(group.evaluate(w))

    def test_detour_dfa_convicted_on_fresh_states(self):
        group = standard_zn(2)
        report = verify_language(detour_dfa(), group, ball(group, 4))
        assert not report.sound
        w = report.counterexample_word
        assert w is not None and dfa_accepts(detour_dfa(), w)
        assert len(w) == 3 and group.evaluate(w) == (0, 1)

    def test_quadrant_dfa_sound_but_incomplete(self):
        group = standard_zn(2)
        report = verify_language(quadrant_dfa(), group, ball(group, 4))
        assert report.sound and not report.complete and not report.ok
        assert report.counterexample_element == "(-1,0)"


class TestExtend:
    def test_pumps_outward(self):
        dfa, group = builtin_dfas()["z2_sorted"]
        index = ball(group, 6)
        report = verify_language(dfa, group, index)
        w = Word.parse("a a b b b", dfa.alphabet)
        g2, pumped = extend_geodesic(dfa, group, w, index, report)
        assert g2 == (2, 4) and len(pumped) == 6
        assert index.distance(g2) == 6

    def test_requires_matching_sound_report(self):
        dfa, group = builtin_dfas()["z2_sorted"]
        index = ball(group, 6)
        other_dfa, other_group = builtin_dfas()["f2_reduced"]
        other_report = verify_language(other_dfa, other_group, ball(other_group, 4))
        w = Word.parse("a a b b b", dfa.alphabet)
        with pytest.raises(SoundnessUnverified):
            extend_geodesic(dfa, group, w, index, other_report)

    def test_rejects_failed_verification(self):
        group = standard_zn(2)
        index = ball(group, 4)
        bad = loop_dfa()
        report = verify_language(bad, group, index)
        assert not report.sound
        with pytest.raises(SoundnessUnverified):
            extend_geodesic(bad, group, Word.parse("a a a a", AB), index, report)


class TestDepthBound:
    def test_z2_certified(self):
        dfa, group = builtin_dfas()["z2_sorted"]
        index = ball(group, 17)
        report = verify_language(dfa, group, index)
        assert depth_bound_check(dfa, group, index, report) == (1, 10)

    def test_needs_full_verification(self):
        group = standard_zn(2)
        index = ball(group, 4)
        report = verify_language(quadrant_dfa(), group, index)
        with pytest.raises(SoundnessUnverified):
            depth_bound_check(quadrant_dfa(), group, index, report)


class TestFixtures:
    def test_free_group_reduces(self):
        g = FreeGroup(2)
        e = g.evaluate(Word.parse("a b b- a- a", g.alphabet))
        assert e == ((0, 1),)
        assert g.render(g.identity) == "e"

    def test_free_group_rank_bounds(self):
        with pytest.raises(DeadendError):
            FreeGroup(0)

    def test_zn_dfa_dimension_bounds(self):
        with pytest.raises(DeadendError):
            zn_sorted_dfa(0)

    def test_catalog(self):
        cat = builtin_dfas()
        assert set(cat) == {"f2_reduced", "z2_sorted"}
        for dfa, group in cat.values():
            assert dfa.alphabet.size == group.alphabet.size
