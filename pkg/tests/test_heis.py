"""Heisenberg normal forms, witness words, and the deep-element family."""

import pytest
from hypothesis import given
from hypothesis import strategies as st

from deadends.core import OutOfBox, Word
from deadends.heis import (
    _SYMMETRIES,
    HeisFamilyRow,
    dd_witness,
    heis_family,
    heis_inverse,
    heis_mul,
    heis_step,
    nd_witness,
    nh_box,
    rederived_depth_bound,
    word_area_normal,
)

A, B = (0, 1), (1, 1)


def heis_words():
    return st.lists(
        st.tuples(st.integers(0, 1), st.sampled_from((1, -1))),
        max_size=12).map(lambda ls: Word(tuple(ls)))


class TestNormalForm:
    def test_commutator_is_central_generator(self):
        w = Word(((0, -1), (1, -1), (0, 1), (1, 1)))
        assert word_area_normal(w) == (0, 0, 1)

    def test_ba(self):
        assert word_area_normal(Word((B, A))) == (1, 1, -1)

    def test_mul_matches_step(self, heis_group):
        e = (2, -1, 3)
        for letter in heis_group.alphabet.signed_letters():
            idx, s = letter
            gen = (1, 0, 0) if idx == 0 else (0, 1, 0)
            if s < 0:
                gen = heis_inverse(gen)
            assert heis_step(e, letter) == heis_mul(e, gen)

    def test_inverse(self):
        e = (3, -2, 7)
        assert heis_mul(e, heis_inverse(e)) == (0, 0, 0)
        assert heis_mul(heis_inverse(e), e) == (0, 0, 0)

    @given(heis_words())
    def test_path_area_agrees_with_letter_recursion(self, heis_group, w):
        assert word_area_normal(w) == heis_group.evaluate(w)

    @given(heis_words(), heis_words())
    def test_mul_is_evaluation_of_concatenation(self, heis_group, u, v):
        lhs = heis_mul(heis_group.evaluate(u), heis_group.evaluate(v))
        assert lhs == heis_group.evaluate(u + v)


class TestSymmetries:
    @given(st.sampled_from(_SYMMETRIES), heis_words())
    def test_word_action_covers_element_action(self, sym, w):
        assert word_area_normal(sym.on_word(w)) == sym.on_element(word_area_normal(w))

    @given(st.sampled_from(_SYMMETRIES), heis_words())
    def test_word_action_preserves_length(self, sym, w):
        assert len(sym.on_word(w)) == len(w)

    def test_inverses_compose_to_identity(self):
        for sym in _SYMMETRIES:
            inv = sym.inverse()
            for e in ((1, 0, 0), (0, 1, 0), (2, -3, 5)):
                assert inv.on_element(sym.on_element(e)) == e


class TestWitnesses:
    @pytest.mark.parametrize("n", range(1, 7))
    def test_dd_witness(self, n):
        w = dd_witness(n)
        assert len(w) == 4 * n + 2
        assert word_area_normal(w) == (0, 0, n * n + 1)

    def test_dd_witness_rejects_n0(self):
        with pytest.raises(OutOfBox):
            dd_witness(0)

    def test_nd_box_exhaustive_n2(self):
        n = 2
        for i in range(-n - 1, n + 2):
            for j in range(-n - 1, n + 2):
                for k in range(-n * (n + 1) + 1, n * (n + 1)):
                    w = nd_witness(i, j, k, n)
                    assert len(w) <= 4 * n + 2
                    assert word_area_normal(w) == (i, j, k)
                    assert w.free_reduce() == w

    @pytest.mark.parametrize("bad", [(4, 0, 0), (0, -4, 0), (0, 0, 6)])
    def test_nd_witness_box_boundary(self, bad):
        with pytest.raises(OutOfBox):
            nd_witness(*bad, 2)

    def test_nh_box_contains_letter_perturbations(self, heis_group):
        n = 3
        pred, bounds = nh_box(2, n)
        g = (0, 0, n * n + 1)
        for l1 in heis_group.alphabet.signed_letters():
            e1 = heis_step(g, l1)
            assert pred(e1)
            for l2 in heis_group.alphabet.signed_letters():
                assert pred(heis_step(e1, l2))
        assert bounds == (2, 2, 11)

    def test_nh_box_rejects_bad_args(self):
        with pytest.raises(OutOfBox):
            nh_box(-1, 3)
        with pytest.raises(OutOfBox):
            nh_box(2, 0)


class TestFamily:
    def test_rederived_bounds(self):
        assert {n: rederived_depth_bound(n) for n in (3, 4, 5, 6)} == \
            {3: 3, 4: 3, 5: 4, 6: 4}

    def test_rederived_rejects_small_n(self):
        with pytest.raises(OutOfBox):
            rederived_depth_bound(2)

    def test_n3_row(self, heis_group, heis_ball22):
        row = heis_family(3, heis_ball22)
        assert row == HeisFamilyRow(3, 14, 3, 3, 7, False)

    def test_n4_row_hits_cap(self, heis_group, heis_ball22):
        row = heis_family(4, heis_ball22)
        assert (row.n, row.distance, row.depth_lower_bound) == (4, 18, 3)
        assert row.bfs_depth == 5 and row.bfs_depth_exceeds_cap

    def test_family_rejects_small_n(self, heis_ball22):
        with pytest.raises(OutOfBox):
            heis_family(2, heis_ball22)
