"""Rank factorization, naturalization, tuple extraction, and learning."""

from __future__ import annotations

from itertools import product

import numpy as np
import pytest

from fstlearn import (
    AnalysisError,
    ClosednessError,
    Decomposition,
    DegenerateRankError,
    Mask,
    NaturalityError,
    SampleSet,
    TransitionTuple,
    build_hankel_set,
    equivalent,
    eval_tuple,
    extract_tuple,
    full_rank_decompose,
    is_natural,
    language_upto,
    learn_fst,
    learn_pipeline,
    naturalize,
    trim,
    tuple_to_fst,
)
from conftest import (
    CHI1,
    CHI2,
    CHI3,
    DEMO_WORDS,
    GOLDEN_H_THETA,
    GOLDEN_MASK,
)
from oracles import random_attacker

import random

GOLDEN_P_NEW = np.array([[1.0, 0.0], [0.0, 1.0], [0.0, 1.0]])
GOLDEN_S_NEW = np.array([[1.0, 1.0, 1.0, 0.0], [1.0, 0.0, 0.0, 1.0]])


def golden_hankel_set(demo_dataset):
    return build_hankel_set(demo_dataset, GOLDEN_MASK)


def natural_tuple_of(machine):
    """Build the natural tuple an exact learner would produce, by hand.

    Coordinates are the machine's states in sorted order; t0 marks the
    initial state, t_inf the finals, and T_chi the arc pattern. Feeding
    it back through tuple_to_fst must reproduce the machine.
    """
    states = sorted(machine.states)
    idx = {s: k for k, s in enumerate(states)}
    r = len(states)
    t0 = np.zeros(r)
    t0[idx[machine.initial]] = 1.0
    t_inf = np.zeros(r)
    for s in machine.finals:
        t_inf[idx[s]] = 1.0
    trans = {}
    for (src, i, o, dst) in machine.transitions:
        trans.setdefault((i, o), np.zeros((r, r)))[idx[src], idx[dst]] = 1.0
    return TransitionTuple(t0=t0, t_inf=t_inf, trans=trans, r=r)


class TestFullRankDecompose:
    def test_golden_rank_and_reconstruction(self):
        d = full_rank_decompose(GOLDEN_H_THETA)
        assert d.r == 2
        assert np.max(np.abs(d.p @ d.s - GOLDEN_H_THETA)) < 1e-8

    def test_pseudo_inverses_invert_on_the_rank_space(self):
        d = full_rank_decompose(GOLDEN_H_THETA)
        assert np.allclose(d.p_pinv @ d.p, np.eye(2), atol=1e-10)
        assert np.allclose(d.s @ d.s_pinv, np.eye(2), atol=1e-10)

    def test_identity_input(self):
        d = full_rank_decompose(np.eye(3))
        assert d.r == 3
        assert np.max(np.abs(d.p @ d.s - np.eye(3))) < 1e-10

    def test_rank_one_input(self):
        d = full_rank_decompose(np.ones((3, 4)))
        assert d.r == 1
        assert np.max(np.abs(d.p @ d.s - np.ones((3, 4)))) < 1e-10

    def test_zero_matrix_is_degenerate(self):
        with pytest.raises(DegenerateRankError):
            full_rank_decompose(np.zeros((2, 3)))

    def test_factor_shape_validation(self):
        with pytest.raises(ValueError):
            Decomposition(
                p=np.ones((3, 2)),
                s=np.ones((3, 4)),
                p_pinv=np.ones((2, 3)),
                s_pinv=np.ones((4, 3)),
            )


class TestNaturalize:
    def test_golden_factors(self):
        nat, b = naturalize(full_rank_decompose(GOLDEN_H_THETA))
        assert np.array_equal(nat.p, GOLDEN_P_NEW)
        assert np.array_equal(nat.s, GOLDEN_S_NEW)
        assert b.shape == (2, 2)

    def test_golden_reconstruction_survives_rebasing(self):
        nat, _ = naturalize(full_rank_decompose(GOLDEN_H_THETA))
        assert np.max(np.abs(nat.p @ nat.s - GOLDEN_H_THETA)) < 1e-8

    def test_transported_pseudo_inverses_still_invert(self):
        nat, _ = naturalize(full_rank_decompose(GOLDEN_H_THETA))
        assert np.allclose(nat.p_pinv @ nat.p, np.eye(2), atol=1e-8)
        assert np.allclose(nat.s @ nat.s_pinv, np.eye(2), atol=1e-8)

    def test_already_natural_factors_pass_through(self):
        d = Decomposition.from_factors(GOLDEN_P_NEW, GOLDEN_S_NEW)
        nat, b = naturalize(d)
        assert np.array_equal(nat.p, GOLDEN_P_NEW)
        assert np.array_equal(nat.s, GOLDEN_S_NEW)
        assert np.array_equal(b, np.eye(2))

    def test_dependent_extra_row_fails_loudly(self):
        # Third row = first + second: rank 2 with a row that rebases to
        # [1, 1], which is not a basis vector, so no natural form exists.
        h = np.array([[1.0, 1.0, 0.0], [0.0, 1.0, 1.0], [1.0, 2.0, 1.0]])
        with pytest.raises(NaturalityError):
            naturalize(full_rank_decompose(h))


class TestExtractTuple:
    def test_golden_tuple(self, demo_dataset):
        hz = golden_hankel_set(demo_dataset)
        nat, _ = naturalize(full_rank_decompose(hz.h_theta))
        tup = extract_tuple(hz, nat)
        assert tup.r == 2
        assert np.allclose(tup.t0, [1.0, 0.0], atol=1e-8)
        assert np.allclose(tup.t_inf, [1.0, 1.0], atol=1e-8)
        assert np.allclose(tup.trans[CHI1], [[0.0, 1.0], [0.0, 0.0]], atol=1e-8)
        assert np.allclose(tup.trans[CHI2], [[0.0, 1.0], [0.0, 0.0]], atol=1e-8)
        assert np.allclose(tup.trans[CHI3], [[0.0, 0.0], [1.0, 0.0]], atol=1e-8)

    def test_factorization_identity_on_the_mask(self, demo_dataset):
        # P[i, :] T_chi S[:, j] must reproduce every H_chi entry.
        hz = golden_hankel_set(demo_dataset)
        nat, _ = naturalize(full_rank_decompose(hz.h_theta))
        tup = extract_tuple(hz, nat)
        for chi, hc in hz.h_chi.items():
            pred = nat.p @ tup.trans[chi] @ nat.s
            assert np.max(np.abs(pred - hc)) < 1e-6

    def test_rank_deficient_factors_rejected(self, demo_dataset):
        hz = golden_hankel_set(demo_dataset)
        bad = Decomposition.from_factors(
            np.array([[1.0, 0.0], [1.0, 0.0], [1.0, 0.0]]), GOLDEN_S_NEW
        )
        with pytest.raises(AnalysisError) as err:
            extract_tuple(hz, bad)
        assert err.value.stage == "extract"


class TestIsNatural:
    def test_golden_tuple_is_natural(self, demo_dataset):
        hz = golden_hankel_set(demo_dataset)
        nat, _ = naturalize(full_rank_decompose(hz.h_theta))
        assert is_natural(extract_tuple(hz, nat))

    def test_fractional_row_is_not(self):
        tup = TransitionTuple(
            t0=np.array([1.0, 0.0]),
            t_inf=np.array([1.0, 1.0]),
            trans={CHI1: np.array([[0.5, 0.5], [0.0, 0.0]])},
            r=2,
        )
        assert not is_natural(tup)

    def test_two_hot_initial_vector_is_not(self):
        tup = TransitionTuple(
            t0=np.array([1.0, 1.0]),
            t_inf=np.array([1.0, 0.0]),
            trans={},
            r=2,
        )
        assert not is_natural(tup)

    def test_all_zero_transition_matrices_are_fine(self):
        tup = TransitionTuple(
            t0=np.array([0.0, 1.0]),
            t_inf=np.array([0.0, 0.0]),
            trans={CHI1: np.zeros((2, 2))},
            r=2,
        )
        assert is_natural(tup)

    def test_shape_validation(self):
        with pytest.raises(ValueError):
            TransitionTuple(
                t0=np.array([1.0]),
                t_inf=np.array([1.0, 0.0]),
                trans={},
                r=2,
            )
        with pytest.raises(ValueError):
            TransitionTuple(
                t0=np.array([1.0, 0.0]),
                t_inf=np.array([1.0, 0.0]),
                trans={CHI1: np.zeros((1, 2))},
                r=2,
            )


class TestEvalTuple:
    @pytest.fixture
    def golden_tuple(self, demo_dataset):
        hz = golden_hankel_set(demo_dataset)
        nat, _ = naturalize(full_rank_decompose(hz.h_theta))
        return extract_tuple(hz, nat)

    def test_members_and_non_members(self, golden_tuple):
        assert abs(eval_tuple(golden_tuple, (CHI1, CHI3)) - 1.0) < 1e-8
        assert abs(eval_tuple(golden_tuple, (CHI3,))) < 1e-8
        assert abs(eval_tuple(golden_tuple, (CHI1, CHI1))) < 1e-8
        assert abs(eval_tuple(golden_tuple, ()) - 1.0) < 1e-8

    def test_matches_dataset_membership_over_the_horizon(self, golden_tuple):
        # Over the sampled horizon the tuple's word function must agree
        # with membership exactly; beyond it (length 3) with the true
        # attacker language, since the learned model generalizes.
        for n in range(4):
            for w in product((CHI1, CHI2, CHI3), repeat=n):
                want = 1.0 if w in DEMO_WORDS else 0.0
                assert abs(eval_tuple(golden_tuple, w) - want) < 1e-6

    def test_unknown_letter_rejected(self, golden_tuple):
        with pytest.raises(ValueError):
            eval_tuple(golden_tuple, ((("zz", "zz")),))


class TestTupleToFst:
    def test_golden_machine(self, demo_dataset, demo_attacker):
        hz = golden_hankel_set(demo_dataset)
        nat, _ = naturalize(full_rank_decompose(hz.h_theta))
        machine = tuple_to_fst(extract_tuple(hz, nat))
        assert len(machine.states) == 2
        assert equivalent(machine, demo_attacker)

    def test_non_natural_tuple_rejected(self):
        tup = TransitionTuple(
            t0=np.array([0.5, 0.5]),
            t_inf=np.array([1.0, 1.0]),
            trans={},
            r=2,
        )
        with pytest.raises(NaturalityError):
            tuple_to_fst(tup)

    def test_alphabet_must_cover_requested_letters(self, demo_dataset):
        hz = golden_hankel_set(demo_dataset)
        nat, _ = naturalize(full_rank_decompose(hz.h_theta))
        tup = extract_tuple(hz, nat)
        with pytest.raises(ValueError):
            tuple_to_fst(tup, alphabet=(CHI1, ("zz", "zz")))

    @pytest.mark.parametrize("seed", range(10))
    def test_round_trip_from_hand_built_natural_tuples(self, seed):
        machine = random_attacker(random.Random(seed))
        rebuilt = tuple_to_fst(natural_tuple_of(machine))
        assert equivalent(rebuilt, trim(machine))


class TestLinearTransformInvariance:
    def test_rebased_factors_evaluate_identically(self, demo_dataset):
        hz = golden_hankel_set(demo_dataset)
        nat, _ = naturalize(full_rank_decompose(hz.h_theta))
        base = extract_tuple(hz, nat)
        rng = np.random.default_rng(7)
        words = [w for n in range(4) for w in product((CHI1, CHI2, CHI3), repeat=n)]
        for _ in range(5):
            b = rng.normal(size=(2, 2))
            while abs(np.linalg.det(b)) < 1e-2:
                b = rng.normal(size=(2, 2))
            other = extract_tuple(
                hz, Decomposition.from_factors(nat.p @ np.linalg.inv(b), b @ nat.s)
            )
            for w in words:
                assert abs(eval_tuple(base, w) - eval_tuple(other, w)) < 1e-6


class TestLearnPipeline:
    def test_empty_sample_rejected(self):
        with pytest.raises(ValueError):
            learn_pipeline(SampleSet.from_words([]))

    def test_single_empty_word(self):
        machine = learn_fst(SampleSet.from_words([()]))
        assert len(machine.states) == 1
        assert set(language_upto(machine, 3)) == {()}

    def test_demo_learns_the_attacker(self, demo_dataset, demo_attacker):
        machine = learn_fst(demo_dataset)
        assert len(machine.states) == 2
        assert equivalent(machine, demo_attacker)

    def test_intermediates_are_consistent(self, demo_dataset):
        res = learn_pipeline(demo_dataset)
        assert res.mask == Mask(prefixes=((), (CHI2,)), suffixes=((), (CHI3,)))
        assert res.tup.r == 2
        assert res.b.shape == (2, 2)
        assert np.max(np.abs(res.natural.p @ res.natural.s - res.hankel.h_theta)) < 1e-8
        assert is_natural(res.tup)
        assert res.sample is demo_dataset

    def test_deterministic(self, demo_dataset):
        assert learn_pipeline(demo_dataset).fst == learn_pipeline(demo_dataset).fst

    def test_unclosed_sample_fails_loudly(self):
        # A sample containing only the one-letter word: the shifted block
        # leaves the (all-zero) row space, which must be reported as a
        # closedness failure rather than producing a machine.
        with pytest.raises(ClosednessError) as err:
            learn_fst(SampleSet.from_words([(CHI1,)]))
        assert err.value.stage == "closedness"
