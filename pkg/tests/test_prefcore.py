import itertools
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from choicelab.errors import CapExceeded, ValidationError
from choicelab.manipulation import theorem1_profile
from choicelab.prefcore import (
    GENERAL,
    STRICT,
    TOURNAMENT,
    WEAK,
    DomainSpec,
    MarginMatrix,
    PreferenceRelation,
    Profile,
    condorcet_winner,
    enumerate_profiles,
    enumerate_relations,
    full_indifference,
    kelly_strict,
    kelly_weak,
    margin_matrix,
    relation_count,
    relation_from_ranking,
    relation_from_tiers,
    restrict,
    weaken_variants,
)
from oracles import count_margins

# the 3m-voter construction for m = 3, written out by hand as tier lists (0-based ids)
CONSTRUCTION_M3 = [
    [[1, 2], [0]], [[1, 2], [0]],
    [[0, 2], [1]], [[0, 2], [1]],
    [[0, 1], [2]], [[0, 1], [2]],
    [[2], [0], [1]],
    [[0], [1], [2]],
    [[1], [2], [0]],
]
CONSTRUCTION_M3_MARGINS = ((0, 1, -1), (-1, 0, 1), (1, -1, 0))


def ordered_partitions_oracle(m):
    """Count weak orders by brute force: keep transitive complete relations."""
    count = 0
    for verdicts in itertools.product((1, 0, -1), repeat=m * (m - 1) // 2):
        R = {}
        for (a, b), v in zip(itertools.combinations(range(m), 2), verdicts):
            R[a, b], R[b, a] = v >= 0, v <= 0
        for a in range(m):
            R[a, a] = True
        if all(not (R[a, b] and R[b, c]) or R[a, c] for a in range(m) for b in range(m) for c in range(m)):
            count += 1
    return count


relations3 = st.sampled_from(list(enumerate_relations(3, GENERAL)))
weak4 = st.sampled_from(list(enumerate_relations(4, WEAK)))


def profiles(rel_strategy, m, max_n=4):
    return st.lists(rel_strategy, min_size=1, max_size=max_n).map(lambda vs: Profile.of(vs))


class TestRelations:
    def test_linear_tiers(self):
        r = relation_from_tiers([[0], [1], [2]])
        assert r.strictly_prefers(0, 1) and r.strictly_prefers(0, 2) and r.strictly_prefers(1, 2)
        assert r.is_linear()

    def test_single_tier_is_full_indifference(self):
        assert relation_from_tiers([[0, 1, 2]]) == full_indifference(3)

    def test_construction_column_shape(self):
        r = relation_from_tiers([[1, 2], [0]])
        assert r.indifferent(1, 2)
        assert r.strictly_prefers(1, 0) and r.strictly_prefers(2, 0)

    def test_tiers_must_partition(self):
        with pytest.raises(ValidationError):
            relation_from_tiers([[0, 1], [1, 2]])
        with pytest.raises(ValidationError):
            relation_from_tiers([[0], [2]], m=3)

    def test_strict_mode_rejects_ties_and_cycles(self):
        with pytest.raises(ValidationError):
            PreferenceRelation(3, (1, 1, 0), STRICT)
        with pytest.raises(ValidationError):
            PreferenceRelation(3, (1, -1, 1), STRICT)  # a>b, c>a, b>c

    def test_general_allows_cycles(self):
        r = PreferenceRelation(3, (1, -1, 1), GENERAL)
        assert not r.is_transitive()

    def test_tiers_roundtrip(self):
        for r in enumerate_relations(4, WEAK):
            assert relation_from_tiers(r.tiers(), 4) == r

    @given(relations3)
    def test_completeness_and_consistency(self, r):
        for a, b in itertools.permutations(range(3), 2):
            assert r.weakly_prefers(a, b) or r.weakly_prefers(b, a)
            assert r.strictly_prefers(a, b) == (r.weakly_prefers(a, b) and not r.weakly_prefers(b, a))


class TestRestrict:
    def test_full_universe_is_identity(self):
        P = theorem1_profile(3)
        assert restrict(P, range(3)) == P

    def test_subrelation(self):
        P = Profile.of([relation_from_ranking([0, 1, 2])])
        Q = restrict(P, [0, 2])
        assert Q.m == 2 and Q.labels == ("a1", "a3")
        assert Q.voters[0].strictly_prefers(0, 1)

    def test_construction_pair_margin_matches_full(self):
        P = theorem1_profile(3)
        g_full = count_margins(CONSTRUCTION_M3, 3)
        sub = margin_matrix(restrict(P, [0, 1]))
        assert sub.g(0, 1) == g_full[0][1]

    @given(profiles(weak4, 4), st.sets(st.integers(0, 3), min_size=1))
    def test_margins_commute_with_restriction(self, P, A):
        A = sorted(A)
        on_sub = margin_matrix(restrict(P, A))
        direct = margin_matrix(P, A)
        for (i, a), (j, b) in itertools.product(enumerate(A), repeat=2):
            assert on_sub.g(i, j) == direct.g(a, b)


class TestMargins:
    def test_unanimity(self):
        g = margin_matrix(Profile.of([relation_from_ranking([0, 1, 2])] * 3))
        assert g.g(0, 1) == g.g(0, 2) == g.g(1, 2) == 3

    def test_all_indifferent_is_zero(self):
        g = margin_matrix(Profile.of([full_indifference(4)] * 5))
        assert all(v == 0 for row in g.entries for v in row)

    def test_construction_m3_matrix(self):
        # frozen value, re-derived here by the direct count oracle
        assert tuple(map(tuple, count_margins(CONSTRUCTION_M3, 3))) == CONSTRUCTION_M3_MARGINS
        assert margin_matrix(theorem1_profile(3)).entries == CONSTRUCTION_M3_MARGINS

    @pytest.mark.parametrize("m", [3, 4, 5])
    def test_construction_against_count_oracle(self, m):
        P = theorem1_profile(m)
        ballots = [r.tiers() for r in P.voters]
        assert margin_matrix(P).entries == tuple(map(tuple, count_margins(ballots, m)))

    def test_rejects_non_skew(self):
        with pytest.raises(ValidationError):
            MarginMatrix((0, 1), ((0, 1), (1, 0)), 1)

    @given(profiles(relations3, 3, max_n=5))
    def test_skew_symmetric_and_parity(self, P):
        g = margin_matrix(P)
        for a, b in itertools.product(range(3), repeat=2):
            assert g.g(a, b) == -g.g(b, a)
            assert abs(g.g(a, b)) <= P.n
        if all(r.is_strict() for r in P.voters):
            assert all(g.g(a, b) % 2 == P.n % 2 for a, b in itertools.combinations(range(3), 2))

    @given(profiles(relations3, 3, max_n=4), st.randoms())
    def test_voter_order_irrelevant(self, P, rnd):
        voters = list(P.voters)
        rnd.shuffle(voters)
        assert margin_matrix(Profile(P.labels, tuple(voters))) == margin_matrix(P)


class TestCondorcet:
    def test_unanimity(self):
        P = Profile.of([relation_from_ranking([2, 0, 1])] * 2)
        assert condorcet_winner(margin_matrix(P)) == 2

    def test_cycle_has_none(self):
        P = Profile.of([relation_from_ranking(o) for o in ([0, 1, 2], [1, 2, 0], [2, 0, 1])])
        assert condorcet_winner(margin_matrix(P)) is None

    def test_at_most_one_on_tournaments(self):
        for m in range(1, 6):
            for r in enumerate_relations(m, TOURNAMENT):
                g = margin_matrix(Profile.of([r]))
                beats_all = [a for a in range(m) if all(g.g(a, b) > 0 for b in range(m) if b != a)]
                assert len(beats_all) <= 1
                assert condorcet_winner(g) == (beats_all[0] if beats_all else None)


class TestWeakenVariants:
    def test_b_over_a(self):
        r = relation_from_ranking([1, 0])
        out = weaken_variants(r, 0, 1)
        assert [v.compare(0, 1) for v in out] == [-1, 0, 1]

    def test_a_over_b_is_fixed(self):
        r = relation_from_ranking([0, 1])
        assert weaken_variants(r, 0, 1) == [r]

    def test_indifference(self):
        out = weaken_variants(full_indifference(2), 0, 1)
        assert [v.compare(0, 1) for v in out] == [0, 1]

    def test_equal_pair_rejected(self):
        with pytest.raises(ValidationError):
            weaken_variants(full_indifference(2), 1, 1)

    @given(relations3, st.permutations(range(3)))
    def test_only_the_pair_moves_upward(self, r, perm):
        a, b = perm[0], perm[1]
        out = weaken_variants(r, a, b)
        assert out[0] == r and len(set(out)) == len(out)
        for v in out:
            assert v.compare(a, b) >= r.compare(a, b)
            for x, y in itertools.combinations(range(3), 2):
                if {x, y} != {a, b}:
                    assert v.compare(x, y) == r.compare(x, y)


class TestKelly:
    def test_reflexive(self):
        r = relation_from_ranking([0, 1])
        assert kelly_weak({0}, {0}, r)
        assert not kelly_strict({0}, {0}, r)

    def test_dominating_singleton(self):
        r = relation_from_ranking([0, 1])
        assert kelly_weak({0}, {0, 1}, r) and kelly_strict({0}, {0, 1}, r)
        assert not kelly_weak({0, 1}, {0}, r)

    def test_incomparable(self):
        r = relation_from_ranking([0, 1, 2])
        assert not kelly_weak({0, 2}, {1}, r) and not kelly_weak({1}, {0, 2}, r)

    def test_full_indifference(self):
        r = full_indifference(3)
        for X, Y in itertools.product([{0}, {1, 2}, {0, 1, 2}], repeat=2):
            assert kelly_weak(X, Y, r) and not kelly_strict(X, Y, r)

    def test_transitive_on_weak_orders(self):
        sets = [frozenset(s) for k in (1, 2, 3) for s in itertools.combinations(range(4), k)]
        for r in enumerate_relations(4, WEAK):
            weak = {(X, Y) for X in sets for Y in sets if kelly_weak(X, Y, r)}
            for (X, Y), Z in itertools.product(weak, sets):
                if (Y, Z) in weak:
                    assert (X, Z) in weak

    @given(relations3, st.sets(st.integers(0, 2), min_size=1), st.sets(st.integers(0, 2), min_size=1))
    def test_strict_implies_weak(self, r, X, Y):
        if kelly_strict(X, Y, r):
            assert kelly_weak(X, Y, r)


class TestEnumeration:
    def test_counts_m3(self):
        assert len(list(enumerate_relations(3, STRICT))) == 6
        assert len(list(enumerate_relations(3, WEAK))) == 13 == ordered_partitions_oracle(3)
        assert len(list(enumerate_relations(3, GENERAL))) == 27

    @pytest.mark.parametrize("m", [1, 2, 3, 4, 5])
    def test_counts_against_formulas(self, m):
        assert len(list(enumerate_relations(m, STRICT))) == math.factorial(m)
        assert len(list(enumerate_relations(m, TOURNAMENT))) == 2 ** (m * (m - 1) // 2)
        assert relation_count(m, WEAK) == len(list(enumerate_relations(m, WEAK)))
        if m <= 4:
            assert relation_count(m, WEAK) == ordered_partitions_oracle(m)
            assert len(list(enumerate_relations(m, GENERAL))) == 3 ** (m * (m - 1) // 2)

    @pytest.mark.parametrize("mode", [STRICT, WEAK, GENERAL, TOURNAMENT])
    def test_duplicate_free_and_stable(self, mode):
        first = list(enumerate_relations(4, mode))
        assert len(set(first)) == len(first)
        assert first == list(enumerate_relations(4, mode))

    def test_profile_counts(self):
        assert sum(1 for _ in enumerate_profiles(DomainSpec(3, 3, STRICT))) == 216
        assert sum(1 for _ in enumerate_profiles(DomainSpec(2, 3, WEAK))) == 169 == 13**2
        for m in (1, 2, 3):
            assert sum(1 for _ in enumerate_profiles(DomainSpec(1, m, WEAK))) == relation_count(m, WEAK)

    def test_cap(self, monkeypatch):
        monkeypatch.setenv("CHOICELAB_CAP", "100")
        with pytest.raises(CapExceeded):
            next(enumerate_profiles(DomainSpec(3, 3, STRICT)))

    def test_sampling_is_seeded(self):
        spec = DomainSpec(3, 4, GENERAL, samples=20, seed=7)
        assert list(enumerate_profiles(spec)) == list(enumerate_profiles(spec))
        assert not spec.exhaustive

    def test_sampling_requires_seed(self):
        with pytest.raises(ValidationError):
            DomainSpec(2, 3, GENERAL, samples=5)
