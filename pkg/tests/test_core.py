import pytest

from dtslearn import (
    InputError,
    NotConnectedError,
    StateMap,
    TransitionSystem,
    are_isomorphic,
    canonical_form,
    is_homomorphism,
    is_minimally_distinguishing,
    is_strongly_connected,
    make_cycle,
    make_line,
    make_random,
    star,
)
from dtslearn.envs import SplitMix64

L, R = 0, 1


def rotate_only(n):
    """Single rotate action on an n-cycle."""
    return TransitionSystem(n, 1, ("rot",), tuple(((i + 1) % n,) for i in range(n)))


def permuted_copy(sys, perm):
    """Relabel states by a permutation; the result is isomorphic by design."""
    inv = [0] * sys.n_states
    for s, t in enumerate(perm):
        inv[t] = s
    delta = tuple(tuple(perm[sys.delta[inv[s]][a]] for a in range(sys.n_actions))
                  for s in range(sys.n_states))
    state_labels = None
    if sys.labels is not None:
        state_labels = [sys.label_names[sys.labels[inv[s]]] for s in range(sys.n_states)]
    initial = None if sys.initial is None else perm[sys.initial]
    return TransitionSystem.from_tables(sys.action_names, delta, state_labels, initial)


class TestValidation:
    def test_delta_must_be_total(self):
        with pytest.raises(InputError):
            TransitionSystem(2, 1, ("a",), ((0,),))

    def test_delta_entries_in_range(self):
        with pytest.raises(InputError):
            TransitionSystem(2, 1, ("a",), ((0,), (2,)))

    def test_action_names_distinct(self):
        with pytest.raises(InputError):
            TransitionSystem(1, 2, ("a", "a"), ((0, 0),))

    def test_initial_in_range(self):
        with pytest.raises(InputError):
            TransitionSystem(1, 1, ("a",), ((0,),), initial=1)

    def test_labels_come_with_names(self):
        with pytest.raises(InputError):
            TransitionSystem(1, 1, ("a",), ((0,),), labels=(0,))

    def test_label_ids_first_occurrence(self):
        with pytest.raises(InputError):
            TransitionSystem(2, 1, ("a",), ((0,), (1,)),
                             labels=(1, 0), label_names=("x", "y"))

    def test_from_tables_interns_names(self):
        sys = TransitionSystem.from_tables(("a",), [[1], [0]], ["hot", "cold"])
        assert sys.labels == (0, 1)
        assert sys.label_names == ("hot", "cold")


class TestStar:
    def test_left_edge_absorbs(self):
        assert star(make_line(4), 0, [L]) == 0

    def test_empty_sequence_is_identity(self):
        env = make_line(4)
        for s in range(4):
            assert star(env, s, []) == s

    def test_right_walk_saturates(self):
        # fold delta by hand: 0 -> 1 -> 2 -> 3 -> 3
        assert star(make_line(4), 0, [R, R, R, R]) == 3

    def test_out_of_range_state(self):
        with pytest.raises(InputError):
            star(make_line(4), 4, [])

    def test_out_of_range_action(self):
        with pytest.raises(InputError):
            star(make_line(4), 0, [2])

    def test_monoid_action_on_random_systems(self):
        rng = SplitMix64(7)
        for _ in range(25):
            sys = make_random(2 + rng.below(6), 1 + rng.below(3), rng.next_u64())
            u = [rng.below(sys.n_actions) for _ in range(rng.below(6))]
            v = [rng.below(sys.n_actions) for _ in range(rng.below(6))]
            s = rng.below(sys.n_states)
            assert star(sys, s, u + v) == star(sys, star(sys, s, u), v)


class TestStronglyConnected:
    def test_line_is_strongly_connected(self):
        assert is_strongly_connected(make_line(4))

    def test_two_fixed_states_are_not(self):
        sys = TransitionSystem(2, 2, ("a", "b"), ((0, 0), (1, 1)))
        assert not is_strongly_connected(sys)

    def test_rotation_generates_the_cycle(self):
        assert is_strongly_connected(rotate_only(4))

    def test_one_way_line_is_not(self):
        sys = TransitionSystem(3, 1, ("a",), ((1,), (2,), (2,)))
        assert not is_strongly_connected(sys)


class TestMinimallyDistinguishing:
    def test_line(self):
        ok, witness = is_minimally_distinguishing(make_line(4))
        assert ok and witness is None

    def test_merge_into_third_state_is_flagged(self):
        # states 1 and 2 both map to 0, and 0 is neither of them
        sys = TransitionSystem(3, 1, ("a",), ((0,), (0,), (0,)))
        ok, witness = is_minimally_distinguishing(sys)
        assert not ok
        assert witness == (0, 1, 2, 0)

    def test_group_action_cycles(self):
        for n in (2, 3, 4, 7):
            assert is_minimally_distinguishing(make_cycle(n))[0]

    def test_line_ends_are_the_allowed_merges(self):
        # delta(0,L)=delta(1,L)=0 merges, but 0 is one of the pair
        env = make_line(4)
        assert env.delta[0][L] == env.delta[1][L] == 0
        assert is_minimally_distinguishing(env)[0]


class TestCanonicalForm:
    def test_line_is_already_canonical(self):
        env = make_line(4)
        canon, relabel = canonical_form(env, 0)
        assert canon == env
        assert relabel.map == (0, 1, 2, 3)

    def test_bfs_ordered_system_gets_identity_map(self):
        env = make_line(5)
        _, relabel = canonical_form(env, 0)
        assert relabel.map == tuple(range(5))

    def test_cycle_anchor_invariance(self):
        # rotation symmetry: the table reads the same from any anchor
        env = make_cycle(4, pointed=False)
        from0, _ = canonical_form(env, 0)
        from2, _ = canonical_form(env, 2)
        assert from0.delta == from2.delta
        assert from0.labels == from2.labels

    def test_idempotent(self):
        rng = SplitMix64(3)
        for _ in range(20):
            sys = make_random(2 + rng.below(6), 2, rng.next_u64())
            once, _ = canonical_form(sys, 0)
            twice, _ = canonical_form(once, 0)
            assert once == twice

    def test_unreachable_state_raises(self):
        sys = TransitionSystem(2, 1, ("a",), ((0,), (0,)))
        with pytest.raises(NotConnectedError):
            canonical_form(sys, 0)

    def test_label_ids_reinterned(self):
        # anchoring at 1 makes "white" the first label seen
        env = make_line(3)
        canon, _ = canonical_form(env, 1)
        assert canon.label_names[canon.labels[0]] == "white"


class TestIsomorphism:
    def test_system_is_isomorphic_to_itself(self):
        env = make_line(4)
        ok, witness = are_isomorphic(env, env, anchored=True)
        assert ok
        assert witness.map == (0, 1, 2, 3)

    def test_permuted_copy_is_isomorphic(self):
        env = make_line(4)
        other = permuted_copy(env, [2, 0, 3, 1])
        ok, witness = are_isomorphic(env, other, anchored=True)
        assert ok
        assert witness.map == (2, 0, 3, 1)
        assert is_homomorphism(witness, env, other)

    def test_cycle_and_line_differ(self):
        # the line has a self-loop at its ends; the cycle has none
        line = make_line(4).unlabeled()
        cycle = TransitionSystem(4, 2, ("L", "R"),
                                 tuple(((i - 1) % 4, (i + 1) % 4) for i in range(4)))
        ok, _ = are_isomorphic(line, cycle, anchored=False)
        assert not ok

    def test_alphabet_mismatch_is_an_error(self):
        with pytest.raises(InputError):
            are_isomorphic(make_line(4), make_cycle(4))

    def test_unanchored_needs_strong_connectivity(self):
        sys = TransitionSystem(2, 1, ("a",), ((0,), (0,)))
        with pytest.raises(InputError):
            are_isomorphic(sys, sys, anchored=False)

    def test_labels_compared_by_name(self):
        a = TransitionSystem.from_tables(("u",), [[1], [0]], ["p", "q"], 0)
        b = TransitionSystem.from_tables(("u",), [[1], [0]], ["q", "p"], 0)
        assert not are_isomorphic(a, b, anchored=True)[0]
        # anchoring b at its other state aligns the label names again
        assert are_isomorphic(a, b, anchored=True, anchor_b=1)[0]

    def test_equivalence_relation_on_random_triples(self):
        rng = SplitMix64(11)
        for _ in range(10):
            base = make_random(2 + rng.below(5), 2, rng.next_u64())
            n = base.n_states
            perms = []
            for _ in range(2):
                perm = list(range(n))
                for i in range(n - 1, 0, -1):  # seeded Fisher-Yates
                    j = rng.below(i + 1)
                    perm[i], perm[j] = perm[j], perm[i]
                perms.append(perm)
            b = permuted_copy(base, perms[0])
            c = permuted_copy(base, perms[1])
            assert are_isomorphic(base, base, anchored=True)[0]   # reflexive
            ok_ab, m_ab = are_isomorphic(base, b, anchored=True)
            ok_ba, _ = are_isomorphic(b, base, anchored=True)
            assert ok_ab and ok_ba                                # symmetric
            ok_bc, _ = are_isomorphic(b, c, anchored=True)
            ok_ac, _ = are_isomorphic(base, c, anchored=True)
            assert ok_bc and ok_ac                                # transitive


class TestHomomorphism:
    def test_identity_map(self):
        env = make_line(4)
        assert is_homomorphism(StateMap.identity(4), env, env)

    def test_constant_map_onto_moving_state_fails(self):
        env = make_line(4)
        # state 1 moves under both actions, so a constant map cannot commute
        constant = StateMap(4, 4, (1, 1, 1, 1))
        assert not is_homomorphism(constant, env, env)

    def test_size_mismatch_is_an_error(self):
        env = make_line(4)
        with pytest.raises(InputError):
            is_homomorphism(StateMap.identity(3), env, env)

    def test_alphabet_mismatch_is_an_error(self):
        with pytest.raises(InputError):
            is_homomorphism(StateMap.identity(4), make_line(4), make_cycle(4))
