"""Couple an internal system to an environment and decide surprise.

The coupled system runs both machines on the same action stream. An
internal state is "surprised" when two action histories lead to it while
the environment shows different sensor values; a coupling with no such
state admits a well-defined induced sensor map on internal states and is
bisimulation equivalent to the environment. Internal systems here are
exploratory: their transitions read the action, never the sensor value.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, replace

from .core import (
    InputError,
    PreconditionError,
    StateMap,
    TransitionSystem,
)
from .partitions import Partition, msr, partition_from_labels


@dataclass(frozen=True, eq=False)
class ProductSystem:
    """Reachable part of an environment coupled to an internal system.

    ``pairs`` lists the reachable (environment state, internal state) pairs
    in BFS order from the pair of initial states; ``pair_delta`` is the
    product transition table over pair indices. Parent links record, for
    each pair, the BFS tree edge used to reach it first.
    """

    env: TransitionSystem
    internal: TransitionSystem
    x0: int
    i0: int
    pairs: tuple[tuple[int, int], ...]
    pair_delta: tuple[tuple[int, ...], ...]
    parent_pair: tuple[int, ...]
    parent_action: tuple[int, ...]

    def access_word(self, pair_index: int) -> tuple[int, ...]:
        """Shortest, lexicographically first action word reaching the pair."""
        word = []
        p = pair_index
        while self.parent_pair[p] >= 0:
            word.append(self.parent_action[p])
            p = self.parent_pair[p]
        return tuple(reversed(word))


def couple(env: TransitionSystem, internal: TransitionSystem,
           x0: int, i0: int) -> ProductSystem:
    """BFS the reachable product of an environment and an internal system."""
    if env.labels is None:
        raise InputError("the environment must be labeled")
    if env.action_names != internal.action_names:
        raise InputError("action alphabets differ")
    if not 0 <= x0 < env.n_states:
        raise InputError(f"environment state {x0} is out of range")
    if not 0 <= i0 < internal.n_states:
        raise InputError(f"internal state {i0} is out of range")
    index = {(x0, i0): 0}
    pairs = [(x0, i0)]
    parent_pair = [-1]
    parent_action = [-1]
    rows: list[tuple[int, ...]] = []
    queue = deque([0])
    while queue:
        p = queue.popleft()
        x, i = pairs[p]
        row = []
        for a in range(env.n_actions):
            nxt = (env.delta[x][a], internal.delta[i][a])
            q = index.get(nxt)
            if q is None:
                q = index[nxt] = len(pairs)
                pairs.append(nxt)
                parent_pair.append(p)
                parent_action.append(a)
                queue.append(q)
            row.append(q)
        rows.append(tuple(row))
    return ProductSystem(env, internal, x0, i0, tuple(pairs), tuple(rows),
                         tuple(parent_pair), tuple(parent_action))


def diamond(prod: ProductSystem, seq) -> tuple[int, int]:
    """Run an action sequence through the coupling from the initial pair."""
    p = 0
    for a in seq:
        if not 0 <= a < prod.env.n_actions:
            raise InputError(f"action {a} is out of range")
        p = prod.pair_delta[p][a]
    return prod.pairs[p]


def restrict(env: TransitionSystem, internal: TransitionSystem,
             x0: int, i0: int) -> TransitionSystem:
    """The internal system as driven through the coupling.

    For exploratory internal systems the environment never influences the
    internal transition, so the result carries the internal system's own
    table; this is asserted by re-deriving every reachable transition from
    the product. The returned system is rooted at ``i0``.
    """
    prod = couple(env, internal, x0, i0)
    for p, (_, i) in enumerate(prod.pairs):
        for a in range(internal.n_actions):
            _, i_next = prod.pairs[prod.pair_delta[p][a]]
            assert i_next == internal.delta[i][a], \
                "coupled internal transition diverged from the internal table"
    return replace(internal, initial=i0)


def is_surpriseless(
    prod: ProductSystem,
) -> tuple[bool, tuple[tuple[int, ...], tuple[int, ...]] | None]:
    """Check that no internal state coexists with two different sensor values.

    On failure returns two access words, shortest first, that reach the same
    internal state while the environment shows different labels.
    """
    env = prod.env
    first_seen: dict[int, int] = {}
    for p, (x, i) in enumerate(prod.pairs):
        q = first_seen.setdefault(i, p)
        if env.labels[prod.pairs[q][0]] != env.labels[x]:
            return False, (prod.access_word(q), prod.access_word(p))
    return True, None


def induced_label(prod: ProductSystem) -> tuple[StateMap, tuple[int, ...]]:
    """Sensor map on internal states defined by any coupled partner.

    Requires a surpriseless coupling. Returns the map (into the
    environment's label ids) plus the internal states never reached by the
    coupling, whose entries default to 0 and carry no information.
    """
    ok, witness = is_surpriseless(prod)
    if not ok:
        u, u2 = witness
        raise PreconditionError(
            f"coupling is surprised: words {list(u)} and {list(u2)} reach the same "
            "internal state with different sensor values")
    env, internal = prod.env, prod.internal
    values: dict[int, int] = {}
    for x, i in prod.pairs:
        values.setdefault(i, env.labels[x])
    unreachable = tuple(i for i in range(internal.n_states) if i not in values)
    table = tuple(values.get(i, 0) for i in range(internal.n_states))
    return StateMap(internal.n_states, env.n_labels, table), unreachable


def with_induced_labels(prod: ProductSystem) -> TransitionSystem:
    """The internal system relabeled by the induced sensor map."""
    mapping, unreachable = induced_label(prod)
    if unreachable:
        raise PreconditionError(
            f"internal states {list(unreachable)} are unreachable in the coupling "
            "and cannot be labeled")
    names = [prod.env.label_names[mapping.map[i]] for i in range(prod.internal.n_states)]
    return TransitionSystem.from_tables(
        prod.internal.action_names, prod.internal.delta, names, prod.internal.initial)


def greatest_bisimulation(
    env: TransitionSystem, internal: TransitionSystem
) -> frozenset[tuple[int, int]]:
    """Largest relation matching labels and closed under every action.

    Starts from all label-agreeing pairs (labels compared by name) and
    repeatedly deletes pairs with some action leading outside the relation,
    until stable.
    """
    if env.labels is None or internal.labels is None:
        raise InputError("both systems must be labeled")
    if env.action_names != internal.action_names:
        raise InputError("action alphabets differ")
    alive = [
        [env.label_names[env.labels[x]] == internal.label_names[internal.labels[i]]
         for i in range(internal.n_states)]
        for x in range(env.n_states)
    ]
    changed = True
    while changed:
        changed = False
        for x in range(env.n_states):
            for i in range(internal.n_states):
                if not alive[x][i]:
                    continue
                for a in range(env.n_actions):
                    if not alive[env.delta[x][a]][internal.delta[i][a]]:
                        alive[x][i] = False
                        changed = True
                        break
    return frozenset((x, i)
                     for x in range(env.n_states)
                     for i in range(internal.n_states) if alive[x][i])


def are_bisimilar(env: TransitionSystem, internal: TransitionSystem,
                  x0: int, i0: int) -> bool:
    """True iff the two initial states lie in some bisimulation."""
    return (x0, i0) in greatest_bisimulation(env, internal)


def has_nontrivial_autobisimulation(env: TransitionSystem) -> bool:
    """Detect a symmetry of the environment, cross-checked two ways.

    Route one: the greatest bisimulation of the environment with itself
    strictly contains the diagonal. Route two: the coarsest congruence
    refining the sensor partition is not the identity. The two routes must
    agree; a mismatch raises, since it would falsify the refinement engine.
    """
    if env.labels is None:
        raise InputError("the environment must be labeled")
    relation = greatest_bisimulation(env, env)
    via_relation = len(relation) > env.n_states
    congruence = msr(env, partition_from_labels(env))
    via_msr = not congruence.is_identity
    if via_relation != via_msr:
        raise AssertionError(
            "autobisimulation detection disagrees with partition refinement")
    if env.n_states <= 512:
        assert relation == congruence.pairs(), \
            "greatest autobisimulation differs from the coarsest congruence"
    return via_relation
