#!/usr/bin/env python3
"""The equivalence-relation toolbox on a small worked example.

Partitions of a state set form a lattice; transition systems single out the
action-stable ones (each block steps into a single block). The key operator
refines any partition to the coarsest stable one below it, and it commutes
with projections between systems, which is why an agent can run it on raw
histories and still get the answer the environment would give.
"""

from dtslearn import (
    Partition,
    StateMap,
    generated_closure,
    is_refinement,
    is_sufficient,
    make_line,
    msr,
    msr_bruteforce,
    partition_from_labels,
    pullback,
    pushforward,
    quotient,
)

env = make_line(4)
labels = partition_from_labels(env)
print("sensor partition:", labels.blocks())

ok, witness = is_sufficient(env, labels)
print(f"stable under actions? {ok}; witness {witness} "
      "(two equivalent states step apart)")

stable = msr(env, labels)
print("coarsest stable refinement:", stable.blocks())
print("enumeration oracle agrees:", stable == msr_bruteforce(env, labels))

# closures: the finest equivalence containing given pairs
closed = generated_closure(5, [(0, 1), (2, 3), (3, 4)])
print("\nclosure of {01, 23, 34} on 5 points:", closed.blocks())

# transport along maps: a 2-to-1 projection from an 8-state double cover
cover_map = StateMap(8, 4, tuple(i // 2 for i in range(8)))
pulled = pullback(cover_map, labels)
print("\nsensor partition pulled to the cover:", pulled.blocks())
print("pushed back down:", pushforward(cover_map, pulled).blocks())
print("fibers always refine pullbacks:",
      is_refinement(Partition.from_block_of(cover_map.map), pulled))

# quotients: collapse a stable partition to a smaller system
striped = msr(env.unlabeled(), Partition.from_blocks(4, [[0, 1, 2, 3]]))
small, projection = quotient(env.unlabeled(), striped)
print(f"\ncollapsing the coarsest congruence: {small.n_states} state(s), "
      f"projection {projection.map}")
