#!/usr/bin/env python3
"""Symmetry is what the learner cannot recover.

A pointed cycle (one clicking state) has no nontrivial symmetry: the
coarsest action-stable refinement of its sensor partition is the identity,
and the learner rebuilds it exactly. Erase the click and the cycle becomes
perfectly symmetric under rotation; every history looks like every other,
and the best possible model collapses to a single state, still bisimilar
but no longer isomorphic.
"""

from dtslearn import (
    has_nontrivial_autobisimulation,
    learn,
    make_cycle,
    msr,
    partition_from_labels,
    verify_learned,
)

for pointed in (True, False):
    env = make_cycle(4, pointed=pointed)
    labels = [env.label_name_of(s) for s in range(4)]
    stable = msr(env, partition_from_labels(env))
    print(f"cycle with labels {labels}")
    print(f"  coarsest congruence below the sensor partition: "
          f"{stable.n_blocks} blocks -> "
          f"{'chiral (no symmetry)' if stable.is_identity else 'symmetric'}")
    print(f"  nontrivial autobisimulation: "
          f"{has_nontrivial_autobisimulation(env)}")

    model, report = learn(env, 0, max_depth=12)
    result = verify_learned(env, 0, model)
    print(f"  learned {model.n_states}-state model: isomorphic={result.isomorphic}, "
          f"bisimilar={result.bisimilar}, surpriseless={result.surpriseless}\n")

print("an A,B,A,B cycle sits in between: symmetric by a half turn,")
print("so the learner recovers the 2-state quotient, not the 4-cycle")
from dtslearn import TransitionSystem, are_isomorphic, quotient

striped = TransitionSystem.from_tables(
    ("CW", "CCW"), [[1, 3], [2, 0], [3, 1], [0, 2]], ["A", "B", "A", "B"], 0)
model, _ = learn(striped, 0, max_depth=12)
reference, _ = quotient(striped, msr(striped, partition_from_labels(striped)))
print(f"learned {model.n_states} states; matches the congruence quotient: "
      f"{are_isomorphic(model, reference, anchored=True)[0]}")
