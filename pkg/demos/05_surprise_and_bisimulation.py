#!/usr/bin/env python3
"""Surprise, induced sensors, and why surprise-free means bisimilar.

Couple an internal machine to an environment: both consume the same action
stream. The internal machine is surprised when two of its histories land in
the same internal state while the environment shows different sensor
values. A surprise-free machine inherits a well-defined sensor map, and
with it, its start state is bisimilar to the environment's.
"""

from dtslearn import (
    TransitionSystem,
    are_bisimilar,
    couple,
    diamond,
    induced_label,
    is_surpriseless,
    learn,
    make_line,
    with_induced_labels,
)

env = make_line(4)

# a one-state internal machine: everything collapses, surprise guaranteed
point = TransitionSystem.from_tables(("L", "R"), [[0, 0]], initial=0)
prod = couple(env, point, 0, 0)
print("coupled pairs (env state, internal state):", prod.pairs)
print("after RR the pair is", diamond(prod, [1, 1]))

quiet, witness = is_surpriseless(prod)
names = env.action_names
fmt = lambda w: " ".join(names[a] for a in w) or "[]"
print(f"surpriseless? {quiet}; the histories '{fmt(witness[0])}' and "
      f"'{fmt(witness[1])}' reach the same internal state "
      "but see green vs white")

# a learned model: surprise-free by construction
model, _ = learn(env, 0, max_depth=12)
prod = couple(env, model, 0, 0)
print("\nlearned model coupling surpriseless?", is_surpriseless(prod)[0])

mapping, unreachable = induced_label(prod)
print("sensor map induced on internal states:",
      [env.label_names[mapping(i)] for i in range(model.n_states)])

relabeled = with_induced_labels(prod)
print("bisimilar to the environment under that map:",
      are_bisimilar(env, relabeled, 0, 0))
