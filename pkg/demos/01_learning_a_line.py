#!/usr/bin/env python3
"""Walk through the whole pipeline on a 4-state line.

An agent sits at the left end of a short corridor. It can step left or
right; the ends absorb. Its only sensor turns green at the left end. We let
it act blindly, record what it sees, merge indistinguishable histories, and
watch an exact copy of the corridor crystallize out of the history tree.
"""

from dtslearn import (
    bounded_indistinguishability,
    explore,
    learn,
    make_line,
    star,
    verify_learned,
)

env = make_line(4)
print("the corridor:", env.delta, "labels:",
      [env.label_name_of(s) for s in range(4)])

# acting blindly: walk right four times, then left once
print("\nstate after RRRR:", star(env, 0, [1, 1, 1, 1]))
print("state after RRRRL:", star(env, 0, [1, 1, 1, 1, 0]))

# record every history of length <= 6 through the stepping oracle
trie = explore(env, 0, 6)
print(f"\nhistory tree: {trie.node_count} nodes to depth {trie.depth}")
for word in [(), (0,), (1,), (1, 1)]:
    node = trie.node_at(word)
    print(f"  after {list(word) or '[]'}: sees "
          f"{trie.label_names[trie.observation(node)]}")

# merge histories that no 3-step continuation can tell apart
classes = bounded_indistinguishability(trie, 3)
print(f"\nindistinguishability at horizon 3: {classes.n_blocks} classes "
      f"over {classes.n_states} shallow nodes")

# deepen until the candidate model stops changing
model, report = learn(env, 0, max_depth=12)
print("\n" + report.summary())
print("\nlearned model:", model.delta, "labels:",
      [model.label_name_of(s) for s in range(model.n_states)])

result = verify_learned(env, 0, model)
print(f"\nisomorphic={result.isomorphic} bisimilar={result.bisimilar} "
      f"surpriseless={result.surpriseless}")
