"""Reconstruct an environment from action-observation histories alone.

The learner drives an environment through a stepping oracle (start a
session at the hidden initial state, apply actions, read sensor values);
it never sees states or the transition table. Histories form a truncated
action trie with one observation per node. Nodes that cannot be told apart
by any continuation up to a horizon are merged, and the merged classes form
a candidate model of the environment. Deepening the trie until two
successive candidates agree yields, for well-behaved environments, a model
isomorphic to the environment itself.

Two interchangeable realizations of the per-depth candidate are provided:

* ``trie`` materializes the complete trie of all action words up to the
  depth and partitions its nodes by iterated splitting. Exact but
  exponential in the depth; used below a node budget.
* ``frontier`` keeps one representative word per distinguishable behavior
  and compares observation trees of bounded horizon. Polynomial in the
  environment size; produces the same candidates whenever representative
  choice is immaterial, which the deepening stop rule cross-checks.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .core import (
    InputError,
    TransitionSystem,
    canonical_form,
    are_isomorphic,
)
from .coupling import couple, is_surpriseless, are_bisimilar
from .partitions import Partition

EXPLORE_NODE_BUDGET = 1 << 25
DEFAULT_TRIE_BUDGET = 500_000


def count_nodes(n_actions: int, depth: int) -> int:
    """Number of action words of length at most ``depth``."""
    if n_actions == 1:
        return depth + 1
    return (n_actions ** (depth + 1) - 1) // (n_actions - 1)


class EnvOracle:
    """Black-box stepping interface to a labeled environment.

    Sessions start at the fixed hidden initial state; stepping applies one
    action per session and returns the sensor value at the state reached.
    Many sessions run in parallel as an array. The transition table itself
    is never exposed, and every reset and step is counted.
    """

    def __init__(self, env: TransitionSystem, x0: int):
        if env.labels is None:
            raise InputError("the environment must be labeled")
        if not 0 <= x0 < env.n_states:
            raise InputError(f"state {x0} is out of range")
        self._delta = np.asarray(env.delta, dtype=np.int64)
        self._labels = np.asarray(env.labels, dtype=np.int32)
        self._x0 = x0
        self._cur = np.empty(0, dtype=np.int64)
        self.n_actions = env.n_actions
        self.action_names = env.action_names
        self.label_names = env.label_names
        self.resets = 0
        self.steps = 0

    def start(self, sessions: int) -> np.ndarray:
        """Begin ``sessions`` parallel runs; returns the initial sensor values."""
        self._cur = np.full(sessions, self._x0, dtype=np.int64)
        self.resets += sessions
        return self._labels[self._cur]

    def step(self, actions) -> np.ndarray:
        """Apply one action per session (scalar broadcasts); returns sensor values."""
        self._cur = self._delta[self._cur, actions]
        self.steps += len(self._cur)
        return self._labels[self._cur]

    def walk(self, word) -> list[int]:
        """One session through ``word``; sensor values at every step, start included."""
        out = [int(self.start(1)[0])]
        for a in word:
            out.append(int(self.step(a)[0]))
        return out


def _as_oracle(env, x0: int | None) -> EnvOracle:
    if isinstance(env, EnvOracle):
        return env
    if x0 is None:
        x0 = env.initial
    if x0 is None:
        raise InputError("no initial state given and the environment carries none")
    return EnvOracle(env, x0)


@dataclass(frozen=True, eq=False)
class HistoryTrie:
    """All action words up to a depth, with the observed sensor value at each.

    Nodes are numbered in BFS order (root 0, then words of length 1 in
    action order, and so on); ``levels[d]`` holds the observations of the
    length-``d`` words in lexicographic order.
    """

    n_actions: int
    depth: int
    action_names: tuple[str, ...]
    label_names: tuple[str, ...]
    levels: tuple[np.ndarray, ...]
    offsets: tuple[int, ...] = field(init=False)

    def __post_init__(self):
        offs = [0]
        for lvl in self.levels:
            lvl.setflags(write=False)
            offs.append(offs[-1] + len(lvl))
        object.__setattr__(self, "offsets", tuple(offs))

    @property
    def node_count(self) -> int:
        return self.offsets[-1]

    def level_of(self, node: int) -> int:
        if not 0 <= node < self.node_count:
            raise InputError(f"node {node} is out of range")
        d = 0
        while self.offsets[d + 1] <= node:
            d += 1
        return d

    def observation(self, node: int) -> int:
        d = self.level_of(node)
        return int(self.levels[d][node - self.offsets[d]])

    def child(self, node: int, action: int) -> int:
        d = self.level_of(node)
        if d == self.depth:
            raise InputError(f"node {node} is a leaf")
        if not 0 <= action < self.n_actions:
            raise InputError(f"action {action} is out of range")
        local = node - self.offsets[d]
        return self.offsets[d + 1] + local * self.n_actions + action

    def parent(self, node: int) -> tuple[int, int] | None:
        """The parent node and the action leading here; None at the root."""
        d = self.level_of(node)
        if d == 0:
            return None
        local = node - self.offsets[d]
        return self.offsets[d - 1] + local // self.n_actions, local % self.n_actions

    def node_at(self, word) -> int:
        node = 0
        for a in word:
            node = self.child(node, a)
        return node

    def word_of(self, node: int) -> tuple[int, ...]:
        out = []
        link = self.parent(node)
        while link is not None:
            node, a = link
            out.append(a)
            link = self.parent(node)
        return tuple(reversed(out))


def explore(env, x0: int | None, depth: int) -> HistoryTrie:
    """Record the observation at every action word of length up to ``depth``.

    The environment is touched only through the stepping oracle, one
    session per deepest word; observations of shorter words are read off
    along the way.
    """
    oracle = _as_oracle(env, x0)
    if depth < 0:
        raise InputError("depth must be non-negative")
    m = oracle.n_actions
    if count_nodes(m, depth) > EXPLORE_NODE_BUDGET:
        raise InputError(
            f"a depth-{depth} trie over {m} actions exceeds the node budget")
    sessions = m ** depth
    obs = oracle.start(sessions)
    levels = [obs[::sessions].copy()]
    for t in range(depth):
        stride = m ** (depth - 1 - t)
        actions = (np.arange(sessions) // stride) % m
        obs = oracle.step(actions)
        levels.append(obs[::stride].copy())
    return HistoryTrie(m, depth, oracle.action_names, oracle.label_names, tuple(levels))


def _canonical_array(arr: np.ndarray) -> tuple[np.ndarray, int]:
    """Renumber arbitrary ids by first occurrence; returns ids and count."""
    uniq, first, inverse = np.unique(arr, return_index=True, return_inverse=True)
    rank = np.empty(len(uniq), dtype=np.int64)
    rank[np.argsort(first, kind="stable")] = np.arange(len(uniq))
    return rank[inverse], len(uniq)


def bounded_indistinguishability(trie: HistoryTrie, horizon: int) -> Partition:
    """Merge nodes whose observations agree on every continuation up to ``horizon``.

    Computed by iterated splitting from the observation partition: round
    ``j`` splits by the children's round ``j-1`` classes, so after the last
    round two nodes of depth at most ``depth - horizon`` share a class iff
    no continuation word of length up to the horizon separates them.
    """
    if not 0 <= horizon <= trie.depth:
        raise InputError("horizon must lie between 0 and the trie depth")
    m = trie.n_actions
    classes = [lvl.astype(np.int64) for lvl in trie.levels]
    for j in range(1, horizon + 1):
        rows = [np.column_stack([classes[d], classes[d + 1].reshape(-1, m)])
                for d in range(trie.depth - j + 1)]
        sizes = [len(r) for r in rows]
        _, inverse = np.unique(np.concatenate(rows), axis=0, return_inverse=True)
        inverse = inverse.reshape(-1)
        classes, pos = [], 0
        for size in sizes:
            classes.append(inverse[pos:pos + size])
            pos += size
    flat = np.concatenate(classes[:trie.depth - horizon + 1])
    block_of, n_blocks = _canonical_array(flat)
    return Partition(len(flat), n_blocks, tuple(int(b) for b in block_of))


@dataclass(frozen=True)
class BuildReport:
    """Outcome of one model-building attempt at a fixed depth and horizon."""

    ok: bool
    consistent: bool
    closed: bool
    n_classes: int
    n_model_states: int
    detail: str = ""


def build_model(trie: HistoryTrie, horizon: int) -> tuple[TransitionSystem | None, BuildReport]:
    """Quotient the trie by bounded indistinguishability into a candidate model.

    States are the classes holding a node shallow enough for all its
    children to be classified; transitions follow any member's child, and
    the report says whether the member choice ever mattered (consistency)
    and whether every reachable class is a state (closedness).
    """
    if horizon < 1:
        raise InputError("model building needs a horizon of at least 1")
    part = bounded_indistinguishability(trie, horizon)
    m = trie.n_actions
    top = trie.depth - horizon  # deepest classified level
    if top < 1:
        report = BuildReport(False, True, False, part.n_blocks, 0,
                             "trie too shallow: no node has classified children")
        return None, report
    block_of = np.asarray(part.block_of, dtype=np.int64)
    cut = trie.offsets[top]  # nodes with all children classified
    child_classes = np.concatenate(
        [block_of[trie.offsets[d + 1]:trie.offsets[d + 2]].reshape(-1, m)
         for d in range(top)])
    first_member = np.unique(block_of, return_index=True)[1]  # ascending by class
    n_eligible = int(np.searchsorted(first_member, cut))

    expected = child_classes[first_member[block_of[:cut]]]
    bad = np.argwhere(child_classes != expected)
    if len(bad):
        node, a = (int(v) for v in bad[0])
        rep = int(first_member[block_of[node]])
        report = BuildReport(
            False, False, True, part.n_blocks, n_eligible,
            f"class of node {rep} is inconsistent: nodes {rep} and {node} disagree "
            f"under action {trie.action_names[a]!r}")
        return None, report

    delta = child_classes[first_member[:n_eligible]]
    overflow = np.argwhere(delta >= n_eligible)
    if len(overflow):
        c, a = (int(v) for v in overflow[0])
        report = BuildReport(
            False, True, False, part.n_blocks, n_eligible,
            f"not closed: class {c} leads under action {trie.action_names[a]!r} "
            "to a class with no shallow member")
        return None, report

    state_labels = [trie.label_names[trie.observation(int(first_member[c]))]
                    for c in range(n_eligible)]
    model = TransitionSystem.from_tables(
        trie.action_names, delta.tolist(), state_labels, initial=0)
    return model, BuildReport(True, True, True, part.n_blocks, n_eligible)


def _signature(oracle: EnvOracle, word, horizon: int) -> tuple[bytes, int]:
    """Observation tree of ``horizon`` continuations after ``word``, as bytes."""
    m = oracle.n_actions
    sessions = m ** horizon
    obs = oracle.start(sessions)
    for a in word:
        obs = oracle.step(a)
    parts = [obs[:1]]
    for j in range(1, horizon + 1):
        stride = m ** (horizon - j)
        obs = oracle.step((np.arange(sessions) // stride) % m)
        parts.append(obs[::stride])
    flat = np.concatenate(parts).astype(np.int32)
    return flat.tobytes(), int(flat[0])


def _frontier_model(oracle: EnvOracle, depth: int,
                    horizon: int) -> tuple[TransitionSystem | None, BuildReport]:
    """Candidate model via representative words instead of the full trie.

    One representative word is kept per distinct bounded observation tree,
    discovered breadth-first. Every shallow explored word is then checked to
    drive its class the same way the class representative does, using
    observations no deeper than the trie realization would read; member
    disagreements beyond the explored words are invisible here, and the
    caller's deepening stop rule is the safeguard against those.
    """
    max_state_len = depth - horizon - 1  # same shallowness rule as the trie build
    if max_state_len < 0:
        return None, BuildReport(False, True, False, 0, 0,
                                 "trie too shallow: no node has classified children")
    m = oracle.n_actions
    sigs: dict[tuple[int, ...], tuple[bytes, int]] = {}

    def sig_of(word: tuple[int, ...]) -> tuple[bytes, int]:
        if word not in sigs:
            sigs[word] = _signature(oracle, word, horizon)
        return sigs[word]

    first, label = sig_of(())
    reps: list[tuple[int, ...]] = [()]
    labels = [label]
    known = {first: 0}
    rows: list[list[int] | None] = [None]
    queue = deque([0])
    while queue:
        r = queue.popleft()
        word = reps[r]
        row = []
        for a in range(m):
            child = word + (a,)
            sig, label = sig_of(child)
            target = known.get(sig)
            if target is None:
                target = known[sig] = len(reps)
                reps.append(child)
                labels.append(label)
                rows.append(None)
                if len(child) <= max_state_len:
                    queue.append(target)
            row.append(target)
        rows[r] = row
    # discovery is breadth-first, so the shallow representatives come first
    n_states = sum(1 for w in reps if len(w) <= max_state_len)
    for r in range(n_states):
        for a, target in enumerate(rows[r]):
            if target >= n_states:
                report = BuildReport(
                    False, True, False, len(reps), n_states,
                    f"not closed: class {r} leads under action "
                    f"{oracle.action_names[a]!r} to a class with no shallow member")
                return None, report
    for r in range(n_states):
        for a in range(m):
            word = reps[r] + (a,)
            c = rows[r][a]
            if len(word) > max_state_len or word == reps[c]:
                continue
            for b in range(m):
                if sig_of(word + (b,))[0] != sig_of(reps[c] + (b,))[0]:
                    report = BuildReport(
                        False, False, True, len(reps), n_states,
                        f"class {c} is inconsistent: words {list(reps[c])} and "
                        f"{list(word)} disagree under action "
                        f"{oracle.action_names[b]!r}")
                    return None, report
    state_labels = [oracle.label_names[labels[r]] for r in range(n_states)]
    model = TransitionSystem.from_tables(
        oracle.action_names, [rows[r] for r in range(n_states)], state_labels, initial=0)
    return model, BuildReport(True, True, True, len(reps), n_states)


@dataclass(frozen=True)
class DepthAttempt:
    depth: int
    horizon: int
    method: str
    ok: bool
    n_states: int
    detail: str


@dataclass(frozen=True)
class LearnReport:
    """How a learning run went: schedule, convergence, and oracle budget."""

    converged: bool
    depth_converged: int | None
    depth_stopped: int
    oracle_resets: int
    oracle_steps: int
    attempts: tuple[DepthAttempt, ...]

    def summary(self) -> str:
        lines = []
        for att in self.attempts:
            outcome = f"{att.n_states}-state model" if att.ok else att.detail
            lines.append(f"depth {att.depth} (horizon {att.horizon}, {att.method}): {outcome}")
        if self.converged:
            lines.append(f"converged at depth {self.depth_converged} "
                         f"(confirmed at depth {self.depth_stopped})")
        else:
            lines.append(f"no convergence by depth {self.depth_stopped}")
        lines.append(f"oracle calls: {self.oracle_resets} resets, {self.oracle_steps} steps")
        return "\n".join(lines)


def _build_at(oracle: EnvOracle, depth: int, horizon: int, use_trie: bool):
    if use_trie:
        trie = explore(oracle, None, depth)
        return build_model(trie, horizon)
    return _frontier_model(oracle, depth, horizon)


def learn(env, x0: int | None, max_depth: int, method: str = "auto",
          trie_node_budget: int = DEFAULT_TRIE_BUDGET, min_depth: int = 2,
          ) -> tuple[TransitionSystem | None, LearnReport]:
    """Deepen exploration until two successive candidate models agree.

    Runs depths 2, 4, ... up to ``max_depth`` with the horizon at half the
    depth, and stops once the candidates of two successive depths have
    identical canonical forms anchored at the root class. Agreement of two
    depths is a heuristic; the candidate at depth ``D`` is guaranteed exact
    only once ``D`` reaches twice the true model size, so callers who know
    a bound can raise ``min_depth`` to refuse convergence claims from
    shallower pairs. ``method`` picks the per-depth realization: "trie",
    "frontier", or "auto" (trie below ``trie_node_budget`` nodes). Returns
    the stabilized model in canonical form, or the last candidate (possibly
    None) when the depth budget runs out, together with a report.
    """
    if max_depth < 2:
        raise InputError("max_depth must be at least 2")
    if method not in ("auto", "trie", "frontier"):
        raise InputError(f"unknown method {method!r}")
    oracle = _as_oracle(env, x0)
    resets0, steps0 = oracle.resets, oracle.steps
    attempts: list[DepthAttempt] = []
    prev_model: TransitionSystem | None = None
    prev_depth: int | None = None
    last_depth = 0
    for depth in range(2, max_depth + 1, 2):
        last_depth = depth
        horizon = depth // 2
        if method == "trie":
            use_trie = True
            if count_nodes(oracle.n_actions, depth) > trie_node_budget:
                raise InputError(
                    f"depth {depth} exceeds the trie node budget; "
                    "use method='auto' or 'frontier'")
        elif method == "frontier":
            use_trie = False
        else:
            use_trie = count_nodes(oracle.n_actions, depth) <= trie_node_budget
        model, report = _build_at(oracle, depth, horizon, use_trie)
        attempts.append(DepthAttempt(depth, horizon, "trie" if use_trie else "frontier",
                                     report.ok, report.n_model_states, report.detail))
        if model is None:
            prev_model, prev_depth = None, None
            continue
        model = canonical_form(model, model.initial)[0]
        if prev_model is not None and model == prev_model and prev_depth >= min_depth:
            return model, LearnReport(True, prev_depth, depth,
                                      oracle.resets - resets0, oracle.steps - steps0,
                                      tuple(attempts))
        prev_model, prev_depth = model, depth
    return prev_model, LearnReport(False, None, last_depth,
                                   oracle.resets - resets0, oracle.steps - steps0,
                                   tuple(attempts))


@dataclass(frozen=True)
class VerifyReport:
    isomorphic: bool
    bisimilar: bool
    surpriseless: bool


def verify_learned(env: TransitionSystem, x0: int, model: TransitionSystem) -> VerifyReport:
    """Compare a learned model against its environment three ways.

    Checks anchored isomorphism, bisimilarity of the initial states, and
    surpriselessness of the coupling. The latter two must agree for models
    whose labels reflect what was actually observed (as learned models do);
    a mismatch raises.
    """
    if model.labels is None or model.initial is None:
        raise InputError("the model must be labeled and carry an initial state")
    iso, _ = are_isomorphic(env, model, anchored=True, anchor_a=x0)
    bis = are_bisimilar(env, model, x0, model.initial)
    sur = is_surpriseless(couple(env, model, x0, model.initial))[0]
    assert bis == sur, "bisimilarity and surpriselessness disagree on a learned model"
    return VerifyReport(iso, bis, sur)
