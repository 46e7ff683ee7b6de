"""Environment generators: lines, cycles, jointed arms, seeded random systems.

All generators are deterministic: the same arguments (and seed) produce a
bit-identical system. The random generator draws from a splitmix64 stream
so seeds reproduce across implementations.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from itertools import product

from .core import (
    DtsError,
    InputError,
    NotConnectedError,
    TransitionSystem,
    is_minimally_distinguishing,
    is_strongly_connected,
)

MAX_STATES = 100_000
_MAX_ATTEMPTS = 1_000_000

_MASK = (1 << 64) - 1


class GenerationError(DtsError):
    """Random generation exhausted its rejection budget."""


class SplitMix64:
    """The splitmix64 generator; pure 64-bit arithmetic, no platform drift."""

    def __init__(self, seed: int):
        self.state = seed & _MASK

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def below(self, n: int) -> int:
        """Draw from 0..n-1 by reduction of one 64-bit output."""
        if n < 1:
            raise InputError("below() needs a positive bound")
        return self.next_u64() % n


def make_line(n: int) -> TransitionSystem:
    """A line of ``n`` states with saturating left/right moves.

    The left end carries the only distinguished sensor value; both ends
    absorb the move pointing off the line.
    """
    if n < 2:
        raise InputError("a line needs at least 2 states")
    if n > MAX_STATES:
        raise InputError(f"refusing to build more than {MAX_STATES} states")
    delta = [[max(i - 1, 0), min(i + 1, n - 1)] for i in range(n)]
    labels = ["green"] + ["white"] * (n - 1)
    return TransitionSystem.from_tables(("L", "R"), delta, labels, initial=0)


def make_cycle(n: int, pointed: bool = True) -> TransitionSystem:
    """A rotation cycle of ``n`` states; state 0 clicks when ``pointed``."""
    if n < 2:
        raise InputError("a cycle needs at least 2 states")
    if n > MAX_STATES:
        raise InputError(f"refusing to build more than {MAX_STATES} states")
    delta = [[(i + 1) % n, (i - 1) % n] for i in range(n)]
    if pointed:
        labels = ["click"] + ["blank"] * (n - 1)
    else:
        labels = ["blank"] * n
    return TransitionSystem.from_tables(("CW", "CCW"), delta, labels, initial=0)


@dataclass(frozen=True)
class ArmSpec:
    """A jointed arm on a discrete torus with forbidden configurations.

    Each joint takes ``resolution`` positions; a configuration is a tuple of
    joint positions. Obstacles are forbidden configurations: a move into one
    leaves the state unchanged. The click configuration is the only one with
    sensor feedback.
    """

    joints: int
    resolution: int
    obstacles: frozenset[tuple[int, ...]]
    click: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "obstacles", frozenset(tuple(o) for o in self.obstacles))
        object.__setattr__(self, "click", tuple(self.click))
        if self.joints < 1:
            raise InputError("an arm needs at least one joint")
        if self.resolution < 3:
            raise InputError("each joint needs at least 3 positions")
        for conf in list(self.obstacles) + [self.click]:
            if len(conf) != self.joints:
                raise InputError(f"configuration {conf} has the wrong number of joints")
            if any(not 0 <= c < self.resolution for c in conf):
                raise InputError(f"configuration {conf} is out of range")
        if self.click in self.obstacles:
            raise InputError("the click configuration is an obstacle")


def make_arm(spec: ArmSpec) -> TransitionSystem:
    """Build the arm's configuration system; actions turn one joint by one.

    States are the obstacle-free configurations in lexicographic order;
    actions come joint-major, the forward turn before the backward one. The
    free space must be strongly connected, which is validated, not assumed.
    """
    if spec.resolution ** spec.joints > 4 * MAX_STATES:
        raise InputError(f"refusing to build more than {MAX_STATES} states")
    free = [conf for conf in product(range(spec.resolution), repeat=spec.joints)
            if conf not in spec.obstacles]
    if len(free) > MAX_STATES:
        raise InputError(f"refusing to build more than {MAX_STATES} states")
    index = {conf: i for i, conf in enumerate(free)}
    action_names = []
    moves = []
    for j in range(spec.joints):
        for step in (1, -1):
            action_names.append(f"j{j}{'+' if step > 0 else '-'}")
            moves.append((j, step))
    delta = []
    for conf in free:
        row = []
        for j, step in moves:
            target = list(conf)
            target[j] = (target[j] + step) % spec.resolution
            target = tuple(target)
            row.append(index.get(target, index[conf]))
        delta.append(row)
    labels = ["click" if conf == spec.click else "blank" for conf in free]
    sys = TransitionSystem.from_tables(action_names, delta, labels,
                                       initial=index[spec.click])
    # the free space may be split by obstacles; the click cell anchors the check
    seen = [False] * sys.n_states
    seen[sys.initial] = True
    queue = deque([sys.initial])
    while queue:
        s = queue.popleft()
        for t in sys.delta[s]:
            if not seen[t]:
                seen[t] = True
                queue.append(t)
    if not all(seen):
        stranded = free[seen.index(False)]
        raise NotConnectedError(
            f"free space is disconnected: {spec.click} cannot reach {stranded}")
    return sys


def make_random(n: int, m: int, seed: int,
                require_min_dist: bool = False,
                pointed: bool = False) -> TransitionSystem:
    """Seeded random strongly connected system on ``n`` states, ``m`` actions.

    The transition table is drawn uniformly and resampled until strongly
    connected (and minimally distinguishing when requested). Labels: a
    pointed system gives state 0 the only "click", otherwise every state
    draws one of two values uniformly.
    """
    if n < 1 or m < 1:
        raise InputError("need at least one state and one action")
    if n > MAX_STATES:
        raise InputError(f"refusing to build more than {MAX_STATES} states")
    rng = SplitMix64(seed)
    action_names = tuple(f"u{a}" for a in range(m))
    delta = None
    for _ in range(_MAX_ATTEMPTS):
        cand = tuple(tuple(rng.below(n) for _ in range(m)) for _ in range(n))
        sys = TransitionSystem(n, m, action_names, cand)
        # the acceptance region is an intersection, so the cheaper-to-fail
        # minimal-distinguishability test runs first without changing draws
        if require_min_dist and not is_minimally_distinguishing(sys)[0]:
            continue
        if not is_strongly_connected(sys):
            continue
        delta = cand
        break
    if delta is None:
        raise GenerationError(
            f"no admissible system found in {_MAX_ATTEMPTS} draws (n={n}, m={m})")
    if pointed:
        state_labels = ["click"] + ["blank"] * (n - 1)
    else:
        names = ("a", "b")
        state_labels = [names[rng.below(2)] for _ in range(n)]
    return TransitionSystem.from_tables(action_names, delta, state_labels, initial=0)
