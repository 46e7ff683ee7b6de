"""Plain-text formats for systems and partitions, and DOT export.

The system format is line oriented, diff-able and hand-writable::

    dts
    states 4
    actions L R
    labels green white white white   # one label name per state (optional)
    init 0                           # optional
    trans 0 L 0
    trans 0 R 1
    ...                              # exactly one line per (state, action)

``#`` starts a comment anywhere; blank lines are ignored. Writing is
canonical (states ascending, actions in header order), so parse and write
round-trip bit-exactly.
"""

from __future__ import annotations

from .core import DtsError, InputError, TransitionSystem
from .partitions import Partition


class ParseError(DtsError):
    """Malformed input text; carries the offending line number."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


def _content_lines(text: str):
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield line_no, line.split()


def _parse_count(token: str, line_no: int, what: str) -> int:
    try:
        value = int(token)
    except ValueError:
        raise ParseError(line_no, f"{what} must be an integer, got {token!r}") from None
    if value < 0 or value > 10**9:
        raise ParseError(line_no, f"{what} {value} is out of range")
    return value


def parse_dts(text: str) -> TransitionSystem:
    """Parse the line format above into a validated system."""
    lines = _content_lines(text)

    def next_line(expect: str):
        for line_no, tokens in lines:
            return line_no, tokens
        raise ParseError(0, f"unexpected end of input, expected {expect}")

    line_no, tokens = next_line("'dts' header")
    if tokens != ["dts"]:
        raise ParseError(line_no, f"expected 'dts' header, got {' '.join(tokens)!r}")

    line_no, tokens = next_line("'states N'")
    if len(tokens) != 2 or tokens[0] != "states":
        raise ParseError(line_no, "expected 'states N'")
    n_states = _parse_count(tokens[1], line_no, "state count")
    if n_states < 1:
        raise ParseError(line_no, "need at least one state")

    line_no, tokens = next_line("'actions ...'")
    if len(tokens) < 2 or tokens[0] != "actions":
        raise ParseError(line_no, "expected 'actions' followed by action names")
    action_names = tokens[1:]
    if len(set(action_names)) != len(action_names):
        raise ParseError(line_no, "action names must be distinct")

    line_no, tokens = next_line("'labels', 'init' or 'trans'")
    state_labels = None
    if tokens[0] == "labels":
        if len(tokens) != n_states + 1:
            raise ParseError(line_no, f"expected one label per state ({n_states})")
        state_labels = tokens[1:]
        line_no, tokens = next_line("'init' or 'trans'")
    initial = None
    if tokens[0] == "init":
        if len(tokens) != 2:
            raise ParseError(line_no, "expected 'init K'")
        initial = _parse_count(tokens[1], line_no, "initial state")
        if initial >= n_states:
            raise ParseError(line_no, f"initial state {initial} is out of range")
        line_no, tokens = next_line("'trans'")

    action_index = {name: a for a, name in enumerate(action_names)}
    table: list[list[int | None]] = [[None] * len(action_names) for _ in range(n_states)]
    pending = n_states * len(action_names)
    while True:
        if tokens[0] != "trans":
            raise ParseError(line_no, f"unknown directive {tokens[0]!r}")
        if len(tokens) != 4:
            raise ParseError(line_no, "expected 'trans S ACT T'")
        s = _parse_count(tokens[1], line_no, "source state")
        t = _parse_count(tokens[3], line_no, "target state")
        if s >= n_states or t >= n_states:
            raise ParseError(line_no, f"state index out of range in {' '.join(tokens)!r}")
        a = action_index.get(tokens[2])
        if a is None:
            raise ParseError(line_no, f"unknown action {tokens[2]!r}")
        if table[s][a] is not None:
            raise ParseError(line_no, f"duplicate transition for state {s}, "
                                      f"action {tokens[2]!r}")
        table[s][a] = t
        pending -= 1
        rest = next(lines, None)
        if rest is None:
            break
        line_no, tokens = rest
    if pending:
        s, a = next((s, a) for s in range(n_states) for a in range(len(action_names))
                    if table[s][a] is None)
        raise ParseError(line_no, f"missing transition for state {s}, "
                                  f"action {action_names[a]!r}")
    return TransitionSystem.from_tables(action_names, table, state_labels, initial)


def write_dts(sys: TransitionSystem) -> str:
    """Canonical text for a system; inverse of ``parse_dts``."""
    out = ["dts", f"states {sys.n_states}", "actions " + " ".join(sys.action_names)]
    if sys.labels is not None:
        out.append("labels " + " ".join(sys.label_names[l] for l in sys.labels))
    if sys.initial is not None:
        out.append(f"init {sys.initial}")
    for s in range(sys.n_states):
        for a, name in enumerate(sys.action_names):
            out.append(f"trans {s} {name} {sys.delta[s][a]}")
    return "\n".join(out) + "\n"


def parse_partition(text: str) -> Partition:
    """One block per line, space-separated state indices."""
    blocks = []
    n_states = 0
    for line_no, tokens in _content_lines(text):
        block = [_parse_count(tok, line_no, "state index") for tok in tokens]
        blocks.append(block)
        n_states += len(block)
    if not blocks:
        raise ParseError(0, "empty partition")
    try:
        return Partition.from_blocks(n_states, blocks)
    except DtsError as exc:
        raise ParseError(0, str(exc)) from None


def write_partition(part: Partition) -> str:
    """Blocks in canonical order, one per line; inverse of ``parse_partition``."""
    return "\n".join(" ".join(str(s) for s in block) for block in part.blocks()) + "\n"


def parse_obstacles(text: str, joints: int, resolution: int) -> frozenset[tuple[int, ...]]:
    """One forbidden configuration per line, space-separated joint positions."""
    out = set()
    for line_no, tokens in _content_lines(text):
        if len(tokens) != joints:
            raise ParseError(line_no, f"expected {joints} joint positions")
        conf = tuple(_parse_count(tok, line_no, "joint position") for tok in tokens)
        if any(c >= resolution for c in conf):
            raise ParseError(line_no, f"configuration {conf} is out of range")
        out.add(conf)
    return frozenset(out)


def _quote(text: str) -> str:
    return '"' + text.replace('"', '\\"') + '"'


def to_dot(sys: TransitionSystem, partition: Partition | None = None) -> str:
    """Render a system as a DOT digraph, one edge per (state, action).

    With a partition, blocks become subgraph clusters so quotient structure
    is visible at a glance.
    """
    def node_line(s: int, indent: str) -> str:
        text = str(s)
        if sys.labels is not None:
            text += "\\n" + sys.label_name_of(s)
        shape = "doublecircle" if s == sys.initial else "circle"
        return f"{indent}{s} [label={_quote(text)} shape={shape}];"

    lines = ["digraph dts {", "  rankdir=LR;"]
    if partition is None:
        lines.extend(node_line(s, "  ") for s in range(sys.n_states))
    else:
        if partition.n_states != sys.n_states:
            raise InputError("partition is not over the system's states")
        for b, block in enumerate(partition.blocks()):
            lines.append(f"  subgraph cluster_{b} {{")
            lines.append(f"    label={_quote('block ' + str(b))};")
            lines.extend(node_line(s, "    ") for s in block)
            lines.append("  }")
    for s in range(sys.n_states):
        for a, name in enumerate(sys.action_names):
            lines.append(f"  {s} -> {sys.delta[s][a]} [label={_quote(name)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def trie_to_dot(trie, partition: Partition | None = None) -> str:
    """Render a history trie (optionally partitioned into classes) as DOT."""
    lines = ["digraph trie {", "  rankdir=TB;"]
    count = partition.n_states if partition is not None else trie.node_count

    def node_line(node: int, indent: str) -> str:
        text = f"{node}\\n{trie.label_names[trie.observation(node)]}"
        return f"{indent}{node} [label={_quote(text)} shape=circle];"

    if partition is None:
        lines.extend(node_line(v, "  ") for v in range(count))
    else:
        for b, block in enumerate(partition.blocks()):
            lines.append(f"  subgraph cluster_{b} {{")
            lines.append(f"    label={_quote('class ' + str(b))};")
            lines.extend(node_line(v, "    ") for v in block)
            lines.append("  }")
    for node in range(count):
        if trie.level_of(node) == trie.depth:
            continue
        for a in range(trie.n_actions):
            child = trie.child(node, a)
            if child < count:
                lines.append(f"  {node} -> {child} "
                             f"[label={_quote(trie.action_names[a])}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
