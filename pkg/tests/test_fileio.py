import pytest

from dtslearn import (
    Partition,
    ParseError,
    explore,
    bounded_indistinguishability,
    make_arm,
    make_cycle,
    make_line,
    make_random,
    parse_dts,
    parse_obstacles,
    parse_partition,
    to_dot,
    trie_to_dot,
    write_dts,
    write_partition,
)
from dtslearn.envs import ArmSpec, SplitMix64

LINE4_TEXT = """\
dts
states 4
actions L R
labels green white white white
init 0
trans 0 L 0
trans 0 R 1
trans 1 L 0
trans 1 R 2
trans 2 L 1
trans 2 R 3
trans 3 L 2
trans 3 R 3
"""


class TestParseDts:
    def test_line_file(self):
        assert parse_dts(LINE4_TEXT) == make_line(4)

    def test_minimal_file(self):
        sys = parse_dts("dts\nstates 1\nactions a\ntrans 0 a 0\n")
        assert sys.n_states == 1 and sys.labels is None and sys.initial is None

    def test_comments_and_blank_lines(self):
        noisy = "# header comment\n\ndts  # trailing\n" + LINE4_TEXT[4:]
        assert parse_dts(noisy) == make_line(4)

    def test_missing_transition_names_the_pair(self):
        clipped = "\n".join(LINE4_TEXT.splitlines()[:-1]) + "\n"
        with pytest.raises(ParseError, match="state 3, action 'R'"):
            parse_dts(clipped)

    def test_duplicate_transition(self):
        doubled = LINE4_TEXT + "trans 3 R 3\n"
        with pytest.raises(ParseError, match="duplicate"):
            parse_dts(doubled)

    def test_unknown_action_token(self):
        with pytest.raises(ParseError, match="unknown action"):
            parse_dts(LINE4_TEXT.replace("trans 0 L 0", "trans 0 X 0"))

    def test_state_index_overflow(self):
        with pytest.raises(ParseError, match="out of range"):
            parse_dts(LINE4_TEXT.replace("trans 0 L 0", "trans 0 L 9"))

    def test_unknown_directive(self):
        with pytest.raises(ParseError, match="unknown directive"):
            parse_dts(LINE4_TEXT + "loop 0\n")

    def test_missing_header(self):
        with pytest.raises(ParseError, match="header"):
            parse_dts("states 1\nactions a\ntrans 0 a 0\n")

    def test_error_carries_line_number(self):
        try:
            parse_dts(LINE4_TEXT.replace("trans 1 R 2", "trans 1 R 7"))
        except ParseError as exc:
            assert exc.line_no == 9
        else:
            raise AssertionError("expected a parse error")


class TestRoundTrip:
    def test_line_text_is_canonical(self):
        assert write_dts(make_line(4)) == LINE4_TEXT

    def test_random_systems_round_trip(self):
        rng = SplitMix64(41)
        for _ in range(100):
            sys = make_random(1 + rng.below(8), 1 + rng.below(3), rng.next_u64(),
                              pointed=bool(rng.below(2)))
            assert parse_dts(write_dts(sys)) == sys

    def test_unlabeled_unrooted_round_trip(self):
        sys = make_cycle(5).unlabeled()
        assert parse_dts(write_dts(sys)) == sys

    def test_arm_round_trips(self):
        arm = make_arm(ArmSpec(2, 4, frozenset({(1, 1)}), (0, 0)))
        assert parse_dts(write_dts(arm)) == arm


class TestPartitionFormat:
    def test_round_trip(self):
        part = Partition.from_blocks(5, [[0, 2], [1], [3, 4]])
        assert parse_partition(write_partition(part)) == part

    def test_write_is_canonical_order(self):
        part = Partition.from_blocks(4, [[0, 3], [1, 2]])
        assert write_partition(part) == "0 3\n1 2\n"

    def test_lenient_parse_canonicalizes(self):
        assert parse_partition("2 1\n0 3\n").blocks() == ((0, 3), (1, 2))

    def test_missing_state_rejected(self):
        with pytest.raises(ParseError):
            parse_partition("0 1\n3\n")

    def test_empty_rejected(self):
        with pytest.raises(ParseError):
            parse_partition("# nothing\n")


class TestObstacles:
    def test_parse(self):
        text = "1 1\n4 4  # far corner\n"
        assert parse_obstacles(text, 2, 6) == frozenset({(1, 1), (4, 4)})

    def test_wrong_arity(self):
        with pytest.raises(ParseError):
            parse_obstacles("1 1 1\n", 2, 6)

    def test_out_of_range(self):
        with pytest.raises(ParseError):
            parse_obstacles("1 9\n", 2, 6)


class TestDot:
    def test_line_has_one_edge_per_state_action(self):
        dot = to_dot(make_line(4))
        assert dot.count(" -> ") == 8

    def test_partition_clusters(self):
        env = make_line(4)
        part = Partition.from_blocks(4, [[0], [1, 2, 3]])
        dot = to_dot(env, part)
        assert dot.count("subgraph cluster_") == 2

    def test_initial_state_is_highlighted(self):
        assert "doublecircle" in to_dot(make_line(4))

    def test_trie_clusters_match_the_classes(self):
        env = make_line(4)
        trie = explore(env, 0, 6)
        part = bounded_indistinguishability(trie, 3)
        dot = trie_to_dot(trie, part)
        assert dot.count("subgraph cluster_") == 4
