import random
import re

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import brute_canonical, brute_partial_action_classes
from totipotent.errors import Disconnected, NoMissingEdge, SerializationError
from totipotent.schreier import (
    MarkedAction,
    PartialAction,
    ball_of,
    canonical_code,
    canonical_form,
    canonical_order,
    canonical_root,
    contains_labeled_copy,
    enumerate_partial_actions,
    extend_marked,
    to_dot,
)

GOLDEN_DOT = """digraph ball {
  node [shape=circle];
  0;
  1;
  2;
  3 [shape=doublecircle];
  0 -> 1 [label="a1"];
  1 -> 2 [label="a1"];
  2 -> 3 [label="a1"];
  3 -> 0 [label="a1"];
  0 -> 0 [label="a2"];
  1 -> 1 [label="a2"];
  2 -> 2 [label="a2"];
  3 -> 3 [label="a2"];
}
"""

EDGE = re.compile(r'^\s+(\d+) -> (\d+) \[label="a(\d+)"\];$')
NODE = re.compile(r"^\s+(\d+)( \[shape=doublecircle\])?;$")


def parse_dot(text: str, rank: int):
    """Rebuild ``(PartialAction, marked)`` from DOT text."""
    sizes, marked, edges = [], None, []
    for line in text.splitlines():
        if m := EDGE.match(line):
            edges.append((int(m[3]) - 1, int(m[1]), int(m[2])))
        elif m := NODE.match(line):
            sizes.append(int(m[1]))
            if m[2]:
                marked = int(m[1])
    n = len(sizes)
    maps = [[None] * n for _ in range(rank)]
    for i, v, w in edges:
        maps[i][v] = w
    return PartialAction(n, tuple(tuple(mp) for mp in maps)), marked


@st.composite
def connected_actions(draw, r=2, max_size=6):
    """Random connected partial actions built by growing a spanning tree."""
    n = draw(st.integers(1, max_size))
    maps = [[None] * n for _ in range(r)]
    inv = [[None] * n for _ in range(r)]

    def free(i, v, w):
        return maps[i][v] is None and inv[i][w] is None

    for w in range(1, n):
        v = draw(st.integers(0, w - 1))
        options = [(i, a, b) for i in range(r) for a, b in ((v, w), (w, v)) if free(i, a, b)]
        if not options:
            return PartialAction(1, tuple((None,) for _ in range(r)))
        i, a, b = draw(st.sampled_from(options))
        maps[i][a], inv[i][b] = b, a
    for _ in range(draw(st.integers(0, n))):
        i, a, b = draw(st.integers(0, r - 1)), draw(st.integers(0, n - 1)), draw(st.integers(0, n - 1))
        if free(i, a, b):
            maps[i][a], inv[i][b] = b, a
    return PartialAction(n, tuple(tuple(mp) for mp in maps))


class TestPartialAction:
    def test_validation(self):
        with pytest.raises(ValueError):
            PartialAction(2, ((0, 0),))
        with pytest.raises(ValueError):
            PartialAction(2, ((2, None),))
        with pytest.raises(ValueError):
            PartialAction(0, ())

    def test_json(self):
        g = PartialAction(3, ((1, None, 0), (None, 2, None)))
        assert PartialAction.from_json(g.to_json()) == g
        with pytest.raises(SerializationError):
            PartialAction.from_json({"size": 2})

    def test_marked_action_needs_a_fixed_marked_point(self):
        total = PartialAction(2, ((1, 0), (1, 0)))
        with pytest.raises(ValueError):
            MarkedAction(total, 0)
        with pytest.raises(ValueError):
            MarkedAction(PartialAction(2, ((1, None), (0, 1))), 0)


class TestCanonicalForm:
    @settings(max_examples=200)
    @given(connected_actions(), st.randoms(use_true_random=False))
    def test_code_is_relabelling_invariant(self, g, rnd):
        order = list(range(g.size))
        rnd.shuffle(order)
        h = g.relabel(order)
        assert canonical_code(h) == canonical_code(g)
        assert canonical_form(h) == canonical_form(g)

    @settings(max_examples=200)
    @given(connected_actions(max_size=5), connected_actions(max_size=5))
    def test_code_is_a_complete_invariant(self, g, h):
        if g.size != h.size:
            return
        same_oracle = brute_canonical(g.maps) == brute_canonical(h.maps)
        assert (canonical_code(g) == canonical_code(h)) == same_oracle

    def test_canonical_root_and_order(self):
        g = PartialAction(2, ((1, None), (None, None)))
        assert canonical_root(g) == 1
        assert canonical_order(g) == [1, 0]
        assert canonical_code(g).hex() == "00000002000000000001000000000000"

    def test_disconnected(self):
        with pytest.raises(Disconnected):
            canonical_code(PartialAction(2, ((None, None), (None, None))))


class TestEnumeration:
    def test_counts_match_brute_force(self):
        counts = {}
        for g in enumerate_partial_actions(2, 1, 3):
            counts[g.size] = counts.get(g.size, 0) + 1
        for m in (1, 2, 3):
            assert counts[m] == len(brute_partial_action_classes(2, m))
        assert sum(1 for _ in enumerate_partial_actions(1, 1, 4)) == sum(len(brute_partial_action_classes(1, m)) for m in range(1, 5))

    def test_order_and_uniqueness(self):
        seen = set()
        last = (0, b"")
        for g in enumerate_partial_actions(2, 1, 4):
            code = canonical_code(g)
            assert (g.size, code) > last
            last = (g.size, code)
            assert code not in seen
            seen.add(code)
            assert g.is_connected() and g.has_missing_edge()
            assert canonical_root(g) == 0

    def test_rank_three(self):
        assert sum(1 for _ in enumerate_partial_actions(3, 2, 2)) == len(brute_partial_action_classes(3, 2))

    def test_bad_arguments(self):
        with pytest.raises(ValueError):
            list(enumerate_partial_actions(2, 3, 2))
        with pytest.raises(ValueError):
            list(enumerate_partial_actions(0, 1, 1))


class TestCompletion:
    def test_golden_dot(self):
        g = PartialAction(2, ((1, None), (None, None)))
        assert to_dot(extend_marked(g), "ball") == GOLDEN_DOT

    @settings(max_examples=100)
    @given(connected_actions())
    def test_completion_laws(self, g):
        if g.is_complete():
            with pytest.raises(NoMissingEdge):
                extend_marked(g)
            return
        ma = extend_marked(g)
        assert ma.size == g.size + 2
        assert ma.action.is_complete()
        assert ma.maps[1][ma.marked] == ma.marked
        assert contains_labeled_copy(ma, g, anchor=(0, 0)) == {v: v for v in range(g.size)}
        dot = to_dot(ma)
        back, marked = parse_dot(dot, 2)
        assert back == ma.action and marked == ma.marked

    def test_rank_one_is_rejected(self):
        with pytest.raises(ValueError):
            extend_marked(PartialAction(1, ((None,),)))


class TestEmbedding:
    def test_ball_of_cycle(self):
        n = 8
        cyc = PartialAction(n, (tuple((v + 1) % n for v in range(n)), tuple(range(n))))
        ball = ball_of(cyc, 3, 2)
        assert ball.labels == (3, 4, 2, 5, 1)
        assert ball.action.size == 5
        assert contains_labeled_copy(cyc, ball.action) is not None

    def test_no_copy_when_labels_clash(self):
        host = PartialAction(2, ((1, 0), (None, None)))
        pattern = PartialAction(2, ((None, None), (1, None)))
        assert contains_labeled_copy(host, pattern) is None

    def test_injectivity_is_enforced(self):
        loop = PartialAction(1, ((0,), (None,)))
        path = PartialAction(2, ((1, None), (None, None)))
        assert contains_labeled_copy(loop, path) is None
        assert contains_labeled_copy(path, loop) is None

    def test_random_balls_embed_at_their_centre(self):
        rng = random.Random(7)
        n = 30
        perms = []
        for _ in range(2):
            p = list(range(n))
            rng.shuffle(p)
            perms.append(tuple(p))
        host = PartialAction(n, tuple(perms))
        for v in range(0, n, 5):
            ball = ball_of(host, v, 2)
            emb = contains_labeled_copy(host, ball.action, anchor=(0, v))
            assert emb == dict(enumerate(ball.labels))
