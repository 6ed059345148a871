"""Finitely generated subgroups of ``F_r`` as folded Stallings automata.

Words are tuples of non-zero integers: ``i`` is the generator ``a_i`` and
``-i`` its inverse.  Letters are ordered ``a1 < a1⁻¹ < a2 < a2⁻¹ < …``,
which is also the order in which automaton edges are explored.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

from .errors import AlreadyComplete, ConfigError

Word = tuple


# --------------------------------------------------------------------------
# Words


def reduce_word(w: Iterable[int]) -> Word:
    out: list[int] = []
    for x in w:
        if x == 0:
            raise ValueError("0 is not a letter")
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def inverse_word(w: Sequence[int]) -> Word:
    return tuple(-x for x in reversed(w))


def letter_key(x: int) -> tuple[int, int]:
    return (abs(x), 1 if x < 0 else 0)


def shortlex_key(w: Sequence[int]):
    return (len(w), [letter_key(x) for x in w])


_TOKEN = re.compile(r"a(\d+)(?:\^(-?\d+))?$")


def parse_word(text: str) -> Word:
    """``"a1 a2^-1 a1^3"``; ``"1"``, ``"e"`` or an empty string is the identity."""
    text = text.strip()
    if text in ("", "1", "e"):
        return ()
    letters: list[int] = []
    for tok in text.split():
        m = _TOKEN.match(tok)
        if not m or int(m.group(1)) < 1:
            raise ConfigError(f"cannot parse {tok!r} as a power of a generator")
        i = int(m.group(1))
        e = int(m.group(2)) if m.group(2) is not None else 1
        letters.extend([i if e > 0 else -i] * abs(e))
    return reduce_word(letters)


def parse_words(text: str) -> list[Word]:
    """Comma-separated words, e.g. ``"a1^2,a2,a1 a2 a1^-1"``."""
    if not text.strip():
        return []
    return [parse_word(part) for part in text.split(",")]


def format_word(w: Sequence[int]) -> str:
    if not w:
        return "1"
    parts = []
    k = 0
    while k < len(w):
        j = k
        while j < len(w) and w[j] == w[k]:
            j += 1
        n = (j - k) * (1 if w[k] > 0 else -1)
        parts.append(f"a{abs(w[k])}" if n == 1 else f"a{abs(w[k])}^{n}")
        k = j
    return " ".join(parts)


def word_rank(words: Iterable[Sequence[int]]) -> int:
    return max((abs(x) for w in words for x in w), default=0)


# --------------------------------------------------------------------------
# Automata


@dataclass(frozen=True)
class StallingsAutomaton:
    """Folded core graph; vertex 0 is the base and vertices are numbered in BFS order."""

    rank: int
    size: int
    maps: tuple[tuple[int | None, ...], ...]

    def step(self, v: int | None, x: int) -> int | None:
        if v is None:
            return None
        if x > 0:
            return self.maps[x - 1][v]
        return self._inverse[-x - 1][v]

    @property
    def _inverse(self):
        inv = self.__dict__.get("_inv")
        if inv is None:
            inv = []
            for mp in self.maps:
                row: list[int | None] = [None] * self.size
                for v, w in enumerate(mp):
                    if w is not None:
                        row[w] = v
                inv.append(tuple(row))
            inv = tuple(inv)
            object.__setattr__(self, "_inv", inv)
        return inv

    def is_complete(self) -> bool:
        return all(w is not None for mp in self.maps for w in mp)

    def edge_count(self) -> int:
        return sum(w is not None for mp in self.maps for w in mp)

    def free_rank(self) -> int:
        """Rank of the subgroup: edges minus vertices plus one."""
        return self.edge_count() - self.size + 1

    def to_json(self) -> dict:
        return {"rank": self.rank, "base": 0, "size": self.size, "maps": [list(mp) for mp in self.maps]}

    @classmethod
    def from_json(cls, data) -> "StallingsAutomaton":
        return cls(data["rank"], data["size"], tuple(tuple(mp) for mp in data["maps"]))

    def to_dot(self, name: str = "Subgroup") -> str:
        lines = [f"digraph {name} {{", "  node [shape=circle];", "  0 [shape=doublecircle];"]
        lines += [f"  {v};" for v in range(1, self.size)]
        for i, mp in enumerate(self.maps):
            for v, w in enumerate(mp):
                if w is not None:
                    lines.append(f'  {v} -> {w} [label="a{i + 1}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def _fold(n_vertices: int, edges: Iterable[tuple[int, int, int]]):
    parent = list(range(n_vertices))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a, b):
        a, b = find(a), find(b)
        if a != b:
            parent[max(a, b)] = min(a, b)

    edges = set(edges)
    while True:
        out: dict[tuple[int, int], int] = {}
        inn: dict[tuple[int, int], int] = {}
        merged = False
        for v, i, w in edges:
            v, w = find(v), find(w)
            if (v, i) in out and find(out[(v, i)]) != w:
                union(out[(v, i)], w)
                merged = True
            else:
                out[(v, i)] = w
            w = find(w)
            v = find(v)
            if (w, i) in inn and find(inn[(w, i)]) != v:
                union(inn[(w, i)], v)
                merged = True
            else:
                inn[(w, i)] = v
        edges = {(find(v), i, find(w)) for v, i, w in edges}
        if not merged:
            return edges, find(0)


def _core(edges: set, base: int) -> set:
    edges = set(edges)
    while True:
        degree: dict[int, int] = {}
        for v, _, w in edges:
            degree[v] = degree.get(v, 0) + 1
            degree[w] = degree.get(w, 0) + 1
        leaves = {v for v, d in degree.items() if d == 1 and v != base}
        if not leaves:
            return edges
        edges = {e for e in edges if e[0] not in leaves and e[2] not in leaves}


def _canonical(rank: int, edges: set, base: int) -> StallingsAutomaton:
    out: dict[int, list] = {}
    for v, i, w in edges:
        out.setdefault(v, []).append((i + 1, w))
        out.setdefault(w, []).append((-(i + 1), v))
    label = {base: 0}
    order = [base]
    for v in order:
        for _, w in sorted(out.get(v, []), key=lambda e: letter_key(e[0])):
            if w not in label:
                label[w] = len(order)
                order.append(w)
    maps = [[None] * len(order) for _ in range(rank)]
    for v, i, w in edges:
        maps[i][label[v]] = label[w]
    return StallingsAutomaton(rank, len(order), tuple(tuple(mp) for mp in maps))


def subgroup_from_generators(gens: Iterable[Sequence[int]], rank: int | None = None) -> StallingsAutomaton:
    """Fold the wedge of generator loops and trim it to its core."""
    words = [reduce_word(w) for w in gens]
    r = max(rank or 0, word_rank(words), 1)
    edges = []
    n = 1
    for w in words:
        if not w:
            continue
        path = [0] + list(range(n, n + len(w) - 1)) + [0]
        n += len(w) - 1
        for (a, b), x in zip(zip(path, path[1:]), w):
            edges.append((a, x - 1, b) if x > 0 else (b, -x - 1, a))
    folded, base = _fold(n, edges)
    return _canonical(r, _core(folded, base), base)


def automaton_from_edges(rank: int, edges: Iterable[tuple[int, int, int]], base: int = 0) -> StallingsAutomaton:
    """Fold an arbitrary edge list ``(source, generator index from 0, target)``."""
    edges = list(edges)
    n = max([base] + [max(v, w) for v, _, w in edges]) + 1
    if base != 0:
        edges = [(_swap(v, base), i, _swap(w, base)) for v, i, w in edges]
    folded, b = _fold(n, edges)
    return _canonical(rank, _core(folded, b), b)


def _swap(v: int, base: int) -> int:
    return base if v == 0 else 0 if v == base else v


# --------------------------------------------------------------------------
# Queries


def contains_word(sub: StallingsAutomaton, w: Sequence[int]) -> bool:
    v: int | None = 0
    for x in reduce_word(w):
        if abs(x) > sub.rank:
            return False
        v = sub.step(v, x)
        if v is None:
            return False
    return v == 0


def index(sub: StallingsAutomaton) -> int | float:
    """Number of cosets, ``math.inf`` when the automaton is not complete."""
    return sub.size if sub.is_complete() else math.inf


def in_perfect_kernel(sub: StallingsAutomaton, r: int | None = None) -> bool:
    r = sub.rank if r is None else r
    if r < 2:
        raise ValueError("the criterion needs rank at least 2")
    if r != sub.rank:
        sub = StallingsAutomaton(r, sub.size, sub.maps + tuple((None,) * sub.size for _ in range(r - sub.rank)))
    return index(sub) == math.inf


def hall_completion(sub: StallingsAutomaton) -> StallingsAutomaton:
    """Complete every generator by matching free sources to free targets in vertex order."""
    if sub.is_complete():
        raise AlreadyComplete("the subgroup already has finite index")
    maps = []
    for mp in sub.maps:
        sources = [v for v in range(sub.size) if mp[v] is None]
        hit = {w for w in mp if w is not None}
        targets = [w for w in range(sub.size) if w not in hit]
        row = list(mp)
        for v, w in zip(sources, targets):
            row[v] = w
        maps.append(tuple(row))
    return StallingsAutomaton(sub.rank, sub.size, tuple(maps))


def _letters(rank: int) -> list[int]:
    return [x for i in range(1, rank + 1) for x in (i, -i)]


def ball_agreement(a: StallingsAutomaton, b: StallingsAutomaton, radius: int | None = None) -> int | float:
    """Largest ``k ≤ radius`` with the same accepted reduced words of length ``≤ k``.

    ``radius=None`` means no cap; equal subgroups then give ``math.inf``.
    """
    rank = max(a.rank, b.rank)
    letters = _letters(rank)

    def step(sub, v, x):
        return None if abs(x) > sub.rank else sub.step(v, x)

    start = (0, 0, 0)
    seen = {start}
    frontier = [start]
    length = 0
    while frontier:
        length += 1
        if radius is not None and length > radius:
            return radius
        nxt = []
        for va, vb, last in frontier:
            for x in letters:
                if x == -last:
                    continue
                wa, wb = step(a, va, x), step(b, vb, x)
                if wa is None and wb is None:
                    continue
                if (wa == 0) != (wb == 0):
                    return length - 1
                state = (wa, wb, x)
                if state not in seen:
                    seen.add(state)
                    nxt.append(state)
        frontier = nxt
    return math.inf if radius is None else radius


def first_difference(a: StallingsAutomaton, b: StallingsAutomaton) -> Word | None:
    """Shortest-then-least reduced word accepted by exactly one of the two."""
    rank = max(a.rank, b.rank)
    letters = _letters(rank)

    def step(sub, v, x):
        return None if abs(x) > sub.rank else sub.step(v, x)

    frontier = [((), 0, 0)]
    seen = {(0, 0, 0)}
    while frontier:
        nxt = []
        for w, va, vb in frontier:
            last = w[-1] if w else 0
            for x in letters:
                if x == -last:
                    continue
                wa, wb = step(a, va, x), step(b, vb, x)
                if wa is None and wb is None:
                    continue
                if (wa == 0) != (wb == 0):
                    return w + (x,)
                if (wa, wb, x) not in seen:
                    seen.add((wa, wb, x))
                    nxt.append((w + (x,), wa, wb))
        frontier = nxt
    return None


@dataclass
class NeighborhoodSpec:
    inside: list = field(default_factory=list)
    outside: list = field(default_factory=list)


def neighborhood_member(sub: StallingsAutomaton, spec: NeighborhoodSpec) -> bool:
    return all(contains_word(sub, w) for w in spec.inside) and not any(contains_word(sub, w) for w in spec.outside)


def same_subgroup(a: StallingsAutomaton, b: StallingsAutomaton) -> bool:
    """Canonical automata of equal subgroups coincide (up to padding the rank)."""
    r = max(a.rank, b.rank)

    def pad(s):
        return s.maps + tuple((None,) * s.size for _ in range(r - s.rank))

    return a.size == b.size and pad(a) == pad(b)


# --------------------------------------------------------------------------
# Isolation witnesses


class IsolationStep(NamedTuple):
    n: int
    generators: list
    automaton: StallingsAutomaton
    index: int | float
    agreement: int | float


class IsolationWitness(NamedTuple):
    element: Word  # g
    completion: StallingsAutomaton
    steps: list[IsolationStep]

    @property
    def radii(self) -> list:
        return [s.agreement for s in self.steps]

    @property
    def strictly_increasing(self) -> bool:
        r = self.radii
        return all(x < y for x, y in zip(r, r[1:]))

    @property
    def all_infinite_index(self) -> bool:
        return all(s.index == math.inf for s in self.steps)


def loop_generators(sub: StallingsAutomaton) -> list[Word]:
    """A free basis read off a BFS spanning tree of the automaton."""
    tree: dict[int, Word] = {0: ()}
    order = [0]
    for v in order:
        for x in _letters(sub.rank):
            w = sub.step(v, x)
            if w is not None and w not in tree:
                tree[w] = tree[v] + (x,)
                order.append(w)
    gens = []
    for i, mp in enumerate(sub.maps):
        for v, w in enumerate(mp):
            if w is None:
                continue
            if tree.get(w) == tree[v] + (i + 1,) or tree.get(v) == tree[w] + (-(i + 1),):
                continue
            gens.append(reduce_word(tree[v] + (i + 1,) + inverse_word(tree[w])))
    return gens


def _added_loop(sub: StallingsAutomaton, full: StallingsAutomaton) -> Word:
    """Shortest-then-least reduced loop at the base of ``full`` through an edge missing from ``sub``."""
    letters = _letters(full.rank)
    frontier = [((), 0, False)]
    best: dict[tuple[int, int, bool], Word] = {}
    while frontier:
        nxt = []
        for w, v, used in frontier:
            last = w[-1] if w else 0
            for x in letters:
                if x == -last:
                    continue
                u = full.step(v, x)
                through = used or sub.step(v, x) != u
                word = w + (x,)
                if u == 0 and through:
                    return word
                key = (u, x, through)
                if key not in best:
                    best[key] = word
                    nxt.append((word, u, through))
        frontier = nxt
    raise AlreadyComplete("no loop uses an added edge")


def isolation_witness(sub: StallingsAutomaton, n_max: int) -> IsolationWitness:
    """Subgroups ``Λ * ⟨gⁿ⟩`` (``2 ≤ n ≤ n_max``) converging to ``Λ``.

    ``g`` is the shortest-then-least loop of the Hall completion that uses an
    added edge, so it lies outside ``Λ``.
    """
    full = hall_completion(sub)
    g = _added_loop(sub, full)
    base = loop_generators(sub)
    steps = []
    for n in range(2, n_max + 1):
        gens = base + [g * n]
        aut = subgroup_from_generators(gens, rank=sub.rank)
        steps.append(IsolationStep(n, gens, aut, index(aut), ball_agreement(sub, aut)))
    return IsolationWitness(g, full, steps)


def stabilizer_to_subgroup(sample, rank: int | None = None) -> StallingsAutomaton:
    words = [tuple(w) for w in sample.stab_words]
    return subgroup_from_generators(words, rank=rank if rank is not None else getattr(sample, "rank", None))


def dumps(sub: StallingsAutomaton) -> str:
    return json.dumps(sub.to_json(), sort_keys=True)
