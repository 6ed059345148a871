"""Finite partial Schreier graphs of free groups.

A partial action of ``F_r`` on ``{0, …, m-1}`` is one partial injection per
generator.  Edge labels are numbered ``0 … 2r-1``: label ``2i`` follows
``a_{i+1}`` forwards and label ``2i+1`` follows it backwards.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterator, NamedTuple, Sequence

from .errors import Disconnected, NoMissingEdge, SerializationError


@dataclass(frozen=True)
class PartialAction:
    size: int
    maps: tuple[tuple[int | None, ...], ...]

    def __post_init__(self):
        maps = tuple(tuple(mp) for mp in self.maps)
        object.__setattr__(self, "maps", maps)
        if self.size < 1:
            raise ValueError("a partial action needs at least one vertex")
        for mp in maps:
            if len(mp) != self.size:
                raise ValueError("each generator map needs one slot per vertex")
            targets = [t for t in mp if t is not None]
            if any(not 0 <= t < self.size for t in targets):
                raise ValueError("edge target out of range")
            if len(set(targets)) != len(targets):
                raise ValueError("generator maps must be injective")

    @property
    def rank(self) -> int:
        return len(self.maps)

    def inverse_maps(self) -> tuple[tuple[int | None, ...], ...]:
        out = []
        for mp in self.maps:
            inv: list[int | None] = [None] * self.size
            for v, w in enumerate(mp):
                if w is not None:
                    inv[w] = v
            out.append(tuple(inv))
        return tuple(out)

    def neighbors(self) -> list[list[int | None]]:
        """``nb[v][label]`` with labels interleaving forward and backward moves."""
        inv = self.inverse_maps()
        return [[x for mp, im in zip(self.maps, inv) for x in (mp[v], im[v])] for v in range(self.size)]

    def edges(self) -> list[tuple[int, int, int]]:
        """``(generator index, source, target)`` sorted by generator then source."""
        return [(i, v, w) for i, mp in enumerate(self.maps) for v, w in enumerate(mp) if w is not None]

    def is_connected(self) -> bool:
        return len(_reach(self.neighbors(), 0)) == self.size

    def is_complete(self) -> bool:
        return all(w is not None for mp in self.maps for w in mp)

    def has_missing_edge(self) -> bool:
        return not self.is_complete()

    def relabel(self, order: Sequence[int]) -> "PartialAction":
        """The isomorphic copy in which old vertex ``order[k]`` becomes ``k``."""
        pos = {v: k for k, v in enumerate(order)}
        return PartialAction(
            self.size,
            tuple(tuple(None if mp[v] is None else pos[mp[v]] for v in order) for mp in self.maps),
        )

    def to_json(self) -> dict:
        return {"size": self.size, "maps": [list(mp) for mp in self.maps]}

    @classmethod
    def from_json(cls, data) -> "PartialAction":
        try:
            return cls(data["size"], tuple(tuple(mp) for mp in data["maps"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise SerializationError(f"bad partial action: {exc}") from exc


@dataclass(frozen=True)
class MarkedAction:
    action: PartialAction
    marked: int

    def __post_init__(self):
        if not self.action.is_complete():
            raise ValueError("a marked action must be total")
        if self.action.rank < 2 or self.action.maps[1][self.marked] != self.marked:
            raise ValueError("the marked point must be fixed by a2")

    @property
    def size(self) -> int:
        return self.action.size

    @property
    def maps(self):
        return self.action.maps

    def to_json(self) -> dict:
        return {**self.action.to_json(), "marked": self.marked}

    @classmethod
    def from_json(cls, data) -> "MarkedAction":
        try:
            return cls(PartialAction.from_json(data), data["marked"])
        except (KeyError, TypeError, ValueError) as exc:
            raise SerializationError(f"bad marked action: {exc}") from exc


def _as_action(g) -> PartialAction:
    return g.action if isinstance(g, MarkedAction) else g


def _reach(nb, root) -> list[int]:
    seen = {root}
    order = [root]
    for v in order:
        for w in nb[v]:
            if w is not None and w not in seen:
                seen.add(w)
                order.append(w)
    return order


# --------------------------------------------------------------------------
# Canonical codes


def _rooted_tokens(nb, root: int) -> tuple[list[int], list[int]]:
    """BFS code from ``root``: per visited vertex, one token per label (0 = missing)."""
    label = {root: 0}
    order = [root]
    tokens = []
    for v in order:
        for w in nb[v]:
            if w is None:
                tokens.append(0)
                continue
            k = label.get(w)
            if k is None:
                k = label[w] = len(order)
                order.append(w)
            tokens.append(k + 1)
    return tokens, order


def _beats(nb, root: int, best: list[int]) -> int:
    """Compare the code from ``root`` with ``best``: -1 smaller, 0 equal, 1 larger."""
    label = {root: 0}
    order = [root]
    pos = 0
    for v in order:
        for w in nb[v]:
            if w is None:
                t = 0
            else:
                k = label.get(w)
                if k is None:
                    k = label[w] = len(order)
                    order.append(w)
                t = k + 1
            b = best[pos]
            if t != b:
                return -1 if t < b else 1
            pos += 1
    return 0


def _encode(tokens: list[int]) -> bytes:
    return b"".join(t.to_bytes(2, "big") for t in tokens)


def canonical_root(g) -> int:
    """Least vertex whose rooted BFS code is minimal."""
    g = _as_action(g)
    nb = g.neighbors()
    if len(_reach(nb, 0)) != g.size:
        raise Disconnected("graph is not connected")
    best_root = 0
    best, _ = _rooted_tokens(nb, 0)
    for v in range(1, g.size):
        if _beats(nb, v, best) < 0:
            best, _ = _rooted_tokens(nb, v)
            best_root = v
    return best_root


def canonical_order(g) -> list[int]:
    """Vertices in the BFS order from the canonical root."""
    g = _as_action(g)
    return _rooted_tokens(g.neighbors(), canonical_root(g))[1]


def canonical_code(g) -> bytes:
    g = _as_action(g)
    tokens, _ = _rooted_tokens(g.neighbors(), canonical_root(g))
    return _encode(tokens)


def canonical_form(g) -> PartialAction:
    g = _as_action(g)
    return g.relabel(canonical_order(g))


# --------------------------------------------------------------------------
# Enumeration


def enumerate_partial_actions(r: int, min_verts: int, max_verts: int) -> Iterator[PartialAction]:
    """Connected partial actions with a missing half-edge, one per isomorphism class.

    Ordered by size, then canonical code.  Graphs are generated directly in
    BFS-normal form from vertex 0, and a form is kept only when vertex 0 is
    a root of minimal code.
    """
    if r < 1:
        raise ValueError("rank must be positive")
    if not 1 <= min_verts <= max_verts:
        raise ValueError("need 1 <= min_verts <= max_verts")
    for size in range(min_verts, max_verts + 1):
        found = [(_encode(tokens), g) for tokens, g in _normal_forms(r, size)]
        found.sort(key=lambda item: item[0])
        for _, g in found:
            yield g


def _normal_forms(r: int, size: int):
    labels = 2 * r
    nb = [[-1] * labels for _ in range(size)]  # -1 undecided, None missing
    count = [1]
    results = []

    def finish():
        if count[0] != size:
            return
        tokens = []
        complete = True
        for v in range(size):
            for w in nb[v]:
                if w is None:
                    tokens.append(0)
                    complete = False
                else:
                    tokens.append(w + 1)
        if complete:
            return
        frozen = [list(row) for row in nb]
        for v in range(1, size):
            if _beats(frozen, v, tokens) < 0:
                return
        maps = tuple(tuple(frozen[v][2 * i] for v in range(size)) for i in range(r))
        results.append((tokens, PartialAction(size, maps)))

    def rec(v: int, lab: int):
        if lab == labels:
            v, lab = v + 1, 0
        if v == count[0]:
            finish()
            return
        if nb[v][lab] != -1:
            rec(v, lab + 1)
            return
        back = lab ^ 1
        # missing
        nb[v][lab] = None
        rec(v, lab + 1)
        # an existing vertex whose reverse slot is still free
        for w in range(count[0]):
            if nb[w][back] == -1:
                nb[v][lab] = w
                nb[w][back] = v
                rec(v, lab + 1)
                nb[w][back] = -1
        # a fresh vertex
        if count[0] < size:
            w = count[0]
            count[0] += 1
            nb[v][lab] = w
            nb[w][back] = v
            rec(v, lab + 1)
            nb[w][back] = -1
            count[0] -= 1
        nb[v][lab] = -1

    rec(0, 0)
    return results


# --------------------------------------------------------------------------
# Completion with a marked point


def extend_marked(g: PartialAction) -> MarkedAction:
    """Add ``δ`` and ``ξ`` and close every generator into a permutation.

    ``ℓ`` is the least generator missing an outgoing edge somewhere, ``ζ``
    the first such vertex in canonical order.  The new edges are
    ``ζ -a_ℓ-> δ``, ``δ -a1-> ξ`` and an ``a2``-loop at ``ξ``; each maximal
    oriented segment of every generator is then closed end to start.
    """
    if g.rank < 2:
        raise ValueError("the completion needs at least two generators")
    order = canonical_order(g)
    choice = next(
        ((ell, z) for ell in range(g.rank) for z in order if g.maps[ell][z] is None),
        None,
    )
    if choice is None:
        raise NoMissingEdge("every generator is total on the graph")
    ell, zeta = choice
    m = g.size
    delta, xi = m, m + 1
    maps = [list(mp) + [None, None] for mp in g.maps]
    maps[ell][zeta] = delta
    maps[0][delta] = xi
    maps[1][xi] = xi
    vertex_order = order + [delta, xi]
    for mp in maps:
        hit = set(w for w in mp if w is not None)
        for start in vertex_order:
            if start in hit:
                continue
            end = start
            while mp[end] is not None:
                end = mp[end]
            mp[end] = start
    return MarkedAction(PartialAction(m + 2, tuple(tuple(mp) for mp in maps)), xi)


# --------------------------------------------------------------------------
# Balls and embeddings


class Ball(NamedTuple):
    action: PartialAction  # vertex 0 is the centre
    labels: tuple[int, ...]  # original vertex of each ball vertex

    @property
    def root(self) -> int:
        return 0


def ball_of(g, root: int, radius: int) -> Ball:
    """Induced subgraph on the vertices within distance ``radius`` of ``root``."""
    if radius < 0:
        raise ValueError("radius must be non-negative")
    g = _as_action(g)
    nb = g.neighbors()
    dist = {root: 0}
    order = [root]
    for v in order:
        if dist[v] == radius:
            continue
        for w in nb[v]:
            if w is not None and w not in dist:
                dist[w] = dist[v] + 1
                order.append(w)
    pos = {v: k for k, v in enumerate(order)}
    maps = tuple(
        tuple(pos.get(mp[v]) if mp[v] is not None else None for v in order) for mp in g.maps
    )
    return Ball(PartialAction(len(order), maps), tuple(order))


def contains_labeled_copy(host, pattern, anchor: tuple[int, int] | None = None) -> dict[int, int] | None:
    """An injective labelled embedding of ``pattern`` into ``host``, or ``None``.

    Labelled edges are deterministic, so an embedding is fixed by the image
    of one vertex; every host vertex is tried for the pattern's canonical
    root unless ``anchor = (pattern vertex, host vertex)`` pins it.
    """
    host, pattern = _as_action(host), _as_action(pattern)
    if host.rank != pattern.rank:
        return None
    pnb = pattern.neighbors()
    hnb = host.neighbors()
    if anchor is None:
        proot = canonical_root(pattern)
        candidates = range(host.size)
    else:
        proot, h = anchor
        candidates = [h]
    porder = _reach(pnb, proot)
    if len(porder) != pattern.size:
        raise Disconnected("pattern is not connected")
    for h in candidates:
        emb = _propagate(pnb, hnb, porder, proot, h)
        if emb is not None:
            return emb
    return None


def _propagate(pnb, hnb, porder, proot, h):
    emb = {proot: h}
    used = {h}
    for v in porder:
        hv = emb[v]
        for lab, w in enumerate(pnb[v]):
            if w is None:
                continue
            x = hnb[hv][lab]
            if x is None:
                return None
            if w in emb:
                if emb[w] != x:
                    return None
            elif x in used:
                return None
            else:
                emb[w] = x
                used.add(x)
    return emb


# --------------------------------------------------------------------------
# Export


def to_dot(g, name: str = "G") -> str:
    marked = g.marked if isinstance(g, MarkedAction) else None
    action = _as_action(g)
    lines = [f"digraph {name} {{", "  node [shape=circle];"]
    for v in range(action.size):
        lines.append(f"  {v} [shape=doublecircle];" if v == marked else f"  {v};")
    for i, v, w in action.edges():
        lines.append(f'  {v} -> {w} [label="a{i + 1}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def dumps(g) -> str:
    return json.dumps(g.to_json(), sort_keys=True)
