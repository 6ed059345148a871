"""Finite permutation groups: brute-force closure and a Schreier-Sims chain.

Permutations are tuples of images, ``p[i]`` being the image of ``i``.
Products are functional: ``mul(p, q)`` applies ``q`` first.

Everything here is deterministic.  The stabilizer chain uses the natural
ordering of points for its base and sifts every Schreier generator, so the
same generators always give the same chain.
"""

from __future__ import annotations

import math
from collections import Counter
from operator import itemgetter
from typing import Iterable, Sequence

from .errors import CapExceeded

Perm = tuple

MAX_DEGREE = 1 << 16


def identity(n: int) -> Perm:
    return tuple(range(n))


def mul(p: Perm, q: Perm) -> Perm:
    """``p ∘ q``."""
    if len(q) < 2:
        return tuple(p[i] for i in q)
    return itemgetter(*q)(p)


def inverse(p: Perm) -> Perm:
    out = [0] * len(p)
    for i, j in enumerate(p):
        out[j] = i
    return tuple(out)


def is_identity(p: Perm) -> bool:
    return all(i == j for i, j in enumerate(p))


def check_perm(p: Sequence[int]) -> None:
    if sorted(p) != list(range(len(p))):
        raise ValueError("not a permutation")


def transposition(n: int, i: int, j: int) -> Perm:
    out = list(range(n))
    out[i], out[j] = j, i
    return tuple(out)


def cycle(n: int, points: Sequence[int]) -> Perm:
    out = list(range(n))
    for a, b in zip(points, list(points[1:]) + [points[0]]):
        out[a] = b
    return tuple(out)


def cycles(p: Perm) -> list[list[int]]:
    seen = [False] * len(p)
    out = []
    for i in range(len(p)):
        if seen[i]:
            continue
        c = [i]
        seen[i] = True
        j = p[i]
        while j != i:
            seen[j] = True
            c.append(j)
            j = p[j]
        out.append(c)
    return out


def order(p: Perm) -> int:
    return math.lcm(*(len(c) for c in cycles(p))) if p else 1


def is_even(p: Perm) -> bool:
    return sum(len(c) - 1 for c in cycles(p)) % 2 == 0


def pow_perm(p: Perm, k: int) -> Perm:
    if k < 0:
        p, k = inverse(p), -k
    out = identity(len(p))
    base = p
    while k:
        if k & 1:
            out = mul(base, out)
        base = mul(base, base)
        k >>= 1
    return out


def conjugate(p: Perm, by: Perm) -> Perm:
    """``by ∘ p ∘ by⁻¹``."""
    return mul(by, mul(p, inverse(by)))


def _degree(gens: Sequence[Perm], degree: int | None) -> int:
    degrees = {len(g) for g in gens}
    if degree is not None:
        degrees.add(degree)
    if len(degrees) > 1:
        raise ValueError(f"permutations of different degrees: {sorted(degrees)}")
    return degrees.pop() if degrees else 0


def closure(gens: Iterable[Perm], cap: int, degree: int | None = None) -> frozenset:
    """All elements of ``⟨gens⟩``; raises :class:`CapExceeded` past ``cap``."""
    if cap < 1:
        raise ValueError("cap must be at least 1")
    gens = [tuple(g) for g in gens]
    n = _degree(gens, degree)
    gens = [g for g in dict.fromkeys(gens) if not is_identity(g)]
    e = identity(n)
    seen = {e}
    frontier = [e]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = mul(g, x)
                if y not in seen:
                    seen.add(y)
                    if len(seen) > cap:
                        raise CapExceeded(f"group has more than {cap} elements")
                    nxt.append(y)
        frontier = nxt
    return frozenset(seen)


def orbits(gens: Sequence[Perm], n: int) -> list[list[int]]:
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for g in gens:
        for i, j in enumerate(g):
            a, b = find(i), find(j)
            if a != b:
                parent[max(a, b)] = min(a, b)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return list(groups.values())


def order_upper_bound(gens: Sequence[Perm], n: int) -> int:
    """``∏ |O|!`` over the orbits of ``⟨gens⟩``."""
    return math.prod(math.factorial(len(o)) for o in orbits(gens, n))


class _Level:
    __slots__ = ("point", "gens", "transversal", "inverses", "done")

    def __init__(self, point: int):
        self.point = point
        self.gens: list[Perm] = []
        # orbit point -> coset representative u with u(point) = orbit point
        self.transversal: dict[int, Perm] = {}
        self.inverses: dict[int, Perm] = {}
        self.done: set[tuple[int, int]] = set()


class GroupHandle:
    """Stabilizer chain of ``⟨gens⟩`` built by deterministic Schreier-Sims.

    ``base`` lists the base points (each new point is the least point moved
    by the generator that forced it).  Membership is decided by sifting.

    With ``until_contains`` the construction pauses as soon as every listed
    permutation sifts to the identity: a successful sift writes it as a
    product of group elements, so those answers are final.  Any later query
    that needs the full chain resumes the construction.
    """

    def __init__(self, gens: Iterable[Perm], degree: int | None = None, until_contains: Iterable[Perm] = ()):
        gens = [tuple(g) for g in gens]
        self.degree = _degree(gens, degree)
        self.generators = [g for g in dict.fromkeys(gens) if not is_identity(g)]
        self._e = identity(self.degree)
        self._levels: list[_Level] = []
        self._upper = order_upper_bound(self.generators, self.degree)
        self._cursor: int | None = None
        self.complete = False
        self._seed()
        self._build([tuple(t) for t in until_contains])

    @property
    def base(self) -> list[int]:
        return [lv.point for lv in self._levels]

    @property
    def strong_generators(self) -> list[Perm]:
        out: dict[Perm, None] = {}
        for lv in self._levels:
            out.update(dict.fromkeys(lv.gens))
        return list(out)

    def order(self) -> int:
        if not self.complete:
            self._build()
        return self._partial_order()

    def _partial_order(self) -> int:
        return math.prod(len(lv.transversal) for lv in self._levels)

    def _grow_orbit(self, lv: _Level) -> None:
        if not lv.transversal:
            lv.transversal[lv.point] = self._e
            lv.inverses[lv.point] = self._e
        queue = list(lv.transversal)
        k = 0
        # re-scan every known point so new generators are applied everywhere
        while k < len(queue):
            x = queue[k]
            k += 1
            ux = lv.transversal[x]
            for g in lv.gens:
                y = g[x]
                if y not in lv.transversal:
                    u = mul(g, ux)
                    lv.transversal[y] = u
                    lv.inverses[y] = inverse(u)
                    queue.append(y)

    def _sift(self, g: Perm, start: int) -> tuple[Perm, int]:
        for i in range(start, len(self._levels)):
            lv = self._levels[i]
            ui = lv.inverses.get(g[lv.point])
            if ui is None:
                return g, i
            g = mul(ui, g)
        return g, len(self._levels)

    def _new_level(self, g: Perm) -> None:
        point = next(i for i, j in enumerate(g) if i != j)
        lv = _Level(point)
        self._levels.append(lv)

    def _add_strong(self, g: Perm, upto: int) -> None:
        # g fixes base points of levels < upto's first failing level
        for i in range(len(self._levels)):
            lv = self._levels[i]
            if all(g[self._levels[j].point] == self._levels[j].point for j in range(i)):
                if g not in lv.gens:
                    lv.gens.append(g)
            if i >= upto:
                break

    def _seed(self) -> None:
        for g in self.generators:
            h, j = self._sift(g, 0)
            if is_identity(h):
                continue
            if j == len(self._levels):
                self._new_level(h)
            self._add_strong(h, j)
            for lv in self._levels[: j + 1]:
                self._grow_orbit(lv)
        self._cursor = len(self._levels) - 1

    def _build(self, targets: list[Perm] = ()) -> None:
        i = self._cursor
        while i is not None and i >= 0:
            if self._partial_order() == self._upper:
                break
            if targets and all(is_identity(self._sift(t, 0)[0]) for t in targets):
                self._cursor = i
                return
            lv = self._levels[i]
            restart = None
            for x in list(lv.transversal):
                ux = lv.transversal[x]
                for gi, s in enumerate(lv.gens):
                    if (x, gi) in lv.done:
                        continue
                    lv.done.add((x, gi))
                    schreier = mul(lv.inverses[s[x]], mul(s, ux))
                    if is_identity(schreier):
                        continue
                    h, j = self._sift(schreier, i + 1)
                    if is_identity(h):
                        continue
                    if j == len(self._levels):
                        self._new_level(h)
                    for k in range(i + 1, j + 1):
                        lvk = self._levels[k]
                        if h not in lvk.gens:
                            lvk.gens.append(h)
                        self._grow_orbit(lvk)
                    restart = j
                    break
                if restart is not None:
                    break
            if restart is not None:
                i = restart
                continue
            # the orbit may have grown while we scanned; rescan if so
            if any((x, gi) not in lv.done for x in lv.transversal for gi in range(len(lv.gens))):
                continue
            i -= 1
        self._cursor = None
        self.complete = True

    def contains(self, p: Perm) -> bool:
        p = tuple(p)
        if len(p) != self.degree:
            raise ValueError("degree mismatch")
        if is_identity(self._sift(p, 0)[0]):
            return True
        if not self.complete:
            self._build()
        return is_identity(self._sift(p, 0)[0])


def is_member(g: GroupHandle, p: Perm) -> bool:
    return g.contains(p)


def cycle_type(p: Perm) -> Counter:
    return Counter(len(c) for c in cycles(p))
