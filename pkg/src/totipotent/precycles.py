"""Pre-cycles, closing cycles, periods and roots of periodic transforms."""

from __future__ import annotations

import math
from bisect import bisect_left
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

from . import permcert
from .errors import GridMismatch, InsufficientRoom, NotExtending, NotPeriodic
from .exactmaps import (
    ZERO,
    IntervalSet,
    PiecewiseTranslation,
    Transform,
    atom_permutation,
    compose,
    disjoint_union,
    extends,
    grid_denominator,
    image,
    invert,
    power,
    rat,
    support,
    transport,
    union_all,
)


@dataclass(frozen=True)
class PreCycle:
    map: PiecewiseTranslation
    length: int
    basis: IntervalSet

    def __post_init__(self):
        check = is_precycle(self.map, self.length)
        if not check.ok or check.basis != self.basis:
            raise ValueError(f"not a pre-cycle of length {self.length} with the given basis")

    def layers(self) -> list[IntervalSet]:
        """``[B, φ(B), …, φ^{n-1}(B)]``."""
        out = [self.basis]
        for _ in range(self.length - 1):
            out.append(image(self.map, out[-1]))
        return out

    def to_json(self) -> dict:
        return {"length": self.length, "map": self.map.to_json()}

    @classmethod
    def from_json(cls, data) -> "PreCycle":
        from .errors import SerializationError

        if not isinstance(data, dict) or set(data) != {"length", "map"}:
            raise SerializationError('expected {"length": n, "map": {...}}')
        phi = PiecewiseTranslation.from_json(data["map"])
        n = data["length"]
        if not isinstance(n, int) or n < 2:
            raise SerializationError("pre-cycle length must be an integer >= 2")
        check = is_precycle(phi, n)
        if not check:
            raise SerializationError(f"map is not a pre-cycle of length {n}")
        return cls(phi, n, check.basis)


class PrecycleCheck(NamedTuple):
    ok: bool
    basis: IntervalSet | None

    def __bool__(self) -> bool:
        return self.ok


class PeriodReport(NamedTuple):
    period: int | None  # None means the bound was exceeded
    bound: int

    @property
    def exceeds_bound(self) -> bool:
        return self.period is None


def _is_partition(parts: list[IntervalSet], whole: IntervalSet) -> bool:
    acc = IntervalSet.empty()
    for p in parts:
        if not p or not acc.isdisjoint(p):
            return False
        acc = acc | p
    return acc == whole


def is_precycle(phi: PiecewiseTranslation, n: int) -> PrecycleCheck:
    if n < 2:
        raise ValueError("pre-cycle length must be at least 2")
    dom, rng = phi.domain, phi.range
    basis = dom - rng
    if not basis:
        return PrecycleCheck(False, None)
    layers = [basis]
    for _ in range(n - 1):
        layers.append(image(phi, layers[-1]))
    if any(lay.measure != basis.measure for lay in layers):
        return PrecycleCheck(False, None)
    if _is_partition(layers[:-1], dom) and _is_partition(layers[1:], rng):
        return PrecycleCheck(True, basis)
    return PrecycleCheck(False, None)


def make_precycle(n: int, basis_measure, slots: IntervalSet) -> PreCycle:
    """Carve ``n`` consecutive blocks of equal measure from ``slots`` and chain them."""
    if n < 2:
        raise ValueError("pre-cycle length must be at least 2")
    m = rat(basis_measure)
    if m <= 0:
        raise ValueError("basis measure must be positive")
    if slots.measure < n * m:
        raise InsufficientRoom(f"need {n * m}, slots have measure {slots.measure}")
    blocks = []
    rest = slots
    for _ in range(n):
        block, rest = rest.carve(m)
        blocks.append(block)
    phi = union_all(transport(a, b) for a, b in zip(blocks, blocks[1:]))
    return PreCycle(phi, n, blocks[0])


def precycle_from_blocks(blocks: list[IntervalSet]) -> PreCycle:
    """Chain pairwise disjoint blocks of equal measure ``B₀ → B₁ → …``."""
    phi = union_all(transport(a, b) for a, b in zip(blocks, blocks[1:]))
    return PreCycle(phi, len(blocks), blocks[0])


def closing_cycle(p: PreCycle) -> Transform:
    phi = p.map
    top = phi.range - phi.domain
    back = compose(power(invert(phi), p.length - 1), PiecewiseTranslation.identity(top))
    closed = disjoint_union(phi, back)
    rest = PiecewiseTranslation.identity(closed.domain.complement())
    return disjoint_union(closed, rest)


# --------------------------------------------------------------------------
# Periodic transforms


class Atoms(NamedTuple):
    """Finest partition needed to see a periodic transform as a permutation."""

    cells: list[tuple[Fraction, Fraction]]
    perm: tuple[int, ...]


def periodic_atoms(t: Transform, bound: int) -> Atoms:
    """Refine ``[0, 1)`` until ``t`` permutes the cells rigidly.

    The breakpoints are closed under ``t`` and its left-continuous version;
    for a transform of period ``k`` this stabilises after at most ``k``
    rounds.  Raises :class:`NotPeriodic` if it has not stabilised after
    ``bound`` rounds or if the resulting permutation has order above ``bound``.
    """
    if not t.is_total:
        raise ValueError("periods are defined for transforms only")
    points = {ZERO, Fraction(1)} | {p.start for p in t.pieces}
    frontier = set(points)
    rounds = 0
    while frontier:
        rounds += 1
        if rounds > bound + 1:
            raise NotPeriodic(f"breakpoint orbits do not close within {bound} steps")
        new = set()
        for x in frontier:
            if x < 1:
                p = t.piece_at(x)
                y = x + p.offset
                if y not in points:
                    new.add(y)
            if x > 0:
                # image of the left limit at x
                y = x + _left_piece(t, x).offset
                if y not in points:
                    new.add(y)
        points |= new
        frontier = new
    ordered = sorted(points)
    cells = list(zip(ordered, ordered[1:]))
    index = {a: i for i, (a, _) in enumerate(cells)}
    perm = tuple(index[a + t.piece_at(a).offset] for a, _ in cells)
    if permcert.order(perm) > bound:
        raise NotPeriodic(f"period {permcert.order(perm)} exceeds bound {bound}")
    return Atoms(cells, perm)


def _left_piece(t: Transform, x: Fraction):
    # the piece containing points just below x
    return t.pieces[bisect_left(t._starts, x) - 1]


def period(t: Transform, bound: int) -> PeriodReport:
    if bound < 1:
        raise ValueError("bound must be positive")
    try:
        atoms = periodic_atoms(t, bound)
    except NotPeriodic:
        return PeriodReport(None, bound)
    k = permcert.order(atoms.perm)
    return PeriodReport(k, bound)


def kth_root(u: Transform, k: int, bound: int = 1 << 16) -> Transform:
    """A transform ``w`` with ``w^k = u`` and ``supp w = supp u``.

    Cycles of ``u`` on its atoms are grouped by length.  For each length the
    least atom of every cycle forms a fundamental domain ``A``; ``A`` is cut
    into ``k`` equal blocks that a ``k``-cycle ``V`` shifts one step to the
    right, and ``w`` is ``U·UⁱVU⁻ⁱ`` on ``Uⁱ(B)`` (``B`` the first block) and
    ``UⁱVU⁻ⁱ`` on ``Uⁱ(A∖B)``.
    """
    if k < 1:
        raise ValueError("k must be positive")
    atoms = periodic_atoms(u, bound)
    by_length: dict[int, list[int]] = {}
    for c in permcert.cycles(atoms.perm):
        if len(c) > 1:
            by_length.setdefault(len(c), []).append(min(c))
    pieces: list[PiecewiseTranslation] = []
    for n, leaders in sorted(by_length.items()):
        domain = IntervalSet(atoms.cells[i] for i in leaders)
        share = domain.measure / k
        blocks = []
        rest = domain
        for _ in range(k):
            b, rest = rest.carve(share)
            blocks.append(b)
        v = union_all(transport(blocks[j], blocks[(j + 1) % k]) for j in range(k)) if k > 1 else PiecewiseTranslation.identity(domain)
        ui = PiecewiseTranslation.identity(IntervalSet.full())
        for i in range(n):
            # ui = u^i;  conj = u^i v u^{-i} restricted to u^i(A)
            conj = compose(ui, compose(v, invert(ui)))
            first = image(ui, blocks[0])
            on_first = compose(u, compose(conj, PiecewiseTranslation.identity(first)))
            on_rest = compose(conj, PiecewiseTranslation.identity(image(ui, domain) - first))
            pieces.append(on_first)
            pieces.append(on_rest)
            ui = compose(u, ui)
    w = union_all(pieces)
    fixed = PiecewiseTranslation.identity(w.domain.complement())
    return disjoint_union(w, fixed)


# --------------------------------------------------------------------------
# Conjugation-trick certificate


def _grid_check(t: PiecewiseTranslation, denominator: int, what: str) -> None:
    if denominator % grid_denominator(t):
        raise GridMismatch(f"{what} has breakpoints off the 1/{denominator} grid")


def _atom_classes(phi: PiecewiseTranslation, basis: IntervalSet, steps: int, denominator: int) -> list[list[int]]:
    """Atom chains ``a, φa, …`` for atoms ``a`` of the basis."""
    out = []
    for a, b in basis:
        for j in range(int(a * denominator), int(b * denominator)):
            x = Fraction(j, denominator)
            chain = [j]
            for _ in range(steps):
                x = phi(x)
                chain.append(int(x * denominator))
            out.append(chain)
    return out


def conj_trick_certificate(p: PreCycle, u: Transform, denominator: int):
    """Finite-grid check that ``⟨[R_ψ] ∪ {u}⟩ ⊇ [R_φ]`` with ``ψ = φ|B``.

    On the atoms of width ``1/denominator`` the full group of the relation
    generated by a partial map is the group of atom permutations preserving
    its classes; it is generated by transpositions of consecutive class
    members.
    """
    from .odometer import group_contains

    if not extends(u, p.map):
        raise NotExtending("u does not extend the pre-cycle")
    _grid_check(p.map, denominator, "pre-cycle")
    _grid_check(u, denominator, "u")
    d = denominator
    psi_classes = _atom_classes(p.map, p.basis, 1, d)
    phi_classes = _atom_classes(p.map, p.basis, p.length - 1, d)
    gens = [atom_permutation(u, d)] + [permcert.transposition(d, c[0], c[1]) for c in psi_classes]
    targets = [permcert.transposition(d, c[i], c[i + 1]) for c in phi_classes for i in range(len(c) - 1)]
    return group_contains(gens, targets, degree=d)


def extends_map(t: Transform, phi: PiecewiseTranslation) -> bool:
    return extends(t, phi)


def support_measure(phi: PiecewiseTranslation) -> Fraction:
    return support(phi).measure


def common_fixed_points(transforms) -> IntervalSet:
    acc = IntervalSet.full()
    for t in transforms:
        acc = acc - support(t)
    return acc


def lcm_periods(transforms, bound: int) -> int:
    k = 1
    for t in transforms:
        rep = period(t, bound)
        if rep.period is None:
            raise NotPeriodic(f"period exceeds {bound}")
        k = math.lcm(k, rep.period)
    return k
