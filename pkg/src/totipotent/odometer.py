"""Binary odometer, dyadic permutations and generation certificates.

``[0, 1)`` is identified with ``{0,1}^ℕ`` through binary expansion, so the
cylinder of a word ``s`` is the dyadic interval whose binary digits start
with ``s``.  The odometer adds ``1`` at the first digit and carries to the
right; it needs infinitely many pieces, so it is replaced by its level-``L``
periodic approximation, which differs from it only on the cylinder ``1^L``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple, Sequence

from . import permcert
from .errors import InsufficientRoom, LevelMismatch, NotDyadic, NotPeriodic, OverlapError
from .exactmaps import (
    IntervalSet,
    PiecewiseTranslation,
    Transform,
    atom_permutation,
    compose,
    disjoint_union,
    from_atom_permutation,
    grid_denominator,
    image,
    power,
    rat,
    support,
    transport,
)
from .precycles import PreCycle, closing_cycle, kth_root, period

BRUTE_FORCE_LIMIT = 10**5


def cylinder(bits: str) -> tuple[Fraction, Fraction]:
    if any(b not in "01" for b in bits):
        raise ValueError(f"not a bit word: {bits!r}")
    start = Fraction(int(bits, 2), 2 ** len(bits)) if bits else Fraction(0)
    return start, start + Fraction(1, 2 ** len(bits))


def cylinder_set(bits: str) -> IntervalSet:
    return IntervalSet([cylinder(bits)])


def odometer_at_level(level: int) -> Transform:
    """Level-``L`` periodic approximation of the odometer.

    On ``1^{k-1}0`` (``k ≤ L``) it is the carry translation onto ``0^{k-1}1``;
    ``1^L`` is sent onto ``0^L``.
    """
    if level < 1:
        raise ValueError("level must be at least 1")
    pieces = []
    for k in range(1, level + 1):
        a, b = cylinder("1" * (k - 1) + "0")
        target, _ = cylinder("0" * (k - 1) + "1")
        pieces.append((a, b, target - a))
    a, b = cylinder("1" * level)
    pieces.append((a, b, -a))
    return PiecewiseTranslation(pieces)


def odometer_cycle(level: int, denominator: int | None = None) -> tuple[int, ...]:
    """Atom permutation of the level-``L`` odometer on the ``1/D`` grid."""
    d = 2**level if denominator is None else denominator
    if d % 2**level:
        raise LevelMismatch(f"grid 1/{d} does not refine dyadic level {level}")
    return atom_permutation(odometer_at_level(level), d)


@dataclass(frozen=True)
class AtomPermutation:
    """A permutation of the ``2^L`` level-``L`` cylinders, indexed by their words read in binary."""

    level: int
    images: tuple[int, ...]

    def __post_init__(self):
        if len(self.images) != 2**self.level:
            raise ValueError("an atom permutation at level L has 2^L images")
        permcert.check_perm(self.images)

    def __mul__(self, other: "AtomPermutation") -> "AtomPermutation":
        if other.level != self.level:
            raise LevelMismatch("atom permutations at different levels")
        return AtomPermutation(self.level, permcert.mul(self.images, other.images))

    @classmethod
    def from_words(cls, level: int, mapping: dict[str, str]) -> "AtomPermutation":
        images = list(range(2**level))
        for a, b in mapping.items():
            images[int(a, 2)] = int(b, 2)
        return cls(level, tuple(images))


def dyadic_permutation(sigma: AtomPermutation) -> Transform:
    return from_atom_permutation(sigma.images)


def upsilon(n: int) -> AtomPermutation:
    """The transposition of ``0^{n-1}1`` and ``1^{n-1}0``."""
    if n < 1:
        raise ValueError("n must be at least 1")
    return AtomPermutation.from_words(n, {"0" * (n - 1) + "1": "1" * (n - 1) + "0", "1" * (n - 1) + "0": "0" * (n - 1) + "1"})


def u_n(n: int) -> Transform:
    return dyadic_permutation(upsilon(n))


# --------------------------------------------------------------------------
# Certificates


@dataclass
class GroupCertificate:
    degree: int
    generators: list
    targets: list
    verdict: bool
    method: str  # "BruteClosure" or "StabilizerChain"
    order: int | None = None
    description: str = ""
    level: int | None = None
    extra: dict = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.verdict

    def to_json(self) -> dict:
        out = {
            "degree": self.degree,
            "level": self.level,
            "generator_count": len(self.generators),
            "target_count": len(self.targets),
            "targets": self.description,
            "verdict": self.verdict,
            "method": self.method,
            "group_order": str(self.order) if self.order is not None else None,
        }
        out.update(self.extra)
        return out


def group_contains(gens: Sequence, targets: Sequence, degree: int | None = None, description: str = "") -> GroupCertificate:
    """Decide ``⟨gens⟩ ⊇ targets`` exactly.

    Brute-force closure is used when the orbit bound ``∏|O|!`` is at most
    ``10⁵``; otherwise a stabilizer chain.
    """
    gens = [tuple(g.images if isinstance(g, AtomPermutation) else g) for g in gens]
    targets = [tuple(t.images if isinstance(t, AtomPermutation) else t) for t in targets]
    degrees = {len(x) for x in gens + targets}
    if degree is not None:
        degrees.add(degree)
    if len(degrees) > 1:
        raise LevelMismatch(f"permutations of different degrees: {sorted(degrees)}")
    d = degrees.pop() if degrees else 0
    level = int(math.log2(d)) if d and d & (d - 1) == 0 else None
    uniq = [g for g in dict.fromkeys(gens) if not permcert.is_identity(g)]
    if permcert.order_upper_bound(uniq, d) <= BRUTE_FORCE_LIMIT:
        elements = permcert.closure(uniq, BRUTE_FORCE_LIMIT, degree=d)
        verdict = all(t in elements for t in targets)
        return GroupCertificate(d, gens, targets, verdict, "BruteClosure", len(elements), description, level)
    handle = permcert.GroupHandle(uniq, degree=d, until_contains=targets)
    verdict = all(handle.contains(t) for t in targets)
    order = handle.order() if handle.complete else None
    return GroupCertificate(d, gens, targets, verdict, "StabilizerChain", order, description, level)


def conjugates_by_cycle(w: Sequence[int], cyc: Sequence[int]) -> list[tuple[int, ...]]:
    """``c^k w c^{-k}`` for ``0 ≤ k < ord(c)``."""
    out = []
    ck = permcert.identity(len(cyc))
    for _ in range(permcert.order(tuple(cyc))):
        out.append(permcert.conjugate(tuple(w), ck))
        ck = permcert.mul(tuple(cyc), ck)
    return out


def symmetric_generators(blocks: int, degree: int) -> list[tuple[int, ...]]:
    """Generators of ``Sym(blocks)`` acting rigidly on equal consecutive blocks of atoms."""
    size = degree // blocks

    def lift(sigma):
        return tuple(sigma[a // size] * size + a % size for a in range(degree))

    if blocks == 1:
        return []
    gens = [lift(permcert.transposition(blocks, 0, 1))]
    if blocks > 2:
        gens.append(lift(permcert.cycle(blocks, list(range(blocks)))))
    return gens


def lemma_conjugates_certificate(n: int) -> GroupCertificate:
    """Level-``n`` check that the odometer conjugates of ``υ_n`` generate ``Sym(2ⁿ)``."""
    if n < 2:
        raise ValueError("n must be at least 2")
    cyc = odometer_cycle(n)
    gens = conjugates_by_cycle(upsilon(n).images, cyc)
    targets = symmetric_generators(2**n, 2**n)
    cert = group_contains(gens, targets, degree=2**n, description=f"Sym(2^{n})")
    cert.extra["n"] = n
    return cert


def evanescent_certificate(v: Transform, m: int, n: int) -> GroupCertificate:
    """Finite-level membership of ``v`` in ``E_{m,n}``.

    With ``p`` the larger of ``n`` and the dyadic level of ``v``, the group
    generated by ``T^k v^m T^{-k}`` (``T`` the level-``p`` odometer,
    ``0 ≤ k < 2^p``) must contain ``Sym(2ⁿ)`` permuting level-``n``
    cylinders rigidly.
    """
    if not v.is_total:
        raise ValueError("v must be a transform")
    if m < 1 or n < 1:
        raise ValueError("m and n must be positive")
    grid = grid_denominator(v)
    if grid & (grid - 1):
        raise NotDyadic(f"v has breakpoints on the 1/{grid} grid, which is not dyadic")
    p = max(n, grid.bit_length() - 1)
    d = 2**p
    if d > permcert.MAX_DEGREE:
        raise LevelMismatch(f"level {p} exceeds the supported degree {permcert.MAX_DEGREE}")
    w = atom_permutation(power(v, m), d)
    gens = conjugates_by_cycle(w, odometer_cycle(p))
    targets = symmetric_generators(2**n, d)
    cert = group_contains(gens, targets, degree=d, description=f"Sym(2^{n}) on level-{n} cylinders")
    cert.extra.update({"m": m, "n": n})
    return cert


class EvanescentApproximation(NamedTuple):
    transform: Transform
    order: int  # K, the order of the approximated element
    level: int  # p
    saturation: IntervalSet  # A
    root: Transform  # the (Km)-th root of U_p


def evanescent_level(order: int, n: int, eps) -> int:
    """Least ``p ≥ n`` with ``2^{-p}·K < ε/2``."""
    eps = rat(eps)
    if eps <= 0:
        raise ValueError("epsilon must be positive")
    p = max(n, 1)
    while Fraction(order, 2**p) >= eps / 2:
        p += 1
    return p


def build_evanescent_V(u: Transform, m: int, n: int, eps, bound: int = 1 << 16) -> EvanescentApproximation:
    """Perturb a periodic ``u`` into ``Ũ`` with ``Ũ^{Km} = U_p`` and ``d_u(u, Ũ) < ε``."""
    rep = period(u, bound)
    if rep.period is None:
        raise NotPeriodic(f"u has no period up to {bound}")
    k_ord = rep.period
    p = evanescent_level(k_ord, n, eps)
    up = u_n(p)
    base = support(up)
    sat = IntervalSet.empty()
    ui = PiecewiseTranslation.identity()
    for _ in range(k_ord):
        sat = sat | image(ui, base)
        ui = compose(u, ui)
    root = kth_root(up, k_ord * m, bound)
    outside = compose(u, PiecewiseTranslation.identity(sat.complement()))
    inside = compose(root, PiecewiseTranslation.identity(sat))
    return EvanescentApproximation(disjoint_union(outside, inside), k_ord, p, sat, root)


class StrengthenedPair(NamedTuple):
    transform: Transform  # V₂ = v U₂
    three_cycle: Transform  # U₁
    root: Transform  # U₂
    precycle: PreCycle  # φ ⊔ ψ


def strengthen_to_cost1_pair(v: Transform, t: Transform, phi: PreCycle, n: int) -> StrengthenedPair:
    """Glue an ``n``-th root of a 3-cycle extending ``phi`` onto ``v``.

    ``ψ`` carries ``rng φ`` onto the leftmost free part of ``supp t`` outside
    ``supp v ∪ supp φ``.
    """
    if phi.length != 2:
        raise ValueError("phi must be a pre-cycle of length 2")
    sv = support(v)
    sphi = support(phi.map)
    if not sv.isdisjoint(sphi):
        raise OverlapError("phi meets the support of v")
    free = support(t) - sv - sphi
    need = phi.basis.measure
    if free.measure < need:
        raise InsufficientRoom(f"need {need} outside supp v ∪ supp φ, have {free.measure}")
    target, _ = free.carve(need)
    psi = transport(phi.map.range, target)
    chain = disjoint_union(phi.map, psi)
    pc = PreCycle(chain, 3, phi.basis)
    u1 = closing_cycle(pc)
    u2 = kth_root(u1, n)
    return StrengthenedPair(compose(v, u2), u1, u2, pc)
