"""Exact piecewise translations of the unit interval.

Every measurable set is a finite union of half-open intervals ``[a, b)`` with
rational endpoints and every partial isomorphism is a finite family of
translated intervals.  All arithmetic is done with :class:`fractions.Fraction`,
so identities between maps are decided exactly.

The space is ``[0, 1)`` with Lebesgue measure.  Interval endpoints are a null
set and are handled by the half-open convention throughout.
"""

from __future__ import annotations

import json
import math
import re
from bisect import bisect_right
from fractions import Fraction
from typing import Iterable, Iterator, NamedTuple, Sequence

from .errors import GridMismatch, MeasureMismatch, OverlapError, SerializationError

Rat = Fraction

ZERO = Fraction(0)
ONE = Fraction(1)

_RAT_RE = re.compile(r"^(-?\d+)/(\d+)$")


def rat(value) -> Fraction:
    """Coerce an int, Fraction or ``"p/q"`` string to a Fraction.

    Floats are rejected: nothing in this package is allowed to round.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if re.fullmatch(r"-?\d+", text):
            return Fraction(int(text))
        m = _RAT_RE.match(text)
        if not m or int(m.group(2)) == 0:
            raise ValueError(f"not a rational 'p/q': {value!r}")
        return Fraction(int(m.group(1)), int(m.group(2)))
    raise TypeError(f"cannot interpret {type(value).__name__} as an exact rational")


def rat_str(x: Fraction) -> str:
    """Reduced ``"p/q"`` text, always with an explicit denominator."""
    return f"{x.numerator}/{x.denominator}"


def parse_rat_strict(text: str) -> Fraction:
    """Parse the serialized form, rejecting anything but reduced ``p/q``."""
    if not isinstance(text, str):
        raise SerializationError(f"expected a 'p/q' string, got {text!r}")
    m = _RAT_RE.match(text)
    if not m:
        raise SerializationError(f"malformed rational {text!r}; expected 'p/q'")
    p, q = int(m.group(1)), int(m.group(2))
    if q == 0:
        raise SerializationError(f"zero denominator in {text!r}")
    if math.gcd(p, q) != 1:
        raise SerializationError(f"rational {text!r} is not reduced")
    return Fraction(p, q)


# --------------------------------------------------------------------------
# Interval sets


def _normalize(intervals: Iterable[tuple[Fraction, Fraction]]) -> tuple[tuple[Fraction, Fraction], ...]:
    items = sorted((rat(a), rat(b)) for a, b in intervals)
    out: list[tuple[Fraction, Fraction]] = []
    for a, b in items:
        if b <= a:
            continue
        if a < 0 or b > 1:
            raise ValueError(f"interval [{a}, {b}) leaves [0, 1)")
        if out and a <= out[-1][1]:
            if b > out[-1][1]:
                out[-1] = (out[-1][0], b)
        else:
            out.append((a, b))
    return tuple(out)


class IntervalSet:
    """A finite union of half-open intervals inside ``[0, 1)``.

    Stored sorted, pairwise disjoint and maximally merged, so two sets are
    equal exactly when their interval tuples are.
    """

    __slots__ = ("intervals",)

    def __init__(self, intervals: Iterable[tuple] = ()):
        self.intervals = _normalize(intervals)

    @classmethod
    def _raw(cls, intervals: tuple) -> "IntervalSet":
        obj = cls.__new__(cls)
        obj.intervals = intervals
        return obj

    @classmethod
    def full(cls) -> "IntervalSet":
        return cls._raw(((ZERO, ONE),))

    @classmethod
    def empty(cls) -> "IntervalSet":
        return cls._raw(())

    @classmethod
    def interval(cls, a, b) -> "IntervalSet":
        return cls([(a, b)])

    def __iter__(self) -> Iterator[tuple[Fraction, Fraction]]:
        return iter(self.intervals)

    def __len__(self) -> int:
        return len(self.intervals)

    def __bool__(self) -> bool:
        return bool(self.intervals)

    def __eq__(self, other) -> bool:
        return isinstance(other, IntervalSet) and self.intervals == other.intervals

    def __hash__(self) -> int:
        return hash(self.intervals)

    def __repr__(self) -> str:
        body = ", ".join(f"[{a}, {b})" for a, b in self.intervals)
        return f"IntervalSet({{{body}}})"

    def __contains__(self, x) -> bool:
        x = rat(x)
        i = bisect_right(self.intervals, (x, ONE + 1)) - 1
        return i >= 0 and self.intervals[i][0] <= x < self.intervals[i][1]

    @property
    def measure(self) -> Fraction:
        return sum((b - a for a, b in self.intervals), ZERO)

    def _combine(self, other: "IntervalSet", keep) -> "IntervalSet":
        points = sorted({p for iv in self.intervals for p in iv} | {p for iv in other.intervals for p in iv})
        out: list[tuple[Fraction, Fraction]] = []
        i = j = 0
        for lo, hi in zip(points, points[1:]):
            while i < len(self.intervals) and self.intervals[i][1] <= lo:
                i += 1
            while j < len(other.intervals) and other.intervals[j][1] <= lo:
                j += 1
            in_a = i < len(self.intervals) and self.intervals[i][0] <= lo
            in_b = j < len(other.intervals) and other.intervals[j][0] <= lo
            if keep(in_a, in_b):
                if out and out[-1][1] == lo:
                    out[-1] = (out[-1][0], hi)
                else:
                    out.append((lo, hi))
        return IntervalSet._raw(tuple(out))

    def __or__(self, other: "IntervalSet") -> "IntervalSet":
        return self._combine(other, lambda a, b: a or b)

    def __and__(self, other: "IntervalSet") -> "IntervalSet":
        return self._combine(other, lambda a, b: a and b)

    def __sub__(self, other: "IntervalSet") -> "IntervalSet":
        return self._combine(other, lambda a, b: a and not b)

    def __xor__(self, other: "IntervalSet") -> "IntervalSet":
        return self._combine(other, lambda a, b: a != b)

    def complement(self) -> "IntervalSet":
        return IntervalSet.full() - self

    def isdisjoint(self, other: "IntervalSet") -> bool:
        return not (self & other)

    def issubset(self, other: "IntervalSet") -> bool:
        return not (self - other)

    def shift(self, offset) -> "IntervalSet":
        offset = rat(offset)
        return IntervalSet((a + offset, b + offset) for a, b in self.intervals)

    def carve(self, amount) -> tuple["IntervalSet", "IntervalSet"]:
        """Split off the leftmost part of measure ``amount``.

        Returns ``(taken, rest)``.  Raises ``ValueError`` when the set is too
        small.
        """
        amount = rat(amount)
        if amount > self.measure:
            raise ValueError(f"cannot carve {amount} from a set of measure {self.measure}")
        taken: list[tuple[Fraction, Fraction]] = []
        rest: list[tuple[Fraction, Fraction]] = []
        need = amount
        for a, b in self.intervals:
            if need <= 0:
                rest.append((a, b))
            elif b - a <= need:
                taken.append((a, b))
                need -= b - a
            else:
                taken.append((a, a + need))
                rest.append((a + need, b))
                need = ZERO
        return IntervalSet(taken), IntervalSet(rest)

    def to_json(self) -> list:
        return [[rat_str(a), rat_str(b)] for a, b in self.intervals]

    @classmethod
    def from_json(cls, data) -> "IntervalSet":
        if not isinstance(data, list):
            raise SerializationError("interval set must be a list of [start, end] pairs")
        ivs = []
        for item in data:
            if not (isinstance(item, list) and len(item) == 2):
                raise SerializationError(f"bad interval entry {item!r}")
            ivs.append((parse_rat_strict(item[0]), parse_rat_strict(item[1])))
        try:
            out = cls(ivs)
        except ValueError as exc:
            raise SerializationError(str(exc)) from exc
        if list(out.intervals) != ivs:
            raise SerializationError("interval set is not in canonical (sorted, merged) form")
        return out


def measure(a: IntervalSet) -> Fraction:
    return a.measure


# --------------------------------------------------------------------------
# Piecewise translations


class Piece(NamedTuple):
    start: Fraction
    end: Fraction
    offset: Fraction

    @property
    def image_start(self) -> Fraction:
        return self.start + self.offset

    @property
    def image_end(self) -> Fraction:
        return self.end + self.offset


def _canonical(pieces: Iterable) -> tuple[Piece, ...]:
    items = sorted(Piece(rat(a), rat(b), rat(o)) for a, b, o in pieces)
    out: list[Piece] = []
    for p in items:
        if p.end <= p.start:
            continue
        if p.start < 0 or p.end > 1 or p.image_start < 0 or p.image_end > 1:
            raise ValueError(f"piece [{p.start}, {p.end}) + {p.offset} leaves [0, 1)")
        if out and p.start < out[-1].end:
            raise OverlapError(f"source intervals overlap near {p.start}")
        if out and out[-1].end == p.start and out[-1].offset == p.offset:
            out[-1] = Piece(out[-1].start, p.end, p.offset)
        else:
            out.append(p)
    images = sorted((p.image_start, p.image_end) for p in out)
    for (a0, b0), (a1, b1) in zip(images, images[1:]):
        if a1 < b0:
            raise OverlapError(f"image intervals overlap near {a1}")
    return tuple(out)


class PiecewiseTranslation:
    """A measure-preserving partial injection made of translated intervals.

    ``pieces`` is the canonical form: sorted by source start, adjacent pieces
    with a common offset merged.  Two maps agree almost everywhere iff their
    canonical forms coincide, so ``==`` is equality in the measure algebra.
    A map whose domain is all of ``[0, 1)`` is called a transform.
    """

    __slots__ = ("pieces", "_starts")

    def __init__(self, pieces: Iterable = ()):
        self.pieces = _canonical(pieces)
        self._starts = [p.start for p in self.pieces]

    @classmethod
    def _raw(cls, pieces: tuple[Piece, ...]) -> "PiecewiseTranslation":
        obj = cls.__new__(cls)
        obj.pieces = pieces
        obj._starts = [p.start for p in pieces]
        return obj

    @classmethod
    def identity(cls, on: IntervalSet | None = None) -> "PiecewiseTranslation":
        on = IntervalSet.full() if on is None else on
        return cls._raw(tuple(Piece(a, b, ZERO) for a, b in on))

    @classmethod
    def empty(cls) -> "PiecewiseTranslation":
        return cls._raw(())

    @classmethod
    def translation(cls, start, end, offset) -> "PiecewiseTranslation":
        return cls([(start, end, offset)])

    def __eq__(self, other) -> bool:
        return isinstance(other, PiecewiseTranslation) and self.pieces == other.pieces

    def __hash__(self) -> int:
        return hash(self.pieces)

    def __repr__(self) -> str:
        body = ", ".join(f"[{p.start}, {p.end}){'+' if p.offset >= 0 else '-'}{abs(p.offset)}" for p in self.pieces)
        return f"PiecewiseTranslation({body})"

    def __len__(self) -> int:
        return len(self.pieces)

    def __bool__(self) -> bool:
        return bool(self.pieces)

    def __call__(self, x):
        return apply(self, x)

    def __matmul__(self, other: "PiecewiseTranslation") -> "PiecewiseTranslation":
        return compose(self, other)

    def __invert__(self) -> "PiecewiseTranslation":
        return invert(self)

    def __pow__(self, k: int) -> "PiecewiseTranslation":
        return power(self, k)

    @property
    def domain(self) -> IntervalSet:
        return IntervalSet((p.start, p.end) for p in self.pieces)

    @property
    def range(self) -> IntervalSet:
        return IntervalSet((p.image_start, p.image_end) for p in self.pieces)

    @property
    def is_total(self) -> bool:
        return self.domain == IntervalSet.full()

    def piece_at(self, x: Fraction) -> Piece | None:
        i = bisect_right(self._starts, x) - 1
        if i >= 0 and x < self.pieces[i].end:
            return self.pieces[i]
        return None

    def breakpoints(self) -> set[Fraction]:
        pts: set[Fraction] = set()
        for p in self.pieces:
            pts.update((p.start, p.end, p.image_start, p.image_end))
        return pts

    def to_json(self) -> dict:
        return {
            "pieces": [
                {"src_start": rat_str(p.start), "len": rat_str(p.end - p.start), "dst_start": rat_str(p.image_start)}
                for p in self.pieces
            ]
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1, sort_keys=True)

    @classmethod
    def from_json(cls, data) -> "PiecewiseTranslation":
        if not isinstance(data, dict) or set(data) != {"pieces"} or not isinstance(data["pieces"], list):
            raise SerializationError('expected an object {"pieces": [...]}')
        raw = []
        for k, entry in enumerate(data["pieces"]):
            if not isinstance(entry, dict) or set(entry) != {"src_start", "len", "dst_start"}:
                raise SerializationError(f"piece {k}: expected keys src_start, len, dst_start")
            start = parse_rat_strict(entry["src_start"])
            length = parse_rat_strict(entry["len"])
            dst = parse_rat_strict(entry["dst_start"])
            if length <= 0:
                raise SerializationError(f"piece {k}: length must be positive")
            raw.append(Piece(start, start + length, dst - start))
        try:
            out = cls(raw)
        except ValueError as exc:
            raise SerializationError(f"invalid piecewise translation: {exc}") from exc
        if out.pieces != tuple(raw):
            raise SerializationError("pieces are not in canonical order or contain mergeable neighbours")
        return out

    @classmethod
    def loads(cls, text: str) -> "PiecewiseTranslation":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SerializationError(f"not JSON: {exc}") from exc
        return cls.from_json(data)


Transform = PiecewiseTranslation


def apply(phi: PiecewiseTranslation, x):
    """``phi(x)``, or ``None`` when ``x`` is outside the domain."""
    x = rat(x)
    p = phi.piece_at(x)
    return None if p is None else x + p.offset


def invert(phi: PiecewiseTranslation) -> PiecewiseTranslation:
    return PiecewiseTranslation._raw(
        tuple(sorted(Piece(p.image_start, p.image_end, -p.offset) for p in phi.pieces))
    )


def compose(s: PiecewiseTranslation, t: PiecewiseTranslation) -> PiecewiseTranslation:
    """``s ∘ t``, defined on ``t⁻¹(rng t ∩ dom s)``."""
    by_image = sorted(t.pieces, key=lambda p: p.image_start)
    spieces = s.pieces
    out: list[tuple[Fraction, Fraction, Fraction]] = []
    j = 0
    for p in by_image:
        lo_img, hi_img = p.image_start, p.image_end
        while j < len(spieces) and spieces[j].end <= lo_img:
            j += 1
        k = j
        while k < len(spieces) and spieces[k].start < hi_img:
            q = spieces[k]
            lo = max(lo_img, q.start)
            hi = min(hi_img, q.end)
            if lo < hi:
                out.append((lo - p.offset, hi - p.offset, p.offset + q.offset))
            k += 1
    return PiecewiseTranslation(out)


def power(t: PiecewiseTranslation, k: int) -> PiecewiseTranslation:
    """``t^k`` by repeated squaring; ``t^0`` is the identity on ``dom t``."""
    if k < 0:
        return power(invert(t), -k)
    result = PiecewiseTranslation.identity(t.domain)
    base = t
    while k:
        if k & 1:
            result = compose(base, result)
        k >>= 1
        if k:
            base = compose(base, base)
    return result


def restrict(phi: PiecewiseTranslation, a: IntervalSet) -> PiecewiseTranslation:
    """``phi`` restricted to ``dom phi ∩ a``."""
    return compose(phi, PiecewiseTranslation.identity(a))


def image(phi: PiecewiseTranslation, a: IntervalSet) -> IntervalSet:
    return restrict(phi, a).range


def preimage(phi: PiecewiseTranslation, a: IntervalSet) -> IntervalSet:
    return compose(PiecewiseTranslation.identity(a), phi).domain


def disjoint_union(phi: PiecewiseTranslation, psi: PiecewiseTranslation) -> PiecewiseTranslation:
    if not phi.domain.isdisjoint(psi.domain):
        raise OverlapError("domains intersect")
    if not phi.range.isdisjoint(psi.range):
        raise OverlapError("ranges intersect")
    return PiecewiseTranslation(phi.pieces + psi.pieces)


def union_all(maps: Iterable[PiecewiseTranslation]) -> PiecewiseTranslation:
    out = PiecewiseTranslation.empty()
    for m in maps:
        out = disjoint_union(out, m)
    return out


def support(phi: PiecewiseTranslation) -> IntervalSet:
    moving = [p for p in phi.pieces if p.offset != 0]
    return IntervalSet([(p.start, p.end) for p in moving] + [(p.image_start, p.image_end) for p in moving])


def fix_set(t: PiecewiseTranslation) -> IntervalSet:
    if not t.is_total:
        raise ValueError("fix_set needs a transform defined on all of [0, 1)")
    return support(t).complement()


def disagreement(s: PiecewiseTranslation, t: PiecewiseTranslation) -> IntervalSet:
    """Points of ``dom s ∩ dom t`` where the two maps differ."""
    out = []
    j = 0
    tp = t.pieces
    for p in s.pieces:
        while j < len(tp) and tp[j].end <= p.start:
            j += 1
        k = j
        while k < len(tp) and tp[k].start < p.end:
            q = tp[k]
            if q.offset != p.offset:
                lo, hi = max(p.start, q.start), min(p.end, q.end)
                if lo < hi:
                    out.append((lo, hi))
            k += 1
    return IntervalSet(out)


def uniform_distance(s: PiecewiseTranslation, t: PiecewiseTranslation) -> Fraction:
    """``μ{x : s(x) ≠ t(x)}`` for two transforms."""
    if not (s.is_total and t.is_total):
        raise ValueError("uniform_distance needs transforms defined on all of [0, 1)")
    return disagreement(s, t).measure


def extends(t: PiecewiseTranslation, phi: PiecewiseTranslation) -> bool:
    """Whether ``t`` agrees with ``phi`` on all of ``dom phi``."""
    return phi.domain.issubset(t.domain) and not disagreement(phi, t)


def cost(graphing: Iterable[PiecewiseTranslation]) -> Fraction:
    return sum((phi.domain.measure for phi in graphing), ZERO)


def transport(a: IntervalSet, b: IntervalSet) -> PiecewiseTranslation:
    """Greedy left-to-right translation carrying ``a`` onto ``b``."""
    if a.measure != b.measure:
        raise MeasureMismatch(f"measure {a.measure} cannot be carried onto measure {b.measure}")
    src, dst = list(a), list(b)
    out = []
    i = j = 0
    sa, sb = (src[0][0] if src else None), (dst[0][0] if dst else None)
    while i < len(src) and j < len(dst):
        length = min(src[i][1] - sa, dst[j][1] - sb)
        out.append((sa, sa + length, sb - sa))
        sa += length
        sb += length
        if sa == src[i][1]:
            i += 1
            if i < len(src):
                sa = src[i][0]
        if sb == dst[j][1]:
            j += 1
            if j < len(dst):
                sb = dst[j][0]
    return PiecewiseTranslation(out)


def extend_by_identity(phi: PiecewiseTranslation) -> PiecewiseTranslation:
    """Complete a map with ``dom = rng`` to a transform, fixing the rest."""
    if phi.domain != phi.range:
        raise ValueError("only maps with equal domain and range extend by the identity")
    return PiecewiseTranslation(phi.pieces + PiecewiseTranslation.identity(phi.domain.complement()).pieces)


def commutator_is_identity(s: PiecewiseTranslation, t: PiecewiseTranslation) -> bool:
    return compose(s, t) == compose(t, s)


# --------------------------------------------------------------------------
# Grids


def grid_denominator(phi: PiecewiseTranslation) -> int:
    """Least ``D`` such that every breakpoint and offset lies on ``(1/D)ℤ``."""
    d = 1
    for p in phi.pieces:
        for x in (p.start, p.end, p.offset):
            d = math.lcm(d, x.denominator)
    return d


def atom_permutation(t: PiecewiseTranslation, denominator: int) -> tuple[int, ...]:
    """Permutation of the atoms ``[j/D, (j+1)/D)`` induced by a transform."""
    if not t.is_total:
        raise ValueError("atom permutations exist only for transforms")
    if denominator % grid_denominator(t):
        raise GridMismatch(f"transform is not on the 1/{denominator} grid")
    images = []
    for p in t.pieces:
        a = p.start * denominator
        b = p.end * denominator
        o = p.offset * denominator
        images.extend(int(j + o) for j in range(int(a), int(b)))
    return tuple(images)


def from_atom_permutation(images: Sequence[int]) -> PiecewiseTranslation:
    d = len(images)
    return PiecewiseTranslation((Fraction(j, d), Fraction(j + 1, d), Fraction(images[j] - j, d)) for j in range(d))


def ensure_transform(t: PiecewiseTranslation, what: str = "map") -> PiecewiseTranslation:
    if not t.is_total:
        raise ValueError(f"{what} must be defined on all of [0, 1)")
    return t


__all__ = [
    "Rat",
    "rat",
    "rat_str",
    "IntervalSet",
    "Piece",
    "PiecewiseTranslation",
    "Transform",
    "measure",
    "apply",
    "invert",
    "compose",
    "power",
    "restrict",
    "image",
    "preimage",
    "disjoint_union",
    "union_all",
    "support",
    "fix_set",
    "disagreement",
    "uniform_distance",
    "extends",
    "cost",
    "transport",
    "extend_by_identity",
    "grid_denominator",
    "atom_permutation",
    "from_atom_permutation",
]
