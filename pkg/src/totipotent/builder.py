"""Assembly of a totipotent action of ``F_r`` at a fixed finite resolution.

Layout of ``[0, 1)``:

* ``Y = [0, μY)`` carries a rescaled level-``L`` odometer ``T``, the
  evanescent partner ``V`` (near both ends of ``Y``), the pre-cycles
  ``φ_i`` (in the middle of ``Y``) and the swap region ``A``;
* ``C = [μY, 1)`` is cut into pieces ``C_1, …, C_N``; piece ``C_n`` is split
  into equal blocks, one per vertex of the completed ball ``(ρ_n, ξ_n)``,
  and ``α_∞`` moves blocks along the edges of ``ρ_n``.

The generators are ``α(a1) = T α_∞(a1)``, ``α(a2) = V U_2 (I α_∞(a2))`` and
``α(a_i) = U_i α_∞(a_i)`` for ``i ≥ 3``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import islice

from .errors import ConfigError, Infeasible
from .exactmaps import (
    IntervalSet,
    PiecewiseTranslation,
    Transform,
    commutator_is_identity,
    compose,
    disjoint_union,
    extends,
    image,
    invert,
    power,
    rat,
    rat_str,
    restrict,
    support,
    transport,
    union_all,
)
from .odometer import build_evanescent_V, evanescent_certificate, lemma_conjugates_certificate, odometer_at_level
from .precycles import closing_cycle, period, precycle_from_blocks
from .schreier import (
    Ball,
    MarkedAction,
    PartialAction,
    canonical_order,
    contains_labeled_copy,
    enumerate_partial_actions,
    extend_marked,
)

IDENTITY = PiecewiseTranslation.identity()


# --------------------------------------------------------------------------
# Parameters


_KEYS = {
    "r": "r",
    "muY": "mu_y",
    "level": "level",
    "ballCount": "ball_count",
    "maxBallVerts": "max_ball_verts",
    "precycleLength": "precycle_length",
    "precycleC": "precycle_c",
    "evanescentM": "evanescent_m",
    "evanescentN": "evanescent_n",
}


@dataclass(frozen=True)
class BuildParams:
    r: int = 2
    mu_y: Fraction = Fraction(3, 5)
    level: int = 10
    ball_count: int = 8
    max_ball_verts: int = 6
    precycle_length: int = 4
    precycle_c: Fraction = Fraction(1, 10)
    evanescent_m: int = 2
    evanescent_n: int = 3

    def __post_init__(self):
        object.__setattr__(self, "mu_y", rat(self.mu_y))
        object.__setattr__(self, "precycle_c", rat(self.precycle_c))
        self.validate()

    @property
    def p(self) -> int:
        return self.precycle_length - 2

    def validate(self) -> None:
        if self.r < 2:
            raise ConfigError(f"r >= 2 violated: r = {self.r}")
        if not Fraction(1, 2) < self.mu_y < 1:
            raise ConfigError(f"1/2<μ(Y)<1 violated: muY = {rat_str(self.mu_y)}")
        if self.level < 1:
            raise ConfigError(f"level >= 1 violated: level = {self.level}")
        if self.ball_count < 1:
            raise ConfigError(f"ballCount >= 1 violated: ballCount = {self.ball_count}")
        if self.max_ball_verts < 1:
            raise ConfigError(f"maxBallVerts >= 1 violated: maxBallVerts = {self.max_ball_verts}")
        if self.precycle_length < 3:
            raise ConfigError(f"precycleLength >= 3 violated: precycleLength = {self.precycle_length}")
        if self.precycle_c <= 0:
            raise ConfigError(f"precycleC > 0 violated: precycleC = {rat_str(self.precycle_c)}")
        if self.precycle_c * self.precycle_length / self.p >= self.mu_y:
            raise ConfigError(
                f"c(p+2)/p<μ(Y) violated: {rat_str(self.precycle_c * self.precycle_length / self.p)} >= {rat_str(self.mu_y)}"
            )
        if self.evanescent_m < 1 or self.evanescent_n < 1:
            raise ConfigError("evanescentM >= 1 and evanescentN >= 1 required")

    @classmethod
    def from_text(cls, text: str) -> "BuildParams":
        """Parse ``key = value`` lines; ``#`` starts a comment."""
        values: dict = {}
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"line {lineno}: expected key = value")
            key, value = (s.strip() for s in line.split("=", 1))
            if key not in _KEYS:
                raise ConfigError(f"line {lineno}: unknown key {key!r}")
            if _KEYS[key] in values:
                raise ConfigError(f"line {lineno}: duplicate key {key!r}")
            try:
                number = rat(value)
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"line {lineno}: {key} must be an integer or p/q, got {value!r}") from exc
            if key not in ("muY", "precycleC"):
                if number.denominator != 1:
                    raise ConfigError(f"line {lineno}: {key} must be an integer")
                number = int(number)
            values[_KEYS[key]] = number
        return cls(**values)

    def to_text(self) -> str:
        lines = []
        for key, attr in _KEYS.items():
            v = getattr(self, attr)
            lines.append(f"{key} = {rat_str(v) if isinstance(v, Fraction) else v}")
        return "\n".join(lines) + "\n"

    def to_json(self) -> dict:
        return {key: (rat_str(getattr(self, attr)) if isinstance(getattr(self, attr), Fraction) else getattr(self, attr)) for key, attr in _KEYS.items()}


# --------------------------------------------------------------------------
# Result


@dataclass
class BuildResult:
    params: BuildParams
    alpha: list
    alpha_inf: list
    Y: IntervalSet
    C: IntervalSet
    Cn: list
    blocks: list  # blocks[n][v]: interval of vertex v of the n-th completed ball
    Bn: list
    A: IntervalSet
    B: IntervalSet
    D: IntervalSet
    T: Transform
    V: Transform
    W: Transform
    I: Transform
    psi: PiecewiseTranslation
    phi: list  # PreCycle for a2, …, ar
    U: list  # closing cycles for a2, …, ar
    balls: list  # (PartialAction, MarkedAction)
    eta: Fraction
    m0: int
    v_level: int
    v_root: Transform  # V before rescaling into Y
    log: list = field(default_factory=list)

    @property
    def y_measure(self) -> Fraction:
        return self.Y.measure


def rescale(t: PiecewiseTranslation, factor: Fraction) -> PiecewiseTranslation:
    """Conjugate of ``t`` by ``x ↦ factor·x``; lives on ``[0, factor)``."""
    return PiecewiseTranslation((p.start * factor, p.end * factor, p.offset * factor) for p in t.pieces)


def choose_Y(params: BuildParams) -> IntervalSet:
    return IntervalSet.interval(0, params.mu_y)


def make_T_on_Y(params: BuildParams) -> Transform:
    on_y = rescale(odometer_at_level(params.level), params.mu_y)
    return disjoint_union(on_y, PiecewiseTranslation.identity(on_y.domain.complement()))


def atom_width(params: BuildParams) -> Fraction:
    return params.mu_y / 2**params.level


def _v_epsilon(params: BuildParams, eta: Fraction) -> Fraction:
    # V occupies two rescaled level-p' cylinders, μ(supp V) = μY·2^{1-p'} < η/2
    return eta / (2 * params.mu_y)


def make_V(params: BuildParams, eta: Fraction, log: list):
    """Evanescent partner of ``T`` rescaled into ``Y``; fails if it is off ``T``'s grid."""
    m, n = params.evanescent_m, params.evanescent_n
    approx = build_evanescent_V(IDENTITY, m, n, _v_epsilon(params, eta))
    root = approx.transform
    v = disjoint_union(rescale(root, params.mu_y), PiecewiseTranslation.identity(IntervalSet.interval(params.mu_y, 1)))
    width = atom_width(params)
    needed = params.level
    for piece in v.pieces:
        q = piece.offset / width
        if q.denominator != 1:
            needed = max(needed, params.level + (q.denominator.bit_length() - 1 if q.denominator & (q.denominator - 1) == 0 else 10**6))
    if needed != params.level:
        if needed >= 10**6:
            raise Infeasible(f"V with m = {m} is not dyadic and cannot lie in the orbit relation of T")
        raise Infeasible(
            f"V needs odometer level {needed} but level = {params.level}: deficit of {needed - params.level} level(s)"
        )
    log.append(
        f"V: root of order {m} of U_{approx.level} rescaled into Y; supp V has measure {rat_str(support(v).measure)} < eta/2 = {rat_str(eta / 2)}"
    )
    return v, root, approx.level


def make_precycles(params: BuildParams, v_level: int, log: list):
    """Pre-cycles ``φ_2 … φ_r`` of length ``p+2`` sharing the first step ``ψ``.

    They live in the middle of ``Y``, away from the zone reserved for ``V``.
    ``ψ`` translates ``B`` by a whole number of odometer atoms, so it lies in
    the orbit relation of ``T``.
    """
    mu, p, c = params.mu_y, params.p, params.precycle_c
    edge = mu / 2 ** (v_level - 1)
    middle = IntervalSet.interval(edge, mu - edge)
    share = c / p
    width = atom_width(params)
    jump = math.ceil(share / width)
    need = jump * width + share + c + (params.r - 2) * share
    if middle.measure < need:
        raise Infeasible(
            f"pre-cycles need {rat_str(need)} inside Y but only {rat_str(middle.measure)} is free: deficit {rat_str(need - middle.measure)}"
        )
    basis = IntervalSet.interval(edge, edge + share)
    second = basis.shift(jump * width)
    free = middle - IntervalSet.interval(edge, edge + jump * width + share)
    psi = transport(basis, second)
    phis, closing = [], []
    for i in range(2, params.r + 1):
        _, rest = free.carve((i - 2) * share)
        tail = []
        for _ in range(p):
            blk, rest = rest.carve(share)
            tail.append(blk)
        pc = precycle_from_blocks([basis, second] + tail)
        phis.append(pc)
        closing.append(closing_cycle(pc))
    eta = mu - support(closing[0]).measure
    log.append(f"psi: translation by {jump} odometer atoms of width {rat_str(width)}; basis {basis.to_json()}")
    log.append(f"pre-cycles: {params.r - 1} of length {params.precycle_length}, basis measure {rat_str(share)}")
    return psi, phis, closing, eta


def least_m0(params: BuildParams, eta: Fraction) -> int:
    """Least integer ``m0`` with ``(1 - μY)/m0 < η/2``."""
    return math.floor(2 * (1 - params.mu_y) / eta) + 1


def choose_balls(params: BuildParams, m0: int) -> list:
    low = max(1, m0)
    if low > params.max_ball_verts:
        raise Infeasible(f"balls need at least {m0} vertices but maxBallVerts = {params.max_ball_verts}")
    found = list(islice(enumerate_partial_actions(params.r, low, params.max_ball_verts), params.ball_count))
    if len(found) < params.ball_count:
        raise Infeasible(f"only {len(found)} balls with {low}..{params.max_ball_verts} vertices, {params.ball_count} requested")
    return [(g, extend_marked(g)) for g in found]


def _vertex_order(g: PartialAction) -> list[int]:
    return canonical_order(g) + [g.size, g.size + 1]


def assemble_finite_actions(params: BuildParams, balls: list):
    """Pieces ``C_n``, their vertex blocks and the block-moving transforms ``α_∞(a_i)``."""
    mu, n_balls = params.mu_y, len(balls)
    rest = IntervalSet.interval(mu, 1)
    cn = []
    for k in range(n_balls):
        amount = (1 - mu) / 2 ** (k + 1) if k < n_balls - 1 else rest.measure
        piece, rest = rest.carve(amount)
        cn.append(piece)
    blocks = []
    for piece, (g, completed) in zip(cn, balls):
        (a, b), = piece.intervals
        size = completed.size
        width = (b - a) / size
        by_vertex = [None] * size
        for slot, v in enumerate(_vertex_order(g)):
            by_vertex[v] = IntervalSet.interval(a + slot * width, a + (slot + 1) * width)
        blocks.append(by_vertex)
    alpha_inf = []
    for i in range(params.r):
        parts = [PiecewiseTranslation.identity(IntervalSet.interval(0, mu))]
        for by_vertex, (_, completed) in zip(blocks, balls):
            rho = completed.maps[i]
            for v, blk in enumerate(by_vertex):
                parts.append(transport(blk, by_vertex[rho[v]]))
        alpha_inf.append(union_all(parts))
    return cn, blocks, alpha_inf


def choose_V_W_I(params: BuildParams, U2: Transform, V: Transform, blocks: list, balls: list):
    y = IntervalSet.interval(0, params.mu_y)
    bn = [by_vertex[completed.marked] for by_vertex, (_, completed) in zip(blocks, balls)]
    b = union_all(PiecewiseTranslation.identity(x) for x in bn).domain
    d = support(U2) | support(V)
    free = y - d
    if free.measure < b.measure:
        raise Infeasible(f"A needs {rat_str(b.measure)} outside supp U_2 ∪ supp V, only {rat_str(free.measure)} left")
    a, _ = free.carve(b.measure)
    i = disjoint_union(disjoint_union(transport(a, b), transport(b, a)), PiecewiseTranslation.identity((a | b).complement()))
    return IDENTITY, i, a, b, d, bn


def build(params: BuildParams) -> BuildResult:
    log = [f"params: {params.to_json()}"]
    y = choose_Y(params)
    c = y.complement()
    log.append(f"Y = {y.to_json()}, C = {c.to_json()}")
    t = make_T_on_Y(params)
    log.append(f"T: level-{params.level} odometer rescaled to Y, period {2**params.level}")
    # eta depends only on the measure of supp U_2, so the V zone can be fixed first
    eta = params.mu_y - params.precycle_c * params.precycle_length / params.p
    m0 = least_m0(params, eta)
    log.append(f"eta = {rat_str(eta)}, m0 = {m0}")
    v, root, v_level = make_V(params, eta, log)
    psi, phis, closing, eta_check = make_precycles(params, v_level, log)
    if eta_check != eta:
        raise AssertionError("eta bookkeeping mismatch")
    balls = choose_balls(params, m0)
    log.append(f"balls: {len(balls)} with sizes {[g.size for g, _ in balls]}")
    cn, blocks, alpha_inf = assemble_finite_actions(params, balls)
    log.append("C_n measures: " + ", ".join(rat_str(x.measure) for x in cn))
    w, i_map, a, b, d, bn = choose_V_W_I(params, closing[0], v, blocks, balls)
    log.append(f"A = {a.to_json()}, mu(B) = {rat_str(b.measure)}, mu(Y minus D) = {rat_str((y - d).measure)}")
    alpha = assemble_alpha(params, t, v, w, i_map, closing, alpha_inf)
    result = BuildResult(
        params=params, alpha=alpha, alpha_inf=alpha_inf, Y=y, C=c, Cn=cn, blocks=blocks, Bn=bn, A=a, B=b, D=d,
        T=t, V=v, W=w, I=i_map, psi=psi, phi=phis, U=closing, balls=balls, eta=eta, m0=m0,
        v_level=v_level, v_root=root, log=log,
    )
    report = verify_assembly(result)
    if not report.passed:
        raise AssertionError(f"build invariants failed: {report.failures()}")
    return result


def assemble_alpha(params, t, v, w, i_map, closing, alpha_inf) -> list:
    u2 = compose(w, compose(closing[0], invert(w)))
    alpha = [compose(t, alpha_inf[0]), compose(v, compose(u2, compose(i_map, alpha_inf[1])))]
    for k in range(2, params.r):
        alpha.append(compose(closing[k - 1], alpha_inf[k]))
    return alpha


# --------------------------------------------------------------------------
# Verification


@dataclass
class Clause:
    name: str
    passed: bool
    detail: str = ""

    def to_json(self) -> dict:
        return {"name": self.name, "passed": self.passed, "detail": self.detail}


@dataclass
class Report:
    title: str
    clauses: list = field(default_factory=list)

    def add(self, name: str, passed: bool, detail: str = "") -> bool:
        self.clauses.append(Clause(name, bool(passed), detail))
        return bool(passed)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.clauses)

    def failures(self) -> list[str]:
        return [c.name for c in self.clauses if not c.passed]

    def to_json(self) -> dict:
        return {"title": self.title, "passed": self.passed, "clauses": [c.to_json() for c in self.clauses]}


def verify_assembly(res: BuildResult) -> Report:
    """Recompute every generator from the stored factors and check the layout."""
    rep = Report("assembly")
    expected = assemble_alpha(res.params, res.T, res.V, res.W, res.I, res.U, res.alpha_inf)
    for k, (got, want) in enumerate(zip(res.alpha, expected)):
        rep.add(f"alpha[a{k + 1}] matches its factors", got == want)
        rep.add(f"alpha[a{k + 1}] is a transform", got.is_total and got.range == IntervalSet.full())
    rep.add("alpha has r generators", len(res.alpha) == res.params.r)
    rep.add("Y measure equals muY", res.Y.measure == res.params.mu_y, rat_str(res.Y.measure))
    rep.add("supp T = Y", support(res.T) == res.Y)
    rep.add("alpha[a1] restricted to Y equals T", restrict(res.alpha[0], res.Y) == restrict(res.T, res.Y))
    for k, (pc, u) in enumerate(zip(res.phi, res.U), start=2):
        rep.add(f"phi_{k} inside Y", support(pc.map).issubset(res.Y))
        rep.add(f"phi_{k} extends psi", extends(pc.map, res.psi))
        rep.add(f"supp U_{k} = supp phi_{k}", support(u) == support(pc.map))
        rep.add(f"alpha[a{k}] extends phi_{k}", extends(res.alpha[k - 1], pc.map))
    rep.add("eta = mu(Y minus supp U_2) > 0", res.eta == (res.Y - support(res.U[0])).measure and res.eta > 0)
    rep.add("(1-muY)/m0 < eta/2", (1 - res.params.mu_y) / res.m0 < res.eta / 2)
    rep.add("mu(supp V) < eta/2", support(res.V).measure < res.eta / 2)
    rep.add("supp V disjoint from supp U_2", support(res.V).isdisjoint(support(res.U[0])))
    rep.add("mu(B) <= mu(C)/m0", res.B.measure <= res.C.measure / res.m0)
    rep.add("A inside Y minus D", res.A.issubset(res.Y - res.D) and res.A.measure == res.B.measure)
    rep.add("I is an involution exchanging A and B", power(res.I, 2) == IDENTITY and image(res.I, res.A) == res.B)
    rep.add("alpha[a2](A) = B", image(res.alpha[1], res.A) == res.B)
    for n, (by_vertex, (_, completed)) in enumerate(zip(res.blocks, res.balls), start=1):
        sizes = {blk.measure for blk in by_vertex}
        rep.add(f"C_{n}: equal blocks tile C_{n}", len(sizes) == 1 and sizes.pop() * completed.size == res.Cn[n - 1].measure)
    return rep


def _factors_a2(res: BuildResult):
    u2 = compose(res.W, compose(res.U[0], invert(res.W)))
    return res.V, u2, compose(res.I, res.alpha_inf[1])


def step4_exponent(res: BuildResult, n0: int | None = None) -> int:
    """Common multiple of the periods of ``U_2``, ``I`` and ``α_n(a2)`` for ``n ≤ n0``."""
    n0 = len(res.balls) if n0 is None else n0
    parts = [res.U[0], res.I]
    for piece in res.Cn[:n0]:
        local = restrict(res.alpha_inf[1], piece)
        parts.append(disjoint_union(local, PiecewiseTranslation.identity(piece.complement())))
    k = 1
    for t in parts:
        rep = period(t, 1 << 16)
        if rep.period is None:
            raise ValueError("factor of alpha(a2) is not periodic")
        k = math.lcm(k, rep.period)
    return k


def ball_words(completed: MarkedAction) -> dict[int, tuple]:
    """Shortest words ``γ`` (least first) with ``ρ(γ)ξ = g`` for every vertex ``g``."""
    nb = completed.action.neighbors()
    words = {completed.marked: ()}
    order = [completed.marked]
    for v in order:
        for lab, w in enumerate(nb[v]):
            if w is not None and w not in words:
                letter = lab // 2 + 1
                words[w] = ((-letter if lab % 2 else letter),) + words[v]
                order.append(w)
    return words


def apply_word(alpha: list, alpha_inv: list, word, s: IntervalSet) -> IntervalSet:
    for x in reversed(word):
        s = image(alpha[x - 1] if x > 0 else alpha_inv[-x - 1], s)
    return s


def verify_step4(res: BuildResult, k: int | None = None, n0: int | None = None) -> Report:
    rep = Report("step4")
    n0 = len(res.balls) if n0 is None else n0
    v, u2, third = _factors_a2(res)
    supports = [support(v), support(u2), support(third)]
    disjoint = all(supports[i].isdisjoint(supports[j]) for i in range(3) for j in range(i + 1, 3))
    commute = all(commutator_is_identity(x, y) for x, y in ((v, u2), (v, third), (u2, third)))
    rep.add("i: factors of alpha(a2) have disjoint supports and commute", disjoint and commute)
    if k is None:
        k = step4_exponent(res, n0)
    lhs = power(res.alpha[1], k)
    rep.add("ii: alpha(a2)^k = V^k alpha_inf(a2)^k", lhs == compose(power(v, k), power(res.alpha_inf[1], k)), f"k = {k}")
    early = union_all(PiecewiseTranslation.identity(x) for x in res.Cn[:n0]).domain
    rep.add("iii: alpha(a2)^k is the identity on C_1..C_n0", restrict(lhs, early) == PiecewiseTranslation.identity(early), f"n0 = {n0}")
    alpha_inv = [invert(a) for a in res.alpha]
    covered = res.Y
    ok = res.B.issubset(image(res.alpha[1], res.Y))
    detail = []
    for n, (by_vertex, (_, completed)) in enumerate(zip(res.blocks, res.balls), start=1):
        base = by_vertex[completed.marked]
        for g, word in sorted(ball_words(completed).items()):
            if apply_word(res.alpha, alpha_inv, word, base) != by_vertex[g]:
                ok = False
                detail.append(f"C_{n} vertex {g}")
            covered = covered | by_vertex[g]
    ok = ok and covered.measure == 1
    rep.add("iv: orbit cover reaches every block and has measure 1", ok, "; ".join(detail) or f"measure {rat_str(covered.measure)}")
    return rep


def block_graph(res: BuildResult, n: int) -> PartialAction:
    """Schreier graph of ``α`` on the blocks of ``C_n`` (edges leaving ``C_n`` are dropped)."""
    by_vertex = res.blocks[n]
    index = {blk: v for v, blk in enumerate(by_vertex)}
    maps = []
    for t in res.alpha:
        maps.append(tuple(index.get(image(t, blk)) for blk in by_vertex))
    return PartialAction(len(by_vertex), tuple(maps))


def verify_totipotency(res: BuildResult, radius: int = 3) -> Report:
    rep = Report("totipotency")
    for n, (g, completed) in enumerate(res.balls):
        host = block_graph(res, n)
        emb = contains_labeled_copy(host, g, anchor=(0, 0))
        rep.add(f"ball {n + 1}: anchored labelled copy", emb == {v: v for v in range(g.size)})
        by_vertex = res.blocks[n]
        mids = [(blk.intervals[0][0] + blk.intervals[0][1]) / 2 for blk in by_vertex]
        good = True
        nb = g.neighbors()
        for start in range(g.size):
            dist = {start: 0}
            order = [start]
            for u in order:
                if dist[u] == radius:
                    continue
                for lab, w in enumerate(nb[u]):
                    if w is None:
                        continue
                    t = res.alpha[lab // 2]
                    if lab % 2 == 0 and t(mids[u]) != mids[w]:
                        good = False
                    if lab % 2 == 1 and t(mids[w]) != mids[u]:
                        good = False
                    if w not in dist:
                        dist[w] = dist[u] + 1
                        order.append(w)
        rep.add(f"ball {n + 1}: orbit balls of block midpoints match", good, f"radius {radius}")
    return rep


def verify_certificates(res: BuildResult) -> Report:
    rep = Report("certificates")
    m, n = res.params.evanescent_m, res.params.evanescent_n
    for level in range(2, max(2, min(n, 4)) + 1):
        cert = lemma_conjugates_certificate(level)
        rep.add(f"odometer conjugates of U_{level} generate Sym(2^{level})", cert.verdict, cert.method)
    cert = evanescent_certificate(res.v_root, m, n)
    rep.add(f"V is in E_({m},{n}) at level {res.v_level}", cert.verdict, cert.method)
    rescaled = disjoint_union(rescale(res.v_root, res.params.mu_y), PiecewiseTranslation.identity(res.C))
    rep.add("V is the rescaled certified root", rescaled == res.V)
    return rep


def verify_all(res: BuildResult, radius: int = 3) -> list[Report]:
    return [verify_assembly(res), verify_step4(res), verify_totipotency(res, radius), verify_certificates(res)]


# --------------------------------------------------------------------------
# Stabilizer samples


@dataclass
class StabilizerSample:
    point: Fraction
    radius: int
    orbit_ball: Ball
    points: list
    stab_words: list
    rank: int
    a1_period: int | None

    def to_json(self) -> dict:
        from .subgroups import format_word

        return {
            "point": rat_str(self.point),
            "radius": self.radius,
            "orbit_ball": self.orbit_ball.action.to_json(),
            "orbit_points": [rat_str(x) for x in self.points],
            "stabilizing_words": [format_word(w) for w in self.stab_words],
            "a1_period": self.a1_period,
        }


def irs_sample(res: BuildResult, x, radius: int, word_len: int, period_bound: int | None = None) -> StabilizerSample:
    """Orbit ball of ``x`` and every reduced word of length ``≤ word_len`` fixing it."""
    x = rat(x)
    if not 0 <= x < 1:
        raise ValueError("x must lie in [0, 1)")
    gens = res.alpha
    inv = [invert(a) for a in gens]
    moves = [t for a, b in zip(gens, inv) for t in (a, b)]
    index = {x: 0}
    points = [x]
    dist = [0]
    k = 0
    while k < len(points):
        y = points[k]
        if dist[k] < radius:
            for t in moves:
                z = t(y)
                if z not in index:
                    index[z] = len(points)
                    points.append(z)
                    dist.append(dist[k] + 1)
        k += 1
    maps = []
    for t in gens:
        row = []
        for y in points:
            z = t(y)
            row.append(index.get(z))
        maps.append(tuple(row))
    ball = Ball(PartialAction(len(points), tuple(maps)), tuple(range(len(points))))
    words: list[tuple] = []
    letters = [s for i in range(1, len(gens) + 1) for s in (i, -i)]

    def grow(y, word):
        # prepend letters: the new word acts last
        if word and y == x:
            words.append(word)
        if len(word) == word_len:
            return
        for s in letters:
            if word and s == -word[0]:
                continue
            grow(moves[2 * (abs(s) - 1) + (s < 0)](y), (s,) + word)

    grow(x, ())
    words.sort(key=lambda w: (len(w), [(abs(s), s < 0) for s in w]))
    bound = period_bound if period_bound is not None else 1 << (res.params.level + 4)
    per = None
    y = gens[0](x)
    for j in range(1, bound + 1):
        if y == x:
            per = j
            break
        y = gens[0](y)
    return StabilizerSample(x, radius, ball, points, words, len(gens), per)
