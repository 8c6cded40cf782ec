"""Construction and verification of congruent right Folner ladders.

A ladder is a finite prefix (F_0, ..., F_N) of a right Folner sequence
together with glue sets J_n such that {c * F_n : c in J_n} partitions
F_{n+1}.  All verification is exact; defects are Fractions.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from ._intlin import ZModule
from .errors import (
    InvarianceUnreachableError,
    NotCosetRepsError,
    UnsupportedGroupError,
)
from .groups import (
    Cyclic,
    DirectProduct,
    FiniteSubset,
    GroupContext,
    Heisenberg,
    Lattice,
    Pruefer,
    Rationals,
    context_from_descriptor,
    product_set,
)

__all__ = [
    "FolnerLadder",
    "CongruenceReport",
    "InvarianceReport",
    "right_invariance_defect",
    "folner_defect",
    "invariance_table",
    "check_congruent",
    "iterated_glue",
    "first_level_containing",
    "build_lattice_ladder",
    "build_pruefer_ladder",
    "build_abelian_chain_ladder",
    "compose_exact_sequence",
    "build_heisenberg_ladder",
    "extend_virtually",
    "map_ladder",
    "group_ladder",
]


@dataclass(frozen=True)
class FolnerLadder:
    """A finite congruent-ladder prefix: levels F_n and glue sets J_n."""

    ctx: GroupContext
    levels: tuple[FiniteSubset, ...]
    glue: tuple[FiniteSubset, ...]
    info: dict | None = field(default=None, compare=False)

    def __init__(self, ctx, levels, glue, info=None):
        levels = tuple(levels)
        glue = tuple(glue)
        if not levels:
            raise ValueError("a ladder needs at least one level")
        if len(glue) != len(levels) - 1:
            raise ValueError(f"{len(levels)} levels need {len(levels) - 1} glue sets, got {len(glue)}")
        for s in itertools.chain(levels, glue):
            if s.ctx != ctx:
                raise ValueError("ladder parts built over a different group context")
        object.__setattr__(self, "ctx", ctx)
        object.__setattr__(self, "levels", levels)
        object.__setattr__(self, "glue", glue)
        object.__setattr__(self, "info", info)
        object.__setattr__(self, "_digit_maps", {})

    @property
    def depth(self) -> int:
        return len(self.levels) - 1

    def ratio(self, n: int) -> int:
        """Index ratio |F_{n+1}| / |F_n| (exact; raises if non-integral)."""
        size_next, size = len(self.levels[n + 1]), len(self.levels[n])
        if size_next % size:
            raise ValueError(f"|F_{n + 1}| = {size_next} is not a multiple of |F_{n}| = {size}")
        return size_next // size

    def digit_map(self, n: int) -> dict:
        """Map each v in F_{n+1} to the glue digit c in J_n with v in c * F_n."""
        cached = self._digit_maps.get(n)
        if cached is None:
            mul = self.ctx.mul
            cached = {}
            for c in self.glue[n]:
                for f in self.levels[n]:
                    cached[mul(c, f)] = c
            self._digit_maps[n] = cached
        return cached

    def to_json(self) -> dict:
        data = {
            "group": self.ctx.descriptor(),
            "levels": [lv.encode_json() for lv in self.levels],
            "glue": [j.encode_json() for j in self.glue],
        }
        if self.info is not None:
            data["info"] = self.info
        return data

    @staticmethod
    def from_json(data: dict) -> "FolnerLadder":
        ctx = context_from_descriptor(data["group"])
        levels = [FiniteSubset(ctx, (ctx.decode_json(e) for e in lv)) for lv in data["levels"]]
        glue = [FiniteSubset(ctx, (ctx.decode_json(e) for e in j)) for j in data["glue"]]
        return FolnerLadder(ctx, levels, glue, data.get("info"))


@dataclass(frozen=True)
class CongruenceReport:
    """Outcome of check_congruent with the first violation, if any."""

    ok: bool
    level: int | None = None
    reason: str | None = None
    witness: tuple | None = None

    def to_json(self) -> dict:
        return {"ok": self.ok, "level": self.level, "reason": self.reason,
                "witness": None if self.witness is None else [repr(w) for w in self.witness]}


@dataclass(frozen=True)
class InvarianceReport:
    level: int
    window: FiniteSubset
    defect: Fraction

    def to_json(self) -> dict:
        return {"level": self.level, "window": self.window.encode_json(), "defect": str(self.defect)}


def right_invariance_defect(F: FiniteSubset, K: FiniteSubset) -> Fraction:
    """1 - |{g in F : gK subset of F}| / |F|, computed exactly."""
    if len(F) == 0:
        raise ValueError("invariance defect of the empty window is undefined")
    if F.ctx != K.ctx:
        raise ValueError("window and test set live in different groups")
    mul, inv = F.ctx.mul, F.ctx.inv
    good = set(F.as_set)
    for k in K:
        k_inv = inv(k)
        good &= {mul(f, k_inv) for f in F.elements}
        if not good:
            break
    return 1 - Fraction(len(good), len(F))


def folner_defect(F: FiniteSubset, g) -> Fraction:
    """|Fg \\ F| / |F| for a single group element g."""
    if len(F) == 0:
        raise ValueError("Folner defect of the empty window is undefined")
    F.ctx.validate(g)
    mul = F.ctx.mul
    moved = {mul(f, g) for f in F.elements}
    return Fraction(len(moved - F.as_set), len(F))


def invariance_table(ladder: FolnerLadder, K: FiniteSubset) -> list[InvarianceReport]:
    """Per-level right (K, .)-invariance defects."""
    return [InvarianceReport(n, K, right_invariance_defect(F, K)) for n, F in enumerate(ladder.levels)]


def check_congruent(ladder: FolnerLadder) -> CongruenceReport:
    """Verify the congruent-ladder axioms exactly, reporting the first failure."""
    ident = ladder.ctx.identity()
    mul = ladder.ctx.mul
    if ident not in ladder.levels[0]:
        return CongruenceReport(False, 0, "identity-missing-in-F0", (ident,))
    for n, J in enumerate(ladder.glue):
        if ident not in J:
            return CongruenceReport(False, n, "identity-missing-in-glue", (ident,))
        target = ladder.levels[n + 1].as_set
        seen: dict = {}
        for c in J:
            for f in ladder.levels[n]:
                x = mul(c, f)
                if x not in target:
                    return CongruenceReport(False, n, "translate-escapes-next-level", (c, f, x))
                prev = seen.get(x)
                if prev is not None:
                    return CongruenceReport(False, n, "translates-overlap", (prev, c, x))
                seen[x] = c
        if len(seen) != len(target):
            missing = min(target - seen.keys())
            return CongruenceReport(False, n, "next-level-not-covered", (missing,))
    return CongruenceReport(True)


def iterated_glue(ladder: FolnerLadder, n: int, m: int) -> FiniteSubset:
    """All products c_{m-1} * ... * c_n of glue digits; tiles F_m by F_n-translates."""
    if not 0 <= n <= m <= ladder.depth:
        raise ValueError(f"need 0 <= n <= m <= {ladder.depth}, got n={n}, m={m}")
    mul = ladder.ctx.mul
    acc = [ladder.ctx.identity()]
    for i in range(m - 1, n - 1, -1):
        acc = [mul(a, c) for a in acc for c in ladder.glue[i]]
    out = FiniteSubset(ladder.ctx, set(acc))
    if len(out) != len(acc):
        raise NotCosetRepsError(f"glue products between levels {n} and {m} collide")
    return out


def first_level_containing(ladder: FolnerLadder, g) -> int | None:
    """Smallest n with g in F_n, or None within the built prefix."""
    ladder.ctx.validate(g)
    for n, F in enumerate(ladder.levels):
        if g in F:
            return n
    return None


# ---------------------------------------------------------------------------
# builders


def build_lattice_ladder(d: int, depth: int, base: int = 3) -> FolnerLadder:
    """Centered base**n boxes in Z^d with digit glue {k * base**n}^d."""
    if d < 1:
        raise ValueError("lattice rank must be >= 1")
    if depth < 0:
        raise ValueError("depth must be >= 0")
    if base < 3 or base % 2 == 0:
        raise ValueError("box base must be an odd integer >= 3")
    ctx = Lattice(d)
    half_digits = (base - 1) // 2
    levels = []
    glue = []
    for n in range(depth + 1):
        h = (base**n - 1) // 2
        levels.append(FiniteSubset(ctx, itertools.product(range(-h, h + 1), repeat=d)))
        if n < depth:
            steps = [k * base**n for k in range(-half_digits, half_digits + 1)]
            glue.append(FiniteSubset(ctx, itertools.product(steps, repeat=d)))
    return FolnerLadder(ctx, levels, glue)


def build_pruefer_ladder(p: int, depth: int) -> FolnerLadder:
    """Subgroup windows {m / p**n} of the Pruefer p-group."""
    if depth < 0:
        raise ValueError("depth must be >= 0")
    ctx = Pruefer(p)
    levels = [FiniteSubset(ctx, (Fraction(m, p**n) for m in range(p**n))) for n in range(depth + 1)]
    glue = [FiniteSubset(ctx, (Fraction(j, p ** (n + 1)) for j in range(p))) for n in range(depth)]
    return FolnerLadder(ctx, levels, glue)


def _flatten_slots(ctx: GroupContext) -> int:
    if isinstance(ctx, (Cyclic, Pruefer, Rationals)):
        return 1
    if isinstance(ctx, Lattice):
        return ctx.d
    if isinstance(ctx, DirectProduct):
        return sum(_flatten_slots(f) for f in ctx.factors)
    raise UnsupportedGroupError(f"no abelian coordinates for group kind {ctx.kind!r}")


def _flatten(ctx: GroupContext, g) -> list[Fraction]:
    if isinstance(ctx, (Cyclic, Pruefer, Rationals)):
        return [Fraction(g)]
    if isinstance(ctx, Lattice):
        return [Fraction(x) for x in g]
    if isinstance(ctx, DirectProduct):
        out: list[Fraction] = []
        for f, part in zip(ctx.factors, g):
            out.extend(_flatten(f, part))
        return out
    raise UnsupportedGroupError(f"no abelian coordinates for group kind {ctx.kind!r}")


def _relation_vectors(ctx: GroupContext) -> list[list[Fraction]]:
    """Vectors spanning the coordinate ambiguity (cyclic orders, Pruefer mod 1)."""
    dim = _flatten_slots(ctx)

    def walk(c: GroupContext, offset: int, out: list) -> int:
        if isinstance(c, Cyclic):
            vec = [Fraction(0)] * dim
            vec[offset] = Fraction(c.n)
            out.append(vec)
            return offset + 1
        if isinstance(c, Pruefer):
            vec = [Fraction(0)] * dim
            vec[offset] = Fraction(1)
            out.append(vec)
            return offset + 1
        if isinstance(c, Rationals):
            return offset + 1
        if isinstance(c, Lattice):
            return offset + c.d
        if isinstance(c, DirectProduct):
            for f in c.factors:
                offset = walk(f, offset, out)
            return offset
        raise UnsupportedGroupError(f"no abelian coordinates for group kind {c.kind!r}")

    rels: list[list[Fraction]] = []
    walk(ctx, 0, rels)
    return rels


class _AbelianOracle:
    """Membership and quotient-order tests in a f.g. subgroup of an abelian context."""

    def __init__(self, ctx: GroupContext, generators: Sequence):
        self.ctx = ctx
        self.dim = _flatten_slots(ctx)
        self.gen_vecs = [_flatten(ctx, g) for g in generators]
        self.relations = _relation_vectors(ctx)

    def _module_for(self, target: list[Fraction]) -> tuple[ZModule, list[int]]:
        # clear denominators jointly so the query becomes integral
        scale = 1
        for vec in itertools.chain(self.gen_vecs, self.relations, [target]):
            for x in vec:
                scale = scale * x.denominator // _gcd(scale, x.denominator)
        zm = ZModule(self.dim)
        for vec in itertools.chain(self.gen_vecs, self.relations):
            zm.add([int(x * scale) for x in vec])
        return zm, [int(x * scale) for x in target]

    def contains(self, g) -> bool:
        vec = _flatten(self.ctx, g)
        zm, scaled = self._module_for(vec)
        return zm.contains(scaled)

    def quotient_order(self, g) -> int | None:
        """Order of g modulo the subgroup: least k >= 1 with g^k inside, else None."""
        vec = _flatten(self.ctx, g)
        zm, scaled = self._module_for(vec)
        return zm.minimal_multiple(scaled)


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


def build_abelian_chain_ladder(ctx: GroupContext, generators: Sequence, depth: int) -> FolnerLadder:
    """Congruent ladder for an abelian group presented by a generator chain.

    Follows the inductive cyclic-quotient scheme: each stage adjoins one
    generator, absorbing a finite quotient in a single glue step or opening
    a growing centered power window for an infinite quotient.
    """
    if depth < 0:
        raise ValueError("depth must be >= 0")
    _flatten_slots(ctx)  # rejects non-abelian contexts up front
    ident = ctx.identity()
    mul, inv = ctx.mul, ctx.inv
    levels = [FiniteSubset(ctx, [ident])]
    glue = []
    consumed: list = []
    infinite_dirs: list[dict] = []  # {"g": generator, "w": window exponent}
    quotient_orders: list[int | None] = []
    for n in range(1, depth + 1):
        step_sets: list[list] = []
        for d in infinite_dirs:
            # ternary growth: window [-(3^w - 1)/2 .. +] gains one digit
            jump = ident
            for _ in range(3 ** d["w"]):
                jump = mul(jump, d["g"])
            step_sets.append([inv(jump), ident, jump])
            d["w"] += 1
        if len(consumed) < len(generators):
            g = generators[len(consumed)]
            ctx.validate(g)
            order = _AbelianOracle(ctx, consumed).quotient_order(g)
            quotient_orders.append(order)
            if order is None:
                step_sets.append([inv(g), ident, g])
                infinite_dirs.append({"g": g, "w": 1})
            elif order > 1:
                lifts = [ident]
                for _ in range(order - 1):
                    lifts.append(mul(lifts[-1], g))
                step_sets.append(lifts)
            consumed.append(g)
        step = FiniteSubset(ctx, [ident])
        for part in step_sets:
            step = product_set(step, FiniteSubset(ctx, part), require_unique=True)
        glue.append(step)
        levels.append(product_set(step, levels[-1], require_unique=True))
    info = {"generators": [ctx.encode_json(g) for g in consumed],
            "quotient_orders": quotient_orders}
    return FolnerLadder(ctx, levels, glue, info)


# ---------------------------------------------------------------------------
# exact-sequence composition


def compose_exact_sequence(
    ladder_sub: FolnerLadder,
    ladder_quot: FolnerLadder,
    section: Callable,
    projection: Callable,
    targets: Sequence[tuple[FiniteSubset, Fraction]],
    *,
    max_level_size: int | None = 5_000_000,
) -> FolnerLadder:
    """Compose subgroup and quotient ladders through a section of G -> Q.

    Level s is U_{m_s} * That_{q_s}, where That is the section-lifted tile
    tower of the quotient ladder.  Indices are chosen adaptively: q_s is the
    least index (not below q_{s-1}) whose quotient tile passes the projected
    defect filter at eps_s / 2, and m_s the least index above m_{s-1} whose
    composed level meets the full (K_s, eps_s) target.  The quotient index
    may stall; the subgroup index strictly increases.
    """
    ctx = ladder_sub.ctx
    q_ctx = ladder_quot.ctx
    ident = ctx.identity()
    if section(q_ctx.identity()) != ident:
        raise ValueError("section must send the quotient identity to the group identity")
    for q in ladder_quot.levels[-1]:
        if projection(section(q)) != q:
            raise ValueError(f"projection(section({q!r})) != {q!r}: not a section")

    # lifted tile tower over the quotient ladder
    towers: list[FiniteSubset] = [FiniteSubset(ctx, [ident])]
    lifted_digits: list[list] = []
    for i in range(ladder_quot.depth):
        digits = [section(d) for d in ladder_quot.glue[i]]
        lifted_digits.append(digits)
        towers.append(product_set(FiniteSubset(ctx, digits), towers[-1], require_unique=True))
    for q_level, tower in zip(ladder_quot.levels, towers):
        if {projection(t) for t in tower} != set(q_level.as_set):
            raise ValueError("lifted tower does not project onto the quotient tiles")

    # commutation certificate: subgroup windows must commute with every lift
    sub_elems = set(ladder_sub.levels[0].elements)
    for J in ladder_sub.glue:
        sub_elems.update(J.elements)
    lift_elems = {d for digits in lifted_digits for d in digits}
    for u in sub_elems:
        for t in lift_elems:
            if ctx.mul(u, t) != ctx.mul(t, u):
                raise ValueError(f"subgroup element {u!r} does not commute with lift {t!r}; "
                                 "composition needs a central subgroup")

    def composed(m: int, q: int) -> FiniteSubset:
        size = len(ladder_sub.levels[m]) * len(towers[q])
        if max_level_size is not None and size > max_level_size:
            raise InvarianceUnreachableError(
                f"composed level would hold {size} elements (cap {max_level_size})")
        return product_set(ladder_sub.levels[m], towers[q], require_unique=True)

    levels = [ladder_sub.levels[0]]
    m_prev, q_prev = 0, 0
    m_indices, q_indices, achieved = [0], [0], []
    glue = []
    mul = ctx.mul
    for s, (K, eps) in enumerate(targets, start=1):
        if K.ctx != ctx:
            raise ValueError("invariance target lives in the wrong group")
        projected = FiniteSubset(q_ctx, {projection(k) for k in K})
        best: Fraction | None = None
        found = None
        for q in range(q_prev, ladder_quot.depth + 1):
            if right_invariance_defect(ladder_quot.levels[q], projected) > eps / 2:
                continue
            for m in range(m_prev + 1, ladder_sub.depth + 1):
                defect = right_invariance_defect(composed(m, q), K)
                if best is None or defect < best:
                    best = defect
                if defect <= eps:
                    found = (m, q, defect)
                    break
            if found:
                break
        if not found:
            raise InvarianceUnreachableError(
                f"no indices meet target {s} (eps = {eps}) within the given ladders", achieved=best)
        m_s, q_s, defect = found
        digit_products = [ident]
        for i in range(q_s - 1, q_prev - 1, -1):
            digit_products = [mul(e, d) for e in digit_products for d in lifted_digits[i]]
        C = iterated_glue(ladder_sub, m_prev, m_s)
        step = FiniteSubset(ctx, (mul(c, e) for c in C for e in digit_products))
        if len(step) != len(C) * len(digit_products):
            raise NotCosetRepsError("composed glue digits collide")
        glue.append(step)
        levels.append(composed(m_s, q_s))
        m_prev, q_prev = m_s, q_s
        m_indices.append(m_s)
        q_indices.append(q_s)
        achieved.append(str(defect))
    info = {"m_indices": m_indices, "q_indices": q_indices, "achieved_defects": achieved}
    return FolnerLadder(ctx, levels, glue, info)


def build_heisenberg_ladder(
    targets: Sequence[tuple[FiniteSubset, Fraction]],
    *,
    center_depth: int = 10,
    plane_depth: int = 5,
    max_level_size: int | None = 5_000_000,
) -> FolnerLadder:
    """Compose the central Z ladder with the Z^2 quotient ladder of heisenberg3."""
    ctx = Heisenberg()
    center = map_ladder(build_lattice_ladder(1, center_depth), ctx, lambda t: (0, 0, t[0]))
    plane = build_lattice_ladder(2, plane_depth)
    return compose_exact_sequence(
        center, plane,
        section=lambda q: (q[0], q[1], 0),
        projection=lambda g: (g[0], g[1]),
        targets=targets,
        max_level_size=max_level_size,
    )


def extend_virtually(base: FolnerLadder, coset_reps: FiniteSubset) -> FolnerLadder:
    """Ladder U_n * R for a finite-index extension with transversal R."""
    if coset_reps.ctx != base.ctx:
        raise ValueError("coset representatives live in a different group context")
    if base.ctx.identity() not in coset_reps:
        raise NotCosetRepsError("transversal must contain the identity")
    levels = [product_set(U, coset_reps, require_unique=True) for U in base.levels]
    info = {"extension_reps": coset_reps.encode_json()}
    return FolnerLadder(base.ctx, levels, base.glue, info)


def map_ladder(ladder: FolnerLadder, new_ctx: GroupContext, fn: Callable) -> FolnerLadder:
    """Push a ladder through an injective homomorphism into another context."""
    mul = new_ctx.mul
    for J in ladder.glue:
        for a in J:
            for b in J:
                if fn(ladder.ctx.mul(a, b)) != mul(fn(a), fn(b)):
                    raise ValueError(f"map is not multiplicative on glue pair ({a!r}, {b!r})")
    levels = [FiniteSubset(new_ctx, (fn(g) for g in F)) for F in ladder.levels]
    glue = [FiniteSubset(new_ctx, (fn(g) for g in J)) for J in ladder.glue]
    return FolnerLadder(new_ctx, levels, glue, ladder.info)


def group_ladder(ladder: FolnerLadder, boundaries: Sequence[int]) -> FolnerLadder:
    """Subsequence ladder along increasing level boundaries, with product glue."""
    bounds = list(boundaries)
    if len(bounds) < 1 or bounds != sorted(set(bounds)):
        raise ValueError(f"boundaries must be strictly increasing, got {bounds!r}")
    if bounds[0] < 0 or bounds[-1] > ladder.depth:
        raise ValueError(f"boundaries {bounds!r} leave the built range 0..{ladder.depth}")
    levels = [ladder.levels[b] for b in bounds]
    glue = [iterated_glue(ladder, a, b) for a, b in zip(bounds, bounds[1:])]
    return FolnerLadder(ladder.ctx, levels, glue, {"boundaries": bounds})
