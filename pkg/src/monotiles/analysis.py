"""Finite-scale dynamical checks on block hierarchies.

Return-time sets are computed twice: algebraically from glue digits and
independently by sliding-window scans over the distinguished patch.  Tower
partition checks (tiling exactness and refinement) compare observed window
contents against address-predicted blocks, so single-symbol corruption is
always detected.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .blocks import BlockHierarchy, Pattern
from .errors import OutOfWindowError
from .folner import FolnerLadder, iterated_glue
from .groups import FiniteSubset

__all__ = [
    "CosetAddress",
    "CylinderId",
    "KRReport",
    "SyndeticityReport",
    "address",
    "return_times",
    "scan_occurrences",
    "check_partitions",
    "boundary_mass_bound",
    "syndeticity_window",
]


@dataclass(frozen=True)
class CosetAddress:
    """Digit expansion of a window element across ladder levels.

    digits run top-down (levels m-1, ..., n); the residual lies in the
    level-n window and reassembly multiplies digits then the residual.
    """

    digits: tuple
    residual: object
    low: int
    high: int

    def reassemble(self, ladder: FolnerLadder):
        out = ladder.ctx.identity()
        for c in self.digits:
            out = ladder.ctx.mul(out, c)
        return ladder.ctx.mul(out, self.residual)

    def to_json(self, ladder: FolnerLadder) -> dict:
        enc = ladder.ctx.encode_json
        return {"digits": [enc(c) for c in self.digits],
                "residual": enc(self.residual),
                "levels": [self.low, self.high]}


@dataclass(frozen=True)
class CylinderId:
    """Names the clopen set of configurations reading block k in window n."""

    level: int
    block_index: int

    def __post_init__(self):
        if self.level < 0 or self.block_index < 1:
            raise ValueError(f"bad cylinder ({self.level}, {self.block_index})")


def address(ladder: FolnerLadder, v, n: int, m: int) -> CosetAddress:
    """Unique glue digits c_{m-1}, ..., c_n and residual with v = product * residual."""
    if not 0 <= n <= m <= ladder.depth:
        raise ValueError(f"need 0 <= n <= m <= {ladder.depth}, got n={n}, m={m}")
    if v not in ladder.levels[m]:
        raise OutOfWindowError(f"{v!r} lies outside level {m}")
    mul, inv = ladder.ctx.mul, ladder.ctx.inv
    digits = []
    cur = v
    for i in range(m - 1, n - 1, -1):
        c = ladder.digit_map(i)[cur]
        digits.append(c)
        cur = mul(inv(c), cur)
    return CosetAddress(tuple(digits), cur, n, m)


def _ladder_of(obj) -> FolnerLadder:
    return obj if isinstance(obj, FolnerLadder) else obj.ladder


def return_times(h, n: int, m: int) -> FiniteSubset:
    """Positions whose level-n window tiles level m: all glue-digit products."""
    return iterated_glue(_ladder_of(h), n, m)


def _testable(ladder: FolnerLadder, n: int, m: int) -> list:
    """Positions v in F_m with the whole translated window v * F_n inside F_m."""
    mul = ladder.ctx.mul
    big = ladder.levels[m].as_set
    base = ladder.levels[n].elements
    return [v for v in ladder.levels[m] if all(mul(v, u) in big for u in base)]


def _occurrence_map(h: BlockHierarchy, n: int, m: int, patch: Pattern | None) -> dict:
    """Map testable position -> matched block index, by raw window comparison."""
    ladder = h.ladder
    if patch is None:
        patch = h.x0_patch(m)
    if patch.support != ladder.levels[m]:
        raise ValueError(f"patch not supported on ladder level {m}")
    base = ladder.levels[n]
    lookup = {b.symbols: k for k, b in enumerate(h.family(n), start=1)}
    found = {}
    for v in _testable(ladder, n, m):
        k = lookup.get(patch.window(v, base))
        if k is not None:
            found[v] = k
    return found


def scan_occurrences(h: BlockHierarchy, n: int, m: int, patch: Pattern | None = None) -> FiniteSubset:
    """All positions where some level-n block occurs in the level-m patch.

    Pure pattern matching, no glue algebra; the independent counterpart of
    return_times.  An explicit patch substitutes for the built one, which
    lets corruption tests rescan mutated windows.
    """
    if not 0 <= n < m <= h.depth:
        raise ValueError(f"need 0 <= n < m <= {h.depth}, got n={n}, m={m}")
    return FiniteSubset(h.ladder.ctx, _occurrence_map(h, n, m, patch).keys())


def predicted_block(h: BlockHierarchy, addr: CosetAddress) -> int:
    """Block index the assignments place at the addressed tile of the patch."""
    k = 1
    for level, c in zip(range(addr.high - 1, addr.low - 1, -1), addr.digits):
        k = h.assignments[level].value(k, c)
    return k


@dataclass(frozen=True)
class KRReport:
    """Tower partition check: tiling exactness plus one refinement step."""

    ok: bool
    levels: tuple[int, int]
    interior: int = 0
    tiles: int = 0
    refinements: int = 0
    reason: str | None = None
    witness: tuple | None = None

    def to_json(self) -> dict:
        return {"ok": self.ok, "levels": list(self.levels), "interior": self.interior,
                "tiles": self.tiles, "refinements": self.refinements,
                "reason": self.reason,
                "witness": None if self.witness is None else [repr(w) for w in self.witness]}


def check_partitions(h: BlockHierarchy, n: int, m: int, patch: Pattern | None = None) -> KRReport:
    """Verify the tower partition properties on the level-m patch.

    First part: every interior position (translated level-n window inside
    the level-m window) lies in exactly one scanned block occurrence, and
    the claiming pair (offset, block index) matches the address prediction.
    Second part, when m > n + 1: each level-(n+1) tile refines into level-n
    tiles exactly as its assignment prescribes, with block 1 on the
    identity coset and nowhere else.
    """
    if not 0 <= n < m <= h.depth:
        raise ValueError(f"need 0 <= n < m <= {h.depth}, got n={n}, m={m}")
    ladder = h.ladder
    mul = ladder.ctx.mul
    ident = ladder.ctx.identity()

    occ = _occurrence_map(h, n, m, patch)
    returns = return_times(h, n, m)
    fail = lambda reason, witness: KRReport(False, (n, m), reason=reason, witness=witness)

    if set(occ) != returns.as_set:
        off = set(occ) ^ returns.as_set
        return fail("scanned occurrences disagree with glue products", (next(iter(off)),))

    claims: dict = {}
    base = ladder.levels[n]
    for r, k in occ.items():
        for u in base:
            claims.setdefault(mul(r, u), []).append((u, k))

    interior = _testable(ladder, n, m)
    for v in interior:
        got = claims.get(v, [])
        if len(got) != 1:
            return fail(f"interior position claimed {len(got)} times", (v,))
        addr = address(ladder, v, n, m)
        want = (addr.residual, predicted_block(h, addr))
        if got[0] != want:
            return fail("claim disagrees with address prediction", (v, got[0], want))

    refinements = 0
    if m > n + 1:
        occ_up = _occurrence_map(h, n + 1, m, patch)
        returns_up = return_times(h, n + 1, m)
        if set(occ_up) != returns_up.as_set:
            off = set(occ_up) ^ returns_up.as_set
            return fail("level-(n+1) occurrences disagree with glue products", (next(iter(off)),))
        for r, k_up in occ_up.items():
            for c in ladder.glue[n]:
                pos = mul(r, c)
                k_obs = occ.get(pos)
                expected = h.assignments[n].value(k_up, c)
                if k_obs is None:
                    return fail("refined tile carries no block", (pos,))
                if k_obs != expected:
                    return fail("refinement disagrees with assignment", (pos, k_obs, expected))
                if (k_obs == 1) != (c == ident):
                    return fail("first block must sit exactly on the identity coset", (pos, k_obs))
                refinements += 1

    return KRReport(True, (n, m), interior=len(interior), tiles=len(returns),
                    refinements=refinements)


def boundary_mass_bound(ladder: FolnerLadder, g, n: int) -> Fraction:
    """Exact |F_n \\ F_n g| / |F_n|: invariant-measure mass of the level-n shell."""
    ladder.ctx.validate(g)
    F = ladder.levels[n]
    shifted = F.right_translated(g).as_set
    return Fraction(sum(1 for f in F if f not in shifted), len(F))


@dataclass(frozen=True)
class SyndeticityReport:
    """Finite syndeticity mechanism: visits cover the window by one translate."""

    ok: bool
    levels: tuple[int, int]
    visits: int = 0
    covered: bool = False
    gap_radius: int | None = None
    reason: str | None = None
    witness: tuple | None = None

    def to_json(self) -> dict:
        return {"ok": self.ok, "levels": list(self.levels), "visits": self.visits,
                "covered": self.covered, "gap_radius": self.gap_radius,
                "reason": self.reason,
                "witness": None if self.witness is None else [repr(w) for w in self.witness]}


def _sup_norm(g) -> int:
    return max(abs(c) for c in g) if isinstance(g, tuple) else abs(g)


def syndeticity_window(h: BlockHierarchy, cylinder: CylinderId, m: int) -> SyndeticityReport:
    """Check that visits to the first-block cylinder cover the level-m window.

    The cylinder must name block 1 one level below the tiling level n.
    Every tiling position is a visit (each block starts with block 1), and
    the visit translates by F_n must cover F_m.  For integer-lattice groups
    the largest observed gap radius is reported in the sup norm.
    """
    if cylinder.block_index != 1:
        raise ValueError("syndeticity mechanism applies to the first-block cylinder")
    n = cylinder.level + 1
    if not 1 <= n < m <= h.depth:
        raise ValueError(f"need cylinder level + 1 < m <= {h.depth}")
    ladder = h.ladder
    mul = ladder.ctx.mul
    patch = h.x0_patch(m)
    target = h.family(cylinder.level)[0]
    base_low = ladder.levels[cylinder.level]
    big = ladder.levels[m].as_set

    visits = []
    for v in ladder.levels[m]:
        if all(mul(v, u) in big for u in base_low.elements):
            if patch.window(v, base_low) == target.symbols:
                visits.append(v)
    visit_set = set(visits)

    returns = return_times(h, n, m)
    for r in returns:
        if r not in visit_set:
            return SyndeticityReport(False, (n, m), visits=len(visits),
                                     reason="tiling position is not a cylinder visit", witness=(r,))

    base = ladder.levels[n]
    covered = set()
    for r in visits:
        for u in base:
            covered.add(mul(r, u))
    if not big <= covered:
        missing = next(iter(big - covered))
        return SyndeticityReport(False, (n, m), visits=len(visits), covered=False,
                                 reason="window not covered by visit translates", witness=(missing,))

    gap = None
    if ladder.ctx.descriptor().get("kind") == "lattice":
        inv = ladder.ctx.inv
        gap = max(min(_sup_norm(mul(inv(r), v)) for r in visits) for v in ladder.levels[m])
    return SyndeticityReport(True, (n, m), visits=len(visits), covered=True, gap_radius=gap)
