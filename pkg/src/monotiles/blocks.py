"""Hierarchical block families glued along a congruent Folner ladder.

Level-0 blocks are symbol spikes at the identity; level n+1 blocks are
concatenations of level-n blocks over the glue cosets, with the first block
always placed on the identity coset and never elsewhere.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import DistinctnessError, AugmentationError, InfeasibleError
from .folner import FolnerLadder
from .groups import FiniteSubset, product_set
from .matrices import ManagedMatrix

__all__ = [
    "Pattern",
    "Assignment",
    "BlockHierarchy",
    "base_blocks",
    "assignment_from_matrix",
    "assemble_level",
    "build_hierarchy",
    "verify_c3",
    "C3Report",
    "augment_matrix",
    "x0_patch",
]


class Pattern:
    """A finitely supported symbol pattern: a window plus one symbol per cell."""

    __slots__ = ("support", "symbols", "_index")

    def __init__(self, support: FiniteSubset, symbols: Sequence[int]):
        symbols = tuple(int(s) for s in symbols)
        if len(symbols) != len(support):
            raise ValueError(f"{len(support)} cells but {len(symbols)} symbols")
        if any(s < 0 for s in symbols):
            raise ValueError("symbols must be nonnegative")
        self.support = support
        self.symbols = symbols
        self._index = None

    def index(self) -> dict:
        if self._index is None:
            self._index = {g: i for i, g in enumerate(self.support.elements)}
        return self._index

    def value(self, g) -> int:
        idx = self.index().get(g)
        if idx is None:
            raise KeyError(f"{g!r} outside the pattern support")
        return self.symbols[idx]

    def window(self, c, base: FiniteSubset) -> tuple[int, ...]:
        """Symbols read along the translated window c * base, in base order."""
        mul = self.support.ctx.mul
        idx = self.index()
        return tuple(self.symbols[idx[mul(c, v)]] for v in base.elements)

    def __eq__(self, other) -> bool:
        return (isinstance(other, Pattern) and self.support == other.support
                and self.symbols == other.symbols)

    def __hash__(self) -> int:
        return hash((self.support.elements, self.symbols))

    def __repr__(self) -> str:
        return f"Pattern({len(self.support)} cells)"

    def to_json(self) -> dict:
        return {"support": self.support.encode_json(), "symbols": list(self.symbols)}


@dataclass(frozen=True)
class Assignment:
    """Per-block maps from glue cosets to lower-level block indices (1-based)."""

    cosets: FiniteSubset
    values: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        ident = self.cosets.ctx.identity()
        for k, row in enumerate(self.values, start=1):
            if len(row) != len(self.cosets):
                raise ValueError(f"assignment {k} covers {len(row)} of {len(self.cosets)} cosets")
            for c, v in zip(self.cosets.elements, row):
                if c == ident and v != 1:
                    raise ValueError(f"assignment {k} must place block 1 on the identity coset")
                if c != ident and v < 2:
                    raise ValueError(f"assignment {k} places block {v} on non-identity coset {c!r}")

    def value(self, k: int, c) -> int:
        """Block index glued at coset c inside output block k."""
        return self.values[k - 1][self.cosets.elements.index(c)]

    @property
    def block_count(self) -> int:
        return len(self.values)

    def to_json(self) -> list:
        return [list(row) for row in self.values]


def base_blocks(k0: int, F0: FiniteSubset) -> list[Pattern]:
    """Level-0 blocks: symbol k at the identity, 0 elsewhere, for k = 1..k0."""
    if k0 < 3:
        raise ValueError(f"need at least 3 base blocks, got k0 = {k0}")
    ident = F0.ctx.identity()
    if ident not in F0:
        raise ValueError("base window must contain the identity")
    return [Pattern(F0, tuple(k if g == ident else 0 for g in F0.elements)) for k in range(1, k0 + 1)]


def assignment_from_matrix(mtilde: ManagedMatrix, cosets: FiniteSubset,
                           k_n: int | None = None) -> Assignment:
    """Deterministic coset assignment realizing the prescribed incidence counts.

    Column k of the matrix fixes how many cosets receive each lower block
    index inside output block k; row 1 must be identically 1 (the identity
    coset).  Cosets are traversed in canonical order and indices dispensed
    in nondecreasing order, then duplicate outputs are separated by the
    lexicographically first value swap that restores distinctness.
    """
    ident = cosets.ctx.identity()
    if ident not in cosets:
        raise InfeasibleError("glue cosets must contain the identity")
    if k_n is not None and k_n != mtilde.rows:
        raise InfeasibleError(f"matrix has {mtilde.rows} rows but {k_n} source blocks")
    ident_pos = cosets.elements.index(ident)
    rows_means_blocks = mtilde.rows
    maps: list[list[int]] = []
    for k in range(mtilde.cols):
        col = mtilde.column(k)
        if col[0] != 1:
            raise InfeasibleError(f"column {k + 1} assigns {col[0]} cosets to block 1; must be exactly 1")
        if sum(col) != len(cosets):
            raise InfeasibleError(f"column {k + 1} sums to {sum(col)} but there are {len(cosets)} cosets")
        dispensed: list[int] = []
        for idx in range(2, rows_means_blocks + 1):
            dispensed.extend([idx] * col[idx - 1])
        row = []
        it = iter(dispensed)
        for c in cosets.elements:
            row.append(1 if c == ident else next(it))
        maps.append(row)

    swap_positions = [i for i in range(len(cosets)) if i != ident_pos]
    final: list[tuple[int, ...]] = []
    for k, row in enumerate(maps):
        candidate = tuple(row)
        if candidate in final:
            fixed = None
            for a_i, a in enumerate(swap_positions):
                for b in swap_positions[a_i + 1:]:
                    if row[a] == row[b]:
                        continue
                    swapped = list(row)
                    swapped[a], swapped[b] = swapped[b], swapped[a]
                    if tuple(swapped) not in final:
                        fixed = tuple(swapped)
                        break
                if fixed:
                    break
            if fixed is None:
                raise DistinctnessError(f"cannot separate assignment column {k + 1} from earlier ones")
            candidate = fixed
        final.append(candidate)
    return Assignment(cosets, tuple(final))


def assemble_level(
    family: Sequence[Pattern],
    cosets: FiniteSubset,
    assignment: Assignment,
) -> list[Pattern]:
    """Glue level-n blocks into level-(n+1) blocks over the glue cosets."""
    base = family[0].support
    for b in family:
        if b.support != base:
            raise ValueError("family blocks must share one support window")
    if assignment.cosets != cosets:
        raise ValueError("assignment indexed by different cosets")
    for row in assignment.values:
        for v in row:
            if not 1 <= v <= len(family):
                raise ValueError(f"assignment refers to block {v} but family has {len(family)}")
    support = product_set(cosets, base, require_unique=True)
    idx = {g: i for i, g in enumerate(support.elements)}
    mul = cosets.ctx.mul
    out: list[Pattern] = []
    for k in range(1, assignment.block_count + 1):
        symbols = [0] * len(support)
        for c, choice in zip(cosets.elements, assignment.values[k - 1]):
            block = family[choice - 1]
            for v, s in zip(base.elements, block.symbols):
                symbols[idx[mul(c, v)]] = s
        out.append(Pattern(support, symbols))
    for i in range(len(out)):
        for j in range(i + 1, len(out)):
            if out[i] == out[j]:
                raise DistinctnessError(f"assembled blocks {i + 1} and {j + 1} coincide")
    return out


@dataclass(frozen=True)
class C3Report:
    """Result of the exhaustive overlap-rigidity check at one level."""

    ok: bool
    witness: tuple | None = None  # (g, k, k') with unexpected agreement

    def to_json(self) -> dict:
        return {"ok": self.ok,
                "witness": None if self.witness is None else [repr(w) for w in self.witness]}


def verify_c3(family: Sequence[Pattern], ctx=None, window: FiniteSubset | None = None) -> C3Report:
    """Check that block translates never agree on window overlaps.

    For every g in the window and every pair (k, k'): agreement of block k
    shifted by g with block k' on the full overlap forces g = identity and
    k = k'.  Exhaustive and exact.
    """
    base = family[0].support
    if window is not None and window != base:
        raise ValueError("family not supported on the given window")
    if ctx is not None and ctx != base.ctx:
        raise ValueError("family lives over a different group")
    ctx = base.ctx
    mul = ctx.mul
    ident = ctx.identity()
    values = [{g: s for g, s in zip(base.elements, b.symbols)} for b in family]
    for g in base.elements:
        overlap = [v for v in base.elements if mul(g, v) in base]
        if not overlap:
            continue
        for k, vk in enumerate(values, start=1):
            for k2, vk2 in enumerate(values, start=1):
                if g == ident and k == k2:
                    continue
                if all(vk[mul(g, v)] == vk2[v] for v in overlap):
                    return C3Report(False, (g, k, k2))
    return C3Report(True)


def augment_matrix(m: ManagedMatrix) -> ManagedMatrix:
    """Split off a duplicated leading column so row 1 becomes identically 1.

    Output is (rows+1) x (cols+1): columns 1 and 2 both read
    (1, M(1,1)-1, M(2,1), ...), and column k+1 reads (1, M(1,k)-1, M(2,k), ...).
    Column sums are preserved.
    """
    if m.min_entry <= m.cols:
        raise AugmentationError(
            f"augmentation needs every entry > {m.cols} (the column count); min entry is {m.min_entry}")
    cols = []
    for j in [0] + list(range(m.cols)):
        col = m.column(j)
        cols.append((1, col[0] - 1) + col[1:])
    return ManagedMatrix(tuple(tuple(col[i] for col in cols) for i in range(m.rows + 1)))


class BlockHierarchy:
    """Block families for every ladder level, plus the assignments that glued them."""

    def __init__(self, ladder: FolnerLadder, families: Sequence[Sequence[Pattern]],
                 assignments: Sequence[Assignment]):
        if len(families) != len(assignments) + 1:
            raise ValueError(f"{len(families)} families need {len(families) - 1} assignments")
        if len(families) > len(ladder.levels):
            raise ValueError("hierarchy deeper than its ladder")
        self.ladder = ladder
        self.families = [list(f) for f in families]
        self.assignments = list(assignments)
        for n, fam in enumerate(self.families):
            if fam[0].support != ladder.levels[n]:
                raise ValueError(f"family {n} not supported on ladder level {n}")

    @property
    def depth(self) -> int:
        return len(self.families) - 1

    def family(self, n: int) -> list[Pattern]:
        if not 0 <= n <= self.depth:
            raise ValueError(f"level {n} beyond built depth {self.depth}")
        return self.families[n]

    def x0_patch(self, n: int) -> Pattern:
        """The level-n patch of the distinguished configuration (block 1)."""
        return self.family(n)[0]

    def to_json(self) -> dict:
        return {
            "ladder": self.ladder.to_json(),
            "families": [
                {"support": fam[0].support.encode_json(),
                 "blocks": [list(b.symbols) for b in fam]}
                for fam in self.families
            ],
            "assignments": [a.to_json() for a in self.assignments],
        }

    @staticmethod
    def from_json(data: dict) -> "BlockHierarchy":
        ladder = FolnerLadder.from_json(data["ladder"])
        families = []
        for n, fam in enumerate(data["families"]):
            support = ladder.levels[n]
            families.append([Pattern(support, sym) for sym in fam["blocks"]])
        assignments = [
            Assignment(ladder.glue[n], tuple(tuple(row) for row in rows))
            for n, rows in enumerate(data["assignments"])
        ]
        return BlockHierarchy(ladder, families, assignments)


def build_hierarchy(ladder: FolnerLadder, matrices: Sequence[ManagedMatrix],
                    k0: int | None = None) -> BlockHierarchy:
    """Assemble a hierarchy from incidence matrices over a congruent ladder."""
    matrices = list(matrices)
    if len(matrices) > ladder.depth:
        raise ValueError(f"{len(matrices)} matrices exceed ladder depth {ladder.depth}")
    top = matrices[0].rows if matrices else k0
    if top is None:
        raise ValueError("need either matrices or an explicit base block count")
    if k0 is not None and k0 != top:
        raise ValueError(f"base block count {k0} conflicts with first matrix rows {top}")
    families = [base_blocks(top, ladder.levels[0])]
    assignments = []
    for n, m in enumerate(matrices):
        if m.rows != len(families[n]):
            raise ValueError(f"matrix {n} has {m.rows} rows but level {n} has {len(families[n])} blocks")
        if m.ratio != len(ladder.glue[n]):
            raise ValueError(f"matrix {n} columns sum to {m.ratio} but |J_{n}| = {len(ladder.glue[n])}")
        assignment = assignment_from_matrix(m, ladder.glue[n])
        assignments.append(assignment)
        families.append(assemble_level(families[n], ladder.glue[n], assignment))
    return BlockHierarchy(ladder, families, assignments)


def x0_patch(h: BlockHierarchy, n: int) -> Pattern:
    """Level-n window of the distinguished configuration: always block 1."""
    return h.x0_patch(n)
