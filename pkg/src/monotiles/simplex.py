"""Exact finite-depth approximation of the invariant-measure simplex.

Scaled simplex points are pushed down managed matrix sequences; approximants
are the vertex images of deep standard simplices, certified to nest both by
the construction identity and by an independent exact hull-membership test.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .blocks import BlockHierarchy
from .errors import InfeasibleError
from .folner import FolnerLadder
from .matrices import ManagedMatrix, ManagedSequence

__all__ = [
    "SimplexPoint",
    "SimplexApproximant",
    "NestingCertificate",
    "RealizationResult",
    "push",
    "standard_vertices",
    "approximate_limit",
    "hull_contains",
    "check_nesting",
    "tail_cluster_diameters",
    "realize_finite_simplex",
    "incidence_from_hierarchy",
]


@dataclass(frozen=True)
class SimplexPoint:
    """Nonnegative rational coordinates summing to exactly 1/scale."""

    coordinates: tuple
    scale: int

    def __init__(self, coordinates, scale: int):
        coords = tuple(Fraction(c) for c in coordinates)
        scale = int(scale)
        if scale < 1:
            raise ValueError(f"scale must be positive, got {scale}")
        if any(c < 0 for c in coords):
            raise ValueError("coordinates must be nonnegative")
        if sum(coords) != Fraction(1, scale):
            raise ValueError(f"coordinates sum to {sum(coords)}, expected 1/{scale}")
        object.__setattr__(self, "coordinates", coords)
        object.__setattr__(self, "scale", scale)

    def __len__(self) -> int:
        return len(self.coordinates)

    def l1_distance(self, other: "SimplexPoint") -> Fraction:
        if len(other) != len(self):
            raise ValueError("dimension mismatch")
        return sum(abs(a - b) for a, b in zip(self.coordinates, other.coordinates))

    def to_json(self) -> dict:
        return {"coordinates": [str(c) for c in self.coordinates], "scale": self.scale}

    @staticmethod
    def from_json(data: dict) -> "SimplexPoint":
        return SimplexPoint([Fraction(c) for c in data["coordinates"]], data["scale"])


def standard_vertices(k: int, scale: int) -> list[SimplexPoint]:
    """The k corners e_j / scale of the scaled simplex."""
    if k < 1:
        raise ValueError("need at least one coordinate")
    unit = Fraction(1, scale)
    return [SimplexPoint(tuple(unit if i == j else Fraction(0) for i in range(k)), scale)
            for j in range(k)]


def push(m: ManagedMatrix, z: SimplexPoint) -> SimplexPoint:
    """Exact image of a scaled simplex point one level down the sequence."""
    if len(z) != m.cols:
        raise ValueError(f"point has {len(z)} coordinates, matrix has {m.cols} columns")
    if z.scale % m.ratio != 0:
        raise ValueError(f"scale {z.scale} not divisible by column sum {m.ratio}")
    coords = tuple(sum(row[j] * z.coordinates[j] for j in range(m.cols)) for row in m.entries)
    return SimplexPoint(coords, z.scale // m.ratio)


@dataclass(frozen=True)
class SimplexApproximant:
    """Vertex images of a depth-d standard simplex pushed down to one level."""

    level: int
    depth: int
    vertices: tuple

    def hull_diameter(self) -> Fraction:
        """Largest pairwise L1 distance among the vertex images."""
        verts = self.vertices
        return max((a.l1_distance(b) for i, a in enumerate(verts) for b in verts[i + 1:]),
                   default=Fraction(0))

    def to_json(self) -> dict:
        return {"level": self.level, "depth": self.depth,
                "vertices": [v.to_json() for v in self.vertices]}


def approximate_limit(ms: ManagedSequence, n: int, d: int) -> SimplexApproximant:
    """Push the standard vertices of the level-(n+d) simplex down to level n."""
    if d < 1:
        raise ValueError("depth must be at least 1")
    if n < 0 or n + d > len(ms):
        raise ValueError(f"levels {n}..{n + d} exceed sequence length {len(ms)}")
    prod = ms.product(n, d)
    deep_scale = ms.scale(n + d)
    verts = tuple(push(prod, z) for z in standard_vertices(prod.cols, deep_scale))
    return SimplexApproximant(n, d, verts)


def _solve_exact(rows: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction] | None:
    """Gaussian elimination over the rationals; None when no unique solution."""
    m, k = len(rows), len(rows[0]) if rows else 0
    aug = [row[:] + [b] for row, b in zip(rows, rhs)]
    pivots = []
    r = 0
    for col in range(k):
        piv = next((i for i in range(r, m) if aug[i][col] != 0), None)
        if piv is None:
            continue
        aug[r], aug[piv] = aug[piv], aug[r]
        lead = aug[r][col]
        aug[r] = [x / lead for x in aug[r]]
        for i in range(m):
            if i != r and aug[i][col] != 0:
                f = aug[i][col]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[r])]
        pivots.append(col)
        r += 1
        if r == m:
            break
    for i in range(r, m):
        if aug[i][k] != 0:
            return None  # inconsistent
    if len(pivots) < k:
        return None  # underdetermined
    sol = [Fraction(0)] * k
    for i, col in enumerate(pivots):
        sol[col] = aug[i][k]
    return sol


def _fourier_motzkin_feasible(rows: list[list[Fraction]], rhs: list[Fraction]) -> bool:
    """Exact feasibility of rows * lam = rhs with lam >= 0, by elimination.

    Equalities are reduced first; the surviving nonnegativity constraints on
    the free variables are then eliminated one variable at a time.
    """
    m = len(rows)
    k = len(rows[0])
    aug = [row[:] + [b] for row, b in zip(rows, rhs)]
    pivots: dict[int, list[Fraction]] = {}
    r = 0
    for col in range(k):
        piv = next((i for i in range(r, m) if aug[i][col] != 0), None)
        if piv is None:
            continue
        aug[r], aug[piv] = aug[piv], aug[r]
        lead = aug[r][col]
        aug[r] = [x / lead for x in aug[r]]
        for i in range(m):
            if i != r and aug[i][col] != 0:
                f = aug[i][col]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[r])]
        pivots[col] = None
        r += 1
    for i in range(r, m):
        if aug[i][k] != 0:
            return False
    free = [c for c in range(k) if c not in pivots]
    # express lam_col >= 0 as an inequality over the free variables:
    # sum(coef_f * t_f) <= const  rewritten as (coefs, const) meaning coefs . t <= const
    inequalities: list[tuple[list[Fraction], Fraction]] = []
    row_of = {}
    ri = 0
    for col in range(k):
        if col in pivots:
            row_of[col] = aug[ri]
            ri += 1
    for col in range(k):
        if col in pivots:
            row = row_of[col]
            coefs = [row[f] for f in free]
            inequalities.append((coefs, row[k]))
        else:
            coefs = [Fraction(-1) if f == col else Fraction(0) for f in free]
            inequalities.append((coefs, Fraction(0)))
    for _ in range(len(free)):
        lowers, uppers, rest = [], [], []
        for coefs, const in inequalities:
            a = coefs[0]
            tail = coefs[1:]
            if a > 0:
                uppers.append(([t / a for t in tail], const / a))
            elif a < 0:
                lowers.append(([t / a for t in tail], const / a))
            else:
                rest.append((tail, const))
        new = rest
        for lc, lb in lowers:
            for uc, ub in uppers:
                new.append(([u - v for u, v in zip(uc, lc)], ub - lb))
        inequalities = new
    return all(const >= 0 for coefs, const in inequalities)


def hull_contains(outer: Sequence[SimplexPoint], z: SimplexPoint) -> tuple[bool, str]:
    """Exact convex-hull membership: barycentric solve, falling back to elimination."""
    k = len(z)
    rows = [[v.coordinates[i] for v in outer] for i in range(k)]
    rows.append([Fraction(1)] * len(outer))
    rhs = [z.coordinates[i] for i in range(k)] + [Fraction(1)]
    # scale mismatch between outer and z is a caller error
    for v in outer:
        if v.scale != z.scale or len(v) != k:
            raise ValueError("hull test needs points at one scale and dimension")
    sol = _solve_exact(rows, rhs)
    if sol is not None:
        return all(c >= 0 for c in sol), "barycentric"
    return _fourier_motzkin_feasible(rows, rhs), "fourier-motzkin"


@dataclass(frozen=True)
class NestingCertificate:
    """Proof that the depth-(d+1) approximant sits inside the depth-d hull."""

    ok: bool
    level: int
    depth: int
    coefficients: tuple
    method: str
    witness: int | None = None

    def to_json(self) -> dict:
        return {"ok": self.ok, "level": self.level, "depth": self.depth,
                "coefficients": [[str(c) for c in row] for row in self.coefficients],
                "method": self.method, "witness": self.witness}


def check_nesting(ms: ManagedSequence, n: int, d: int) -> NestingCertificate:
    """Certify approximate_limit(n, d+1) lies in the hull of approximate_limit(n, d).

    The convex coefficients come from the connecting matrix columns; they
    are verified exactly and then reconfirmed by an independent
    hull-membership test that never looks at the construction.
    """
    outer = approximate_limit(ms, n, d)
    inner = approximate_limit(ms, n, d + 1)
    link = ms[n + d]
    coeffs = []
    method = "barycentric"
    for j, vertex in enumerate(inner.vertices):
        lam = [Fraction(link.entries[i][j], link.ratio) for i in range(link.rows)]
        combo = [sum(l * v.coordinates[i] for l, v in zip(lam, outer.vertices))
                 for i in range(len(vertex))]
        if tuple(combo) != vertex.coordinates:
            return NestingCertificate(False, n, d, tuple(), method, witness=j)
        member, how = hull_contains(outer.vertices, vertex)
        if how != "barycentric":
            method = how
        if not member:
            return NestingCertificate(False, n, d, tuple(), how, witness=j)
        coeffs.append(tuple(lam))
    return NestingCertificate(True, n, d, tuple(coeffs), method)


def _near_diagonal_count(m: ManagedMatrix) -> int | None:
    """Block count d when m = diag(ratio - d + 1) + ones off-diagonal, else None."""
    if m.rows != m.cols:
        return None
    d = m.rows
    diag = m.ratio - (d - 1)
    if diag < 1:
        return None
    for i in range(d):
        for j in range(d):
            if m.entries[i][j] != (diag if i == j else 1):
                return None
    return d


def tail_cluster_diameters(ms: ManagedSequence, n: int, d: int) -> list[Fraction]:
    """Exact L1 diameter of each vertex tail cluster past depth d.

    Requires the near-diagonal shape from level n onward: every vertex image
    then moves along a straight segment toward the common barycenter, so the
    diameter of {depth >= d image of vertex j} telescopes to the exact value
    (2/scale) * (k-1)/k * prod (ratio_t - k)/ratio_t.
    """
    if d < 0 or n + d > len(ms):
        raise ValueError(f"levels {n}..{n + d} exceed sequence length {len(ms)}")
    k = ms[n].rows
    shrink = Fraction(2 * (k - 1), k * ms.scale(n))
    for t in range(n, len(ms)):
        if _near_diagonal_count(ms[t]) != k:
            raise ValueError(f"matrix {t} is not near-diagonal on {k} blocks")
        if t < n + d:
            shrink *= Fraction(ms[t].ratio - k, ms[t].ratio)
    return [shrink] * k


@dataclass(frozen=True)
class RealizationResult:
    """A managed sequence whose limit has the requested extreme points."""

    sequence: ManagedSequence
    approximant: SimplexApproximant
    diameters: tuple
    depth: int

    def to_json(self) -> dict:
        return {"sequence": self.sequence.to_json(),
                "approximant": self.approximant.to_json(),
                "diameters": [str(x) for x in self.diameters],
                "depth": self.depth}


def realize_finite_simplex(num_extreme: int, ladder: FolnerLadder, tolerance) -> RealizationResult:
    """Near-diagonal managed sequence over the ladder with num_extreme limit points.

    Each matrix is diag(ratio - num_extreme + 1) with ones elsewhere.  The
    returned depth is the least one whose tail clusters have exact diameter
    at most the tolerance; the ladder must be deep enough and every ratio at
    least num_extreme + 1.
    """
    d = int(num_extreme)
    if d < 2:
        raise ValueError(f"need at least 2 extreme points, got {d}")
    tolerance = Fraction(tolerance)
    if tolerance <= 0:
        raise ValueError("tolerance must be positive")
    if ladder.depth < 1:
        raise InfeasibleError("ladder has no glue steps to build matrices over")
    base_scale = len(ladder.levels[0])
    matrices = []
    diam = Fraction(2 * (d - 1), d * base_scale)
    depth = 0 if diam <= tolerance else None
    for t in range(ladder.depth):
        if depth is not None:
            break
        r = ladder.ratio(t)
        if r < d + 1:
            raise InfeasibleError(
                f"level-{t} index ratio {r} too small for {d} extreme points (need >= {d + 1})")
        matrices.append(ManagedMatrix(
            tuple(tuple(r - (d - 1) if i == j else 1 for j in range(d)) for i in range(d))))
        diam *= Fraction(r - d, r)
        if diam <= tolerance:
            depth = t + 1
    if depth is None:
        raise InfeasibleError(
            f"ladder depth {ladder.depth} only reaches cluster diameter {diam} > {tolerance}")
    if depth == 0:
        # an approximant needs at least one matrix
        r = ladder.ratio(0)
        if r < d + 1:
            raise InfeasibleError(
                f"level-0 index ratio {r} too small for {d} extreme points (need >= {d + 1})")
        matrices.append(ManagedMatrix(
            tuple(tuple(r - (d - 1) if i == j else 1 for j in range(d)) for i in range(d))))
        depth = 1
    seq = ManagedSequence(matrices[:depth], base_scale=base_scale)
    approx = approximate_limit(seq, 0, depth)
    diams = tail_cluster_diameters(seq, 0, depth)
    return RealizationResult(seq, approx, tuple(diams), depth)


def incidence_from_hierarchy(h: BlockHierarchy, n: int) -> ManagedMatrix:
    """Recount which level-n block sits on each glue coset of each level-(n+1) block."""
    if not 0 <= n < h.depth:
        raise ValueError(f"need a level in 0..{h.depth - 1}, got {n}")
    fam_low = h.family(n)
    fam_high = h.family(n + 1)
    base = fam_low[0].support
    lookup = {b.symbols: i for i, b in enumerate(fam_low)}
    counts = [[0] * len(fam_high) for _ in fam_low]
    for k, block in enumerate(fam_high):
        for c in h.ladder.glue[n]:
            piece = block.window(c, base)
            i = lookup.get(piece)
            if i is None:
                raise ValueError(f"block {k + 1} carries an unknown level-{n} block at coset {c!r}")
            counts[i][k] += 1
    return ManagedMatrix(tuple(tuple(row) for row in counts))
