"""Computable countable groups with canonical element encodings.

Every context exposes identity, product, inverse, encoding validation and a
JSON descriptor, so higher layers can stay group-agnostic.  Elements are
plain hashable Python values (ints, Fractions, tuples) that sort
deterministically within one context.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Iterable

from .errors import EncodingError, NotCosetRepsError, UnsupportedGroupError

__all__ = [
    "GroupContext",
    "Lattice",
    "Cyclic",
    "Heisenberg",
    "Pruefer",
    "Rationals",
    "DirectProduct",
    "FiniteExtension",
    "FiniteSubset",
    "context_from_descriptor",
    "standard_generators",
    "product_set",
]


def _as_fraction(value: Any) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    raise EncodingError(f"cannot interpret {value!r} as an exact rational")


class GroupContext:
    """Base class for group implementations."""

    kind: str = "abstract"

    def identity(self):
        raise NotImplementedError

    def mul(self, g, h):
        raise NotImplementedError

    def inv(self, g):
        raise NotImplementedError

    def validate(self, g) -> None:
        """Raise EncodingError unless g is a well-formed element encoding."""
        raise NotImplementedError

    def descriptor(self) -> dict:
        raise NotImplementedError

    def encode_json(self, g):
        return g

    def decode_json(self, obj):
        self.validate(obj)
        return obj

    def __eq__(self, other) -> bool:
        return isinstance(other, GroupContext) and self.descriptor() == other.descriptor()

    def __hash__(self) -> int:
        return hash(repr(self.descriptor()))

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.descriptor()})"


class Lattice(GroupContext):
    """Z^d with componentwise addition; elements are d-tuples of ints."""

    kind = "lattice"

    def __init__(self, d: int):
        if not isinstance(d, int) or d < 1:
            raise ValueError(f"lattice rank must be a positive integer, got {d!r}")
        self.d = d

    def identity(self):
        return (0,) * self.d

    def mul(self, g, h):
        return tuple(a + b for a, b in zip(g, h))

    def inv(self, g):
        return tuple(-a for a in g)

    def validate(self, g) -> None:
        if not (isinstance(g, tuple) and len(g) == self.d and all(isinstance(a, int) for a in g)):
            raise EncodingError(f"expected a {self.d}-tuple of ints, got {g!r}")

    def descriptor(self) -> dict:
        return {"kind": "lattice", "d": self.d}

    def encode_json(self, g):
        return list(g)

    def decode_json(self, obj):
        g = tuple(obj)
        self.validate(g)
        return g


class Cyclic(GroupContext):
    """Z/nZ with elements encoded as ints in [0, n)."""

    kind = "cyclic"

    def __init__(self, n: int):
        if not isinstance(n, int) or n < 1:
            raise ValueError(f"cyclic order must be a positive integer, got {n!r}")
        self.n = n

    def identity(self):
        return 0

    def mul(self, g, h):
        return (g + h) % self.n

    def inv(self, g):
        return (-g) % self.n

    def validate(self, g) -> None:
        if not (isinstance(g, int) and 0 <= g < self.n):
            raise EncodingError(f"expected an int in [0, {self.n}), got {g!r}")

    def descriptor(self) -> dict:
        return {"kind": "cyclic", "n": self.n}


class Heisenberg(GroupContext):
    """Discrete Heisenberg group on integer triples.

    Product law: (a, b, c) * (a', b', c') = (a + a', b + b', c + c' + a * b').
    The center is the subgroup {(0, 0, c)}.
    """

    kind = "heisenberg3"

    def identity(self):
        return (0, 0, 0)

    def mul(self, g, h):
        return (g[0] + h[0], g[1] + h[1], g[2] + h[2] + g[0] * h[1])

    def inv(self, g):
        a, b, c = g
        return (-a, -b, a * b - c)

    def validate(self, g) -> None:
        if not (isinstance(g, tuple) and len(g) == 3 and all(isinstance(a, int) for a in g)):
            raise EncodingError(f"expected an integer triple, got {g!r}")

    def descriptor(self) -> dict:
        return {"kind": "heisenberg3"}

    def encode_json(self, g):
        return list(g)

    def decode_json(self, obj):
        g = tuple(obj)
        self.validate(g)
        return g


class Pruefer(GroupContext):
    """Pruefer p-group Z[1/p]/Z; elements are reduced fractions in [0, 1)."""

    kind = "pruefer"

    def __init__(self, p: int):
        if not isinstance(p, int) or p < 2:
            raise ValueError(f"pruefer parameter must be an integer >= 2, got {p!r}")
        self.p = p

    def identity(self):
        return Fraction(0)

    def mul(self, g, h):
        return (g + h) % 1

    def inv(self, g):
        return (-g) % 1

    def validate(self, g) -> None:
        if not isinstance(g, Fraction) or not 0 <= g < 1:
            raise EncodingError(f"expected a Fraction in [0, 1), got {g!r}")
        den = g.denominator
        while den % self.p == 0:
            den //= self.p
        if den != 1:
            raise EncodingError(f"{g} has denominator not a power of {self.p}")

    def descriptor(self) -> dict:
        return {"kind": "pruefer", "p": self.p}

    def encode_json(self, g):
        return str(g)

    def decode_json(self, obj):
        g = _as_fraction(obj)
        self.validate(g)
        return g


class Rationals(GroupContext):
    """(Q, +) with elements encoded as Fractions."""

    kind = "rationals"

    def identity(self):
        return Fraction(0)

    def mul(self, g, h):
        return g + h

    def inv(self, g):
        return -g

    def validate(self, g) -> None:
        if not isinstance(g, Fraction):
            raise EncodingError(f"expected a Fraction, got {g!r}")

    def descriptor(self) -> dict:
        return {"kind": "rationals"}

    def encode_json(self, g):
        return str(g)

    def decode_json(self, obj):
        g = _as_fraction(obj)
        self.validate(g)
        return g


class DirectProduct(GroupContext):
    """Direct product of finitely many contexts; elements are tuples."""

    kind = "direct_product"

    def __init__(self, factors: Iterable[GroupContext]):
        self.factors = tuple(factors)
        if not self.factors:
            raise ValueError("direct product needs at least one factor")

    def identity(self):
        return tuple(f.identity() for f in self.factors)

    def mul(self, g, h):
        return tuple(f.mul(a, b) for f, a, b in zip(self.factors, g, h))

    def inv(self, g):
        return tuple(f.inv(a) for f, a in zip(self.factors, g))

    def validate(self, g) -> None:
        if not (isinstance(g, tuple) and len(g) == len(self.factors)):
            raise EncodingError(f"expected a {len(self.factors)}-tuple, got {g!r}")
        for f, a in zip(self.factors, g):
            f.validate(a)

    def descriptor(self) -> dict:
        return {"kind": "direct_product", "factors": [f.descriptor() for f in self.factors]}

    def encode_json(self, g):
        return [f.encode_json(a) for f, a in zip(self.factors, g)]

    def decode_json(self, obj):
        if len(obj) != len(self.factors):
            raise EncodingError(f"expected {len(self.factors)} components, got {obj!r}")
        return tuple(f.decode_json(a) for f, a in zip(self.factors, obj))


class FiniteExtension(GroupContext):
    """A group presented as a finite-index extension inside an ambient context.

    Elements live in the ambient group.  The base subgroup is the image of
    ``base`` under a canonical embedding ("same", "trivial", or "factor:i"
    into a direct-product factor), and ``coset_reps`` is a right transversal
    containing the identity.
    """

    kind = "finite_extension"

    def __init__(self, base: GroupContext, ambient: GroupContext, embed: str, coset_reps: Iterable):
        self.base = base
        self.ambient = ambient
        self.embed = embed
        reps = []
        for r in coset_reps:
            ambient.validate(r)
            reps.append(r)
        if len(set(reps)) != len(reps):
            raise NotCosetRepsError("coset representatives contain duplicates")
        if ambient.identity() not in reps:
            raise NotCosetRepsError("coset representatives must contain the identity")
        self.coset_reps = tuple(sorted(reps))
        self._check_embed()
        for i, r in enumerate(self.coset_reps):
            for s in self.coset_reps[i + 1:]:
                if self.base_contains(ambient.mul(r, ambient.inv(s))):
                    raise NotCosetRepsError(f"{r!r} and {s!r} lie in the same right coset")

    def _check_embed(self) -> None:
        if self.embed == "same":
            if self.base != self.ambient:
                raise ValueError("embed 'same' requires base == ambient")
        elif self.embed == "trivial":
            pass
        elif self.embed.startswith("factor:"):
            i = int(self.embed.split(":", 1)[1])
            if not isinstance(self.ambient, DirectProduct):
                raise ValueError("embed 'factor:i' requires a direct-product ambient")
            if not 0 <= i < len(self.ambient.factors):
                raise ValueError(f"factor index {i} out of range")
            if self.ambient.factors[i] != self.base:
                raise ValueError(f"ambient factor {i} does not match the base context")
        else:
            raise ValueError(f"unknown embedding {self.embed!r}")

    def embed_base(self, g):
        """Map a base-group element to its ambient encoding."""
        self.base.validate(g)
        if self.embed == "same":
            return g
        if self.embed == "trivial":
            if g != self.base.identity():
                raise EncodingError("trivial embedding only maps the identity")
            return self.ambient.identity()
        i = int(self.embed.split(":", 1)[1])
        parts = list(self.ambient.identity())
        parts[i] = g
        return tuple(parts)

    def base_contains(self, g) -> bool:
        """Membership test for the embedded base subgroup."""
        if self.embed == "same":
            return True
        if self.embed == "trivial":
            return g == self.ambient.identity()
        i = int(self.embed.split(":", 1)[1])
        ident = self.ambient.identity()
        return all(a == e for j, (a, e) in enumerate(zip(g, ident)) if j != i)

    def identity(self):
        return self.ambient.identity()

    def mul(self, g, h):
        return self.ambient.mul(g, h)

    def inv(self, g):
        return self.ambient.inv(g)

    def validate(self, g) -> None:
        self.ambient.validate(g)

    def descriptor(self) -> dict:
        return {
            "kind": "finite_extension",
            "base": self.base.descriptor(),
            "ambient": self.ambient.descriptor(),
            "embed": self.embed,
            "coset_reps": [self.ambient.encode_json(r) for r in self.coset_reps],
        }

    def encode_json(self, g):
        return self.ambient.encode_json(g)

    def decode_json(self, obj):
        return self.ambient.decode_json(obj)


def context_from_descriptor(desc: dict) -> GroupContext:
    """Rebuild a context from its JSON descriptor."""
    kind = desc.get("kind")
    if kind == "lattice":
        return Lattice(desc["d"])
    if kind == "cyclic":
        return Cyclic(desc["n"])
    if kind == "heisenberg3":
        return Heisenberg()
    if kind == "pruefer":
        return Pruefer(desc["p"])
    if kind == "rationals":
        return Rationals()
    if kind == "direct_product":
        return DirectProduct(context_from_descriptor(f) for f in desc["factors"])
    if kind == "finite_extension":
        ambient = context_from_descriptor(desc["ambient"])
        return FiniteExtension(
            base=context_from_descriptor(desc["base"]),
            ambient=ambient,
            embed=desc["embed"],
            coset_reps=[ambient.decode_json(r) for r in desc["coset_reps"]],
        )
    raise UnsupportedGroupError(f"unknown group kind {kind!r}")


def standard_generators(ctx: GroupContext) -> list:
    """A small canonical generating family used by defect reports."""
    if isinstance(ctx, Lattice):
        gens = []
        for i in range(ctx.d):
            unit = tuple(1 if j == i else 0 for j in range(ctx.d))
            gens += [unit, ctx.inv(unit)]
        return gens
    if isinstance(ctx, Cyclic):
        return [1 % ctx.n] if ctx.n > 1 else []
    if isinstance(ctx, Heisenberg):
        gens = [(1, 0, 0), (0, 1, 0), (0, 0, 1)]
        return [g for pair in ((g, ctx.inv(g)) for g in gens) for g in pair]
    if isinstance(ctx, Pruefer):
        return [Fraction(1, ctx.p)]
    if isinstance(ctx, Rationals):
        return [Fraction(1)]
    if isinstance(ctx, DirectProduct):
        gens = []
        ident = ctx.identity()
        for i, f in enumerate(ctx.factors):
            for g in standard_generators(f):
                parts = list(ident)
                parts[i] = g
                gens.append(tuple(parts))
        return gens
    if isinstance(ctx, FiniteExtension):
        gens = [r for r in ctx.coset_reps if r != ctx.identity()]
        return gens + [g for g in standard_generators(ctx.ambient) if g not in gens]
    raise UnsupportedGroupError(f"no generator family for {ctx!r}")


@dataclass(frozen=True)
class FiniteSubset:
    """An immutable finite subset of a group, kept in canonical order."""

    ctx: GroupContext
    elements: tuple

    def __init__(self, ctx: GroupContext, elements: Iterable):
        elems = list(elements)
        for g in elems:
            ctx.validate(g)
        unique = sorted(set(elems))
        if len(unique) != len(elems):
            raise ValueError("finite subset contains duplicate elements")
        object.__setattr__(self, "ctx", ctx)
        object.__setattr__(self, "elements", tuple(unique))
        object.__setattr__(self, "_index", None)

    @property
    def as_set(self) -> frozenset:
        idx = object.__getattribute__(self, "_index")
        if idx is None:
            idx = frozenset(self.elements)
            object.__setattr__(self, "_index", idx)
        return idx

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, g) -> bool:
        return g in self.as_set

    def translated(self, g) -> "FiniteSubset":
        """Left translate g * F."""
        self.ctx.validate(g)
        return FiniteSubset(self.ctx, (self.ctx.mul(g, f) for f in self.elements))

    def right_translated(self, g) -> "FiniteSubset":
        """Right translate F * g."""
        self.ctx.validate(g)
        return FiniteSubset(self.ctx, (self.ctx.mul(f, g) for f in self.elements))

    def inverted(self) -> "FiniteSubset":
        """Elementwise inverse F^{-1} (left/right Folner conversion)."""
        return FiniteSubset(self.ctx, (self.ctx.inv(f) for f in self.elements))

    def encode_json(self) -> list:
        return [self.ctx.encode_json(g) for g in self.elements]

    def __repr__(self) -> str:
        return f"FiniteSubset({len(self.elements)} elements of {self.ctx.kind})"


def product_set(A: FiniteSubset, B: FiniteSubset, *, require_unique: bool = False) -> FiniteSubset:
    """The product set A * B; optionally insist all products are distinct."""
    if A.ctx != B.ctx:
        raise ValueError("product of subsets of different groups")
    mul = A.ctx.mul
    products = [mul(a, b) for a in A.elements for b in B.elements]
    if require_unique and len(set(products)) != len(products):
        raise NotCosetRepsError("product set has colliding factorizations")
    return FiniteSubset(A.ctx, set(products))
