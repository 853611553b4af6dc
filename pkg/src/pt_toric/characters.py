"""Torus characters of the virtual tangent space as Laurent polynomials.

A character is a finitely supported map from exponent pairs ``(i, j)`` to
integer multiplicities, read as  sum mult * t1**i * t2**j  in the local
chart coordinates of a vertex.
"""

from __future__ import annotations

from typing import Iterable, Mapping

from .exact import FactorProduct
from .toricgeom import Partition, RayBound

__all__ = [
    "LaurentChar",
    "ConstraintViolated",
    "NonEquivariantTerm",
    "q_lambda",
    "invert_char",
    "g_vertex",
    "infinite_vertex",
    "geometric_char",
    "edge_char",
    "to_global",
    "chern_euler",
    "fixed_part",
]


class ConstraintViolated(ValueError):
    pass


class NonEquivariantTerm(ArithmeticError):
    """A character handed to c/e still contains the trivial weight."""


class LaurentChar:
    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[tuple[int, int], int] | Iterable | None = None):
        acc: dict[tuple[int, int], int] = {}
        if terms is None:
            items = ()
        elif isinstance(terms, Mapping):
            items = terms.items()
        else:
            items = ((k, 1) for k in terms)
        for k, v in items:
            if v:
                acc[k] = acc.get(k, 0) + v
        self.terms = {k: v for k, v in acc.items() if v}

    @classmethod
    def monomial(cls, i: int, j: int, mult: int = 1) -> "LaurentChar":
        return cls({(i, j): mult})

    def __add__(self, other: "LaurentChar") -> "LaurentChar":
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return LaurentChar(out)

    def __neg__(self) -> "LaurentChar":
        return LaurentChar({k: -v for k, v in self.terms.items()})

    def __sub__(self, other: "LaurentChar") -> "LaurentChar":
        return self + (-other)

    def __mul__(self, other) -> "LaurentChar":
        if isinstance(other, int):
            return LaurentChar({k: v * other for k, v in self.terms.items()})
        out: dict[tuple[int, int], int] = {}
        for (i, j), v in self.terms.items():
            for (k, l), w in other.terms.items():
                key = (i + k, j + l)
                out[key] = out.get(key, 0) + v * w
        return LaurentChar(out)

    __rmul__ = __mul__

    def shift(self, i: int, j: int) -> "LaurentChar":
        """Multiply by the monomial t1**i t2**j."""
        return LaurentChar({(a + i, b + j): v for (a, b), v in self.terms.items()})

    def swap(self) -> "LaurentChar":
        return LaurentChar({(b, a): v for (a, b), v in self.terms.items()})

    @property
    def rank(self) -> int:
        return sum(self.terms.values())

    def __eq__(self, other):
        return isinstance(other, LaurentChar) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def __repr__(self):
        return f"LaurentChar({self.to_list()})"

    def to_list(self) -> list[list[int]]:
        return [[i, j, v] for (i, j), v in sorted(self.terms.items())]


def q_lambda(lam: Partition) -> LaurentChar:
    return LaurentChar(lam.boxes())


def invert_char(c: LaurentChar) -> LaurentChar:
    return LaurentChar({(-i, -j): v for (i, j), v in c.terms.items()})


_ONE = LaurentChar.monomial(0, 0)


def g_vertex(lam: Partition, bound: RayBound) -> LaurentChar:
    """Finite vertex term of a partition inside the (a, b)-rays."""
    if not lam.fits(bound):
        raise ConstraintViolated(f"{lam.heights} does not fit in rays {bound}")
    q = q_lambda(lam)
    qbar = invert_char(q)
    qqbar = q * qbar
    term1 = q - q.shift(-bound.b, -bound.a)
    term2 = qbar.shift(-1, -1)
    # (1 - t1^-1)(1 - t2^-1) Q Qbar
    term3 = qqbar - qqbar.shift(-1, 0) - qqbar.shift(0, -1) + qqbar.shift(-1, -1)
    return term1 + term2 - term3


def infinite_vertex(bound: RayBound) -> LaurentChar:
    """sum_{k=1..b} sum_{l=1..a} t1^k t2^l."""
    return LaurentChar((k, l) for k in range(1, bound.b + 1) for l in range(1, bound.a + 1))


def geometric_char(n: int) -> dict[int, int]:
    """(t^n - 1)/(t - 1) as exponent -> multiplicity, exact for every integer n."""
    if n >= 0:
        return {k: 1 for k in range(n)}
    return {k: -1 for k in range(n, 0)}


def edge_char(d_e: int, m_e: int) -> LaurentChar:
    """Regrouped edge term in (edge, transverse) coordinates (t1, t2)."""
    out: dict[tuple[int, int], int] = {}
    for l in range(1, d_e + 1):
        for k, v in geometric_char(l * m_e + 1).items():
            out[(k, -l)] = out.get((k, -l), 0) + v
    return LaurentChar(out)


def to_global(c: LaurentChar, frame) -> dict[tuple[int, int], int]:
    """Map local exponents to global torus weights.

    ``frame`` is a Vertex or a pair of weight columns ``(w1, w2)``.
    """
    w1, w2 = frame.weights if hasattr(frame, "weights") else frame
    out: dict[tuple[int, int], int] = {}
    for (i, j), v in c.terms.items():
        key = (i * w1[0] + j * w2[0], i * w1[1] + j * w2[1])
        out[key] = out.get(key, 0) + v
    return {k: v for k, v in out.items() if v}


def chern_euler(weights: Mapping[tuple[int, int], int]) -> FactorProduct:
    if weights.get((0, 0), 0):
        raise NonEquivariantTerm(f"trivial weight with multiplicity {weights[(0, 0)]}")
    return FactorProduct({k: v for k, v in weights.items() if k != (0, 0)})


def fixed_part(c: LaurentChar) -> int:
    return c.terms.get((0, 0), 0)
