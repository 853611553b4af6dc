"""Exact univariate algebra over the rationals.

Everything downstream of the character computations is univariate: the two
equivariant parameters are restricted to a line ``s1 = slope * x, s2 = x``
and all arithmetic happens in ``Q(x)`` or in truncated Laurent series in
``x``.  Rationals are :class:`fractions.Fraction`.
"""

from __future__ import annotations

from fractions import Fraction
from math import comb
from typing import Iterable, Mapping, Sequence

try:  # series kernel runs on GMP rationals when available
    from gmpy2 import mpq as _Q
except ImportError:  # pragma: no cover
    _Q = Fraction

Rat = Fraction

__all__ = [
    "Rat",
    "DivisionByZero",
    "SlopeOnPole",
    "PoleAtZero",
    "UPoly",
    "URatFunc",
    "FactorProduct",
    "LSeries",
    "ratfunc_arith",
    "specialize_product",
    "product_series",
    "limit_at_zero",
    "truncated_series_mul",
    "pow_one_minus_q",
    "format_rat",
    "parse_rat",
]


class DivisionByZero(ZeroDivisionError):
    pass


class SlopeOnPole(ArithmeticError):
    """A factor weight vanishes on the chosen specialization line."""


class PoleAtZero(ArithmeticError):
    """The function has no finite limit at x = 0."""


def format_rat(r) -> str:
    r = Fraction(r)
    if r.denominator == 1:
        return str(r.numerator)
    return f"{r.numerator}/{r.denominator}"


def parse_rat(s) -> Fraction:
    if isinstance(s, (int, Fraction)):
        return Fraction(s)
    return Fraction(str(s).strip())


def _strip(coeffs: Iterable) -> tuple:
    c = [Fraction(v) for v in coeffs]
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


class UPoly:
    """Dense polynomial; ``coeffs[k]`` is the coefficient of ``x**k``."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        self.coeffs = _strip(coeffs)

    @classmethod
    def constant(cls, c) -> "UPoly":
        return cls((c,))

    @classmethod
    def x(cls) -> "UPoly":
        return cls((0, 1))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def lead(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def ord0(self) -> int:
        """Order of vanishing at 0 (-1 for the zero polynomial)."""
        for k, c in enumerate(self.coeffs):
            if c:
                return k
        return -1

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = UPoly.constant(other)
        return isinstance(other, UPoly) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"UPoly({[format_rat(c) for c in self.coeffs]})"

    def __add__(self, other: "UPoly") -> "UPoly":
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for k, c in enumerate(b):
            out[k] += c
        return UPoly(out)

    def __neg__(self) -> "UPoly":
        return UPoly(-c for c in self.coeffs)

    def __sub__(self, other: "UPoly") -> "UPoly":
        return self + (-other)

    def __mul__(self, other) -> "UPoly":
        if isinstance(other, (int, Fraction)):
            return UPoly(c * other for c in self.coeffs)
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return UPoly()
        out = [Fraction(0)] * (len(a) + len(b) - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    out[i + j] += ai * bj
        return UPoly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "UPoly":
        result = UPoly.constant(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def divmod(self, other: "UPoly") -> tuple["UPoly", "UPoly"]:
        if other.is_zero():
            raise DivisionByZero("polynomial division by zero")
        rem = list(self.coeffs)
        db = other.degree
        lead = other.lead
        if len(rem) - 1 < db:
            return UPoly(), self
        quot = [Fraction(0)] * (len(rem) - db)
        for k in range(len(rem) - 1 - db, -1, -1):
            c = rem[k + db] / lead
            quot[k] = c
            if c:
                for j, bj in enumerate(other.coeffs):
                    rem[k + j] -= c * bj
        return UPoly(quot), UPoly(rem[:db])

    def monic(self) -> "UPoly":
        if self.is_zero():
            return self
        lead = self.lead
        return UPoly(c / lead for c in self.coeffs)

    def gcd(self, other: "UPoly") -> "UPoly":
        a, b = self, other
        while not b.is_zero():
            a, b = b, a.divmod(b)[1]
        return a.monic()

    def __call__(self, x):
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc


class URatFunc:
    """Canonical ratio of polynomials: coprime, monic denominator."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None, *, _canonical: bool = False):
        if not isinstance(num, UPoly):
            num = UPoly.constant(num)
        if den is None:
            den = UPoly.constant(1)
        elif not isinstance(den, UPoly):
            den = UPoly.constant(den)
        if den.is_zero():
            raise DivisionByZero("zero denominator")
        if not _canonical:
            if num.is_zero():
                den = UPoly.constant(1)
            else:
                g = num.gcd(den)
                if g.degree > 0:
                    num = num.divmod(g)[0]
                    den = den.divmod(g)[0]
                lead = den.lead
                if lead != 1:
                    num = num * (1 / lead)
                    den = den * (1 / lead)
        self.num = num
        self.den = den

    @classmethod
    def constant(cls, c) -> "URatFunc":
        return cls(UPoly.constant(c), _canonical=True)

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_constant(self) -> bool:
        return self.num.degree <= 0 and self.den.degree == 0

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError("not a constant")
        return self.num.coeffs[0] if self.num.coeffs else Fraction(0)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = URatFunc.constant(other)
        return isinstance(other, URatFunc) and self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __repr__(self):
        return f"URatFunc({self.num!r}, {self.den!r})"

    def __add__(self, other) -> "URatFunc":
        if not isinstance(other, URatFunc):
            other = URatFunc.constant(other)
        if other.is_zero():
            return self
        if self.is_zero():
            return other
        if self.den == other.den:
            return URatFunc(self.num + other.num, self.den)
        return URatFunc(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self) -> "URatFunc":
        return URatFunc(-self.num, self.den, _canonical=True)

    def __sub__(self, other) -> "URatFunc":
        if not isinstance(other, URatFunc):
            other = URatFunc.constant(other)
        return self + (-other)

    def __mul__(self, other) -> "URatFunc":
        if not isinstance(other, URatFunc):
            other = URatFunc.constant(other)
        # cross-cancel first to keep degrees small
        g1 = self.num.gcd(other.den)
        g2 = other.num.gcd(self.den)
        n1, d2 = self.num, other.den
        n2, d1 = other.num, self.den
        if g1.degree > 0:
            n1, d2 = n1.divmod(g1)[0], d2.divmod(g1)[0]
        if g2.degree > 0:
            n2, d1 = n2.divmod(g2)[0], d1.divmod(g2)[0]
        return URatFunc(n1 * n2, d1 * d2)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "URatFunc":
        if not isinstance(other, URatFunc):
            other = URatFunc.constant(other)
        if other.is_zero():
            raise DivisionByZero("division by the zero function")
        return self * URatFunc(other.den, other.num)

    def __call__(self, x):
        d = self.den(x)
        if d == 0:
            raise DivisionByZero(f"pole at {x}")
        return self.num(x) / d


def ratfunc_arith(lhs: URatFunc, rhs: URatFunc, op: str) -> URatFunc:
    if op == "add":
        return lhs + rhs
    if op == "mul":
        return lhs * rhs
    if op == "div":
        return lhs / rhs
    raise ValueError(f"unknown op {op!r}")


class FactorProduct:
    """Formal product  prod f(a*s1 + b*s2) ** mult  with f(x) = (1 + x) / x."""

    __slots__ = ("factors",)

    def __init__(self, factors: Mapping[tuple[int, int], int] | None = None):
        clean = {}
        for (a, b), n in (factors or {}).items():
            if n == 0:
                continue
            if a == 0 and b == 0:
                raise ValueError("weight (0, 0) is not allowed in a FactorProduct")
            key = (int(a), int(b))
            clean[key] = clean.get(key, 0) + int(n)
        self.factors = {k: v for k, v in clean.items() if v}

    def __mul__(self, other: "FactorProduct") -> "FactorProduct":
        merged = dict(self.factors)
        for k, v in other.factors.items():
            merged[k] = merged.get(k, 0) + v
        return FactorProduct(merged)

    def __eq__(self, other):
        return isinstance(other, FactorProduct) and self.factors == other.factors

    def __hash__(self):
        return hash(frozenset(self.factors.items()))

    def __repr__(self):
        return f"FactorProduct({dict(sorted(self.factors.items()))})"

    def __len__(self):
        return len(self.factors)

    @property
    def rank(self) -> int:
        return sum(self.factors.values())

    def check_slope(self, slope) -> None:
        slope = Fraction(slope)
        for a, b in self.factors:
            if a * slope + b == 0:
                raise SlopeOnPole(f"weight ({a},{b}) vanishes at slope {slope}")

    def linear_values(self, slope) -> dict:
        """Map each factor weight to its value  a*slope + b  on the line."""
        self.check_slope(slope)
        slope = Fraction(slope)
        out: dict = {}
        for (a, b), n in self.factors.items():
            c = a * slope + b
            out[c] = out.get(c, 0) + n
        return {c: n for c, n in out.items() if n}


def specialize_product(fp: FactorProduct, slope) -> URatFunc:
    """Evaluate ``fp`` on the line s1 = slope*x, s2 = x as an element of Q(x)."""
    values = fp.linear_values(slope)
    num = UPoly.constant(1)
    den = UPoly.constant(1)
    x_pow = 0
    scale = Fraction(1)
    for c, n in sorted(values.items()):
        lin = UPoly((1, c))
        if n > 0:
            num = num * lin ** n
            scale /= c ** n
            x_pow -= n
        else:
            den = den * lin ** (-n)
            scale *= c ** (-n)
            x_pow += -n
    if x_pow > 0:
        num = num * UPoly([0] * x_pow + [1])
    elif x_pow < 0:
        den = den * UPoly([0] * (-x_pow) + [1])
    return URatFunc(num * scale, den)


def limit_at_zero(f: URatFunc) -> Fraction:
    if f.is_zero():
        return Fraction(0)
    on, od = f.num.ord0(), f.den.ord0()
    if on < od:
        raise PoleAtZero(f"numerator vanishes to order {on} < denominator order {od}")
    if on > od:
        return Fraction(0)
    return f.num.coeffs[on] / f.den.coeffs[od]


def truncated_series_mul(a: Sequence, b: Sequence, order: int) -> list:
    out = [_Q(0)] * (order + 1)
    for i, ai in enumerate(a[: order + 1]):
        if not ai:
            continue
        for j, bj in enumerate(b[: order + 1 - i]):
            if bj:
                out[i + j] += ai * bj
    return out


def pow_one_minus_q(exponent: int, order: int) -> list:
    if exponent < 0:
        raise ValueError("exponent must be non-negative")
    return [Fraction((-1) ** k * comb(exponent, k)) for k in range(order + 1)]


class LSeries:
    """Truncated Laurent series  sum_k coeffs[k] * x**(val + k)  known for exponents < prec.

    Products and sums propagate absolute precision, so a value computed from
    pieces whose truncation points were chosen consistently is exact up to
    (not including) ``prec``.
    """

    __slots__ = ("val", "coeffs", "prec")

    def __init__(self, val: int, coeffs: Sequence, prec: int):
        n = max(0, prec - val)
        c = [_Q(v) for v in coeffs[:n]]
        c.extend([_Q(0)] * (n - len(c)))
        self.val = val
        self.coeffs = c
        self.prec = prec

    @classmethod
    def one(cls, prec: int) -> "LSeries":
        return cls(0, [_Q(1)], prec)

    @classmethod
    def zero(cls, prec: int) -> "LSeries":
        return cls(prec, [], prec)

    def coeff(self, e: int) -> Fraction:
        if e >= self.prec:
            raise ValueError(f"coefficient x^{e} beyond precision {self.prec}")
        k = e - self.val
        if k < 0:
            return Fraction(0)
        return Fraction(self.coeffs[k])

    def __add__(self, other: "LSeries") -> "LSeries":
        prec = min(self.prec, other.prec)
        val = min(self.val, other.val)
        out = [_Q(0)] * max(0, prec - val)
        for s in (self, other):
            off = s.val - val
            for k, c in enumerate(s.coeffs[: max(0, prec - s.val)]):
                out[off + k] += c
        return LSeries(val, out, prec)

    def __mul__(self, other) -> "LSeries":
        if not isinstance(other, LSeries):
            other = _Q(other)
            return LSeries(self.val, [c * other for c in self.coeffs], self.prec)
        val = self.val + other.val
        prec = min(self.prec + other.val, other.prec + self.val)
        n = max(0, prec - val)
        return LSeries(val, truncated_series_mul(self.coeffs, other.coeffs, n - 1) if n else [], prec)

    __rmul__ = __mul__

    def __repr__(self):
        return f"LSeries(val={self.val}, prec={self.prec}, {[format_rat(c) for c in self.coeffs]})"


def product_series(fp: FactorProduct, slope, terms: int) -> LSeries:
    """Laurent expansion at x = 0 of ``specialize_product(fp, slope)``.

    Each factor f(c x)^n = x^-n c^-n (1 + c x)^n, so the result is
    x^-rank times a unit power series; ``terms`` coefficients of that unit
    series are produced (absolute precision ``terms - rank``).
    """
    values = fp.linear_values(slope)
    rank = 0
    scale = _Q(1)
    series = [_Q(0)] * terms
    if terms:
        series[0] = _Q(1)
    for c, n in values.items():
        c = _Q(c)
        rank += n
        scale /= c ** n
        if n > 0:
            for _ in range(n):
                # multiply by (1 + c x)
                for k in range(terms - 1, 0, -1):
                    series[k] += c * series[k - 1]
        else:
            for _ in range(-n):
                # divide by (1 + c x)
                for k in range(1, terms):
                    series[k] -= c * series[k - 1]
    return LSeries(-rank, [v * scale for v in series], terms - rank)
