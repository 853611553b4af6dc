"""Series-level checks: local closed forms, Hilbert-scheme counts, Hankel
determinants, rational reconstruction and two smooth-geometry cross-checks.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from math import comb, gcd
from typing import Sequence

from .characters import chern_euler, to_global
from .exact import UPoly, URatFunc, format_rat, pow_one_minus_q, specialize_product
from .engine import local_vertex_sum, vertex_infinite_char
from .toricgeom import RayBound, Vertex

__all__ = [
    "MismatchAt",
    "InsufficientCoefficients",
    "RangeViolation",
    "ReconstructionResult",
    "goettsche_coeffs",
    "binom_series_coeff",
    "verify_local_closed_form",
    "kronecker_hankel",
    "hankel_det_naive",
    "reconstruct_rational",
    "reexpand",
    "crosscheck_d1",
    "crosscheck_low_n",
    "report_json",
]


class MismatchAt(AssertionError):
    def __init__(self, order: int, detail: str = ""):
        super().__init__(f"mismatch at order {order}" + (f": {detail}" if detail else ""))
        self.order = order


class InsufficientCoefficients(ValueError):
    pass


class RangeViolation(ValueError):
    pass


def goettsche_coeffs(euler: int, order: int) -> list[Fraction]:
    """Coefficients 0..order of prod_{k>=1} (1 - q^k)^(-euler)."""
    if order < 0:
        raise ValueError("order must be >= 0")
    # log-derivative recursion: n a_n = e * sum_{k=1..n} sigma(k) a_{n-k}
    sigma = [0] + [sum(d for d in range(1, k + 1) if k % d == 0) for k in range(1, order + 1)]
    a = [Fraction(1)] + [Fraction(0)] * order
    for n in range(1, order + 1):
        a[n] = Fraction(euler * sum(sigma[k] * a[n - k] for k in range(1, n + 1)), n)
    return a


def binom_series_coeff(alpha, b: int) -> URatFunc:
    """Coefficient of q^b in (1 - q)^alpha, i.e. prod_{i=1..b} (i - 1 - alpha) / i."""
    if b < 0:
        raise ValueError("b must be >= 0")
    if not isinstance(alpha, URatFunc):
        alpha = URatFunc.constant(Fraction(alpha))
    out = URatFunc.constant(1)
    for i in range(1, b + 1):
        out = out * ((URatFunc.constant(i - 1) - alpha) * Fraction(1, i))
    return out


_C2 = Vertex(0, (0, 1), ((1, 0), (0, 1)))
_X = UPoly.x()


def _linear(c) -> URatFunc:
    """c * x as a rational function."""
    return URatFunc(_X * Fraction(c))


def _f_linear(c) -> URatFunc:
    """f(c x) = (1 + c x) / (c x)."""
    return URatFunc(UPoly((1, Fraction(c))), _X * Fraction(c))


def _check_10(order: int, slopes: Sequence) -> int:
    bound = RayBound(1, 0)
    for c in slopes:
        c = Fraction(c)
        alpha = URatFunc(UPoly((1, -c)), _X * c)  # 1/s1 - 1 with s1 = c x
        for b in range(order + 1):
            lhs = local_vertex_sum(None, _C2, bound, b, c)
            rhs = binom_series_coeff(alpha, b)
            if lhs != rhs:
                raise MismatchAt(b, f"slope {c}: {lhs!r} != {rhs!r}")
    return order


def _check_11(order: int, slopes: Sequence) -> int:
    bound = RayBound(1, 1)
    inf = chern_euler(to_global(vertex_infinite_char(bound), _C2))
    for c in slopes:
        c = Fraction(c)
        alpha = URatFunc(UPoly((1 + 1 / c,)), _X)  # 1/s1 + 1/s2
        pref = _f_linear(-(c + 1))
        ratio = _linear(c + 1) * URatFunc(1, UPoly((-1, c + 1)))  # (s1+s2)/(s1+s2-1)
        bcoef = [binom_series_coeff(alpha, k) for k in range(order + 1)]
        inf_val = specialize_product(inf, c)
        for k in range(order + 1):
            tail = URatFunc.constant(0)
            for j in range(1, k + 1):
                tail = tail + bcoef[k - j] * j
            rhs = pref * (bcoef[k] + ratio * tail)
            lhs = inf_val * local_vertex_sum(None, _C2, bound, k, c)
            if lhs != rhs:
                raise MismatchAt(k, f"slope {c}")
    return order


def verify_local_closed_form(case, order: int, slopes: Sequence = (1,)) -> dict:
    """Compare enumerated local sums with their closed forms, coefficient by coefficient.

    ``(1, 0)``: (1-q)^(1/s1 - 1), as exact functions of s1 (slope 1 makes x = s1).
    ``(1, 1)``: the closed form with (1-q)^(1/s1 + 1/s2), along each slope s1 = c s2.
    """
    case = tuple(case)
    if case == (1, 0):
        slopes = list(dict.fromkeys([Fraction(1)] + [Fraction(s) for s in slopes]))
        done = _check_10(order, slopes)
    elif case == (1, 1):
        slopes = [Fraction(s) for s in slopes]
        done = _check_11(order, slopes)
    else:
        raise ValueError(f"no closed form for case {case}")
    return {
        "case": list(case),
        "order": order,
        "slopes": [format_rat(s) for s in slopes],
        "max_order_verified": done,
        "passed": True,
    }


def _hankel(coeffs: Sequence, size: int, offset: int) -> list[list[Fraction]]:
    need = offset + 2 * size - 1
    if size < 1:
        raise ValueError("size must be >= 1")
    if len(coeffs) < need:
        raise InsufficientCoefficients(f"size {size} needs {need} coefficients, got {len(coeffs)}")
    return [[Fraction(coeffs[offset + i + j]) for j in range(size)] for i in range(size)]


def kronecker_hankel(coeffs: Sequence, size: int, offset: int = 0) -> Fraction:
    """det (c_{offset+i+j})_{0<=i,j<size} by fraction-free (Bareiss) elimination.

    With offset 0 the top-left entry is the first supplied coefficient, so 25
    coefficients fill a 13x13 matrix.
    """
    m = _hankel(coeffs, size, offset)
    # clear denominators so Bareiss divisions stay in the integers
    scale = 1
    for row in m:
        for v in row:
            scale = scale * v.denominator // gcd(scale, v.denominator)
    a = [[int(v * scale) for v in row] for row in m]
    n = size
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((r for r in range(k + 1, n) if a[r][k] != 0), None)
            if swap is None:
                return Fraction(0)
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return Fraction(sign * a[n - 1][n - 1], scale ** n)


def hankel_det_naive(coeffs: Sequence, size: int, offset: int = 0) -> Fraction:
    """Leibniz expansion; only for small sizes (cross-check of the Bareiss path)."""
    m = _hankel(coeffs, size, offset)
    total = Fraction(0)
    for perm in itertools.permutations(range(size)):
        inv = sum(1 for i in range(size) for j in range(i + 1, size) if perm[i] > perm[j])
        p = Fraction(1)
        for i, j in enumerate(perm):
            p *= m[i][j]
        total += -p if inv % 2 else p
    return total


@dataclass
class ReconstructionResult:
    numerator: UPoly
    den_exponent: int
    consistent: bool
    num_degree: int
    palindromic: bool
    functional_exponent: int | None
    shift: int = 0

    def terms(self) -> dict[int, Fraction]:
        """Numerator as exponent -> coefficient, with the index shift applied."""
        return {k + self.shift: c for k, c in enumerate(self.numerator.coeffs) if c}

    def to_dict(self) -> dict:
        return {
            "numerator": [format_rat(c) for c in self.numerator.coeffs],
            "shift": self.shift,
            "den_exponent": self.den_exponent,
            "consistent": self.consistent,
            "num_degree": self.num_degree,
            "palindromic": self.palindromic,
            "functional_exponent": self.functional_exponent,
        }


def _is_palindrome(terms: dict[int, Fraction]) -> bool:
    if not terms:
        return True
    lo, hi = min(terms), max(terms)
    return all(terms.get(e, 0) == terms.get(lo + hi - e, 0) for e in range(lo, hi + 1))


def _functional_exponent(terms: dict[int, Fraction], den: int, bound: int) -> int | None:
    # Z = N / (1-q)^den;  Z(1/q) = (-1)^den q^den N(1/q) / (1-q)^den
    if not terms:
        return None
    sgn = -1 if den % 2 else 1
    flipped = {den - e: sgn * c for e, c in terms.items()}
    for sigma in range(-bound, bound + 1):
        if flipped == {e + sigma: c for e, c in terms.items()}:
            return sigma
    return None


def reconstruct_rational(coeffs: Sequence, den_exponent: int, expected_num_degree: int,
                         shift: int = 0) -> ReconstructionResult:
    """Multiply the series by (1-q)^den_exponent and truncate to the known window.

    ``coeffs[k]`` is the coefficient of q^(k + shift); exponents in
    ``expected_num_degree`` and the result refer to the shifted variable.
    """
    coeffs = [Fraction(c) for c in coeffs]
    if len(coeffs) <= expected_num_degree - shift:
        raise InsufficientCoefficients("window too short for the requested numerator degree")
    n = len(coeffs)
    factor = pow_one_minus_q(den_exponent, n - 1)
    prod = [sum((coeffs[i] * factor[k - i] for i in range(k + 1)), Fraction(0)) for k in range(n)]
    cut = expected_num_degree - shift + 1
    consistent = all(c == 0 for c in prod[max(cut, 0):])
    numerator = UPoly(prod[:max(cut, 0)] if consistent else prod)
    res = ReconstructionResult(numerator, den_exponent, consistent, 0, False, None, shift)
    terms = res.terms()
    res.num_degree = max(terms) if terms else 0
    res.palindromic = consistent and _is_palindrome(terms)
    if consistent:
        span = max(abs(e) for e in terms) if terms else 0
        res.functional_exponent = _functional_exponent(terms, den_exponent,
                                                       2 * max(res.num_degree, span, 1))
    return res


def reexpand(result: ReconstructionResult, count: int) -> list[Fraction]:
    """First ``count`` coefficients of numerator / (1-q)^den, in the unshifted index."""
    num = list(result.numerator.coeffs)
    # 1/(1-q)^D has coefficients C(k + D - 1, D - 1)
    inv = [Fraction(comb(k + result.den_exponent - 1, k)) if result.den_exponent else
           Fraction(int(k == 0)) for k in range(count)]
    return [sum((num[i] * inv[k - i] for i in range(min(k + 1, len(num)))), Fraction(0))
            for k in range(count)]


def crosscheck_d1(m: int) -> Fraction:
    if m < 0:
        raise ValueError("m must be >= 0")
    return Fraction(3 * (m + 1))


def crosscheck_low_n(d: int, m: int) -> Fraction:
    """chi(Hilb^m) times the count of curves through m general points, valid for n <= d+1."""
    n = m - d * (d - 3) // 2
    if m < 0 or n > d + 1:
        raise RangeViolation(f"n = {n} exceeds d + 1 = {d + 1}")
    return goettsche_coeffs(3, m)[m] * (1 + d * (d + 3) // 2 - m)


def report_json(result: ReconstructionResult | None = None, hankel: tuple[int, Fraction] | None = None,
                **extra) -> str:
    out: dict = {}
    if result is not None:
        out.update(result.to_dict())
    if hankel is not None:
        out["hankel"] = {"size": hankel[0], "det": format_rat(hankel[1])}
    out.update(extra)
    return json.dumps(out, sort_keys=True)
