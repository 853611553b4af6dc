import json
import random
from fractions import Fraction

import pytest

from pt_toric import tables
from pt_toric.analysis import (
    InsufficientCoefficients,
    MismatchAt,
    RangeViolation,
    binom_series_coeff,
    crosscheck_d1,
    crosscheck_low_n,
    goettsche_coeffs,
    hankel_det_naive,
    kronecker_hankel,
    reconstruct_rational,
    reexpand,
    report_json,
    verify_local_closed_form,
)
from pt_toric.exact import UPoly, URatFunc


def test_goettsche():
    assert goettsche_coeffs(3, 4) == [1, 3, 9, 22, 51]
    assert goettsche_coeffs(0, 5) == [1, 0, 0, 0, 0, 0]
    assert goettsche_coeffs(3, 13)[13] == 13209
    # e = 1 gives the partition numbers
    assert goettsche_coeffs(1, 10) == [1, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42]


def test_binom_series_coeff():
    x = UPoly.x()
    alpha = URatFunc(UPoly((1, -1)), x)  # 1/s - 1
    want = URatFunc(UPoly((1, -1)) * UPoly((1, -2)), x * x * 2)
    assert binom_series_coeff(alpha, 2) == want
    assert binom_series_coeff(alpha, 0) == URatFunc.constant(1)
    assert binom_series_coeff(1, 1) == URatFunc.constant(-1)
    assert binom_series_coeff(5, 6) == URatFunc.constant(0)


def test_local_closed_forms():
    rep = verify_local_closed_form((1, 0), 8, [1, 5])
    assert rep["passed"] and rep["max_order_verified"] == 8
    rep = verify_local_closed_form((1, 1), 5, [7, 11])
    assert rep["passed"] and rep["max_order_verified"] == 5
    assert verify_local_closed_form((1, 0), 0)["passed"]
    with pytest.raises(ValueError):
        verify_local_closed_form((2, 2), 3)


def test_mismatch_carries_order():
    err = MismatchAt(4, "slope 7")
    assert err.order == 4 and "order 4" in str(err)


def test_hankel_examples():
    assert kronecker_hankel([1] * 5, 2) == 0
    assert kronecker_hankel([2 ** k for k in range(7)], 3) == 0
    assert kronecker_hankel(tables.D2, 13) == 0
    bumped = tables.D2[:-1] + [tables.D2[-1] + 1]
    assert kronecker_hankel(bumped, 13) != 0
    with pytest.raises(InsufficientCoefficients):
        kronecker_hankel(tables.D2, 14)


def test_hankel_offset():
    seq = [7] + [2 ** k for k in range(7)]
    assert kronecker_hankel(seq, 2) == 7 * 2 - 1
    assert kronecker_hankel(seq, 3, offset=1) == 0


def test_hankel_bareiss_matches_naive():
    rng = random.Random(11)
    for size in range(1, 6):
        for _ in range(5):
            c = [Fraction(rng.randint(-20, 20), rng.randint(1, 5)) for _ in range(2 * size - 1)]
            assert kronecker_hankel(c, size) == hankel_det_naive(c, size)
    # zero leading entry forces a row swap
    c = [0, 1, 2, 3, 5]
    assert kronecker_hankel(c, 3) == hankel_det_naive(c, 3)


def test_reconstruct_degree_two():
    res = reconstruct_rational(tables.D2, 12, 11, shift=1)
    assert res.consistent and res.palindromic
    assert res.terms() == tables.NUMERATOR_D2
    assert res.num_degree == 11
    assert res.functional_exponent == 0
    assert reexpand(res, 25) == tables.D2


def test_reconstruct_degree_one():
    res = reconstruct_rational([3 * (m + 1) for m in range(12)], 6, 4)
    assert res.consistent and res.palindromic
    assert res.numerator == UPoly((3, -12, 18, -12, 3))
    # the point-count index is off by one from n; in n the symmetry exponent is 0
    assert res.functional_exponent == 2
    assert reconstruct_rational([3 * (m + 1) for m in range(12)], 6, 5, shift=1).functional_exponent == 0


def test_reconstruct_non_rational():
    res = reconstruct_rational(goettsche_coeffs(1, 20), 6, 4)
    assert not res.consistent
    assert res.functional_exponent is None


def test_reconstruct_too_short():
    with pytest.raises(InsufficientCoefficients):
        reconstruct_rational([1, 2, 3], 2, 5)


def test_crosscheck_d1():
    assert [crosscheck_d1(m) for m in (0, 7, 24)] == [3, 24, 75]


def test_crosscheck_low_n():
    assert crosscheck_low_n(3, 4) == 306
    assert crosscheck_low_n(2, 1) == 15
    assert crosscheck_low_n(4, 0) == 15
    with pytest.raises(RangeViolation):
        crosscheck_low_n(2, 3)


def test_crosscheck_low_n_versus_tables():
    for d, top in ((2, 2), (3, 4), (4, 5)):
        for m in range(top + 1):
            assert crosscheck_low_n(d, m) == tables.reference(d, m)
    # inside the stated range but away from the table
    assert crosscheck_low_n(4, 6) == 221 * 9
    assert tables.reference(4, 6) == 26058


def test_report_json():
    res = reconstruct_rational([3 * (m + 1) for m in range(12)], 6, 4)
    data = json.loads(report_json(res, hankel=(6, Fraction(0))))
    assert data["numerator"] == ["3", "-12", "18", "-12", "3"]
    assert data["hankel"] == {"size": 6, "det": "0"}
    assert data["consistent"] and data["palindromic"]
