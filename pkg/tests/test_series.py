import math
from fractions import Fraction

import mpmath
import pytest

from crossweyl.series import FLOAT_SAFE_COUNT, CountSeries, main_terms, remainders_of


def test_basic_remainders():
    s = CountSeries(lambda2=(0, 1, 4), counts=(1, 3, 9), c1=2, d=2)
    assert s.lambdas == (0.0, 1.0, 2.0)
    assert s.remainders == (1.0, 1.0, 1.0)
    nr = s.normalized_remainders()
    assert math.isnan(nr[0]) and nr[1:] == (1.0, 0.5)
    rows = list(s.rows())
    assert rows[2] == (2.0, 9, 8.0, 1.0, 0.5)
    with pytest.raises(ValueError):
        s.normalized_remainders(left=True)


def test_validation():
    with pytest.raises(ValueError):
        CountSeries(lambda2=(1, 1), counts=(1, 2), c1=1, d=2)
    with pytest.raises(ValueError):
        CountSeries(lambda2=(-1, 1), counts=(1, 2), c1=1, d=2)
    with pytest.raises(ValueError):
        CountSeries(lambda2=(1, 2), counts=(1,), c1=1, d=2)
    with pytest.raises(ValueError):
        CountSeries(lambda2=(1, 2), counts=(1, 2), c1=1, d=2, left_counts=(0,))


def test_left_remainders():
    s = CountSeries(lambda2=(1, 4), counts=(5, 20), c1=1, d=2, left_counts=(2, 10))
    assert s.remainders == (4.0, 16.0)
    assert s.left_remainders == (1.0, 6.0)


def test_extended_precision_path():
    # main term 10^40 exactly; a double would swallow the +7
    L = Fraction(10**20)
    counts = [10**40 + 7]
    mains, digits = main_terms([L], 1, 4, counts)
    assert digits is not None and digits > 40
    assert remainders_of([L], counts, 1, 4) == (7.0,)
    # irrational c1 with an odd dimension
    c1 = mpmath.mpf(2) / 3
    n = 10**30
    L = Fraction(10**20)
    (r,) = remainders_of([L], [n], c1, 3)
    with mpmath.workdps(80):
        ref = mpmath.mpf(n) - mpmath.mpf(2) / 3 * mpmath.mpf(10) ** 30
    assert r == pytest.approx(float(ref), rel=1e-12)


def test_float_path_below_threshold():
    mains, digits = main_terms([Fraction(9)], 1, 2, [FLOAT_SAFE_COUNT - 1])
    assert digits is None and float(mains[0]) == 9.0
