import math
import random
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from crossweyl.catalog import Family, model, parse_product, parse_space
from crossweyl.exactpoly import Poly
from crossweyl.lattice import (
    THREADS_ENV,
    LatticeSpec,
    count_product,
    count_product_series,
    default_workers,
    lattice_sum,
    main_term_coeff,
    main_term_exact,
    product_c1,
    product_model,
    transformed_count,
    weighted_sum,
)

from oracles import brute_weighted_sum, product_count

S2, S3, RP3, CP2 = (parse_space(s) for s in ("S2", "S3", "RP3", "CP2"))
SMALL = [S2, S3, RP3, CP2, parse_space("RP2"), parse_space("HP1")]


def test_count_product_examples():
    assert count_product(product_model([S3, S3]), Fraction(3, 4)) == 9
    assert count_product(product_model([S2, S2]), 1) == 7
    assert count_product(product_model([S2, S3]), -1) == 0
    assert count_product(product_model([S2, S3, CP2]), Fraction(-1, 10**9)) == 0
    assert count_product(product_model([S3, S3]), 0) == 1


def test_single_factor_product_is_single_count():
    from crossweyl.counting import count_single_fast
    for m in SMALL:
        pm = product_model([m])
        for L in (0, Fraction(7, 3), 50, 1234):
            assert count_product(pm, L) == count_single_fast(m, L)


@given(st.lists(st.sampled_from(SMALL), min_size=2, max_size=3),
       st.fractions(min_value=-1, max_value=40, max_denominator=12))
@settings(max_examples=60, deadline=None)
def test_count_product_matches_nested_loop(factors, L):
    assert count_product(product_model(factors), L) == product_count(factors, L)


@pytest.mark.parametrize("names", ["S2xS2", "S3xS3", "S2xS3", "CP2xRP3", "S3xRP3xS2", "HP1xS2"])
def test_transformed_pipeline_agrees(names):
    pm = product_model(parse_product(names))
    for L in (0, Fraction(3, 4), Fraction(17, 5), 30, Fraction(301, 7)):
        assert transformed_count(pm, L) == count_product(pm, L)


def test_weighted_sum_examples():
    spec = LatticeSpec(P=(1, 1), y=(0, 0), pow=(1, 1))
    assert weighted_sum(spec, 2) == 1
    assert weighted_sum(LatticeSpec(P=(1,), y=(0,), pow=(3,)), 10) == 3025
    shifted = LatticeSpec(P=(1, 2), y=(Fraction(1, 2), Fraction(1, 3)), pow=(2, 1))
    assert weighted_sum(shifted, 0) == 0
    with pytest.raises(ValueError):
        weighted_sum(spec, -1)


@given(
    st.lists(st.tuples(st.fractions(min_value=Fraction(1, 4), max_value=3, max_denominator=6),
                       st.fractions(min_value=0, max_value=2, max_denominator=6),
                       st.integers(1, 3)), min_size=1, max_size=3),
    st.fractions(min_value=0, max_value=9, max_denominator=5),
)
@settings(max_examples=60, deadline=None)
def test_weighted_sum_matches_brute_force(rows, lam):
    P, y, pw = zip(*rows)
    spec = LatticeSpec(P=P, y=y, pow=pw)
    assert weighted_sum(spec, lam) == brute_weighted_sum(P, y, pw, lam)


def test_lattice_sum_with_polynomial_weights():
    w = [Poly([1, 0, 3]), Poly([0, 2])]
    P, y = [Fraction(1, 3), Fraction(1)], [Fraction(1, 2), Fraction(0)]
    budget = Fraction(40)
    ref = Fraction(0)
    for i in range(0, 20):
        for j in range(0, 20):
            a, b = y[0] + i, y[1] + j
            if P[0] * a * a + P[1] * b * b <= budget:
                ref += w[0](a) * w[1](b)
    assert lattice_sum(P, y, w, budget) == ref


def test_lattice_spec_validation():
    with pytest.raises(ValueError):
        LatticeSpec(P=(1, 0), y=(0, 0), pow=(1, 1))
    with pytest.raises(ValueError):
        LatticeSpec(P=(1,), y=(0, 0), pow=(1,))
    with pytest.raises(ValueError):
        LatticeSpec(P=(1,), y=(0,), pow=(0,))
    assert LatticeSpec(P=(1, 2), y=(0, 0), pow=(1, 2)).d == 5


# -- main-term coefficient ---------------------------------------------------------

def test_main_term_examples():
    assert main_term_coeff(LatticeSpec(P=(1, 1), y=(0, 0), pow=(1, 1))) == pytest.approx(1 / 8, rel=1e-15)
    assert main_term_coeff(LatticeSpec(P=(4, 1), y=(0, 0), pow=(1, 1))) == pytest.approx(1 / 32, rel=1e-15)
    for d in range(2, 12):
        assert main_term_coeff(LatticeSpec(P=(1,), y=(0,), pow=(d - 1,))) == pytest.approx(1 / d, rel=1e-15)
    r, e, q = main_term_exact(LatticeSpec(P=(1, 1), y=(0, 0), pow=(1, 1)))
    assert (r, e, q) == (Fraction(1, 8), 0, 1)


def polar_quadrature(P, pw) -> float:
    """Quarter-ellipse integral of x^a y^b via polar coordinates."""
    (p1, p2), (a, b) = P, pw
    ang, _ = integrate.quad(lambda t: math.cos(t) ** a * math.sin(t) ** b, 0, math.pi / 2,
                            epsabs=0, epsrel=1e-13)
    return ang / (a + b + 2) / (math.sqrt(p1) ** (a + 1) * math.sqrt(p2) ** (b + 1))


@pytest.mark.parametrize("P,pw", [((1, 1), (1, 1)), ((4, 1), (1, 1)), ((Fraction(1, 4), Fraction(1, 2)), (2, 1)),
                                   ((1, Fraction(1, 3)), (2, 3)), ((Fraction(1, 2), Fraction(1, 2)), (1, 1)),
                                   ((3, 7), (4, 2))])
def test_main_term_against_quadrature(P, pw):
    ref = polar_quadrature([float(p) for p in P], pw)
    got = main_term_coeff(LatticeSpec(P=P, y=(0, 0), pow=pw))
    assert abs(got - ref) <= 1e-12 * ref


def test_main_term_three_factors_cartesian_quadrature():
    P, pw = (1.0, 2.0, 0.5), (1, 2, 1)
    val, _ = integrate.tplquad(
        lambda z, y, x: x * y * y * z,
        0, 1 / math.sqrt(P[0]),
        lambda x: 0, lambda x: math.sqrt(max(0.0, (1 - P[0] * x * x) / P[1])),
        lambda x, y: 0, lambda x, y: math.sqrt(max(0.0, (1 - P[0] * x * x - P[1] * y * y) / P[2])),
        epsabs=1e-13, epsrel=1e-10,
    )
    got = main_term_coeff(LatticeSpec(P=(1, 2, Fraction(1, 2)), y=(0, 0, 0), pow=pw))
    assert got == pytest.approx(val, rel=1e-7)


def test_weighted_sum_approaches_main_term():
    spec = LatticeSpec(P=(1, 1), y=(0, 0), pow=(1, 1))
    lam = 2000
    ratio = float(weighted_sum(spec, lam)) / lam ** spec.d
    assert abs(ratio / main_term_coeff(spec) - 1) < 0.02


def test_product_c1_s3xs3():
    pm = product_model([S3, S3])
    # c1(S3) = 8/3, and the Dirichlet combination gives (8/3 * Gamma(5/2))^2 / Gamma(4)
    expect = (mpmath.mpf(8) / 3 * mpmath.gamma(2.5)) ** 2 / mpmath.gamma(4)
    assert float(product_c1(pm)) == pytest.approx(float(expect), rel=1e-14)


# -- grid series ---------------------------------------------------------------------

def test_series_singleton_and_empty():
    pm = product_model([S2, S3])
    s = count_product_series(pm, [Fraction(7, 2)])
    assert s.counts == (count_product(pm, Fraction(49, 4)),)
    e = count_product_series(pm, [])
    assert len(e) == 0 and e.counts == ()


def test_series_matches_pointwise():
    pm = product_model([S3, S3])
    grid = [Fraction(i, 2) for i in range(1, 11)]
    s = count_product_series(pm, grid)
    assert s.counts == tuple(count_product(pm, x * x) for x in grid)
    assert s.lambda2 == tuple(x * x for x in grid)


@pytest.mark.parametrize("names", ["S2xS2", "CP2xRP3", "S3xS2xRP3", "HP1xS3"])
def test_random_grid_matches_pointwise(names):
    pm = product_model(parse_product(names))
    rng = random.Random(names)
    grid = sorted({Fraction(rng.randrange(0, 4000), rng.randrange(100, 200)) for _ in range(25)})
    s = count_product_series(pm, grid)
    assert list(s.counts) == [count_product(pm, x * x) for x in grid]


def test_series_rejects_bad_grids():
    pm = product_model([S2, S2])
    with pytest.raises(ValueError):
        count_product_series(pm, [2, 1])
    with pytest.raises(ValueError):
        count_product_series(pm, [-1, 1])


def test_results_independent_of_worker_count():
    pm = product_model([S2, S3, RP3])
    grid = [Fraction(i, 3) for i in range(1, 120)]
    base = count_product_series(pm, grid, workers=1).counts
    assert count_product_series(pm, grid, workers=3).counts == base
    assert count_product(pm, 400, workers=1) == count_product(pm, 400, workers=3)
    spec = LatticeSpec(P=(1, Fraction(1, 2)), y=(Fraction(1, 2), 0), pow=(2, 1))
    assert weighted_sum(spec, 40, workers=1) == weighted_sum(spec, 40, workers=3)


def test_default_workers_from_environment(monkeypatch):
    monkeypatch.setenv(THREADS_ENV, "6")
    assert default_workers() == 6
    monkeypatch.setenv(THREADS_ENV, "zero")
    assert default_workers() == 1
    monkeypatch.delenv(THREADS_ENV)
    assert default_workers() == 1
