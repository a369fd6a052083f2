import time
from fractions import Fraction
from math import comb

import pytest
from hypothesis import given, strategies as st

from crossweyl.catalog import (
    PARAM_MIN,
    SWEEP,
    CertificateError,
    Family,
    SpectralModel,
    default_model,
    kappa,
    model,
    parse_product,
    parse_space,
    require_w,
    sweep_models,
    w_verify,
)
from crossweyl.exactpoly import Poly, T

from oracles import alpha, mult

SWEPT = list(sweep_models())


# Textbook Laplace spectra, written with integer binomials.  Each returns
# (eigenvalue up to a constant factor, multiplicity) for index j.
def sphere(n, k):
    return k * (k + n - 1), comb(n + k, n) - (comb(n + k - 2, n) if k >= 2 else 0)


def real_proj(n, j):
    return sphere(n, 2 * j)


def complex_proj(m, j):
    num = (2 * j + m) * comb(j + m - 1, j) ** 2
    assert num % m == 0
    return j * (j + m), num // m


def quaternion_proj(m, j):
    num = (2 * j + 2 * m + 1) * comb(j + 2 * m, j) * comb(j + 2 * m - 1, j)
    den = (2 * m + 1) * (j + 1)
    assert num % den == 0
    return j * (j + 2 * m + 1), num // den


def textbook(m: SpectralModel):
    kind, n = m.name.split("^")
    n = int(n.strip("{}"))
    return {
        "S": lambda j: sphere(n, j),
        "RP": lambda j: real_proj(n, j),
        "CP": lambda j: complex_proj(n, j),
        "HP": lambda j: quaternion_proj(n, j),
    }[kind]


@pytest.mark.parametrize("fam,param,m", [x for x in SWEPT if x[2].name != "OP^2"], ids=lambda x: str(x))
def test_catalog_matches_textbook_spectra(fam, param, m):
    ref = textbook(m)
    ratio = None
    for j in range(0, 40):
        ev, mu = ref(j)
        assert mult(m, j) == mu
        assert m.multiplicity(j) == mu
        if j:
            r = alpha(m, j) / ev
            ratio = ratio or r
            assert r == ratio
    assert alpha(m, 0) == 0


def test_octonionic_plane_low_modes():
    m = model(Family.OP2)
    assert m.d == 16
    assert [m.multiplicity(k) for k in range(4)] == [1, 26, 324, 2652]
    ratios = {alpha(m, k) / (k * (k + 11)) for k in range(1, 30)}
    assert len(ratios) == 1


def test_real_dimensions():
    dims = {m.name: m.d for _, _, m in SWEPT}
    assert dims["S^5"] == 5 and dims["S^2"] == 2 and dims["S^24"] == 24
    assert dims["RP^3"] == 3 and dims["RP^2"] == 2
    assert dims["CP^2"] == 4 and dims["HP^1"] == 4 and dims["HP^7"] == 28
    assert dims["OP^2"] == 16
    for _, _, m in SWEPT:
        assert m.R.degree == m.d - 1


def test_model_examples():
    s3 = model(Family.S3)
    assert (s3.d, s3.A, s3.B, s3.C) == (3, Fraction(1, 4), Fraction(1, 2), 0)
    assert s3.R == (T + 1) ** 2
    rp3 = model("RP3")
    assert (rp3.d, rp3.A, rp3.B, rp3.C) == (3, 1, 1, 0)
    assert rp3.R == (2 * T + 1) ** 2
    assert rp3.shift == Fraction(1, 2)
    cp2 = model(Family.CP, 2)
    assert (cp2.d, cp2.A, cp2.B, cp2.C) == (4, Fraction(1, 3), Fraction(2, 3), 0)
    assert cp2.R == (T + 1) ** 3


def test_hp1_has_s4_spectrum():
    hp1, s4 = model(Family.HP, 2), parse_space("S4")
    assert hp1.name == "HP^1" and s4.name == "S^4"
    assert (hp1.A, hp1.B, hp1.C, hp1.R) == (s4.A, s4.B, s4.C, s4.R)


def test_w_certificate_examples():
    rep = w_verify(model(Family.S3))
    assert rep.Q == T * T and rep.checked_coefficient == 0 and rep.passed
    rep = w_verify(model(Family.OP2))
    assert rep.Q.degree == 15 and rep.Q.coeff(14) == 0 and rep.passed
    fake = SpectralModel(name="synthetic", d=2, A=1, B=0, C=0, R=T + 1)
    rep = w_verify(fake)
    assert rep.Q == T + 1 and rep.checked_coefficient == 1 and not rep.passed
    with pytest.raises(CertificateError):
        require_w(fake)


def test_whole_sweep_certifies_quickly():
    start = time.perf_counter()
    reps = [w_verify(m) for _, _, m in sweep_models()]
    assert time.perf_counter() - start < 1.0
    assert all(r.passed and r.checked_coefficient == 0 for r in reps)
    assert len(reps) == sum(len(v) for v in SWEEP.values())


@pytest.mark.parametrize("fam,param,m", SWEPT, ids=lambda x: str(x))
def test_multiplicities_positive_integers(fam, param, m):
    nums, den = m.R.integer_form()
    for k in range(0, 1001):
        acc = 0
        for c in reversed(nums):
            acc = acc * k + c
        assert acc % den == 0 and acc > 0
    assert m.C == 0 and m.multiplicity(0) == 1
    assert m.A > 0 and m.A + m.B > 0


def test_kappa_examples():
    assert kappa(model(Family.S3)) == Fraction(1, 2) ** 2 / (4 * Fraction(1, 4))
    assert kappa(model(Family.S3)) == Fraction(1, 4)
    assert kappa(model(Family.RP3)) == Fraction(1, 4)
    m = SpectralModel(name="x", d=2, A=2, B=2, C=Fraction(1, 2), R=2 * T + 1)
    assert kappa(m) == 0


def test_param_validation():
    with pytest.raises(ValueError, match="S3"):
        model(Family.OddSphere, 2)
    with pytest.raises(ValueError, match="EvenSphere"):
        model(Family.CP, 1)
    with pytest.raises(ValueError):
        model(Family.HP, 1)
    with pytest.raises(ValueError):
        model(Family.CP)
    with pytest.raises(ValueError):
        model(Family.CP, 2.0)
    for fam, lo in PARAM_MIN.items():
        assert default_model(fam).name


def test_spectral_model_validation():
    with pytest.raises(ValueError):
        SpectralModel(name="bad", d=2, A=0, B=1, C=0, R=T + 1)
    with pytest.raises(ValueError):
        SpectralModel(name="bad", d=3, A=1, B=0, C=0, R=T + 1)
    with pytest.raises(ValueError):
        SpectralModel(name="bad", d=1, A=1, B=0, C=0, R=Poly.const(1))


@pytest.mark.parametrize(
    "label,name",
    [("S2", "S^2"), ("S3", "S^3"), ("S5", "S^5"), ("s8", "S^8"), ("RP2", "RP^2"), ("RP3", "RP^3"),
     ("RP7", "RP^7"), ("CP3", "CP^3"), ("HP1", "HP^1"), ("HP3", "HP^3"), ("OP2", "OP^2"),
     ("OddSphere:4", "S^7"), ("CP:5", "CP^5")],
)
def test_parse_space(label, name):
    assert parse_space(label).name == name


@pytest.mark.parametrize("label", ["S1", "RP1", "OP3", "XY2", "S", "CP1", "HP0"])
def test_parse_space_rejects(label):
    with pytest.raises(ValueError):
        parse_space(label)


def test_parse_product():
    assert [m.name for m in parse_product("CP2xS3xHP1")] == ["CP^2", "S^3", "HP^1"]
    with pytest.raises(ValueError):
        parse_product("S2xxS3")


@given(st.sampled_from(SWEPT), st.integers(0, 10**6))
def test_alpha_and_multiplicity_agree_with_oracle(entry, k):
    m = entry[2]
    assert m.alpha(k) == alpha(m, k)
    assert m.multiplicity(k) == mult(m, k)
