"""Laplace spectra of the compact rank one symmetric spaces.

Every space here has eigenvalues ``alpha(k) = A k^2 + B k + C`` for
``k = 0, 1, 2, ...`` with multiplicity ``R(k)``, a polynomial of degree
``d - 1``.  The normalization of ``alpha`` is the one that falls out of the
heat-trace (zeta function) formulas, not the unit-curvature one.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

from .exactpoly import T, Poly, as_rational, poly_shift, product


class Family(str, enum.Enum):
    OddSphere = "OddSphere"
    S3 = "S3"
    EvenSphere = "EvenSphere"
    OddRP = "OddRP"
    RP3 = "RP3"
    EvenRP = "EvenRP"
    CP = "CP"
    HP = "HP"
    OP2 = "OP2"


# smallest admissible param, None for the fixed spaces
PARAM_MIN = {
    Family.OddSphere: 3,
    Family.S3: None,
    Family.EvenSphere: 1,
    Family.OddRP: 3,
    Family.RP3: None,
    Family.EvenRP: 1,
    Family.CP: 2,
    Family.HP: 2,
    Family.OP2: None,
}

# parameter sweeps used by the certificate suite and `catalog --param-sweep`
SWEEP = {
    Family.OddSphere: range(3, 13),
    Family.S3: (None,),
    Family.EvenSphere: range(1, 13),
    Family.OddRP: range(3, 13),
    Family.RP3: (None,),
    Family.EvenRP: range(1, 13),
    Family.CP: range(2, 13),
    Family.HP: range(2, 9),
    Family.OP2: (None,),
}


class CertificateError(ValueError):
    """Raised when an operation needs a W-manifold and the model is not one."""


@dataclass(frozen=True)
class SpectralModel:
    name: str
    d: int
    A: Fraction
    B: Fraction
    C: Fraction
    R: Poly

    def __post_init__(self):
        for f in ("A", "B", "C"):
            object.__setattr__(self, f, as_rational(getattr(self, f)))
        if not isinstance(self.d, int) or self.d < 2:
            raise ValueError(f"{self.name}: dimension must be an integer >= 2, got {self.d!r}")
        if self.A <= 0:
            raise ValueError(f"{self.name}: leading eigenvalue coefficient A must be positive")
        if self.R.degree != self.d - 1:
            raise ValueError(
                f"{self.name}: multiplicity polynomial has degree {self.R.degree}, expected {self.d - 1}"
            )
        # alpha increasing on k >= 0  <=>  alpha(1) > alpha(0), given A > 0
        if self.A + self.B <= 0:
            raise ValueError(f"{self.name}: alpha(k) is not strictly increasing on k >= 0")

    @property
    def alpha_poly(self) -> Poly:
        return Poly([self.C, self.B, self.A])

    def alpha(self, k: int) -> Fraction:
        return self.A * k * k + self.B * k + self.C

    def multiplicity(self, k: int) -> int:
        v = self.R.eval_int(k)
        if v.denominator != 1:
            raise ArithmeticError(f"{self.name}: R({k}) = {v} is not an integer")
        return v.numerator

    @property
    def shift(self) -> Fraction:
        """Vertex offset B/(2A) that recentres R."""
        return self.B / (2 * self.A)

    @property
    def Q(self) -> Poly:
        return poly_shift(self.R, self.shift)


@dataclass(frozen=True)
class WReport:
    Q: Poly
    shift: Fraction
    checked_coefficient: Fraction
    passed: bool


def _binomial_like(offsets_and_dens) -> Poly:
    # prod (k + a) / den over the given pairs
    return product((T + a) / den for a, den in offsets_and_dens)


def _alpha(model_name: str, num: Poly, den: int) -> tuple[Fraction, Fraction, Fraction]:
    a = num / den
    if a.degree != 2:
        raise AssertionError(f"{model_name}: eigenvalue polynomial must be quadratic")
    return a.coeff(2), a.coeff(1), a.coeff(0)


def _build(family: Family, p: int | None) -> tuple[str, int, Poly, Poly, int]:
    """Return (name, real dimension, R, alpha numerator, alpha denominator)."""
    k = T
    if family is Family.OddSphere:
        d = p
        R = (k + (d - 1)) / (d - 1) * _binomial_like((j, j) for j in range(1, 2 * d - 2))
        return f"S^{2 * d - 1}", 2 * d - 1, R, k * k + k * (2 * (d - 1)), 4 * (d - 1)
    if family is Family.S3:
        return "S^3", 3, (k + 1) ** 2, k * k + k * 2, 4
    if family is Family.EvenSphere:
        d = p
        R = (k * 2 + (2 * d - 1)) / (2 * d - 1) * _binomial_like((j, j) for j in range(1, 2 * d - 1))
        return f"S^{2 * d}", 2 * d, R, k * k + k * (2 * d - 1), 4 * d - 2
    if family is Family.OddRP:
        d = p
        R = (k * 2 + (d - 1)) / (d - 1) * product((k * 2 + j) / j for j in range(1, 2 * d - 2))
        return f"RP^{2 * d - 1}", 2 * d - 1, R, k * k + k * (d - 1), d - 1
    if family is Family.RP3:
        return "RP^3", 3, (k * 2 + 1) ** 2, k * k + k, 1
    if family is Family.EvenRP:
        d = p
        R = (k * 4 + (2 * d - 1)) / (2 * d - 1) * product((k * 2 + j) / j for j in range(1, 2 * d - 1))
        return f"RP^{2 * d}", 2 * d, R, k * k * 2 + k * (2 * d - 1), 2 * d - 1
    if family is Family.CP:
        d = p
        R = (k * 2 + d) / d * _binomial_like((j, j) for j in range(1, d)) ** 2
        return f"CP^{d}", 2 * d, R, k * k + k * d, d + 1
    if family is Family.HP:
        d = p
        R = (
            (k * 2 + (2 * d - 1)) / (2 * d - 1)
            * _binomial_like((j, j) for j in range(2, 2 * d - 1))
            * _binomial_like((l, l) for l in range(1, 2 * d - 2))
        )
        return f"HP^{d - 1}", 4 * d - 4, R, k * k + k * (2 * d - 1), 2 * (d + 1)
    if family is Family.OP2:
        R = (
            (k * 2 + 11) / 11
            * _binomial_like((j, j) for j in range(1, 4))
            * _binomial_like((l, l) for l in range(4, 8)) ** 2
            * _binomial_like((m, m) for m in range(8, 11))
        )
        return "OP^2", 16, R, k * k + k * 11, 18
    raise ValueError(f"unknown family {family!r}")


def model(family: Family | str, param: int | None = None) -> SpectralModel:
    """Spectral data of one CROSS.

    ``param`` is the family index used by the zeta-function formulas, so
    ``model("OddSphere", 3)`` is S^5 and ``model("HP", 2)`` is HP^1.  The
    fixed spaces S3, RP3 and OP2 ignore it.
    """
    family = Family(family)
    lo = PARAM_MIN[family]
    if lo is None:
        p = None
    else:
        if param is None:
            raise ValueError(f"{family.value} needs a parameter >= {lo}")
        if isinstance(param, bool) or not isinstance(param, int):
            raise ValueError(f"{family.value} parameter must be an integer, got {param!r}")
        if param < lo:
            hint = {
                Family.OddSphere: " (use S3 for the 3-sphere)",
                Family.OddRP: " (use RP3 for RP^3)",
                Family.CP: " (CP^1 is the 2-sphere, use EvenSphere 1)",
            }.get(family, "")
            raise ValueError(f"{family.value} parameter must be >= {lo}, got {param}{hint}")
        p = param
    name, dim, R, alpha_num, alpha_den = _build(family, p)
    A, B, C = _alpha(name, alpha_num, alpha_den)
    return SpectralModel(name=name, d=dim, A=A, B=B, C=C, R=R)


def default_model(family: Family | str) -> SpectralModel:
    family = Family(family)
    return model(family, PARAM_MIN[family])


def sweep_models() -> Iterator[tuple[Family, int | None, SpectralModel]]:
    for family, params in SWEEP.items():
        for p in params:
            yield family, p, model(family, p)


def w_verify(m: SpectralModel) -> WReport:
    """Check that the recentred multiplicity polynomial has no t^(d-2) term.

    In dimension 2 the recentred polynomial must be exactly ``C t``, so the
    constant term is the one reported.
    """
    s = m.shift
    Q = poly_shift(m.R, s)
    if m.d > 2:
        checked = Q.coeff(m.d - 2)
        ok = checked == 0
    else:
        checked = Q.coeff(0)
        ok = checked == 0 and Q == Poly.monomial(1, Q.coeff(1))
    return WReport(Q=Q, shift=s, checked_coefficient=checked, passed=ok)


def kappa(m: SpectralModel) -> Fraction:
    """Budget shift B^2/(4A) - C from completing the square in alpha."""
    return m.B * m.B / (4 * m.A) - m.C


def require_w(m: SpectralModel) -> WReport:
    rep = w_verify(m)
    if not rep.passed:
        raise CertificateError(
            f"{m.name} is not a W-manifold: coefficient {rep.checked_coefficient} does not vanish"
        )
    return rep


# -- space names -------------------------------------------------------------

def parse_space(name: str) -> SpectralModel:
    """Resolve a single-space label.

    Accepts manifold names (``S2``, ``S3``, ``S7``, ``RP2``, ``RP3``, ``CP3``,
    ``HP1``, ``OP2``) or explicit ``Family:param`` pairs (``OddSphere:4``).
    """
    raw = name.strip()
    if ":" in raw:
        fam, _, par = raw.partition(":")
        return model(Family(fam), int(par) if par else None)
    up = raw.upper()
    for prefix in ("RP", "CP", "HP", "OP", "S"):
        if up.startswith(prefix) and up[len(prefix):].isdigit():
            n = int(up[len(prefix):])
            break
    else:
        raise ValueError(f"unrecognised space {name!r}")
    if prefix == "S":
        if n < 2:
            raise ValueError("S^1 is excluded: spaces must have real dimension at least two")
        if n == 3:
            return model(Family.S3)
        return model(Family.OddSphere, (n + 1) // 2) if n % 2 else model(Family.EvenSphere, n // 2)
    if prefix == "RP":
        if n < 2:
            raise ValueError("RP^1 is excluded: spaces must have real dimension at least two")
        if n == 3:
            return model(Family.RP3)
        return model(Family.OddRP, (n + 1) // 2) if n % 2 else model(Family.EvenRP, n // 2)
    if prefix == "CP":
        return model(Family.CP, n)
    if prefix == "HP":
        if n < 1:
            raise ValueError("HP^n needs n >= 1")
        return model(Family.HP, n + 1)
    if n != 2:
        raise ValueError("only the octonionic projective plane OP2 exists")
    return model(Family.OP2)


def parse_product(name: str) -> list[SpectralModel]:
    """Split ``CP2xS3xHP1`` into single-space models."""
    parts = [p for p in name.replace("×", "x").split("x")]
    if any(not p for p in parts):
        raise ValueError(f"malformed product name {name!r}")
    return [parse_space(p) for p in parts]
