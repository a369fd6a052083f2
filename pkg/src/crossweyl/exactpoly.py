"""Exact rational scalars and dense univariate polynomials.

Scalars are :class:`fractions.Fraction` throughout; nothing in this module
rounds.  :class:`Poly` stores coefficients lowest degree first.
"""

from __future__ import annotations

import functools
import math
from fractions import Fraction
from typing import Iterable, Union

Rational = Fraction
Scalar = Union[int, Fraction]


def as_rational(x) -> Fraction:
    """Coerce ints, Fractions and decimal/ratio strings to a Fraction.

    Floats are rejected: they would smuggle binary rounding into exact code.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("bool is not a rational")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, float):
        raise TypeError("floats are not accepted as exact rationals; pass a str or Fraction")
    return Fraction(x)


class Poly:
    """Immutable polynomial with exact rational coefficients.

    ``Poly([c0, c1, c2])`` is ``c0 + c1*t + c2*t**2``.  Trailing zeros are
    dropped, so the zero polynomial has an empty coefficient tuple and
    ``degree`` is ``None``.
    """

    __slots__ = ("coeffs", "_intform", "_hash")

    def __init__(self, coeffs: Iterable[Scalar] = ()):
        cs = [as_rational(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))
        object.__setattr__(self, "_intform", None)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):
        raise AttributeError("Poly is immutable")

    # construction helpers
    @classmethod
    def const(cls, c: Scalar) -> "Poly":
        return cls([c])

    @classmethod
    def monomial(cls, n: int, c: Scalar = 1) -> "Poly":
        return cls([0] * n + [c])

    @classmethod
    def linear(cls, slope: Scalar, offset: Scalar) -> "Poly":
        """``slope*t + offset``."""
        return cls([offset, slope])

    # basic queries
    @property
    def degree(self) -> int | None:
        return len(self.coeffs) - 1 if self.coeffs else None

    def is_zero(self) -> bool:
        return not self.coeffs

    def coeff(self, i: int) -> Fraction:
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return Fraction(0)

    @property
    def leading(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def __len__(self):
        return len(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self.coeffs == Poly.const(other).coeffs
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            object.__setattr__(self, "_hash", hash(self.coeffs))
        return self._hash

    def __reduce__(self):
        return (Poly, (self.coeffs,))

    # ring operations
    def __add__(self, other):
        other = _lift(other)
        if other is None:
            return NotImplemented
        n = max(len(self.coeffs), len(other.coeffs))
        return Poly(self.coeff(i) + other.coeff(i) for i in range(n))

    __radd__ = __add__

    def __neg__(self):
        return Poly(-c for c in self.coeffs)

    def __sub__(self, other):
        other = _lift(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = _lift(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return Poly(c * other for c in self.coeffs)
        if not isinstance(other, Poly):
            return NotImplemented
        if not self.coeffs or not other.coeffs:
            return Poly()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return Poly(out)

    __rmul__ = __mul__

    def __truediv__(self, c):
        if isinstance(c, (int, Fraction)) and not isinstance(c, bool):
            if c == 0:
                raise ZeroDivisionError("polynomial divided by zero")
            inv = 1 / Fraction(c)
            return Poly(x * inv for x in self.coeffs)
        return NotImplemented

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("only non-negative integer powers are supported")
        result, base = Poly.const(1), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # evaluation
    def __call__(self, x):
        return poly_eval(self, x)

    def integer_form(self) -> tuple[tuple[int, ...], int]:
        """Return ``(nums, den)`` with ``self(t) == sum(nums[i] t**i) / den``."""
        if self._intform is None:
            den = 1
            for c in self.coeffs:
                den = den * c.denominator // math.gcd(den, c.denominator)
            nums = tuple(int(c * den) for c in self.coeffs)
            object.__setattr__(self, "_intform", (nums, den))
        return self._intform

    def eval_int(self, n: int) -> Fraction:
        """Exact value at an integer argument using integer Horner steps."""
        nums, den = self.integer_form()
        acc = 0
        for c in reversed(nums):
            acc = acc * n + c
        return Fraction(acc, den)

    def shift(self, s: Scalar) -> "Poly":
        return poly_shift(self, s)

    def __repr__(self):
        return f"Poly({[str(c) for c in self.coeffs]})"

    def format(self, var: str = "t") -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for i in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[i]
            if c == 0:
                continue
            sign = "-" if c < 0 else "+"
            mag = -c if c < 0 else c
            if i == 0:
                body = str(mag)
            else:
                mono = var if i == 1 else f"{var}^{i}"
                body = mono if mag == 1 else f"{mag}*{mono}"
            parts.append((sign, body))
        first_sign, first = parts[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    __str__ = format


def _lift(x) -> Poly | None:
    if isinstance(x, Poly):
        return x
    if isinstance(x, (int, Fraction)) and not isinstance(x, bool):
        return Poly.const(x)
    return None


T = Poly.monomial(1)


def poly_eval(p: Poly, x: Scalar) -> Fraction:
    """Horner evaluation, exact."""
    x = as_rational(x)
    if x.denominator == 1:
        return p.eval_int(x.numerator)
    acc = Fraction(0)
    for c in reversed(p.coeffs):
        acc = acc * x + c
    return acc


def poly_add(p: Poly, q: Poly) -> Poly:
    return p + q


def poly_mul(p: Poly, q: Poly) -> Poly:
    return p * q


def poly_scale(p: Poly, c: Scalar) -> Poly:
    return p * as_rational(c)


def poly_shift(p: Poly, s: Scalar) -> Poly:
    """Return ``q`` with ``q(t) == p(t - s)``.

    Horner's scheme in the ring: q = (...((c_n)(t-s) + c_{n-1})(t-s) + ...).
    """
    s = as_rational(s)
    if s == 0 or p.degree is None or p.degree == 0:
        return p
    acc: list[Fraction] = []
    for c in reversed(p.coeffs):
        # acc <- acc * (t - s) + c
        nxt = [Fraction(0)] * (len(acc) + 1)
        for i, a in enumerate(acc):
            nxt[i + 1] += a
            nxt[i] -= a * s
        nxt[0] += c
        acc = nxt
    return Poly(acc)


def product(factors: Iterable[Poly]) -> Poly:
    out = Poly.const(1)
    for f in factors:
        out = out * f
    return out


@functools.lru_cache(maxsize=None)
def power_sum_poly(k: int) -> Poly:
    """Polynomial P with P(n) == 1**(k-1) + 2**(k-1) + ... + n**(k-1).

    Built from the telescoping identity
    (n+1)**k - 1 == sum_{j=0}^{k-1} binom(k, j) * psi_{j+1}(n), solved for psi_k.
    """
    if not isinstance(k, int) or isinstance(k, bool) or k < 1:
        raise ValueError(f"power_sum_poly needs an integer k >= 1, got {k!r}")
    if k == 1:
        return T
    rhs = (T + 1) ** k - 1
    for j in range(k - 1):
        rhs = rhs - power_sum_poly(j + 1) * math.comb(k, j)
    return rhs / k


def cumulative_poly(p: Poly) -> Poly:
    """Polynomial S with S(K) == p(0) + p(1) + ... + p(K) for integers K >= 0."""
    out = Poly.const(p.coeff(0))
    for j, c in enumerate(p.coeffs):
        if c:
            out = out + power_sum_poly(j + 1) * c
    return out


def shifted_cumulative_poly(p: Poly, y: Scalar) -> Poly:
    """Polynomial G with G(J) == sum_{j=0}^{J} p(y + j) for integers J >= 0."""
    return cumulative_poly(poly_shift(p, -as_rational(y)))

