"""Exact eigenvalue counting for a single spectral model.

The threshold is always the exact rational ``Lambda = lambda**2``; the count
is the number of eigenvalues ``alpha(k) <= Lambda`` with multiplicity.
"""

from __future__ import annotations

import functools
import math
from fractions import Fraction

from .catalog import SpectralModel
from .exactpoly import Poly, as_rational, cumulative_poly


@functools.lru_cache(maxsize=256)
def alpha_integer_form(m: SpectralModel) -> tuple[int, int, int, int]:
    """Integers (a, b, c, D) with alpha(k) == (a k^2 + b k + c) / D."""
    D = math.lcm(m.A.denominator, m.B.denominator, m.C.denominator)
    return int(m.A * D), int(m.B * D), int(m.C * D), D


def k_max(m: SpectralModel, Lambda) -> int | None:
    """Largest k >= 0 with alpha(k) <= Lambda, or None if alpha(0) > Lambda."""
    L = as_rational(Lambda)
    a, b, c, D = alpha_integer_form(m)
    p, q = L.numerator, L.denominator
    # f(k) = q(a k^2 + b k + c) - D p <= 0
    qa, qb, qc = q * a, q * b, q * c - D * p
    if qc > 0:
        return None
    disc = qb * qb - 4 * qa * qc
    k = (math.isqrt(disc) - qb) // (2 * qa)
    if k < 0:
        k = 0

    def f(x):
        return (qa * x + qb) * x + qc

    while f(k + 1) <= 0:
        k += 1
    while k > 0 and f(k) > 0:
        k -= 1
    return k


def count_single(m: SpectralModel, Lambda) -> int:
    """Direct loop over eigenvalue indices; the reference implementation."""
    K = k_max(m, Lambda)
    if K is None:
        return 0
    return sum(m.multiplicity(k) for k in range(K + 1))


@functools.lru_cache(maxsize=256)
def cumulative_multiplicity(m: SpectralModel) -> Poly:
    """S(K) = R(0) + ... + R(K), expanded through power-sum polynomials."""
    return cumulative_poly(m.R)


def cumulative_count(m: SpectralModel, K: int | None) -> int:
    """Number of eigenvalues with index <= K, counted with multiplicity."""
    if K is None or K < 0:
        return 0
    v = cumulative_multiplicity(m).eval_int(K)
    if v.denominator != 1:
        raise ArithmeticError(f"{m.name}: cumulative multiplicity at {K} is not an integer")
    return v.numerator


def count_single_fast(m: SpectralModel, Lambda) -> int:
    """Closed-form count: one exact polynomial evaluation at k_max."""
    return cumulative_count(m, k_max(m, Lambda))


def jump_threshold(m: SpectralModel, k: int) -> Fraction:
    """The exact Lambda at which the count steps by R(k)."""
    return m.alpha(k)
