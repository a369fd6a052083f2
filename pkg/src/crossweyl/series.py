"""Sampled counting functions and their Weyl remainders."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import mpmath
import numpy as np

# counts below this are handled in double precision; the cancellation
# N - c1*lambda^d loses nothing measurable there
FLOAT_SAFE_COUNT = 2**50


def _mpf_rational(x: Fraction) -> mpmath.mpf:
    return mpmath.mpf(x.numerator) / x.denominator


def main_terms(lambda2: Sequence[Fraction], c1, d: int, counts: Sequence[int] | None = None):
    """c1 * lambda^d at each exact lambda^2, plus the working precision used.

    Returns a list of mpf values when extended precision is needed and a
    float array otherwise.
    """
    biggest = max(counts, default=0) if counts is not None else 0
    top = max(lambda2, default=Fraction(0))
    small = top == 0 or float(c1) <= 0 or (
        math.log(float(c1)) + (d / 2) * math.log(top) < math.log(FLOAT_SAFE_COUNT)
    )
    if biggest < FLOAT_SAFE_COUNT and small:
        L = np.array([float(x) for x in lambda2], dtype=float)
        return float(c1) * L ** (d / 2), None
    digits = max(len(str(biggest)), 1) + 25
    with mpmath.workdps(digits):
        c = mpmath.mpf(c1)
        half = mpmath.mpf(d) / 2
        return [c * _mpf_rational(x) ** half for x in lambda2], digits


def remainders_of(lambda2: Sequence[Fraction], counts: Sequence[int], c1, d: int) -> tuple[float, ...]:
    mains, digits = main_terms(lambda2, c1, d, counts)
    if digits is None:
        return tuple(float(n) - float(m) for n, m in zip(counts, mains))
    with mpmath.workdps(digits):
        return tuple(float(mpmath.mpf(n) - m) for n, m in zip(counts, mains))


@dataclass(frozen=True)
class CountSeries:
    """Exact counts N(lambda) on a lambda grid with their Weyl remainders.

    ``lambda2`` holds the exact thresholds lambda^2; ``lambdas`` are their
    float square roots.  ``left_counts`` (optional) are the left limits
    N(lambda-) and are filled in for jump-point series.
    """

    lambda2: tuple[Fraction, ...]
    counts: tuple[int, ...]
    c1: object
    d: int
    left_counts: tuple[int, ...] | None = None
    label: str = ""
    lambdas: tuple[float, ...] = field(init=False, repr=False)
    remainders: tuple[float, ...] = field(init=False, repr=False)
    left_remainders: tuple[float, ...] | None = field(init=False, repr=False)

    def __post_init__(self):
        lambda2 = tuple(Fraction(x) for x in self.lambda2)
        counts = tuple(int(n) for n in self.counts)
        object.__setattr__(self, "lambda2", lambda2)
        object.__setattr__(self, "counts", counts)
        if len(lambda2) != len(counts):
            raise ValueError("lambda2 and counts differ in length")
        if any(b <= a for a, b in zip(lambda2, lambda2[1:])):
            raise ValueError("lambda grid must be strictly increasing")
        if lambda2 and lambda2[0] < 0:
            raise ValueError("lambda grid must be non-negative")
        object.__setattr__(self, "lambdas", tuple(math.sqrt(x) for x in lambda2))
        object.__setattr__(self, "remainders", remainders_of(lambda2, counts, self.c1, self.d))
        if self.left_counts is not None:
            left = tuple(int(n) for n in self.left_counts)
            if len(left) != len(counts):
                raise ValueError("left_counts and counts differ in length")
            object.__setattr__(self, "left_counts", left)
            object.__setattr__(self, "left_remainders", remainders_of(lambda2, left, self.c1, self.d))
        else:
            object.__setattr__(self, "left_remainders", None)

    def __len__(self):
        return len(self.counts)

    def main_term(self, i: int) -> float:
        return self.counts[i] - self.remainders[i]

    def normalized_remainders(self, left: bool = False) -> tuple[float, ...]:
        rem = self.left_remainders if left else self.remainders
        if rem is None:
            raise ValueError("series has no left limits")
        return tuple(
            r / lam ** (self.d - 1) if lam > 0 else math.nan for r, lam in zip(rem, self.lambdas)
        )

    def rows(self):
        """(lambda, count, main_term, remainder, normalized_remainder) per point."""
        for lam, n, r, nr in zip(self.lambdas, self.counts, self.remainders, self.normalized_remainders()):
            yield lam, n, float(n) - r, r, nr
