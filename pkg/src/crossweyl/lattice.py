"""Eigenvalue counting on product spaces and weighted ellipsoid lattice sums.

A product ``M_1 x ... x M_n`` has eigenvalues ``alpha_1(k_1) + ... +
alpha_n(k_n)`` with multiplicity ``R_1(k_1) ... R_n(k_n)``.  Counting walks
the outer indices depth first and resolves the innermost index with the
closed-form cumulative multiplicity, so a point costs O(lambda^(n-1)).

Every enumeration kernel splits its outermost index range into contiguous
chunks.  Partial results are exact integers (or rationals) added in chunk
order, so results do not depend on the number of workers.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import mpmath
import numpy as np

from .catalog import SpectralModel, kappa
from .counting import alpha_integer_form, count_single_fast, cumulative_count, k_max
from .exactpoly import Poly, as_rational, shifted_cumulative_poly
from .series import CountSeries

THREADS_ENV = "CROSSWEYL_THREADS"


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


# -- types ---------------------------------------------------------------------

@dataclass(frozen=True)
class LatticeSpec:
    """Weighted lattice slice sum over m_i - y_i in Z>=0, sum P_i m_i^2 <= lambda^2.

    The weight is prod m_i^pow_i; ``pow_i`` plays the role of d_i - 1.
    """

    P: tuple[Fraction, ...]
    y: tuple[Fraction, ...]
    pow: tuple[int, ...]

    def __post_init__(self):
        P = tuple(as_rational(p) for p in self.P)
        y = tuple(as_rational(v) for v in self.y)
        pw = tuple(int(e) for e in self.pow)
        if not (len(P) == len(y) == len(pw)) or not P:
            raise ValueError("P, y and pow must be non-empty and of equal length")
        if any(p <= 0 for p in P):
            raise ValueError("all weights P_i must be positive")
        if any(e < 1 for e in pw):
            raise ValueError("all exponents must be >= 1")
        object.__setattr__(self, "P", P)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "pow", pw)

    @property
    def n(self) -> int:
        return len(self.P)

    @property
    def d(self) -> int:
        return sum(self.pow) + self.n


@dataclass(frozen=True)
class ProductModel:
    factors: tuple[SpectralModel, ...]
    d: int
    kappa_total: Fraction

    @property
    def name(self) -> str:
        return " x ".join(f.name for f in self.factors)


def product_model(factors: Sequence[SpectralModel]) -> ProductModel:
    factors = tuple(factors)
    if not factors:
        raise ValueError("a product needs at least one factor")
    return ProductModel(
        factors=factors,
        d=sum(f.d for f in factors),
        kappa_total=sum((kappa(f) for f in factors), Fraction(0)),
    )


# -- scaled integer form of a product ----------------------------------------

@dataclass(frozen=True)
class _Factor:
    a: int  # scaled alpha(k) = a k^2 + b k + c
    b: int
    c: int
    model: SpectralModel


def _scaled(factors: Sequence[SpectralModel], extra_den: int = 1) -> tuple[list[_Factor], int]:
    """Integer alpha coefficients under one common scale S (times extra_den)."""
    forms = [alpha_integer_form(f) for f in factors]
    S = math.lcm(extra_den, *(D for *_, D in forms))
    out = []
    for f, (a, b, c, D) in zip(factors, forms):
        s = S // D
        out.append(_Factor(a * s, b * s, c * s, f))
    return out, S


def _kmax_int(f: _Factor, r: int) -> int:
    """Largest k >= 0 with a k^2 + b k + c <= r, or -1."""
    a, b, c = f.a, f.b, f.c
    cc = c - r
    if cc > 0:
        return -1
    k = (math.isqrt(b * b - 4 * a * cc) - b) // (2 * a)
    if k < 0:
        k = 0
    while (a * (k + 1) + b) * (k + 1) + cc <= 0:
        k += 1
    while k > 0 and (a * k + b) * k + cc > 0:
        k -= 1
    return k


def _order(factors: Sequence[SpectralModel]) -> list[SpectralModel]:
    # outermost = largest A (fewest iterations); innermost = smallest A,
    # the one with the most indices, gets the closed form
    return sorted(factors, key=lambda f: f.A, reverse=True)


def _multiplicity_table(m: SpectralModel, K: int) -> list[int]:
    nums, den = m.R.integer_form()
    out = []
    for k in range(K + 1):
        acc = 0
        for c in reversed(nums):
            acc = acc * k + c
        out.append(acc // den)
    return out


def _chunks(n_items: int, n_chunks: int) -> list[range]:
    n_chunks = max(1, min(n_chunks, n_items))
    step, extra = divmod(n_items, n_chunks)
    out, start = [], 0
    for i in range(n_chunks):
        size = step + (1 if i < extra else 0)
        out.append(range(start, start + size))
        start += size
    return out


def _run_chunks(fn, args_list, workers: int):
    if workers <= 1 or len(args_list) <= 1:
        return [fn(*a) for a in args_list]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futs = [pool.submit(fn, *a) for a in args_list]
        return [f.result() for f in futs]


# -- pointwise product count ---------------------------------------------------

def _count_tail(fs: list[_Factor], tables: list[list[int]], i: int, r: int) -> int:
    """Count over factors i.. with scaled budget r."""
    inner = fs[-1]
    if i == len(fs) - 1:
        return cumulative_count(inner.model, _kmax_int(inner, r))
    f = fs[i]
    rest_min = sum(g.c for g in fs[i + 1:])
    K = _kmax_int(f, r - rest_min)
    tab = tables[i]
    total = 0
    a, b, c = f.a, f.b, f.c
    for k in range(K + 1):
        total += tab[k] * _count_tail(fs, tables, i + 1, r - ((a * k + b) * k + c))
    return total


def _count_chunk(factors: tuple[SpectralModel, ...], Lambda: Fraction, krange: range) -> int:
    fs, S = _scaled(factors, Lambda.denominator)
    r = Lambda.numerator * (S // Lambda.denominator)
    tables = [_multiplicity_table(f.model, max(_kmax_int(f, r - sum(g.c for g in fs) + f.c), 0))
              for f in fs[:-1]]
    f0 = fs[0]
    total = 0
    for k in krange:
        total += tables[0][k] * _count_tail(fs, tables, 1, r - ((f0.a * k + f0.b) * k + f0.c))
    return total


def count_product(pm: ProductModel, Lambda, workers: int | None = None) -> int:
    """Exact N(lambda) for a product space at threshold Lambda = lambda^2."""
    L = as_rational(Lambda)
    factors = tuple(_order(pm.factors))
    if len(factors) == 1:
        return count_single_fast(factors[0], L)
    fs, S = _scaled(factors, L.denominator)
    r = L.numerator * (S // L.denominator)
    K0 = _kmax_int(fs[0], r - sum(g.c for g in fs[1:]))
    if K0 < 0:
        return 0
    workers = default_workers() if workers is None else workers
    parts = _chunks(K0 + 1, max(1, workers))
    return sum(_run_chunks(_count_chunk, [(factors, L, kr) for kr in parts], workers))


# -- batched series kernel -----------------------------------------------------

_INT64_HEADROOM = 2**60


def _series_chunk(factors: tuple[SpectralModel, ...], L: list[int], S: int, krange: range) -> list[int]:
    fs, S2 = _scaled(factors, S)
    assert S2 == S
    Lmax = L[-1]
    inner = fs[-1]
    Kin = _kmax_int(inner, Lmax - sum(g.c for g in fs[:-1]))
    acc = np.zeros(len(L), dtype=object)
    if Kin < 0:
        return [0] * len(L)
    ks = np.arange(Kin + 2, dtype=np.int64)
    # scaled inner eigenvalues, strictly increasing: searchsorted gives k_max + 1
    alpha_in = (inner.a * ks + inner.b) * ks + inner.c
    cum = np.empty(Kin + 2, dtype=object)
    cum[0] = 0
    running = 0
    for k, mult in enumerate(_multiplicity_table(inner.model, Kin)):
        running += mult
        cum[k + 1] = running
    Larr = np.asarray(L, dtype=np.int64)
    outer = fs[:-1]
    tables = [_multiplicity_table(f.model, max(_kmax_int(f, Lmax - sum(g.c for g in fs) + f.c), 0))
              for f in outer]
    amin_in = int(alpha_in[0])

    def visit(i: int, E: int, w: int):
        if i == len(outer):
            j0 = int(np.searchsorted(Larr, E + amin_in, side="left"))
            if j0 >= len(L):
                return
            idx = np.searchsorted(alpha_in, Larr[j0:] - E, side="right")
            acc[j0:] += cum[idx] * w
            return
        f = outer[i]
        rest_min = sum(g.c for g in fs[i + 1:])
        K = _kmax_int(f, Lmax - E - rest_min)
        rng = krange if i == 0 else range(K + 1)
        tab = tables[i]
        for k in rng:
            if k > K:
                break
            visit(i + 1, E + (f.a * k + f.b) * k + f.c, w * tab[k])

    visit(0, 0, 1)
    return [int(x) for x in acc]


def _series_counts(pm: ProductModel, lambda2: list[Fraction], workers: int) -> list[int]:
    factors = tuple(_order(pm.factors))
    if len(factors) == 1:
        return [count_single_fast(factors[0], x) for x in lambda2]
    den = math.lcm(*(x.denominator for x in lambda2))
    _, S = _scaled(factors, den)
    L = [int(x * S) for x in lambda2]
    if 8 * L[-1] >= _INT64_HEADROOM:
        return [count_product(pm, x, workers=workers) for x in lambda2]
    fs, _ = _scaled(factors, S)
    K0 = _kmax_int(fs[0], L[-1] - sum(g.c for g in fs[1:]))
    if K0 < 0:
        return [0] * len(L)
    parts = _chunks(K0 + 1, max(1, workers))
    partials = _run_chunks(_series_chunk, [(factors, L, S, kr) for kr in parts], workers)
    return [sum(col) for col in zip(*partials)]


def count_product_series(
    pm: ProductModel, lam_grid: Sequence, workers: int | None = None, c1=None
) -> CountSeries:
    """Counts at every lambda of an increasing rational grid in one enumeration.

    The Weyl remainders use ``c1`` if given, else the main-term coefficient
    from the transformed lattice problem.
    """
    lams = [as_rational(x) for x in lam_grid]
    if any(x < 0 for x in lams):
        raise ValueError("lambda grid must be non-negative")
    if any(b <= a for a, b in zip(lams, lams[1:])):
        raise ValueError("lambda grid must be strictly increasing")
    if c1 is None:
        c1 = product_c1(pm)
    if not lams:
        return CountSeries(lambda2=(), counts=(), c1=c1, d=pm.d, label=pm.name)
    workers = default_workers() if workers is None else workers
    lambda2 = [x * x for x in lams]
    counts = _series_counts(pm, lambda2, workers)
    return CountSeries(lambda2=tuple(lambda2), counts=tuple(counts), c1=c1, d=pm.d, label=pm.name)


# -- weighted shifted-lattice sums --------------------------------------------

def _float_sqrt(x: Fraction) -> float:
    return math.sqrt(x.numerator / x.denominator) if x > 0 else 0.0


def _index_interval(y: Fraction, u: Fraction) -> tuple[int, int]:
    """Integers j >= 0 with (y + j)^2 <= u, as an inclusive range (lo, hi)."""
    if u < 0:
        return 0, -1

    def inside(j: int) -> bool:
        t = y + j
        return t * t <= u

    s = _float_sqrt(u)
    # hi: largest j with y + j <= sqrt(u)
    hi = math.floor(s - y)
    while inside(hi + 1) or y + hi + 1 <= 0:
        hi += 1
    while hi >= 0 and not inside(hi) and y + hi > 0:
        hi -= 1
    if hi < 0:
        return 0, -1
    lo = max(0, math.ceil(-s - y))
    while lo > 0 and inside(lo - 1):
        lo -= 1
    while lo <= hi and not inside(lo):
        lo += 1
    return lo, hi


def _poly_tail(G: Poly, lo: int, hi: int) -> Fraction:
    if hi < lo:
        return Fraction(0)
    top = G.eval_int(hi)
    return top - G.eval_int(lo - 1) if lo > 0 else top


def _lattice_chunk(P, y, weights, budget, jrange) -> Fraction:
    n = len(P)
    G_last = shifted_cumulative_poly(weights[-1], y[-1])

    def visit(i: int, r: Fraction) -> Fraction:
        if i == n - 1:
            lo, hi = _index_interval(y[i], r / P[i])
            return _poly_tail(G_last, lo, hi)
        lo, hi = _index_interval(y[i], r / P[i])
        total = Fraction(0)
        for j in (jrange if i == 0 else range(lo, hi + 1)):
            if j < lo or j > hi:
                continue
            m = y[i] + j
            w = weights[i](m)
            if w:
                total += w * visit(i + 1, r - P[i] * m * m)
        return total

    return visit(0, budget)


def lattice_sum(P, y, weights: Sequence[Poly], budget, workers: int = 1) -> Fraction:
    """Sum of prod weights_i(m_i) over m_i - y_i in Z>=0 with sum P_i m_i^2 <= budget."""
    P = [as_rational(p) for p in P]
    y = [as_rational(v) for v in y]
    budget = as_rational(budget)
    lo, hi = _index_interval(y[0], budget / P[0])
    if hi < lo:
        return Fraction(0)
    parts = [range(c.start + lo, c.stop + lo) for c in _chunks(hi - lo + 1, max(1, workers))]
    return sum(_run_chunks(_lattice_chunk, [(P, y, list(weights), budget, jr) for jr in parts], workers),
               Fraction(0))


def weighted_sum(spec: LatticeSpec, lam, workers: int = 1) -> Fraction:
    """Sum of prod m_i^pow_i over the shifted lattice slice of radius lambda."""
    lam = as_rational(lam)
    if lam < 0:
        raise ValueError("lambda must be non-negative")
    weights = [Poly.monomial(e) for e in spec.pow]
    return lattice_sum(spec.P, spec.y, weights, lam * lam, workers=workers)


def transformed_count(pm: ProductModel, Lambda) -> Fraction:
    """N(lambda) recomputed after recentring every index at its vertex.

    Substitutes m_i = k_i + B_i/(2A_i): the constraint becomes the ellipsoid
    sum A_i m_i^2 <= Lambda + kappa and the weights become the Q polynomials.
    """
    L = as_rational(Lambda)
    fs = pm.factors
    return lattice_sum(
        [f.A for f in fs], [f.shift for f in fs], [f.Q for f in fs], L + pm.kappa_total
    )


# -- main term -----------------------------------------------------------------

def _gamma_half(n: int) -> tuple[Fraction, int]:
    """Gamma(n/2) = r * sqrt(pi)^e  with e in {0, 1}, for integers n >= 1."""
    if n % 2 == 0:
        return Fraction(math.factorial(n // 2 - 1)), 0
    r = Fraction(1)  # Gamma(1/2) = sqrt(pi)
    x = Fraction(1, 2)
    while x < Fraction(n, 2):
        r *= x
        x += 1
    return r, 1


def main_term_exact(spec: LatticeSpec) -> tuple[Fraction, int, Fraction]:
    """(r, e, q) with main-term coefficient r * pi^(e/2) / sqrt(q).

    The coefficient is the Dirichlet integral
    prod Gamma(d_i/2) / (2^n Gamma(d/2 + 1) prod P_i^(d_i/2)).
    """
    r, e, q = Fraction(1, 2 ** spec.n), 0, Fraction(1)
    for p, pw in zip(spec.P, spec.pow):
        di = pw + 1
        g, ge = _gamma_half(di)
        r *= g / p ** (di // 2)
        e += ge
        if di % 2:
            q *= p
    g, ge = _gamma_half(spec.d + 2)
    r /= g
    e -= ge
    return r, e, q


def main_term_mp(spec: LatticeSpec, dps: int = 40) -> mpmath.mpf:
    r, e, q = main_term_exact(spec)
    with mpmath.workdps(dps):
        return (mpmath.mpf(r.numerator) / r.denominator) * mpmath.sqrt(mpmath.pi) ** e / mpmath.sqrt(
            mpmath.mpf(q.numerator) / q.denominator
        )


def main_term_coeff(spec: LatticeSpec) -> float:
    """Coefficient of lambda^d in the asymptotics of weighted_sum(spec, lambda)."""
    return float(main_term_mp(spec))


def transformed_spec(pm: ProductModel) -> LatticeSpec:
    """Lattice problem left after recentring: weights A_i, exponents d_i - 1."""
    return LatticeSpec(
        P=tuple(f.A for f in pm.factors),
        y=tuple(f.shift for f in pm.factors),
        pow=tuple(f.d - 1 for f in pm.factors),
    )


def product_c1(pm: ProductModel, dps: int = 40) -> mpmath.mpf:
    """Leading Weyl coefficient of a product through the transformed lattice integral."""
    with mpmath.workdps(dps):
        lead = mpmath.mpf(1)
        for f in pm.factors:
            c = f.Q.leading
            lead *= mpmath.mpf(c.numerator) / c.denominator
        return lead * main_term_mp(transformed_spec(pm), dps)
