"""Two-term Weyl asymptotics, remainder envelopes and sharpness statistics."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import mpmath
import numpy as np

from .catalog import SpectralModel, kappa, require_w
from .counting import cumulative_count
from .lattice import ProductModel, count_product_series, product_c1
from .series import CountSeries, remainders_of

DEFAULT_WINDOW_RATIO = 1.5
MIN_WINDOWS = 5


class DegenerateSeriesError(ValueError):
    """The remainder envelope vanishes, so no exponent can be fitted."""


@dataclass(frozen=True)
class TwoTermCoeffs:
    c1: float
    c2: float
    a: Fraction
    b: Fraction


@dataclass(frozen=True)
class FitReport:
    exponent: float
    intercept: float
    windows: tuple[tuple[float, float], ...]
    r_squared: float
    bounds: tuple[tuple[float, float], ...] = ()
    residuals: tuple[float, ...] = ()


def _mpq(x: Fraction) -> mpmath.mpf:
    return mpmath.mpf(x.numerator) / x.denominator


def two_term_mp(m: SpectralModel, dps: int = 40) -> tuple[mpmath.mpf, mpmath.mpf]:
    """(c1, c2) = (C / (d A^(d/2)), C / (2 A^((d-1)/2))) at working precision dps."""
    require_w(m)
    C = m.Q.leading
    with mpmath.workdps(dps):
        A, Cm = _mpq(m.A), _mpq(C)
        c1 = Cm / (m.d * A ** (mpmath.mpf(m.d) / 2))
        c2 = Cm / (2 * A ** (mpmath.mpf(m.d - 1) / 2))
        return c1, c2


def two_term_coeffs(m: SpectralModel) -> TwoTermCoeffs:
    """Coefficients of lambda^d and lambda^(d-1) in N(lambda) for a W-manifold.

    Raises CertificateError when the recentred multiplicity polynomial keeps
    its t^(d-2) term.
    """
    c1, c2 = two_term_mp(m)
    return TwoTermCoeffs(c1=float(c1), c2=float(c2), a=Fraction(1), b=kappa(m))


# -- series builders -------------------------------------------------------------

def jump_series(m: SpectralModel, k_stop: int, k_start: int = 1, c1=None) -> CountSeries:
    """Counts at every jump lambda_k = sqrt(alpha(k)), k_start <= k <= k_stop.

    ``counts`` are taken inclusively at the jump; ``left_counts`` hold the
    value just before it.
    """
    if k_start < 0 or k_stop < k_start:
        raise ValueError("need 0 <= k_start <= k_stop")
    if c1 is None:
        c1 = two_term_mp(m)[0]
    nums, den = m.R.integer_form()
    left = cumulative_count(m, k_start - 1)
    lambda2, counts, lefts = [], [], []
    for k in range(k_start, k_stop + 1):
        acc = 0
        for c in reversed(nums):
            acc = acc * k + c
        right = left + acc // den
        lambda2.append(m.alpha(k))
        counts.append(right)
        lefts.append(left)
        left = right
    return CountSeries(
        lambda2=tuple(lambda2), counts=tuple(counts), c1=c1, d=m.d, left_counts=tuple(lefts), label=m.name
    )


def geometric_grid(lmin, lmax, points: int, denominator: int = 1000) -> list[Fraction]:
    """About ``points`` geometrically spaced rationals in [lmin, lmax]."""
    lo, hi = float(lmin), float(lmax)
    if not (0 < lo < hi) or points < 2:
        raise ValueError("need 0 < lmin < lmax and at least two points")
    xs = np.geomspace(lo, hi, points)
    return sorted({Fraction(int(round(x * denominator)), denominator) for x in xs})


def product_series(pm: ProductModel, lmin, lmax, points: int = 2000, workers: int | None = None) -> CountSeries:
    return count_product_series(pm, geometric_grid(lmin, lmax, points), workers=workers)


# -- windows and fits -----------------------------------------------------------------

def geometric_windows(lams: Sequence[float], ratio: float) -> list[tuple[float, float, np.ndarray]]:
    """Windows (hi/ratio, hi] anchored at the largest lambda, full windows only.

    Returned in increasing lambda order with the indices they contain.
    """
    if ratio <= 1:
        raise ValueError("window ratio must exceed 1")
    lam = np.asarray(lams, dtype=float)
    pos = lam > 0
    if not pos.any():
        return []
    lmin, hi = lam[pos].min(), lam.max()
    out = []
    while hi / ratio >= lmin * (1 - 1e-12):
        lo = hi / ratio
        idx = np.nonzero((lam > lo) & (lam <= hi))[0]
        out.append((lo, hi, idx))
        hi = lo
    out.reverse()
    return out


def fit_exponent(series: CountSeries, window_ratio: float = DEFAULT_WINDOW_RATIO) -> FitReport:
    """Slope of log(max |remainder| per window) against log(window centre)."""
    wins = [w for w in geometric_windows(series.lambdas, window_ratio) if len(w[2])]
    if len(wins) < MIN_WINDOWS:
        raise ValueError(f"need at least {MIN_WINDOWS} non-empty windows, got {len(wins)}")
    rem = np.abs(np.asarray(series.remainders, dtype=float))
    mids, envs, bounds = [], [], []
    for lo, hi, idx in wins:
        env = float(rem[idx].max())
        if env > 0:
            mids.append(math.sqrt(lo * hi))
            envs.append(env)
            bounds.append((lo, hi))
    if len(envs) < MIN_WINDOWS:
        raise DegenerateSeriesError(
            f"remainder envelope vanishes in {len(wins) - len(envs)} of {len(wins)} windows"
        )
    x, y = np.log(mids), np.log(envs)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 - float((resid ** 2).sum()) / ss_tot if ss_tot > 0 else 1.0
    return FitReport(
        exponent=float(slope),
        intercept=float(intercept),
        windows=tuple(zip(mids, envs)),
        r_squared=r2,
        bounds=tuple(bounds),
        residuals=tuple(float(r) for r in resid),
    )


def sharpness_stat(series: CountSeries, window_ratio: float = 2.0) -> list[tuple[tuple[float, float], float]]:
    """Per window, max of |remainder| / lambda^(d-1) over both sides of each jump."""
    wins = [w for w in geometric_windows(series.lambdas, window_ratio) if len(w[2])]
    if len(wins) < MIN_WINDOWS:
        raise ValueError(f"need at least {MIN_WINDOWS} non-empty windows, got {len(wins)}")
    norm = np.abs(np.asarray(series.normalized_remainders(), dtype=float))
    if series.left_remainders is not None:
        norm = np.maximum(norm, np.abs(np.asarray(series.normalized_remainders(left=True), dtype=float)))
    return [((lo, hi), float(norm[idx].max())) for lo, hi, idx in wins]


def non_decaying(stats: Sequence[tuple[tuple[float, float], float]], fraction: float = 0.5) -> bool:
    """Last window maximum is at least ``fraction`` of the largest one."""
    vals = [v for _, v in stats]
    return bool(vals) and vals[-1] >= fraction * max(vals) and max(vals) > 0


def second_order_convergence(m: SpectralModel, k_range: Iterable[int]) -> list[float]:
    """(N(lambda_k) - c1 lambda_k^d) / lambda_k^(d-1) at the jumps lambda_k = sqrt(alpha(k))."""
    c1, _ = two_term_mp(m)
    ks = [k for k in k_range]
    if any(k < 1 for k in ks):
        raise ValueError("jump indices must be >= 1")
    lambda2 = [m.alpha(k) for k in ks]
    counts = [cumulative_count(m, k) for k in ks]
    rems = remainders_of(lambda2, counts, c1, m.d)
    return [r / math.sqrt(x) ** (m.d - 1) for r, x in zip(rems, lambda2)]


# -- leading coefficient cross-checks ------------------------------------------

def regress_c1(series: CountSeries, lmin: float | None = None, lmax: float | None = None) -> float:
    """Least-squares slope of counts against lambda^d (with intercept)."""
    lam = np.asarray(series.lambdas, dtype=float)
    sel = np.ones(len(lam), dtype=bool)
    if lmin is not None:
        sel &= lam >= lmin
    if lmax is not None:
        sel &= lam <= lmax
    if sel.sum() < 2:
        raise ValueError("need at least two points for a regression")
    x = lam[sel] ** series.d
    y = np.asarray([float(n) for n in np.asarray(series.counts, dtype=object)[sel]])
    scale = x.max()
    slope, _ = np.polyfit(x / scale, y / scale, 1)
    return float(slope)


def dirichlet_c1(pm: ProductModel) -> float:
    """Product leading coefficient from the factor coefficients alone.

    Convolving N_i(x) ~ c1_i x^(d_i) over the quarter ball gives
    prod(c1_i Gamma(d_i/2 + 1)) / Gamma(d/2 + 1).
    """
    with mpmath.workdps(40):
        acc = mpmath.mpf(1)
        for f in pm.factors:
            c1, _ = two_term_mp(f)
            acc *= c1 * mpmath.gamma(mpmath.mpf(f.d) / 2 + 1)
        return float(acc / mpmath.gamma(mpmath.mpf(pm.d) / 2 + 1))


def lattice_c1(pm: ProductModel) -> float:
    return float(product_c1(pm))
