"""Exact eigenvalue counting and Weyl-law remainder asymptotics for CROSSes."""

from .catalog import Family, SpectralModel, WReport, kappa, model, parse_product, parse_space, w_verify
from .counting import count_single, count_single_fast, k_max
from .exactpoly import Poly, power_sum_poly, poly_eval, poly_shift
from .lattice import (
    LatticeSpec,
    ProductModel,
    count_product,
    count_product_series,
    main_term_coeff,
    product_model,
    weighted_sum,
)
from .series import CountSeries
from .asym import (
    FitReport,
    TwoTermCoeffs,
    fit_exponent,
    jump_series,
    second_order_convergence,
    sharpness_stat,
    two_term_coeffs,
)

__version__ = "0.1.0"
