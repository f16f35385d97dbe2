"""Norms, Mahler measures and polynomial inequalities on the n-torus."""

from .constants import arestov_lambda, gamma_fn, interpolation_constant, kwapien_lower_bound
from .corpus import CorpusSpec, generate_corpus, random_polynomial
from .norms import OrliczSpec, lp_norm, lp_norm_exact_even, mahler_measure, mahler_univariate, orlicz_luxemburg_norm
from .polynomial import Polynomial, build, degree_profile, univariate, variable
from .quadrature import NormResult, QuadratureSpec
from .verify import CheckParams, TheoremCheck, check_inequality, sharpness_scan

__all__ = [
    "arestov_lambda", "gamma_fn", "interpolation_constant", "kwapien_lower_bound",
    "CorpusSpec", "generate_corpus", "random_polynomial",
    "OrliczSpec", "lp_norm", "lp_norm_exact_even", "mahler_measure", "mahler_univariate", "orlicz_luxemburg_norm",
    "Polynomial", "build", "degree_profile", "univariate", "variable",
    "NormResult", "QuadratureSpec",
    "CheckParams", "TheoremCheck", "check_inequality", "sharpness_scan",
]

__version__ = "0.1.0"
