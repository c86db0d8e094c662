"""Numerical experiments on sums of the mean-square error term E(T) of the zeta function."""

__version__ = "0.1.0"

from .cache_store import CacheHandle, CacheKey
from .cf_engine import cf_expand, convergent_gap_check, lemma1_ratio
from .divisor import delta_of, divisor_sieve
from .errors import (
    CapacityError,
    CertificationError,
    ConfigurationError,
    DomainError,
    OutOfRangeError,
    PrecisionError,
    ToleranceNotReachedError,
    ZetaSumsError,
)
from .mean_square import ErrorTermTable, build_table, e_of, g_of
from .summatory import moment_fit, sum_e_k, theorem2_decomposition
from .wilton import transform_residual, wilton_sum
from .zeta_eval import ZetaEvalConfig, siegel_z, zeta_half_line, zeta_sq_modulus, zeta_values

__all__ = [
    "CacheHandle",
    "CacheKey",
    "CapacityError",
    "CertificationError",
    "ConfigurationError",
    "DomainError",
    "ErrorTermTable",
    "OutOfRangeError",
    "PrecisionError",
    "ToleranceNotReachedError",
    "ZetaEvalConfig",
    "ZetaSumsError",
    "build_table",
    "cf_expand",
    "convergent_gap_check",
    "delta_of",
    "divisor_sieve",
    "e_of",
    "g_of",
    "lemma1_ratio",
    "moment_fit",
    "siegel_z",
    "sum_e_k",
    "theorem2_decomposition",
    "transform_residual",
    "wilton_sum",
    "zeta_half_line",
    "zeta_sq_modulus",
    "zeta_values",
]
