"""Discrete sums of E(n): moments, the pi x + G(x) decomposition, short intervals."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._numerics import (
    EULER_GAMMA,
    GL_CUMULATIVE,
    GL_WEIGHTS,
    TWO_PI,
    compensated_cumsum,
    main_term_difference,
    panel_nodes,
)
from .errors import DomainError, OutOfRangeError
from .fitkit import fixed_exponent_coeff, loglog_slope
from .mean_square import ErrorTermTable, g_of
from .zeta_eval import DEFAULT_CONFIG, ZetaEvalConfig, zeta_sq_modulus

K_MAX = 9
# [1e3, 2e4] is the working grid for the moment fits; it spans 1.3 decades
MIN_GRID_DECADES = 1.25


def _check_k(k: int) -> int:
    if int(k) != k or not 1 <= k <= K_MAX:
        raise DomainError(f"k must be an integer in 1..{K_MAX}, got {k}")
    return int(k)


def _e_integers(x: float, table: ErrorTermTable) -> np.ndarray:
    if x > table.x_max:
        raise OutOfRangeError(f"x={x} exceeds table x_max={table.x_max}")
    n_top = int(math.floor(x))
    if n_top < 1:
        return np.empty(0)
    return table.e_at_integers(n_top)


def sum_e_k(x: float, k: int, table: ErrorTermTable) -> float:
    """sum_{n <= x} E(n)^k from the tabulated values."""
    k = _check_k(k)
    e = _e_integers(x, table)
    return math.fsum((e**k).tolist())


def _prefix_sums(k: int, table: ErrorTermTable, n_top: int) -> np.ndarray:
    """S[n] = sum_{m <= n} E(m)^k for n = 0..n_top."""
    e = _e_integers(n_top, table)
    out = np.zeros(n_top + 1)
    out[1:] = compensated_cumsum(e**k)
    return out


def psi_zeta_integral(x: float, table: ErrorTermTable, cfg: ZetaEvalConfig = DEFAULT_CONFIG) -> float:
    """int_0^x psi(t) |zeta(1/2+it)|^2 dt.

    Exact table lookup at sample points; otherwise the tail from the
    preceding sample is integrated directly (no integer lies inside it).
    """
    x = float(x)
    if x < 0 or x > table.x_max:
        raise OutOfRangeError(f"x={x} outside [0, {table.x_max}]")
    j = int(np.searchsorted(table.t, x, side="right")) - 1
    base = float(table.cum_psi_zeta[j])
    lo = float(table.t[j])
    if x == lo:
        return base
    n_sub = max(1, int(math.ceil((x - lo) * math.log(2.0 + x) / 0.05)))
    edges = np.linspace(lo, x, n_sub + 1)
    nodes = panel_nodes(edges[:-1], edges[1:])
    sq = zeta_sq_modulus(nodes.ravel(), cfg).reshape(nodes.shape)
    psi = nodes - math.floor(lo) - 0.5
    half = 0.5 * np.diff(edges)
    return base + math.fsum((half * ((psi * sq) @ GL_WEIGHTS)).tolist())


@dataclass(frozen=True)
class Theorem2Report:
    x: float
    sum_e: float
    pi_x: float
    psi_int: float
    g_x: float
    residual: float
    residual_scaled: float  # |residual| / (x^(1/3) log x)
    h_minus_g_scaled: float  # |sum_e - pi x - g_x| / x^0.55

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


def theorem2_decomposition(x: float, table: ErrorTermTable, cfg: ZetaEvalConfig = DEFAULT_CONFIG) -> Theorem2Report:
    """Split sum_{n<=x} E(n) into pi x + int psi|zeta|^2 + G(x) + residual."""
    x = float(x)
    if x < 1 or x > table.x_max:
        raise OutOfRangeError(f"x={x} outside [1, {table.x_max}]")
    s = sum_e_k(x, 1, table)
    pi_x = math.pi * x
    psi_int = psi_zeta_integral(x, table, cfg)
    g_x = float(g_of(x, table))
    residual = s - pi_x - psi_int - g_x
    # log x vanishes at x=1; the scale is floored at log e = 1
    scale = x ** (1.0 / 3.0) * max(math.log(x), 1.0)
    return Theorem2Report(
        x, s, pi_x, psi_int, g_x, residual, abs(residual) / scale, abs(s - pi_x - g_x) / x**0.55
    )


@dataclass(frozen=True)
class MomentSummary:
    k: int
    x_grid: np.ndarray
    sums: np.ndarray
    fitted_exponent: float
    fitted_exponent_stderr: float
    fitted_coeff: float
    residual_report: np.ndarray = field(repr=False)

    @property
    def target_exponent(self) -> float:
        return 1.0 + self.k / 4.0

    def half_coeffs(self) -> tuple[float, float]:
        """Fixed-exponent coefficients on the lower and upper halves of the grid."""
        n = len(self.x_grid)
        mid = (n + 1) // 2
        lo = fixed_exponent_coeff(self.x_grid[:mid], np.abs(self.sums[:mid]), self.target_exponent)
        hi = fixed_exponent_coeff(self.x_grid[mid - (n % 2) :], np.abs(self.sums[mid - (n % 2) :]), self.target_exponent)
        return lo, hi

    def csv_rows(self):
        fit = self.fitted_coeff * self.x_grid**self.target_exponent
        for x, s, f, r in zip(self.x_grid, self.sums, fit, self.residual_report):
            yield float(x), float(s), float(f), float(r)


def moment_fit(k: int, x_grid, table: ErrorTermTable) -> MomentSummary:
    """Power-law fit of sum_{n<=x} E(n)^k over ``x_grid``."""
    k = _check_k(k)
    x = np.asarray(x_grid, dtype=float)
    if x.ndim != 1 or len(x) < 3 or np.any(np.diff(x) <= 0) or x[0] < 2:
        raise DomainError("x_grid must be increasing, with at least 3 points >= 2")
    if math.log10(x[-1] / x[0]) < MIN_GRID_DECADES:
        raise DomainError(f"x_grid must span at least {MIN_GRID_DECADES} decades")
    if x[-1] > table.x_max:
        raise OutOfRangeError(f"grid exceeds table x_max={table.x_max}")
    prefix = _prefix_sums(k, table, int(x[-1]))
    sums = prefix[np.floor(x).astype(np.int64)]
    fit = loglog_slope(x, np.abs(sums))
    exponent = 1.0 + k / 4.0
    coeff = fixed_exponent_coeff(x, np.abs(sums), exponent)
    resid = np.abs(sums) / (coeff * x**exponent) - 1.0
    return MomentSummary(k, x, sums, fit.slope, fit.slope_stderr, coeff, resid)


def moment_constants(x_grid, table: ErrorTermTable, ks=(1, 2, 3, 4)) -> dict[int, np.ndarray]:
    """sum_{n<=x} |E(n)|^k / x^(1+k/4) along the grid, for each k."""
    x = np.asarray(x_grid, dtype=float)
    e = _e_integers(x[-1], table)
    idx = np.floor(x).astype(np.int64)
    out = {}
    for k in ks:
        k = _check_k(k)
        pre = np.concatenate([[0.0], np.cumsum(np.abs(e) ** k)])
        out[k] = pre[idx] / x ** (1.0 + k / 4.0)
    return out


def e_short_interval_sq(T: int, U: int, table: ErrorTermTable) -> float:
    """sum_{T <= n <= 2T} (E(n+U) - E(n))^2."""
    if int(T) != T or int(U) != U or T < 1 or U < 0:
        raise DomainError("T must be a positive integer and U a non-negative integer")
    T, U = int(T), int(U)
    if 2 * T + U > table.x_max:
        raise OutOfRangeError(f"2T+U={2 * T + U} exceeds table x_max={table.x_max}")
    e = np.concatenate([[0.0], table.e_at_integers(2 * T + U)])
    n = np.arange(T, 2 * T + 1)
    return math.fsum(((e[n + U] - e[n]) ** 2).tolist())


@dataclass(frozen=True)
class AbelCheck:
    x: float
    k: int
    discrete_sum: float
    integral: float
    boundary: float
    psi_term: float
    residual: float


def abel_consistency(x: int, k: int, table: ErrorTermTable, cfg: ZetaEvalConfig = DEFAULT_CONFIG) -> AbelCheck:
    """Stieltjes integration by parts for sum_{n<=x} E^k(n), term by term.

    E is reconstructed inside each table panel from its left-edge value and
    the cumulative quadrature of E'(u) = |zeta|^2 - log(u/2pi) - 2 gamma.
    """
    k = _check_k(k)
    if int(x) != x or x < 1 or x > table.x_max:
        raise DomainError("x must be an integer in [1, x_max]")
    stop = int(np.searchsorted(table.t, x))
    lo, hi = table.t[:stop], table.t[1 : stop + 1]
    nodes = panel_nodes(lo, hi)
    half = 0.5 * (hi - lo)
    sq = zeta_sq_modulus(nodes.ravel(), cfg).reshape(nodes.shape)
    e_nodes = table.e[:stop, None] + half[:, None] * (sq @ GL_CUMULATIVE.T) - main_term_difference(lo[:, None], nodes)
    e_prime = sq - np.log(nodes / TWO_PI) - 2 * EULER_GAMMA
    psi = nodes - np.floor(0.5 * (lo + hi))[:, None] - 0.5
    integral = math.fsum((half * (e_nodes**k @ GL_WEIGHTS)).tolist())
    psi_term = k * math.fsum((half * ((psi * e_nodes ** (k - 1) * e_prime) @ GL_WEIGHTS)).tolist())
    e_x = float(table.e[stop])
    boundary = e_x**k * -0.5  # psi(x) = -1/2 at an integer
    s = sum_e_k(x, k, table)
    return AbelCheck(float(x), k, s, integral, boundary, psi_term, s - integral + boundary - psi_term)
