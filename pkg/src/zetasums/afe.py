"""Approximate functional equation for |zeta(1/2+it)|^2 and its remainder.

|zeta(1/2+it)|^2 = 2 sum_{n <= t/2pi} d(n) n^{-1/2} cos(t log(t/2pi n) - t - pi/4) + R(t)

R(t) jumps wherever t/2pi crosses an integer; every quadrature of R is split there.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._numerics import TWO_PI, NeumaierSum, compensated_cumsum
from .divisor import DivisorTable
from .errors import DomainError, OutOfRangeError
from .fitkit import PowerLawFit, loglog_slope
from .mean_square import DEFAULT_STEP, adaptive_panels
from .zeta_eval import DEFAULT_CONFIG, ZetaEvalConfig, zeta_sq_modulus


@dataclass(frozen=True)
class AfeSample:
    t: float
    afe_sum: float
    remainder: float


def _afe_sum_array(t: np.ndarray, table: DivisorTable) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0):
        raise DomainError("t must be positive")
    n_top = np.floor(t / TWO_PI).astype(np.int64)
    n_max = int(n_top.max()) if t.size else 0
    if n_max > table.n_max:
        raise OutOfRangeError(f"divisor table too small: need n_max >= {n_max}")
    acc = NeumaierSum(t.shape)
    base = t * np.log(t / TWO_PI) - t - math.pi / 4
    for n in range(1, n_max + 1):
        coef = 2.0 * table.d[n] / math.sqrt(n)
        term = coef * np.cos(base - t * math.log(n))
        acc.add(np.where(n_top >= n, term, 0.0))
    return acc.value()


def afe_sum(t, table: DivisorTable):
    """The explicit divisor sum of the approximate functional equation."""
    out = _afe_sum_array(np.atleast_1d(t), table)
    return float(out[0]) if np.ndim(t) == 0 else out


def afe_remainder(t, table: DivisorTable, cfg: ZetaEvalConfig = DEFAULT_CONFIG):
    """R(t) = |zeta(1/2+it)|^2 - afe_sum(t)."""
    ta = np.atleast_1d(np.asarray(t, dtype=float))
    out = zeta_sq_modulus(ta, cfg) - _afe_sum_array(ta, table)
    return float(out[0]) if np.ndim(t) == 0 else out


def afe_sample(t: float, table: DivisorTable, cfg: ZetaEvalConfig = DEFAULT_CONFIG) -> AfeSample:
    s = afe_sum(t, table)
    return AfeSample(t=float(t), afe_sum=s, remainder=float(zeta_sq_modulus(np.array([t]), cfg)[0]) - s)


def afe_meansquare_curve(
    T_values,
    table: DivisorTable,
    cfg: ZetaEvalConfig = DEFAULT_CONFIG,
    tol: float = 1e-6,
    step: float = DEFAULT_STEP,
) -> np.ndarray:
    """int_1^T R(t)^2 dt for each T in T_values, from a single cumulative pass."""
    T_values = np.asarray(T_values, dtype=float)
    if np.any(T_values < 1):
        raise DomainError("T must be >= 1")
    top = float(T_values.max())
    if top == 1.0:
        return np.zeros_like(T_values)
    jumps = TWO_PI * np.arange(1, int(top / TWO_PI) + 1)
    breaks = np.unique(np.concatenate([[1.0], jumps[jumps > 1], T_values[T_values > 1]]))

    def r_sq(nodes):
        r = afe_remainder(nodes.ravel(), table, cfg)
        return (r * r).reshape(nodes.shape)

    panels = adaptive_panels(breaks, r_sq, step=step, tol=tol, span=top)
    cum = np.concatenate([[0.0], compensated_cumsum(panels.integrals())])
    edges = np.concatenate([[panels.lo[0]], panels.hi])
    idx = np.searchsorted(edges, T_values)
    return cum[idx]


def afe_meansquare(T: float, table: DivisorTable, cfg: ZetaEvalConfig = DEFAULT_CONFIG, tol: float = 1e-6) -> float:
    """int_1^T R(t)^2 dt."""
    return float(afe_meansquare_curve([T], table, cfg, tol)[0])


@dataclass(frozen=True)
class AfeMeanSquareFit:
    T: np.ndarray
    integral: np.ndarray
    scaling: PowerLawFit
    A: float
    A_lower_half: float
    A_upper_half: float

    @property
    def A_relative_spread(self) -> float:
        return abs(self.A_upper_half - self.A_lower_half) / self.A


def _fit_sqrt(T, y) -> float:
    root = np.sqrt(T)
    return float(root @ y / (root @ root))


def fit_afe_meansquare(T_values, integrals) -> AfeMeanSquareFit:
    """Slope of log int R^2 vs log T, and A in int R^2 ~ A sqrt(T) by least squares."""
    T = np.asarray(T_values, dtype=float)
    y = np.asarray(integrals, dtype=float)
    half = (len(T) + 1) // 2
    return AfeMeanSquareFit(
        T=T,
        integral=y,
        scaling=loglog_slope(T, y),
        A=_fit_sqrt(T, y),
        A_lower_half=_fit_sqrt(T[:half], y[:half]),
        A_upper_half=_fit_sqrt(T[half - 1 :], y[half - 1 :]),
    )
