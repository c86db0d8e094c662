"""Power-law fitting helpers used by every scaling check.

All fits are ordinary least squares on (log x, log y).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class PowerLawFit:
    slope: float
    slope_stderr: float
    coeff: float
    window: tuple[float, float]
    n_points: int

    def __post_init__(self):
        if self.n_points < 3:
            raise DomainError("a power-law fit needs at least 3 points")
        if not self.window[1] > self.window[0]:
            raise DomainError("fit window must have x_hi > x_lo")

    def predict(self, x):
        return self.coeff * np.asarray(x, dtype=float) ** self.slope


def loglog_slope(x, y) -> PowerLawFit:
    """Fit y = coeff * x**slope by least squares in log-log coordinates."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise DomainError("x and y must be 1-d arrays of equal length")
    if len(x) < 3:
        raise DomainError("need at least 3 samples")
    if np.any(np.diff(x) <= 0) or x[0] <= 0:
        raise DomainError("x must be positive and strictly increasing")
    if np.any(y <= 0):
        raise DomainError("y must be positive")
    lx, ly = np.log(x), np.log(y)
    design = np.column_stack([np.ones_like(lx), lx])
    beta, _, _, _ = np.linalg.lstsq(design, ly, rcond=None)
    resid = ly - design @ beta
    dof = len(x) - 2
    sxx = np.sum((lx - lx.mean()) ** 2)
    stderr = math.sqrt(float(resid @ resid) / dof / sxx) if dof > 0 else 0.0
    return PowerLawFit(
        slope=float(beta[1]),
        slope_stderr=stderr,
        coeff=float(math.exp(beta[0])),
        window=(float(x[0]), float(x[-1])),
        n_points=len(x),
    )


def fixed_exponent_coeff(x, y, exponent: float) -> float:
    """Least-squares C in y ~ C * x**exponent (relative residuals weighted equally)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    basis = x**exponent
    # minimise sum((y/basis - C)**2): each point weighted by its own scale
    return float(np.mean(y / basis))


def dyadic_envelope(x, y, base: float = 2.0):
    """Max |y| inside consecutive windows [x0*base**j, x0*base**(j+1)).

    Returns (window centres, maxima). Only complete windows are kept.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(x) == 0 or x[0] <= 0:
        raise DomainError("x must be positive")
    n_windows = int(math.floor(math.log(x[-1] / x[0]) / math.log(base) + 1e-12))
    if n_windows < 2:
        raise DomainError("need samples spanning at least two dyadic windows")
    idx = np.floor(np.log(x / x[0]) / math.log(base) + 1e-12).astype(np.int64)
    centres, maxima = [], []
    for j in range(n_windows):
        sel = idx == j
        if not np.any(sel):
            continue
        centres.append(x[0] * base ** (j + 0.5))
        maxima.append(float(np.max(np.abs(y[sel]))))
    if len(centres) < 2:
        raise DomainError("fewer than two populated windows")
    return np.array(centres), np.array(maxima)


def iterated_log(x: float, j: int) -> float:
    """j-fold natural logarithm, defined only where the result is positive."""
    if j < 1:
        raise DomainError("j must be >= 1")
    v = float(x)
    for _ in range(j):
        if v <= 1.0:
            raise DomainError(f"log_{j}({x}) is undefined")
        v = math.log(v)
    return v


def sign_changes(y) -> int:
    s = np.sign(np.asarray(y, dtype=float))
    s = s[s != 0]
    return int(np.count_nonzero(s[1:] != s[:-1]))
