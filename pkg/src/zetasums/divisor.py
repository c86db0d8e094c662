"""Divisor function, the Dirichlet divisor error term and related identities.

Arrays in :class:`DivisorTable` are indexed by n directly; slot 0 holds 0.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._numerics import EULER_GAMMA
from .errors import CapacityError, DomainError, OutOfRangeError

SIEVE_LIMIT = 10**8

#: coefficient of the leading log-cube term in the short-interval mean square
SHORT_INTERVAL_C3 = 8.0 / math.pi**2


@dataclass(frozen=True, eq=False)
class DivisorTable:
    n_max: int
    d: np.ndarray
    prefix: np.ndarray

    def __post_init__(self):
        if len(self.d) != self.n_max + 1 or len(self.prefix) != self.n_max + 1:
            raise ValueError("d and prefix must have n_max + 1 entries")

    def check(self, x) -> None:
        if np.max(x) > self.n_max:
            raise OutOfRangeError(f"x={np.max(x)} exceeds table n_max={self.n_max}")

    def prefix_at(self, x):
        """D(x) = sum of d(n) over n <= x, for real x >= 0."""
        idx = np.floor(np.asarray(x, dtype=float)).astype(np.int64)
        return self.prefix[idx]


def divisor_sieve(n_max: int) -> DivisorTable:
    """Exact d(n) for n <= n_max by pairing each k <= sqrt(n_max) with its cofactors."""
    n_max = int(n_max)
    if n_max < 1:
        raise DomainError("n_max must be >= 1")
    if n_max > SIEVE_LIMIT:
        raise CapacityError(f"n_max={n_max} exceeds the sieve limit {SIEVE_LIMIT}")
    d = np.zeros(n_max + 1, dtype=np.int64)
    for k in range(1, math.isqrt(n_max) + 1):
        # k * j with j > k contributes the divisor pair (k, j); j == k only once
        d[k * k :: k] += 2
        d[k * k] -= 1
    prefix = np.cumsum(d)
    d.setflags(write=False)
    prefix.setflags(write=False)
    return DivisorTable(n_max=n_max, d=d, prefix=prefix)


def divisor_main_term(x):
    """x(log x + 2 gamma - 1), zero at x = 0."""
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(x > 0, x * (np.log(np.where(x > 0, x, 1.0)) + 2 * EULER_GAMMA - 1), 0.0)


def _main_term_diff(a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    h = b - a
    return h * (np.log(a) + 2 * EULER_GAMMA - 1) + b * np.log1p(h / a)


def delta_of(x, table: DivisorTable):
    """Delta(x) = D(x) - x(log x + 2 gamma - 1) for real x >= 1."""
    xa = np.asarray(x, dtype=float)
    if np.any(xa < 1):
        raise DomainError("delta_of needs x >= 1")
    table.check(xa)
    out = table.prefix_at(xa) - divisor_main_term(xa)
    return float(out) if np.ndim(x) == 0 else out


def _main_antiderivative(x):
    # integral of t(log t + 2 gamma - 1) dt
    x = np.asarray(x, dtype=float)
    return 0.5 * x * x * np.log(x) - 0.25 * x * x + (2 * EULER_GAMMA - 1) * 0.5 * x * x


def delta_integral(x, table: DivisorTable):
    """Exact integral of Delta(t) over [1, x].

    Between consecutive integers D(t) is constant, so the integral splits into a
    sum of prefix values minus a closed-form antiderivative of the main term.
    """
    xa = np.asarray(x, dtype=float)
    if np.any(xa < 1):
        raise DomainError("x must be >= 1")
    table.check(xa)
    n = np.floor(xa).astype(np.int64)
    # S(n) = sum_{k=1}^{n-1} D(k) as exact integers
    cum_prefix = np.concatenate([[0, 0], np.cumsum(table.prefix[1:-1])]) if table.n_max > 1 else np.zeros(2, np.int64)
    step_part = cum_prefix[n].astype(float) + table.prefix[n] * (xa - n)
    out = step_part - (_main_antiderivative(xa) - _main_antiderivative(1.0))
    return float(out) if np.ndim(x) == 0 else out


def r1_of(x, table: DivisorTable):
    """R_1(x) = integral_1^x Delta(t) dt - x/4."""
    out = delta_integral(x, table) - np.asarray(x, dtype=float) / 4.0
    return float(out) if np.ndim(x) == 0 else out


def delta_summatory_identity(x: int, table: DivisorTable) -> float:
    """Residual of sum_{n<=x} Delta(n) against its Voronoi decomposition.

    Returns sum Delta(n) - [x log x / 2 + (gamma - 1/2) x + Delta(x) + int_1^x Delta];
    expected to be O(log x).
    """
    x = int(x)
    if x < 2:
        raise DomainError("x must be an integer >= 2")
    table.check(x)
    n = np.arange(1, x + 1, dtype=float)
    d_sum = int(table.prefix[1 : x + 1].sum())
    main_sum = math.fsum((n * (np.log(n) + 2 * EULER_GAMMA - 1)).tolist())
    lhs = d_sum - main_sum
    rhs = 0.5 * x * math.log(x) + (EULER_GAMMA - 0.5) * x + delta_of(x, table) + delta_integral(x, table)
    return lhs - rhs


def psi_of(x):
    """Sawtooth t - [t] - 1/2; equals -1/2 at integers."""
    xa = np.asarray(x, dtype=float)
    out = xa - np.floor(xa) - 0.5
    return float(out) if np.ndim(x) == 0 else out


def psi_fourier(x: float, M: int) -> float:
    """Partial sum -(1/pi) sum_{m<=M} sin(2 pi m x)/m of the sawtooth's Fourier series."""
    if M < 1:
        raise DomainError("M must be >= 1")
    frac = x - math.floor(x)
    if min(frac, 1.0 - frac) < 1e-12:
        raise DomainError("psi_fourier is not evaluated within 1e-12 of an integer")
    if frac == 0.5:
        return 0.0
    m = np.arange(1, M + 1, dtype=float)
    # reduce m*frac mod 1 before scaling by 2pi to keep the phase exact-ish
    phase = np.mod(m * frac, 1.0)
    return -math.fsum((np.sin(2 * math.pi * phase) / m).tolist()) / math.pi


@dataclass(frozen=True)
class ShortIntervalResult:
    T: int
    U: int
    sum: float
    main: float
    ratio: float
    in_range: bool


def delta_short_interval_sq(T: int, U: int, table: DivisorTable) -> ShortIntervalResult:
    """sum_{T<=n<=2T} (Delta(n+U) - Delta(n))^2 against (8/pi^2) T U log^3(sqrt(T)/U).

    ``in_range`` records whether 3 <= U <= sqrt(T)/2; outside that window the
    numbers are still computed. ``ratio`` is NaN when the main term vanishes.
    """
    T, U = int(T), int(U)
    if T < 1 or U < 0:
        raise DomainError("need T >= 1 and U >= 0")
    if 2 * T + U > table.n_max:
        raise OutOfRangeError(f"2T+U={2 * T + U} exceeds table n_max={table.n_max}")
    n = np.arange(T, 2 * T + 1, dtype=np.int64)
    jump = (table.prefix[n + U] - table.prefix[n]).astype(float)
    diff = jump - _main_term_diff(n.astype(float), (n + U).astype(float))
    total = math.fsum((diff * diff).tolist())
    main = SHORT_INTERVAL_C3 * T * U * math.log(math.sqrt(T) / U) ** 3 if U > 0 else 0.0
    ratio = total / main if main != 0.0 else float("nan")
    return ShortIntervalResult(T, U, total, main, ratio, 3 <= U <= 0.5 * math.sqrt(T))
