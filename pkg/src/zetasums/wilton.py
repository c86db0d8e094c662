"""Divisor-weighted exponential sums D(x, eta) = sum_{n<=x} d(n) exp(2 pi i eta n).

eta is kept as an exact rational together with an absolute uncertainty. The
phases n*eta mod 1 come from a 128-bit fixed-point copy of frac(eta), using
wrapping uint64 multiplication for the top 64 bits, so they are accurate to
about 1e-16 however large n*eta is.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction

import mpmath
import numpy as np

from .cf_engine import ContinuedFractionExpansion
from .divisor import DivisorTable
from .errors import CertificationError, DomainError, OutOfRangeError, PrecisionError
from .fitkit import iterated_log

PHASE_TOL = 1e-12
_BLOCK = 1 << 16
_TWO64 = 1 << 64


@dataclass(frozen=True)
class HPReal:
    """A real number as an exact rational plus an absolute uncertainty."""

    value: Fraction
    error: Fraction = Fraction(0)

    @classmethod
    def coerce(cls, x) -> "HPReal":
        if isinstance(x, HPReal):
            return x
        if isinstance(x, (int, Fraction)):
            return cls(Fraction(x))
        if isinstance(x, str):
            body = x.strip().lower()
            mant = body.split("e")[0]
            places = len(mant.split(".")[1]) if "." in mant else 0
            exp = int(body.split("e")[1]) if "e" in body else 0
            return cls(Fraction(Decimal(x.strip())), Fraction(1, 2) * Fraction(10) ** (exp - places))
        if isinstance(x, float):
            return cls(Fraction(x), Fraction(math.ulp(x)) / 2)
        if isinstance(x, mpmath.mpf):
            man, exp = x.man_exp
            value = Fraction(int(man)) * (Fraction(2) ** int(exp))
            err = max(abs(value), Fraction(1)) * Fraction(1, 1 << mpmath.mp.prec)
            return cls(value, err)
        raise TypeError(f"cannot interpret {type(x).__name__} as a high-precision real")

    def __neg__(self) -> "HPReal":
        return HPReal(-self.value, self.error)

    def reciprocal(self) -> "HPReal":
        if self.value == 0:
            raise DomainError("reciprocal of zero")
        err = self.error / (abs(self.value) * max(abs(self.value) - self.error, abs(self.value) / 2))
        return HPReal(1 / self.value, err)

    def frac(self) -> Fraction:
        return self.value - math.floor(self.value)

    def __float__(self) -> float:
        return float(self.value)


def eta_m(m: int, digits: int = 60) -> HPReal:
    """exp(-2 pi m) to ``digits`` digits."""
    with mpmath.workdps(digits + 10):
        return HPReal.coerce(+mpmath.exp(-2 * mpmath.pi * m))


def frac_exp_2pi_m(m: int, digits: int = 60) -> HPReal:
    """The fractional part of exp(2 pi m)."""
    with mpmath.workdps(digits + 10 + int(2 * math.pi * m / math.log(10))):
        v = HPReal.coerce(+mpmath.exp(2 * mpmath.pi * m))
    return HPReal(v.frac(), v.error)


@dataclass(frozen=True)
class WiltonSumRecord:
    x: float
    eta: HPReal
    value: complex
    mode: str  # "full_exponential" or "sine_only"


def _fixed_point(frac: Fraction) -> tuple[int, int]:
    scaled = (frac.numerator << 128) // frac.denominator
    return scaled >> 64, scaled & (_TWO64 - 1)


def _cis_turns(phi: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """cos and sin of 2 pi phi, exact at multiples of a quarter turn."""
    r = 4.0 * phi
    q = np.rint(r)
    ang = (r - q) * (0.5 * math.pi)
    c, s = np.cos(ang), np.sin(ang)
    q = q.astype(np.int64) % 4
    cos = np.select([q == 0, q == 1, q == 2], [c, -s, -c], s)
    sin = np.select([q == 0, q == 1, q == 2], [s, c, -s], -c)
    return cos, sin


def _phases(n: np.ndarray, hi: int, lo: int) -> np.ndarray:
    """frac(n * eta) mapped to [-1/2, 1/2), eta = (hi * 2^64 + lo) / 2^128."""
    with np.errstate(over="ignore"):
        top = n.astype(np.uint64) * np.uint64(hi)
    signed = top.view(np.int64)
    phi = (signed >> np.int64(11)).astype(float) * 2.0**-53
    phi += n.astype(float) * (lo * 2.0**-128)
    return phi


def _check_range(x: float, table: DivisorTable) -> int:
    if x < 0:
        raise DomainError("x must be >= 0")
    n_top = math.floor(x)
    if n_top > table.n_max:
        raise OutOfRangeError(f"x={x} exceeds table n_max={table.n_max}")
    return n_top


def _dsum(n_top: int, eta: HPReal, table: DivisorTable) -> complex:
    if n_top * float(eta.error) > PHASE_TOL:
        raise PrecisionError(
            f"eta known to +-{float(eta.error):.3g}; n*eta mod 1 would be off by {n_top * float(eta.error):.3g} at n={n_top}"
        )
    negative = eta.value < 0
    hi, lo = _fixed_point(abs(eta.value) - math.floor(abs(eta.value)))
    re_parts, im_parts = [], []
    for start in range(1, n_top + 1, _BLOCK):
        n = np.arange(start, min(start + _BLOCK, n_top + 1), dtype=np.int64)
        c, s = _cis_turns(_phases(n, hi, lo))
        w = table.d[n].astype(float)
        re_parts.append(math.fsum((w * c).tolist()))
        im_parts.append(math.fsum((w * s).tolist()))
    value = complex(math.fsum(re_parts), math.fsum(im_parts))
    return value.conjugate() if negative else value


def wilton_sum(x: float, eta, table: DivisorTable) -> WiltonSumRecord:
    """D(x, eta) = sum_{n<=x} d(n) exp(2 pi i eta n)."""
    eta = HPReal.coerce(eta)
    value = _dsum(_check_range(x, table), eta, table)
    return WiltonSumRecord(float(x), eta, value, "full_exponential")


def wilton_sine_sum(x: float, eta, table: DivisorTable) -> float:
    """sum_{n<=x} d(n) sin(2 pi n eta)."""
    eta = HPReal.coerce(eta)
    return _dsum(_check_range(x, table), eta, table).imag


@dataclass(frozen=True)
class TransformResidual:
    x: float
    y: float  # eta^2 x
    d_x: complex
    d_dual: complex  # D(eta^2 x, -1/eta)
    residual: complex
    ratio: float


def transform_residual(x: float, eta, table: DivisorTable) -> TransformResidual:
    """D(x, eta) - D(eta^2 x, -1/eta)/eta, normalised by sqrt(x) log x.

    D(y, -theta) is the complex conjugate of D(y, theta).
    """
    eta = HPReal.coerce(eta)
    if not 0 < eta.value <= 1:
        raise DomainError("eta must lie in (0, 1]")
    y_exact = eta.value**2 * Fraction(x)
    if y_exact < 10:
        raise DomainError(f"eta^2 x = {float(y_exact):.3g} < 10")
    n_x = _check_range(x, table)
    n_y = math.floor(y_exact)
    if n_y > table.n_max:
        raise OutOfRangeError("eta^2 x exceeds the divisor table")
    inv = eta.reciprocal()
    d_x = _dsum(n_x, eta, table)
    d_dual = _dsum(n_y, -inv, table)
    residual = d_x - d_dual / float(eta.value)
    ratio = abs(residual) / (math.sqrt(x) * math.log(x))
    return TransformResidual(float(x), float(y_exact), d_x, d_dual, residual, ratio)


def theorem1_ratio(x: float, m: int, table: DivisorTable, C: float) -> float:
    """|D(x, exp(-2 pi m))| / (x log x exp(-C log_2 x / log_3 x))."""
    if x < 1000:
        raise DomainError("x must be >= 10^3")
    if C <= 0:
        raise DomainError("C must be positive")
    l2 = iterated_log(x, 2)
    l3 = iterated_log(x, 3)
    if not 1 <= m <= l2 / l3:
        raise DomainError(f"m={m} outside 1 <= m <= log_2 x / log_3 x = {l2 / l3:.3f}")
    digits = 30 + int(math.log10(x))
    value = abs(_dsum(_check_range(x, table), eta_m(m, digits), table))
    return value / (x * math.log(x) * math.exp(-C * l2 / l3))


def bound_312_envelope(x: float, m: int, N: int, cf: ContinuedFractionExpansion) -> float:
    """sqrt(x) log^2 x + min(a_N(2m) sqrt(x) log x, 2^(-N/2) x log x)."""
    if cf.m != 2 * m:
        raise DomainError(f"expansion is for exp(pi*{cf.m}), need exp(pi*{2 * m})")
    if not 0 <= N < cf.certified_len:
        raise CertificationError(f"a_{N} is not certified (certified_len={cf.certified_len})")
    lx = math.log(x)
    a_n = float(cf.quotients[N])
    return math.sqrt(x) * lx * lx + min(a_n * math.sqrt(x) * lx, 2.0 ** (-N / 2) * x * lx)


@dataclass(frozen=True)
class EnvelopeScan:
    x: float
    m: int
    abs_d: float
    best_N: int
    envelope: float

    @property
    def within(self) -> bool:
        return self.abs_d <= self.envelope


def envelope_scan(x: float, m: int, table: DivisorTable, cf: ContinuedFractionExpansion) -> EnvelopeScan:
    """Minimise the envelope over N in [1, certified_len) and compare with |D(x, eta(m))|."""
    values = [bound_312_envelope(x, m, N, cf) for N in range(1, cf.certified_len)]
    best = int(np.argmin(values)) + 1
    digits = 30 + int(math.log10(max(x, 10)))
    abs_d = abs(_dsum(_check_range(x, table), eta_m(m, digits), table))
    return EnvelopeScan(float(x), m, abs_d, best, values[best - 1])


def wilton_exponent_H(K: float) -> float:
    """H = (4K + log 2) / (4K + 2 log 2), the exponent in x^H log x."""
    return (4 * K + math.log(2)) / (4 * K + 2 * math.log(2))
