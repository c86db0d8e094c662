"""zeta(1/2 + it) and |zeta(1/2 + it)|^2 in double precision.

Below ``em_cutoff`` the Euler-Maclaurin formula is summed directly; above it the
Riemann-Siegel main sum plus up to five correction terms C_0..C_4 is used.
Main sums are accumulated with Neumaier compensation, vectorised over t.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import mpmath
import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy.special import bernoulli, factorial, loggamma

from ._numerics import TWO_PI, NeumaierSum
from .errors import ConfigurationError, DomainError

MAX_RS_CORRECTION_TERMS = 5
_CHUNK = 1 << 15

# Taylor coefficients of Psi(p) = cos(2 pi (p^2 - p - 1/16)) / cos(2 pi p)
# about p = 1/2, even powers only (odd ones vanish). Regenerated in the tests.
_PSI_EVEN_COEFFS = (
    0.3826834323650898,
    1.7489618723100817,
    2.118025207685496,
    -0.8707216670511481,
    -3.4733112243465167,
    -1.6626947308999325,
    1.216731288919232,
    1.3014304161007977,
    0.03051102182736167,
    -0.3755803051545095,
    -0.1085784416564066,
    0.051832902999549624,
    0.029999480619902277,
    -0.0022759396706125644,
    -0.004382647416580339,
    -0.0004064230183729847,
    0.0004006097785422114,
    8.971057991388841e-05,
    -2.3025650027239108e-05,
    -9.380006601906792e-06,
    6.323514947609108e-07,
    6.551022819231502e-07,
    2.210523745552697e-08,
    -3.322316176445629e-08,
    -3.734910989933656e-09,
    1.2445067060797738e-09,
    2.476820537650219e-10,
    -3.284272816891627e-11,
    -1.1305406852298404e-11,
    4.565463979588694e-13,
    3.9598480945249214e-13,
)


def _psi_derivative_polys():
    base = np.zeros(2 * len(_PSI_EVEN_COEFFS) - 1)
    base[::2] = _PSI_EVEN_COEFFS
    polys = [base]
    for _ in range(12):
        polys.append(npoly.polyder(polys[-1]))
    return polys


_PSI_POLYS = _psi_derivative_polys()

_EM_TERMS = 20
_B2K = bernoulli(2 * _EM_TERMS)
_EM_COEFFS = np.array([_B2K[2 * k] / factorial(2 * k, exact=False) for k in range(1, _EM_TERMS + 1)])

# asymptotic theta: t/2 log(t/2pi) - t/2 - pi/8 + sum c_k / t^(2k-1)
_THETA_SERIES = (1 / 48, 7 / 5760, 31 / 80640, 127 / 430080, 511 / 1216512)


@dataclass(frozen=True)
class ZetaEvalConfig:
    em_cutoff: float = 500.0
    rs_correction_terms: int = 5
    target_abs_err: float = 1e-8

    def __post_init__(self):
        if not self.em_cutoff > 0:
            raise ConfigurationError("em_cutoff must be positive")
        if not 0 <= self.rs_correction_terms <= MAX_RS_CORRECTION_TERMS:
            raise ConfigurationError(
                f"rs_correction_terms must lie in [0, {MAX_RS_CORRECTION_TERMS}], got {self.rs_correction_terms}"
            )
        if not 0 < self.target_abs_err <= 1e-3:
            raise ConfigurationError("target_abs_err must lie in (0, 1e-3]")


DEFAULT_CONFIG = ZetaEvalConfig()


@dataclass(frozen=True)
class ZetaPoint:
    t: float
    value: complex
    sq_modulus: float


def _theta(t: np.ndarray) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    out = np.empty_like(t)
    small = t < 10.0
    if np.any(small):
        ts = t[small]
        out[small] = np.imag(loggamma(0.25 + 0.5j * ts)) - 0.5 * ts * math.log(math.pi)
    if np.any(~small):
        tl = t[~small]
        inv = 1.0 / tl
        inv2 = inv * inv
        corr = np.zeros_like(tl)
        for c in reversed(_THETA_SERIES):
            corr = corr * inv2 + c
        out[~small] = 0.5 * tl * np.log(tl / TWO_PI) - 0.5 * tl - math.pi / 8 + corr * inv
    return out


def riemann_siegel_theta(t):
    """Riemann-Siegel phase theta(t) = arg Gamma(1/4 + it/2) - (t/2) log pi, t > 0."""
    ta = np.asarray(t, dtype=float)
    if np.any(~(ta > 0)):
        raise DomainError("riemann_siegel_theta is defined here only for t > 0")
    out = _theta(np.atleast_1d(ta))
    return float(out[0]) if np.ndim(t) == 0 else out.reshape(ta.shape)


def _rs_corrections(p: np.ndarray, n_terms: int) -> list[np.ndarray]:
    z = p - 0.5
    D = [npoly.polyval(z, poly) for poly in _PSI_POLYS]
    pi2, pi4, pi6, pi8 = math.pi**2, math.pi**4, math.pi**6, math.pi**8
    terms = [
        lambda: D[0],
        lambda: -D[3] / (96 * pi2),
        lambda: D[2] / (64 * pi2) + D[6] / (18432 * pi4),
        lambda: -D[1] / (64 * pi2) - D[5] / (3840 * pi4) - D[9] / (5308416 * pi6),
        lambda: D[0] / (128 * pi2)
        + 19 * D[4] / (24576 * pi4)
        + 11 * D[8] / (5898240 * pi6)
        + D[12] / (2038431744 * pi8),
    ]
    return [terms[k]() for k in range(n_terms)]


_SPLIT = 134217729.0  # 2**27 + 1


def _split26(x):
    """Veltkamp split: x == hi + lo with hi carrying at most 26 significant bits."""
    g = x * _SPLIT
    hi = g - (g - x)
    return hi, x - hi


@lru_cache(maxsize=None)
def _lead_turns_at(k: int) -> float:
    """frac((k/2 log(k/2pi) - k/2) / 2pi) for an integer anchor k >= 1."""
    with mpmath.workdps(40):
        k = mpmath.mpf(k)
        lead = (k / 2 * mpmath.log(k / (2 * mpmath.pi)) - k / 2) / (2 * mpmath.pi)
        return float(lead - mpmath.floor(lead))


def _theta_turns(t: np.ndarray) -> np.ndarray:
    """frac(theta(t) / 2 pi) without rounding error proportional to t log t.

    The large leading part is taken at the nearest integer from a cached
    high-precision value; the offset from there is small and computed directly.
    """
    k = np.maximum(np.rint(t), 1.0)
    uniq, inv = np.unique(k, return_inverse=True)
    anchor = np.array([_lead_turns_at(int(v)) for v in uniq])[inv]
    delta = t - k
    offset = 0.5 * (delta * np.log(k / TWO_PI) + t * np.log1p(delta / k)) - 0.5 * delta
    inv_t = 1.0 / t
    inv2 = inv_t * inv_t
    corr = np.zeros_like(t)
    for c in reversed(_THETA_SERIES):
        corr = corr * inv2 + c
    turns = anchor + (offset + corr * inv_t - math.pi / 8) / TWO_PI
    return turns - np.floor(turns)


@lru_cache(maxsize=None)
def _log_turns(n: int) -> tuple[float, float]:
    """log(n) / 2 pi as a 26-bit head plus a tail."""
    with mpmath.workdps(40):
        c = mpmath.log(n) / (2 * mpmath.pi)
        hi, _ = _split26(float(c))
        return hi, float(c - hi)


def _siegel_z_rs(t: np.ndarray, n_corr: int) -> np.ndarray:
    a = np.sqrt(t / TWO_PI)
    N = np.floor(a).astype(np.int64)
    p = a - N
    th = _theta_turns(t)
    t_hi, t_lo = _split26(t)
    acc = NeumaierSum(t.shape)
    for n in range(1, int(N.max()) + 1):
        c_hi, c_lo = _log_turns(n)
        # t*log(n)/2pi mod 1: the head product is exact, so its fractional part is too
        u = t_hi * c_hi
        u -= np.floor(u)
        u += t_hi * c_lo + t_lo * (c_hi + c_lo)
        term = np.cos(TWO_PI * (th - u)) * (2.0 / math.sqrt(n))
        acc.add(np.where(N >= n, term, 0.0))
    total = acc.value()
    if n_corr:
        w = np.sqrt(TWO_PI / t)
        corr = np.zeros_like(t)
        wk = np.ones_like(t)
        for c in _rs_corrections(p, n_corr):
            corr += c * wk
            wk = wk * w
        sign = np.where(N % 2 == 1, 1.0, -1.0)
        total = total + sign * np.sqrt(w) * corr
    return total


def _zeta_em(t: np.ndarray) -> np.ndarray:
    """Euler-Maclaurin summation for zeta(1/2 + it), t >= 0."""
    N = int(np.max(t) / 3.0) + 15
    re = NeumaierSum(t.shape)
    im = NeumaierSum(t.shape)
    for n in range(1, N):
        ln = math.log(n)
        scale = 1.0 / math.sqrt(n)
        re.add(scale * np.cos(t * ln))
        im.add(-scale * np.sin(t * ln))
    s = 0.5 + 1j * t
    Ns = np.exp(-s * math.log(N))
    tail = N * Ns / (s - 1.0) + 0.5 * Ns
    poch = s.copy()
    power = Ns / N
    for k in range(_EM_TERMS):
        tail = tail + _EM_COEFFS[k] * poch * power
        poch = poch * (s + 2 * k + 1) * (s + 2 * k + 2)
        power = power / (N * N)
    return re.value() + 1j * im.value() + tail


def _chunks(t: np.ndarray):
    for start in range(0, len(t), _CHUNK):
        yield slice(start, start + _CHUNK)


def _split(t, cfg: ZetaEvalConfig):
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if not np.all(np.isfinite(t)):
        raise DomainError("t must be finite")
    return t, np.abs(t) <= cfg.em_cutoff


def zeta_values(t, cfg: ZetaEvalConfig = DEFAULT_CONFIG) -> np.ndarray:
    """Complex zeta(1/2 + it) for an array of real t (negative t by reflection)."""
    t, low = _split(t, cfg)
    ta = np.abs(t)
    out = np.empty(t.shape, dtype=complex)
    for sl in _chunks(ta):
        seg, lo = ta[sl], low[sl]
        res = np.empty(seg.shape, dtype=complex)
        if np.any(lo):
            res[lo] = _zeta_em(seg[lo])
        if np.any(~lo):
            th = seg[~lo]
            res[~lo] = _siegel_z_rs(th, cfg.rs_correction_terms) * np.exp(-1j * _theta(th))
        out[sl] = res
    return np.where(t < 0, np.conj(out), out)


def siegel_z(t, cfg: ZetaEvalConfig = DEFAULT_CONFIG) -> np.ndarray:
    """Real Z(t) = exp(i theta(t)) zeta(1/2 + it) for t >= 0."""
    t, low = _split(t, cfg)
    if np.any(t < 0):
        raise DomainError("siegel_z expects t >= 0")
    out = np.empty(t.shape)
    for sl in _chunks(t):
        seg, lo = t[sl], low[sl]
        res = np.empty(seg.shape)
        if np.any(lo):
            res[lo] = np.real(np.exp(1j * _theta(seg[lo])) * _zeta_em(seg[lo]))
        if np.any(~lo):
            res[~lo] = _siegel_z_rs(seg[~lo], cfg.rs_correction_terms)
        out[sl] = res
    return out


def zeta_sq_modulus(t, cfg: ZetaEvalConfig = DEFAULT_CONFIG) -> np.ndarray:
    """|zeta(1/2 + it)|^2, vectorised; even in t."""
    t, low = _split(t, cfg)
    ta = np.abs(t)
    out = np.empty(t.shape)
    for sl in _chunks(ta):
        seg, lo = ta[sl], low[sl]
        res = np.empty(seg.shape)
        if np.any(lo):
            res[lo] = np.abs(_zeta_em(seg[lo])) ** 2
        if np.any(~lo):
            res[~lo] = _siegel_z_rs(seg[~lo], cfg.rs_correction_terms) ** 2
        out[sl] = res
    return out


def zeta_half_line(t: float, cfg: ZetaEvalConfig = DEFAULT_CONFIG) -> ZetaPoint:
    if not math.isfinite(t):
        raise DomainError("t must be finite")
    value = complex(zeta_values(np.array([t]), cfg)[0])
    return ZetaPoint(t=float(t), value=value, sq_modulus=value.real**2 + value.imag**2)
