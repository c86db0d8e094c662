"""Certified continued fractions of exp(pi m).

The value is bracketed as [X - 1, X + 2] / 2**B with X = floor(exp(pi m) 2**B)
from mpmath, and both bracket ends are expanded with exact integer arithmetic.
Quotients on which the ends agree hold for every number in the bracket. On top
of that, the expansion is repeated at twice the precision and only the prefix
common to both runs is kept.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath

from .errors import CertificationError, DomainError

M_LIMIT = 64
DIGITS_LIMIT = 10**5
TERMS_LIMIT = 500
MAX_ESCALATIONS = 8
LOG10_2 = math.log10(2.0)


def exp_pi_m(m: int, digits: int) -> mpmath.mpf:
    """exp(pi m) to ``digits`` significant digits (returned with a few guard digits)."""
    m = int(m)
    if m == 0 or abs(m) > M_LIMIT:
        raise DomainError(f"m must be a non-zero integer with |m| <= {M_LIMIT}")
    if not 1 <= digits <= DIGITS_LIMIT:
        raise DomainError(f"digits must lie in [1, {DIGITS_LIMIT}]")
    with mpmath.workdps(digits + 10):
        return +mpmath.exp(mpmath.pi * m)


def _bracket(m: int, digits: int) -> tuple[Fraction, Fraction]:
    """Rational bracket [lo, hi] certainly containing exp(pi m)."""
    bits = int(math.ceil(digits / LOG10_2)) + 8
    # integer part of exp(pi m) has about pi m / log 2 bits
    int_bits = max(0, int(math.pi * m / math.log(2)) + 2)
    with mpmath.workprec(bits + int_bits + 64):
        X = int(mpmath.floor(mpmath.ldexp(mpmath.exp(mpmath.pi * m), bits)))
    den = 1 << bits
    return Fraction(X - 1, den), Fraction(X + 2, den)


def _common_quotients(lo: Fraction, hi: Fraction, digits: int, limit: int) -> list[int]:
    pa, qa = lo.numerator, lo.denominator
    pb, qb = hi.numerator, hi.denominator
    eps_num, eps_den = 1, 10 ** (digits // 2)
    out: list[int] = []
    while qa and qb and len(out) < limit:
        a, ra = divmod(pa, qa)
        b, rb = divmod(pb, qb)
        if a != b:
            break
        out.append(a)
        # stop where a remainder is too close to zero to tell from a rational
        if ra * eps_den < qa * eps_num or rb * eps_den < qb * eps_num:
            break
        pa, qa = qa, ra
        pb, qb = qb, rb
    return out


def _expand_at(m: int, digits: int, limit: int) -> list[int]:
    lo, hi = _bracket(m, digits)
    return _common_quotients(lo, hi, digits, limit)


def convergents(quotients) -> list[tuple[int, int]]:
    """(p_n, q_n) for each prefix [a_0; a_1, ..., a_n]."""
    out = []
    p_prev, p = 1, quotients[0]
    q_prev, q = 0, 1
    out.append((p, q))
    for a in quotients[1:]:
        p_prev, p = p, a * p + p_prev
        q_prev, q = q, a * q + q_prev
        out.append((p, q))
    return out


@dataclass(frozen=True)
class ContinuedFractionExpansion:
    m: int
    quotients: tuple[int, ...]
    convergents: tuple[tuple[int, int], ...]
    working_digits: int
    certified_len: int

    def __post_init__(self):
        if self.certified_len > len(self.quotients):
            raise ValueError("certified_len exceeds the number of quotients")

    def json_lines(self) -> list[str]:
        return [
            json.dumps({"m": self.m, "n": n, "a_n": str(a), "p_n": str(p), "q_n": str(q)})
            for n, (a, (p, q)) in enumerate(zip(self.quotients, self.convergents))
        ]


def cf_expand(m: int, n_terms: int, start_digits: int | None = None) -> ContinuedFractionExpansion:
    """Certified leading partial quotients of exp(pi m).

    Working precision starts at 40 + 4 n_terms digits and doubles until the
    runs at D and 2D digits agree on at least n_terms quotients.
    """
    m = int(m)
    if m == 0 or abs(m) > M_LIMIT:
        raise DomainError(f"m must be a non-zero integer with |m| <= {M_LIMIT}")
    if not 1 <= n_terms <= TERMS_LIMIT:
        raise DomainError(f"n_terms must lie in [1, {TERMS_LIMIT}]")
    digits = start_digits or 40 + 4 * n_terms
    current = _expand_at(m, digits, n_terms + 1)
    for _ in range(MAX_ESCALATIONS):
        if digits * 2 > DIGITS_LIMIT:
            break
        finer = _expand_at(m, digits * 2, n_terms + 1)
        agree = 0
        for a, b in zip(current, finer):
            if a != b:
                break
            agree += 1
        if agree >= n_terms:
            quotients = tuple(current[:agree])
            return ContinuedFractionExpansion(
                m=m,
                quotients=quotients,
                convergents=tuple(convergents(quotients)),
                working_digits=digits,
                certified_len=agree,
            )
        digits *= 2
        current = finer
    raise CertificationError(f"could not certify {n_terms} quotients of exp(pi*{m}) up to {digits} digits")


@dataclass(frozen=True)
class GapReport:
    """Per-n ratio |xi - p_n/q_n| q_n q_{n+1}; every entry must lie in (0, 1)."""

    m: int
    ratios: tuple[float, ...]
    violations: tuple[int, ...]
    tightest_ratio: float

    @property
    def all_pass(self) -> bool:
        return not self.violations


def convergent_gap_check(expansion: ContinuedFractionExpansion) -> GapReport:
    """Check |xi - p_n/q_n| < 1/(q_n q_{n+1}) with rigorous rational bounds on xi."""
    if expansion.certified_len < 3:
        raise DomainError("need at least 3 certified quotients")
    conv = expansion.convergents[: expansion.certified_len]
    q_last = conv[-1][1]
    digits = 2 * len(str(q_last)) + 30
    lo, hi = _bracket(expansion.m, digits)
    ratios, bad = [], []
    for n in range(1, len(conv) - 1):
        p, q = conv[n]
        q_next = conv[n + 1][1]
        r = Fraction(p, q)
        # largest possible |xi - r| over the bracket
        worst = max(abs(lo - r), abs(hi - r))
        best = min(abs(lo - r), abs(hi - r)) if not lo <= r <= hi else Fraction(0)
        bound = Fraction(1, q * q_next)
        if not (best > 0 and worst < bound):
            bad.append(n)
        ratios.append(float(abs((lo + hi) / 2 - r) / bound))
    return GapReport(expansion.m, tuple(ratios), tuple(bad), max(ratios) if ratios else float("nan"))


@dataclass(frozen=True)
class Lemma1Report:
    m: int
    n_max: int
    rows: tuple[tuple[int, int, float | None], ...] = field(repr=False)
    sup: float
    argsup: int | None

    @property
    def n_admissible(self) -> int:
        return sum(1 for _, _, r in self.rows if r is not None)


def lemma1_ratio(m: int, n_max: int, expansion: ContinuedFractionExpansion | None = None) -> Lemma1Report:
    """sup over admissible n <= n_max of log log a_n / ((n + log m) log(n + log m)).

    n is admissible when n + log m >= 3 and a_n >= 16. The sup over an empty set
    is reported as 0.
    """
    if m < 1:
        raise DomainError("m must be >= 1")
    if expansion is None:
        expansion = cf_expand(m, n_max + 1)
    if expansion.certified_len < n_max + 1:
        raise DomainError(f"expansion certified to {expansion.certified_len} terms, need {n_max + 1}")
    rows = []
    best, arg = 0.0, None
    for n in range(n_max + 1):
        a = expansion.quotients[n]
        scale = n + math.log(m)
        if scale >= 3 and a >= 16:
            r = math.log(math.log(a)) / (scale * math.log(scale))
            if r > best:
                best, arg = r, n
        else:
            r = None
        rows.append((n, a, r))
    return Lemma1Report(m, n_max, tuple(rows), best, arg)


@dataclass(frozen=True)
class IrrationalityGap:
    gap: mpmath.mpf
    log_bound: float
    margin: float


def irrationality_gap(m: int, p: int, q: int, digits: int | None = None) -> IrrationalityGap:
    """|exp(pi m) - p/q| against exp(-2^72 log(2m) log p log log p), compared in log space."""
    if m < 1:
        raise DomainError("m must be >= 1")
    if p < 3 or q < 1:
        raise DomainError("need p >= 3 and q >= 1")
    digits = digits or 2 * (len(str(q)) + len(str(p))) + 30
    with mpmath.workdps(digits):
        gap = abs(exp_pi_m(m, digits) - mpmath.mpf(p) / q)
        log_gap = float(mpmath.log(gap))
    log_p = math.log(p)
    log_bound = -(2.0**72) * math.log(2 * m) * log_p * math.log(log_p)
    return IrrationalityGap(gap=gap, log_bound=log_bound, margin=log_gap - log_bound)
