"""E(T), the error term in the mean square of zeta on the critical line.

E(T) = int_0^T |zeta(1/2+it)|^2 dt - T(log(T/2pi) + 2 gamma - 1)

Integrals use 8-point Gauss-Legendre panels of width <= step/log(2+t), split at
every integer so the sawtooth psi(t) is smooth inside each panel. Pairs of
panels are checked against the single panel covering them and halved further
where the two disagree. Prefix sums run in ascending panel order with
compensated accumulation, so tables do not depend on the worker count.
"""
from __future__ import annotations

import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ._numerics import (
    EULER_GAMMA,
    GL_WEIGHTS,
    TWO_PI,
    compensated_cumsum,
    compensated_sum,
    main_term_difference,
    panel_edges,
    panel_integrals,
    panel_nodes,
)
from .cache_store import CacheHandle, CacheKey
from .errors import DomainError, OutOfRangeError, ToleranceNotReachedError
from .zeta_eval import DEFAULT_CONFIG, ZetaEvalConfig, zeta_sq_modulus

METHOD_VERSION = "gl8-pairs-em-rs5-v2"
X_MAX_SUPPORTED = 1e6
DEFAULT_STEP = 0.25
MAX_DEPTH = 12
_BLOCK = 128  # unit intervals per work item


def main_term(T):
    """T(log(T/2pi) + 2 gamma - 1), continuous at T = 0."""
    Ta = np.asarray(T, dtype=float)
    if np.any(Ta < 0):
        raise DomainError("main_term needs T >= 0")
    out = main_term_difference(np.zeros_like(Ta), Ta)
    return float(out) if np.ndim(T) == 0 else out


def _breakpoints(lo: float, hi: float, cfg: ZetaEvalConfig | None = None) -> np.ndarray:
    """Integers in (lo, hi) plus, given cfg, the seams of the zeta evaluator.

    The evaluator switches method at em_cutoff and changes the length of the
    Riemann-Siegel sum at t = 2 pi N^2; both leave tiny jumps that must sit on
    panel edges.
    """
    pieces = [[lo], np.arange(math.floor(lo) + 1, math.ceil(hi), dtype=float), [hi]]
    if cfg is not None:
        n = np.arange(1, int(math.sqrt(hi / TWO_PI)) + 2)
        seams = np.concatenate([[cfg.em_cutoff], TWO_PI * n * n])
        seams = seams[(seams > max(lo, cfg.em_cutoff) - 1e-9) & (seams > lo) & (seams < hi)]
        pieces.append(seams)
    return np.unique(np.concatenate(pieces))


@dataclass
class PanelSet:
    """Accepted panels in ascending order with |zeta|^2 at their nodes."""

    lo: np.ndarray
    hi: np.ndarray
    sq: np.ndarray  # (n_panels, 8)

    @property
    def nodes(self) -> np.ndarray:
        return panel_nodes(self.lo, self.hi)

    def integrals(self) -> np.ndarray:
        return panel_integrals(self.lo, self.hi, self.sq)


def adaptive_panels(
    breakpoints,
    func,
    step: float = DEFAULT_STEP,
    tol: float = 1e-6,
    span: float | None = None,
    max_depth: int = MAX_DEPTH,
) -> PanelSet:
    """Panels for integrating ``func`` between breakpoints.

    Coarse panels of width <= 2*step/log(2+t) are compared with their two
    halves; where |coarse - halves| exceeds tol * width / span the halves are
    split again. Returned panels are the accepted halves, in ascending order.
    """
    coarse = panel_edges(breakpoints, 2.0 * step)
    lo, hi = coarse[:-1], coarse[1:]
    span = span if span is not None else max(float(coarse[-1] - coarse[0]), 1.0)
    c_val = func(panel_nodes(lo, hi))
    acc_lo, acc_hi, acc_sq = [], [], []
    for _ in range(max_depth):
        mid = 0.5 * (lo + hi)
        left = func(panel_nodes(lo, mid))
        right = func(panel_nodes(mid, hi))
        coarse_int = panel_integrals(lo, hi, c_val)
        fine_int = panel_integrals(lo, mid, left) + panel_integrals(mid, hi, right)
        # nodes sit on a grid of spacing ~eps*t, so a sloped integrand carries
        # rounding noise of order eps * t * (spread of values) per panel
        spread = np.ptp(c_val, axis=-1)
        noise = np.maximum(
            1e-13 * np.abs(panel_integrals(lo, hi, np.abs(c_val))),
            4.0 * np.finfo(float).eps * np.abs(hi) * spread,
        )
        ok = np.abs(coarse_int - fine_int) <= np.maximum(tol * (hi - lo) / span, noise)
        acc_lo += [lo[ok], mid[ok]]
        acc_hi += [mid[ok], hi[ok]]
        acc_sq += [left[ok], right[ok]]
        if np.all(ok):
            break
        bad = ~ok
        lo = np.concatenate([lo[bad], mid[bad]])
        hi = np.concatenate([mid[bad], hi[bad]])
        c_val = np.concatenate([left[bad], right[bad]])
    else:
        raise ToleranceNotReachedError(f"panel refinement exceeded depth {max_depth}")
    lo = np.concatenate(acc_lo)
    order = np.argsort(lo, kind="stable")
    return PanelSet(lo[order], np.concatenate(acc_hi)[order], np.concatenate(acc_sq)[order])


def _sq_func(cfg: ZetaEvalConfig):
    def f(nodes: np.ndarray) -> np.ndarray:
        return zeta_sq_modulus(nodes.ravel(), cfg).reshape(nodes.shape)

    return f


def zeta_sq_integral(T: float, cfg: ZetaEvalConfig = DEFAULT_CONFIG, step: float = DEFAULT_STEP) -> float:
    """Non-adaptive panel quadrature of |zeta(1/2+it)|^2 over [0, T]."""
    if T == 0:
        return 0.0
    edges = panel_edges(_breakpoints(0.0, T, cfg), step)
    lo, hi = edges[:-1], edges[1:]
    vals = _sq_func(cfg)(panel_nodes(lo, hi))
    return compensated_sum(panel_integrals(lo, hi, vals))


def e_of(
    T: float,
    cfg: ZetaEvalConfig = DEFAULT_CONFIG,
    tol: float = 1e-8,
    step: float = DEFAULT_STEP,
    max_depth: int = 8,
) -> float:
    """E(T) by panel quadrature, halving the panel width until two levels agree within tol."""
    if T < 0:
        raise DomainError("T must be >= 0")
    if T > X_MAX_SUPPORTED:
        raise OutOfRangeError(f"T={T} exceeds supported maximum {X_MAX_SUPPORTED:g}")
    if T == 0:
        return 0.0
    prev = zeta_sq_integral(T, cfg, step)
    for _ in range(max_depth):
        step /= 2.0
        cur = zeta_sq_integral(T, cfg, step)
        if abs(cur - prev) <= tol:
            return cur - main_term(T)
        prev = cur
    raise ToleranceNotReachedError(f"E({T}) did not settle to tol={tol}")


@dataclass(frozen=True, eq=False)
class ErrorTermTable:
    """E(t), int_0^t E and int_0^t psi|zeta|^2 sampled at every panel edge.

    All integers up to x_max are sample points.
    """

    x_max: float
    step: float
    tol: float
    method_version: str
    t: np.ndarray
    e: np.ndarray
    cum_e: np.ndarray
    cum_psi_zeta: np.ndarray

    @property
    def e_values(self) -> np.ndarray:
        return np.column_stack([self.t, self.e])

    @property
    def cum_e_integral(self) -> np.ndarray:
        return np.column_stack([self.t, self.cum_e])

    @property
    def cum_psi_zeta_values(self) -> np.ndarray:
        return np.column_stack([self.t, self.cum_psi_zeta])

    def index_of(self, x) -> np.ndarray:
        """Indices of sample points equal to x (which must be sample points)."""
        x = np.asarray(x, dtype=float)
        self._check(x)
        idx = np.searchsorted(self.t, x)
        idx = np.minimum(idx, len(self.t) - 1)
        if not np.all(self.t[idx] == x):
            raise OutOfRangeError("requested points are not table samples")
        return idx

    def e_at_integers(self, n_max: int) -> np.ndarray:
        """E(1), ..., E(n_max)."""
        return self.e[self.index_of(np.arange(1, int(n_max) + 1, dtype=float))]

    def _check(self, x) -> None:
        x = np.asarray(x, dtype=float)
        if x.size and (np.max(x) > self.x_max or np.min(x) < 0):
            raise OutOfRangeError(f"x outside table range [0, {self.x_max}]")

    def interp_cum_e(self, x):
        """int_0^x E by cubic Hermite interpolation (the derivative of cum_e is E)."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        self._check(x)
        j = np.clip(np.searchsorted(self.t, x, side="right") - 1, 0, len(self.t) - 2)
        t0, t1 = self.t[j], self.t[j + 1]
        h = t1 - t0
        s = (x - t0) / h
        h00 = 2 * s**3 - 3 * s**2 + 1
        h10 = s**3 - 2 * s**2 + s
        h01 = -2 * s**3 + 3 * s**2
        h11 = s**3 - s**2
        return h00 * self.cum_e[j] + h10 * h * self.e[j] + h01 * self.cum_e[j + 1] + h11 * h * self.e[j + 1]

    # -- persistence -------------------------------------------------------
    def to_bytes(self) -> bytes:
        header = {
            "format": 1,
            "x_max": self.x_max,
            "step": self.step,
            "tol": self.tol,
            "method_version": self.method_version,
            "n": len(self.t),
            "columns": ["t", "e", "cum_e", "cum_psi_zeta"],
        }
        buf = io.BytesIO()
        head = json.dumps(header, sort_keys=True).encode()
        buf.write(len(head).to_bytes(4, "little"))
        buf.write(head)
        for col in (self.t, self.e, self.cum_e, self.cum_psi_zeta):
            buf.write(np.ascontiguousarray(col, dtype="<f8").tobytes())
        return buf.getvalue()

    @classmethod
    def from_bytes(cls, raw: bytes) -> "ErrorTermTable":
        hlen = int.from_bytes(raw[:4], "little")
        header = json.loads(raw[4 : 4 + hlen])
        if header.get("format") != 1:
            raise ValueError(f"unknown table format {header.get('format')}")
        n = header["n"]
        body = np.frombuffer(raw[4 + hlen :], dtype="<f8")
        if body.size != 4 * n:
            raise ValueError("table body has the wrong length")
        cols = [np.array(body[i * n : (i + 1) * n]) for i in range(4)]
        return cls(header["x_max"], header["step"], header["tol"], header["method_version"], *cols)


def _block_quantities(breaks, cfg, step, tol, span):
    panels = adaptive_panels(breaks, _sq_func(cfg), step=step, tol=tol, span=span)
    lo, hi, sq = panels.lo, panels.hi, panels.sq
    half = 0.5 * (hi - lo)
    nodes = panels.nodes
    sq_int = half * (sq @ GL_WEIGHTS)
    # int_a^b int_a^t |zeta|^2 = int_a^b (b - s)|zeta(s)|^2 ds, exact for the degree-7 interpolant
    double_int = half * (((hi[:, None] - nodes) * sq) @ GL_WEIGHTS)
    main_rise = half * (main_term_difference(lo[:, None], nodes) @ GL_WEIGHTS)
    # s log s is not smooth at 0; the panel starting there uses the antiderivative
    first = lo == 0.0
    b = hi[first]
    main_rise[first] = 0.5 * b * b * (np.log(b / TWO_PI) + 2 * EULER_GAMMA - 1) - 0.25 * b * b
    psi = nodes - np.floor(0.5 * (lo + hi))[:, None] - 0.5
    psi_int = half * ((psi * sq) @ GL_WEIGHTS)
    return lo, hi, sq_int, double_int - main_rise, psi_int


def _compute_table(x_max, cfg, tol, step, workers) -> ErrorTermTable:
    breaks = _breakpoints(0.0, x_max, cfg)
    blocks = [breaks[i : i + _BLOCK + 1] for i in range(0, len(breaks) - 1, _BLOCK)]
    span = max(x_max, 1.0)

    def work(b):
        return _block_quantities(b, cfg, step, tol, span)

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(work, blocks))
    else:
        parts = [work(b) for b in blocks]
    lo, hi, sq_int, inner, psi_int = (np.concatenate(c) for c in zip(*parts))
    t = np.concatenate([[0.0], hi])
    de = sq_int - main_term_difference(lo, hi)
    e = np.concatenate([[0.0], compensated_cumsum(de)])
    cum_e = np.concatenate([[0.0], compensated_cumsum((hi - lo) * e[:-1] + inner)])
    cum_psi = np.concatenate([[0.0], compensated_cumsum(psi_int)])
    return ErrorTermTable(float(x_max), step, tol, METHOD_VERSION, t, e, cum_e, cum_psi)


def build_table(
    x_max: float,
    cfg: ZetaEvalConfig = DEFAULT_CONFIG,
    tol: float = 1e-6,
    cache: CacheHandle | None = None,
    step: float = DEFAULT_STEP,
    workers: int = 1,
) -> ErrorTermTable:
    """Tabulate E, int E and int psi|zeta|^2 on [0, x_max], reusing ``cache`` when possible."""
    if x_max < 1:
        raise DomainError("x_max must be >= 1")
    if x_max > X_MAX_SUPPORTED:
        raise OutOfRangeError(f"x_max={x_max} exceeds supported maximum {X_MAX_SUPPORTED:g}")

    def compute():
        return _compute_table(float(x_max), cfg, tol, step, workers)

    if cache is None:
        return compute()
    key = CacheKey(
        "e-table",
        {
            "x_max": float(x_max),
            "tol": tol,
            "step": step,
            "method_version": METHOD_VERSION,
            "em_cutoff": cfg.em_cutoff,
            "rs_terms": cfg.rs_correction_terms,
        },
    )
    return cache.get_or_compute(key, compute, ErrorTermTable.to_bytes, ErrorTermTable.from_bytes)


def g_of(x, table: ErrorTermTable):
    """G(x) = int_0^x (E(u) - pi) du."""
    xa = np.asarray(x, dtype=float)
    out = table.interp_cum_e(xa) - math.pi * np.atleast_1d(xa)
    return float(out[0]) if np.ndim(x) == 0 else out.reshape(xa.shape)


def e_derivative(t, cfg: ZetaEvalConfig = DEFAULT_CONFIG):
    """E'(t) = |zeta(1/2+it)|^2 - log(t/2pi) - 2 gamma."""
    t = np.asarray(t, dtype=float)
    return zeta_sq_modulus(t, cfg) - np.log(t / TWO_PI) - 2 * EULER_GAMMA
