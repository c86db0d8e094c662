"""Low-level numerical helpers: compensated sums and Gauss-Legendre panels."""
from __future__ import annotations

import math

import numpy as np

EULER_GAMMA = 0.57721566490153286061
TWO_PI = 2.0 * math.pi

GL_ORDER = 8
GL_NODES, GL_WEIGHTS = np.polynomial.legendre.leggauss(GL_ORDER)


def _cumulative_matrix(nodes: np.ndarray) -> np.ndarray:
    """Matrix Q with (Q @ f)[j] = integral over [-1, nodes[j]] of the
    polynomial interpolating f at the nodes."""
    n = len(nodes)
    vander = np.vander(nodes, n, increasing=True)
    # antiderivative of u**i from -1 to x: (x**(i+1) - (-1)**(i+1)) / (i+1)
    powers = np.arange(1, n + 1)
    anti = (nodes[:, None] ** powers - (-1.0) ** powers) / powers
    return anti @ np.linalg.inv(vander)


GL_CUMULATIVE = _cumulative_matrix(GL_NODES)


class NeumaierSum:
    """Elementwise compensated accumulator for numpy arrays (or scalars)."""

    def __init__(self, shape=(), dtype=float):
        self.total = np.zeros(shape, dtype=dtype)
        self.comp = np.zeros(shape, dtype=dtype)

    def add(self, x) -> None:
        t = self.total + x
        big = np.abs(self.total) >= np.abs(x)
        self.comp += np.where(big, (self.total - t) + x, (x - t) + self.total)
        self.total = t

    def value(self):
        return self.total + self.comp


def compensated_cumsum(values) -> np.ndarray:
    """Prefix sums with Neumaier compensation, in strict index order."""
    out = np.empty(len(values), dtype=float)
    s = 0.0
    c = 0.0
    for i, x in enumerate(np.asarray(values, dtype=float).tolist()):
        t = s + x
        if abs(s) >= abs(x):
            c += (s - t) + x
        else:
            c += (x - t) + s
        s = t
        out[i] = s + c
    return out


def compensated_sum(values) -> float:
    return math.fsum(np.asarray(values, dtype=float).ravel().tolist())


def panel_edges(breakpoints, step: float, even: bool = False) -> np.ndarray:
    """Subdivide consecutive breakpoints into equal panels.

    Each interval [b_i, b_{i+1}] is cut into ceil(len * log(2 + b_{i+1}) / step)
    panels, so panel widths never exceed step / log(2 + t). With ``even`` the
    count is rounded up to an even number (pairs of panels are then compared
    against the single coarse panel covering them).
    """
    b = np.asarray(breakpoints, dtype=float)
    if b.ndim != 1 or len(b) < 2 or np.any(np.diff(b) <= 0):
        raise ValueError("breakpoints must be strictly increasing")
    lengths = np.diff(b)
    counts = np.ceil(lengths * np.log(2.0 + b[1:]) / step).astype(np.int64)
    counts = np.maximum(counts, 1)
    if even:
        counts += counts % 2
    starts = np.repeat(b[:-1], counts)
    widths = np.repeat(lengths / counts, counts)
    offsets = np.arange(counts.sum()) - np.repeat(np.cumsum(counts) - counts, counts)
    edges = np.empty(counts.sum() + 1)
    edges[:-1] = starts + offsets * widths
    edges[-1] = b[-1]
    return edges


def panel_nodes(lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    """Gauss-Legendre nodes, shape (n_panels, GL_ORDER)."""
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    return mid[:, None] + half[:, None] * GL_NODES[None, :]


def panel_integrals(lo: np.ndarray, hi: np.ndarray, values: np.ndarray) -> np.ndarray:
    half = 0.5 * (hi - lo)
    return half * (values @ GL_WEIGHTS)


def main_term_difference(a, b):
    """b(log(b/2pi) + 2gamma - 1) - a(log(a/2pi) + 2gamma - 1) without cancellation."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    d = b - a
    with np.errstate(divide="ignore", invalid="ignore"):
        la = np.where(a > 0, np.log(np.where(a > 0, a, 1.0) / TWO_PI), 0.0)
        core = d * la + b * np.log1p(np.where(a > 0, d / np.where(a > 0, a, 1.0), 0.0))
    direct = np.where(b > 0, b * np.log(np.where(b > 0, b, 1.0) / TWO_PI), 0.0)
    out = np.where(a > 0, core, direct) + (2.0 * EULER_GAMMA - 1.0) * d
    return out
