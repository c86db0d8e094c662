"""
Sums of E(n): the mean value pi, the decomposition and the moments
====================================================================

"""

import math

import numpy as np

from zetasums import build_table, moment_fit, sum_e_k, theorem2_decomposition
from zetasums.cache_store import CacheHandle
from zetasums.summatory import abel_consistency, e_short_interval_sq, moment_constants, psi_zeta_integral

table = build_table(20_000, cache=CacheHandle())

# sum_{n<=x} E(n) = pi x + int_0^x psi |zeta|^2 + G(x) + small
print(f"{'x':>7} {'sum E(n)':>12} {'pi x':>12} {'psi int':>10} {'G(x)':>10} {'residual':>10}")
for x in (1e2, 1e3, 1e4, 2e4):
    r = theorem2_decomposition(x, table)
    print(f"{x:>7g} {r.sum_e:12.3f} {r.pi_x:12.3f} {r.psi_int:10.3f} {r.g_x:10.3f} {r.residual:10.5f}")

# the mean of E(n) drifts towards pi, but not monotonically at this scale
for x in (1e2, 1e3, 5e3, 1e4, 2e4):
    print(f"x={x:>7g}: mean E(n) - pi = {sum_e_k(x, 1, table) / x - math.pi:+.5f}")
print(f"int_0^2e4 psi |zeta|^2 / 2e4 = {psi_zeta_integral(2e4, table) / 2e4:+.2e}")

# Abel summation ties the discrete sum of E^2 to integrals of E; the residual is quadrature noise
chk = abel_consistency(500, 2, table)
print(f"Abel check at x=500, k=2: sum {chk.discrete_sum:.4f}, residual {chk.residual:.2e}")

# power-law fits of sum E^k over [1e3, 2e4] against the exponents 1 + k/4
# (for k=1 the pi x term dominates, so the slope is 1 rather than 5/4)
grid = np.unique(np.round(np.geomspace(1e3, 2e4, 25)))
for k in (1, 2, 3, 4):
    m = moment_fit(k, grid, table)
    lo, hi = m.half_coeffs()
    print(f"k={k}: exponent {m.fitted_exponent:.3f} (target {m.target_exponent:.2f}), "
          f"coefficient {m.fitted_coeff:.3f} (halves {lo:.3f} / {hi:.3f})")

# sum |E|^k / x^(1 + k/4) stays bounded but has not settled yet
consts = moment_constants(grid, table)
for k, c in consts.items():
    print(f"k={k}: constant ranges over [{c.min():.3f}, {c.max():.3f}]")

# E over short intervals; no asymptotic is known, so the values are only tabulated
for U in (5, 10, 50):
    print(f"T=1e3 U={U:>2}: sum (E(n+U) - E(n))^2 = {e_short_interval_sq(1000, U, table):.1f}")
