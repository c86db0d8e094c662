"""
The zeta function on the critical line and the error term E(T)
================================================================

"""

import math

import numpy as np

from zetasums import build_table, e_of, siegel_z, zeta_half_line, zeta_sq_modulus
from zetasums.cache_store import CacheHandle

# |zeta(1/2 + it)|^2 at a few heights; Euler-Maclaurin below t = 500, Riemann-Siegel above
for t in (0.0, 14.134725, 100.0, 1000.0, 1e5):
    pt = zeta_half_line(t)
    print(f"t={t:>10g}  zeta={pt.value.real:+.10f}{pt.value.imag:+.10f}i  |zeta|^2={pt.sq_modulus:.10f}")

# Z(t) is real and changes sign at every zero on the line
t = np.linspace(10.0, 50.0, 4001)
z = siegel_z(t)
print("sign changes of Z on [10, 50]:", int(np.sum(np.signbit(z[1:]) != np.signbit(z[:-1]))))

# E(T) = int_0^T |zeta|^2 - T(log(T/2pi) + 2 gamma - 1), oscillating around pi on average
for T in (10.0, 100.0, 1000.0, 5000.0):
    print(f"E({T:g}) = {e_of(T):+.8f}")

# a table of E at every integer up to 2e4, reused from the cache on later runs
table = build_table(20_000, cache=CacheHandle())
e = table.e_at_integers(20_000)
print(f"mean of E(n), n <= 2e4: {e.mean():.5f}  (pi = {math.pi:.5f})")
print(f"max |E(n)| / n^(1/4): {np.max(np.abs(e) / np.arange(1, 20_001) ** 0.25):.4f}")

# E'(t) = |zeta|^2 - log(t/2pi) - 2 gamma; the table agrees with a direct difference quotient
h, t0 = 1e-3, 321.0
fd = (e_of(t0 + h, tol=1e-12) - e_of(t0 - h, tol=1e-12)) / (2 * h)
direct = zeta_sq_modulus(np.array([t0]))[0] - math.log(t0 / (2 * math.pi)) - 2 * 0.5772156649015329
print(f"E'({t0:g}): difference quotient {fd:.6f}, formula {direct:.6f}")
