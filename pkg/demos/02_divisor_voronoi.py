"""
The divisor problem: Delta(x), its integral and short intervals
=================================================================

"""

import math

import numpy as np

from zetasums.divisor import (
    delta_integral,
    delta_of,
    delta_short_interval_sq,
    delta_summatory_identity,
    divisor_sieve,
    r1_of,
)
from zetasums.fitkit import dyadic_envelope, loglog_slope, sign_changes

table = divisor_sieve(100_000)
print("d(n) for n = 1..12:", table.d[1:13].tolist())

# Delta(x) = sum_{n<=x} d(n) - x(log x + 2 gamma - 1); it jumps by d(n) at each integer
for x in (10.0, 100.0, 1000.0, 99_999.5):
    print(f"Delta({x:g}) = {delta_of(x, table):+.6f}")

# the integral of Delta is about x/4 plus R1(x), and R1 grows like x^(3/4)
x = np.arange(1000.0, 100_001.0, 7.0)
centres, maxima = dyadic_envelope(x, np.abs(r1_of(x, table)))
fit = loglog_slope(centres, maxima)
print(f"dyadic envelope of |R1|: slope {fit.slope:.4f} +- {fit.slope_stderr:.4f}")
print("sign changes of R1 on [100, 1e5]:", sign_changes(r1_of(np.arange(100.0, 100_001.0, 3.0), table)))
print(f"int_1^1000 Delta = {delta_integral(1000.0, table):.6f}")

# sum of Delta(n) against its integral: the difference stays O(log x)
for x in (100, 1000, 10_000):
    print(f"x={x:>6}: identity residual / log x = {delta_summatory_identity(x, table) / math.log(x):+.4f}")

# short intervals: compare with (8/pi^2) T U log^3(sqrt(T)/U)
for U in (5, 10, 25, 50):
    r = delta_short_interval_sq(10_000, U, table)
    print(f"T=1e4 U={U:>2}: sum={r.sum:12.1f} main={r.main:12.1f} ratio={r.ratio:7.3f} in_range={r.in_range}")
