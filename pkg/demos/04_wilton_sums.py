"""
Exponential sums with divisor coefficients
===========================================

"""

import math

from zetasums.cf_engine import cf_expand
from zetasums.divisor import divisor_sieve
from zetasums.wilton import envelope_scan, eta_m, frac_exp_2pi_m, theorem1_ratio, transform_residual, wilton_sum

table = divisor_sieve(100_000)

# D(x, eta) = sum_{n<=x} d(n) e(eta n) with eta = exp(-2 pi); eta is carried with its error bound
eta = eta_m(1, 40)
for x in (1e3, 1e4, 1e5):
    d = wilton_sum(x, eta, table).value
    print(f"x={x:>8g}: D={d.real:+12.3f}{d.imag:+12.3f}i  |D|/(x log x)={abs(d) / (x * math.log(x)):.5f}")

# the transformation formula relates D(x, eta) to D(eta^2 x, -1/eta); the residual is O(sqrt(x) log x)
frac = frac_exp_2pi_m(1)
for x in (1e3, 3e3, 1e4, 3e4):
    r = transform_residual(x, frac, table)
    print(f"x={x:>8g}: |residual|/(sqrt(x) log x) = {r.ratio:.4f}")

# the continued fraction of e^(2 pi) gives an envelope for |D|; scan N for the tightest one
cf = cf_expand(2, 40)
for x in (1e4, 1e5):
    s = envelope_scan(x, 1, table, cf)
    print(f"x={x:>8g}: |D|={s.abs_d:.1f}  envelope={s.envelope:.1f} at N={s.best_N}")
print(f"ratio with C=0.01 at x=1e5: {theorem1_ratio(1e5, 1, table, 0.01):.4f}")
