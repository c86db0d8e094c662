"""
Continued fractions of exp(pi m)
=================================

"""

import mpmath as mp

from zetasums.cf_engine import cf_expand, convergent_gap_check, exp_pi_m, irrationality_gap, lemma1_ratio

with mp.workdps(40):
    print("e^pi   =", mp.nstr(exp_pi_m(1, 40), 35))
    print("e^2pi  =", mp.nstr(exp_pi_m(2, 40), 35))

# partial quotients are certified by re-expanding at twice the working precision
for m in (1, 2):
    cf = cf_expand(m, 40)
    print(f"m={m}: {cf.certified_len} certified quotients at {cf.working_digits} digits")
    print("   a_n:", list(cf.quotients[:20]))
    print("   largest a_n among the first 40:", max(cf.quotients[1:40]))

# every convergent satisfies |x - p/q| < 1/(q q_next)
rep = convergent_gap_check(cf_expand(1, 40))
print(f"gap inequality holds for all: {rep.all_pass}, tightest ratio {rep.tightest_ratio:.4f}")

# how fast can the partial quotients grow? log log a_n against (n + log m) log(n + log m)
for n_max in (20, 40):
    r = lemma1_ratio(1, n_max)
    print(f"n_max={n_max}: sup ratio {r.sup:.4f} at n={r.argsup}")

# 162/7 is the second convergent of e^pi; the gap is still astronomically larger than the lower bound
g = irrationality_gap(1, 162, 7)
print(f"|e^pi - 162/7| = {float(g.gap):.3e}, log of lower bound {g.log_bound:.3e}")
