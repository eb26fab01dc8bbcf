"""Zeros and extended Laguerre inequalities for Laguerre-Polya members.

pFq with a_k = b_k + n_k (non-negative integers n_k) has only real negative
zeros; for p = q there are exactly sum(n_k) of them.
"""
from fractions import Fraction as Fr

import mpmath as mp

from pfqturan import HyperParams, PrecisionCtx, find_zeros, laguerre_Ln_all, lp_membership

ctx = PrecisionCtx(50, 1e-55)

for upper, lower in (((), (1,)), ((4, Fr(7, 2)), (1, Fr(1, 2))), ((3,), (1, 2))):
    params = HyperParams(upper, lower)
    verdict = lp_membership(params)
    zs = find_zeros(params, ctx)
    print(f"a={[str(v) for v in upper]} b={[str(v) for v in lower]} member={verdict.member}")
    print("  zeros:", ", ".join(mp.nstr(mp.re(z), 12) for z in zs.zeros[:6]))
    worst = min(min(laguerre_Ln_all(params, Fr(k, 2), 4, ctx)) for k in range(-40, 41))
    print(f"  min L_n over n<=4, x in [-20, 20]: {mp.nstr(worst, 5)}")
