"""Two-sided Turan bounds for qFq with weakly majorized parameters.

With b weakly supermajorized by a, 0 <= -delta <= f(mu)^2 / 4 for every real x.
The printout shows how close the upper quarter bound gets.
"""
from fractions import Fraction as Fr

import mpmath as mp

from pfqturan import HyperParams, PrecisionCtx, ShiftSpec, verify_theorem1, weak_supermajorize

ctx = PrecisionCtx(50, 1e-30)
params = HyperParams((Fr(1, 2), Fr(3, 2)), (Fr(3, 4), 2), (0, 0))
assert weak_supermajorize(params.upper, params.lower)

for shifts in (ShiftSpec(0, Fr(1, 10), Fr(1, 10)), ShiftSpec(1, 1, 1), ShiftSpec(Fr(1, 2), 3, 5)):
    print(f"mu={shifts.mu} alpha={shifts.alpha} beta={shifts.beta}")
    for x in (-4, -1, 0, Fr(1, 2), 3):
        v = verify_theorem1(params, shifts, x, ctx)
        ratio = v.minus_delta / v.f_mu_squared
        print(f"  x={str(x):>4}  -delta/f^2 = {mp.nstr(ratio, 8):>12}  holds={v.holds}")
