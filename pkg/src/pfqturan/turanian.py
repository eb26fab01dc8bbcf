"""Generalized Turanian of the Gamma-prefactored function ``f(mu; x)``.

Sign convention used throughout::

    delta_f = f(mu+alpha) f(mu+beta) - f(mu) f(mu+alpha+beta)

so log-convexity of ``mu -> f(mu; x)`` means ``delta_f <= 0``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import mpmath as mp

from .conditions import (
    esp_chain_decr,
    esp_chain_incr,
    muntz_nonneg,
    rpq_exact,
    theorem2_cases,
)
from .errors import DomainError, HypothesisError
from .hyperfn import (
    ExactSeries,
    HyperParams,
    PrecisionCtx,
    _resolve,
    eval_f_mu,
    exact_product_series,
    exact_series,
    gamma_ratio,
    pochhammer,
    to_mpf,
    to_rational,
)

DEFAULT_ORDER = 30


@dataclass(frozen=True)
class ShiftSpec:
    """Nonnegative shifts ``(mu, alpha, beta)`` as exact rationals."""

    mu: Fraction = Fraction(0)
    alpha: Fraction = Fraction(1)
    beta: Fraction = Fraction(0)

    def __post_init__(self):
        for name in ("mu", "alpha", "beta"):
            v = to_rational(getattr(self, name))
            if v < 0:
                raise DomainError(f"{name} must be nonnegative")
            object.__setattr__(self, name, v)

    @property
    def swapped(self) -> "ShiftSpec":
        return ShiftSpec(self.mu, self.beta, self.alpha)

    @property
    def integer_alpha(self) -> bool:
        return self.alpha.denominator == 1 and self.alpha >= 1

    def to_dict(self) -> dict:
        return {"mu": str(self.mu), "alpha": str(self.alpha), "beta": str(self.beta)}


@dataclass(frozen=True)
class ScaledTuranian:
    """Exact coefficients of ``delta_f / (P(mu) P(mu+beta))``, ``P = Gamma(a+.)/Gamma(b+.)``."""

    coeffs: ExactSeries
    scaling_description: dict = field(default_factory=dict)

    def signs(self) -> list[int]:
        return [(c > 0) - (c < 0) for c in self.coeffs]

    def to_dict(self) -> dict:
        return {"coeffs": self.coeffs.to_strings(), "scaling": self.scaling_description}


def _four_values(params, shifts, x, ctx):
    mu, al, be = shifts.mu, shifts.alpha, shifts.beta
    return (eval_f_mu(params, mu + al, x, ctx), eval_f_mu(params, mu + be, x, ctx),
            eval_f_mu(params, mu, x, ctx), eval_f_mu(params, mu + al + be, x, ctx))


def delta_f_with_scale(params: HyperParams, shifts: ShiftSpec, x,
                       ctx: PrecisionCtx | None = None):
    """``(delta_f, scale)`` where scale is the larger magnitude of the two products."""
    ctx = _resolve(ctx)
    f_a, f_b, f_0, f_ab = _four_values(params, shifts, x, ctx)
    with mp.workdps(ctx.digits + 10):
        left, right = f_a * f_b, f_0 * f_ab
        return left - right, max(abs(left), abs(right))


def delta_f(params: HyperParams, shifts: ShiftSpec, x, ctx: PrecisionCtx | None = None):
    """Floating value of the generalized Turanian at ``x``."""
    return delta_f_with_scale(params, shifts, x, ctx)[0]


def _float_coeffs(params: HyperParams, nu, order: int, ctx: PrecisionCtx) -> list:
    # Taylor coefficients of f(nu; x) including the Gamma prefactor
    pref = gamma_ratio(tuple(a + nu for a in params.a2), tuple(b + nu for b in params.b2), ctx)
    upper = [to_mpf(a) for a in params.a1] + [to_mpf(a + nu) for a in params.a2]
    lower = [to_mpf(b) for b in params.b1] + [to_mpf(b + nu) for b in params.b2]
    out = [pref]
    c = pref
    for n in range(order):
        num = mp.mpf(1)
        for a in upper:
            num *= a + n
        den = mp.mpf(n + 1)
        for b in lower:
            den *= b + n
        c = c * num / den
        out.append(c)
    return out


def delta_coeffs_float_with_scale(params: HyperParams, shifts: ShiftSpec,
                                  order: int = DEFAULT_ORDER,
                                  ctx: PrecisionCtx | None = None) -> tuple[list, list]:
    """``(coeffs, scales)``; ``scales[m]`` sums the magnitudes of the Cauchy-product terms."""
    ctx = _resolve(ctx)
    mu, al, be = shifts.mu, shifts.alpha, shifts.beta
    with mp.workdps(ctx.digits + 10):
        fa = _float_coeffs(params, mu + al, order, ctx)
        fb = _float_coeffs(params, mu + be, order, ctx)
        f0 = _float_coeffs(params, mu, order, ctx)
        fab = _float_coeffs(params, mu + al + be, order, ctx)
        out, scales = [], []
        for m in range(order + 1):
            acc = mp.mpf(0)
            mag = mp.mpf(0)
            for k in range(m + 1):
                left, right = fa[k] * fb[m - k], f0[k] * fab[m - k]
                acc += left - right
                mag += abs(left) + abs(right)
            out.append(acc)
            scales.append(mag)
        return out, scales


def delta_coeffs_float(params: HyperParams, shifts: ShiftSpec, order: int = DEFAULT_ORDER,
                       ctx: PrecisionCtx | None = None) -> list:
    """Floating Taylor coefficients ``delta_0 .. delta_order`` of the (unscaled) Turanian.

    Works for any nonnegative shifts and for split parameters.
    """
    return delta_coeffs_float_with_scale(params, shifts, order, ctx)[0]


def _require_shift_all(params: HyperParams) -> None:
    if params.a1 or params.b1:
        raise DomainError("the exact coefficient path needs every parameter in the shifted block")


def _check_positive_scaling(params: HyperParams, mu: Fraction) -> None:
    if any(a + mu <= 0 for a in params.upper) or any(b + mu <= 0 for b in params.lower):
        raise DomainError("a + mu > 0 and b + mu > 0 are needed for a positive scaling factor")


def _poch_ratio(params: HyperParams, nu: Fraction, k: int) -> Fraction:
    r = Fraction(1)
    for a in params.upper:
        r *= pochhammer(a + nu, k)
    for b in params.lower:
        r /= pochhammer(b + nu, k)
    return r


def delta_coeffs_exact(params: HyperParams, shifts: ShiftSpec,
                       order: int = DEFAULT_ORDER) -> ScaledTuranian:
    """Exact coefficients of ``delta_f / (P(mu) P(mu+beta))`` for integer ``alpha``.

    With ``F(nu) = pFq(a+nu; b+nu; x)`` and ``P(mu+alpha) = P(mu) (a+mu)_alpha/(b+mu)_alpha``::

        T = K1 F(mu+alpha) F(mu+beta) - K2 F(mu) F(mu+alpha+beta)

    where ``K1 = (a+mu)_alpha/(b+mu)_alpha`` and ``K2 = (a+mu+beta)_alpha/(b+mu+beta)_alpha``.
    """
    _require_shift_all(params)
    if not shifts.integer_alpha:
        raise DomainError("the exact path needs alpha to be a positive integer")
    mu, al, be = shifts.mu, int(shifts.alpha), shifts.beta
    _check_positive_scaling(params, mu)
    k1 = _poch_ratio(params, mu, al)
    k2 = _poch_ratio(params, mu + be, al)
    left = exact_product_series(exact_series(params.shifted(mu + al), order),
                                exact_series(params.shifted(mu + be), order))
    right = exact_product_series(exact_series(params.shifted(mu), order),
                                 exact_series(params.shifted(mu + al + be), order))
    coeffs = ExactSeries(tuple(k1 * u - k2 * v for u, v in zip(left, right)))
    desc = {
        "divided_by": "P(mu) * P(mu+beta)",
        "P": "prod Gamma(a+.) / prod Gamma(b+.)",
        "mu": str(mu),
        "beta": str(be),
        "positive": True,
    }
    return ScaledTuranian(coeffs, desc)


def delta_coeffs_proofsum(params: HyperParams, mu, beta, order: int = DEFAULT_ORDER) -> ExactSeries:
    """Independent route to the ``alpha = 1`` scaled coefficients.

    Coefficient of ``x**(m-1)`` equals::

        1/m! * sum_{0 <= k < m/2} C(m,k) (m-2k) * A_k * [prod_{j=k}^{m-k-1} R(mu+j)
                                                      - prod_{j=k}^{m-k-1} R(mu+beta+j)]

    with ``A_k = (a+mu)_k (a+mu+beta)_k / ((b+mu)_k (b+mu+beta)_k)`` and
    ``R(x) = prod(a+x)/prod(b+x)``.  The ``k = m/2`` term carries a zero factor.
    """
    _require_shift_all(params)
    mu, beta = to_rational(mu), to_rational(beta)
    _check_positive_scaling(params, mu)
    a, b = params.upper, params.lower
    # R at the points needed, cached
    r_mu = [rpq_exact(a, b, mu + j) for j in range(order + 1)]
    r_mb = [rpq_exact(a, b, mu + beta + j) for j in range(order + 1)]
    coeffs = []
    for m in range(1, order + 2):
        acc = Fraction(0)
        for k in range((m + 1) // 2):
            weight = math.comb(m, k) * (m - 2 * k)
            pref = _poch_ratio(params, mu, k) * _poch_ratio(params, mu + beta, k)
            prod_mu = Fraction(1)
            prod_mb = Fraction(1)
            for j in range(k, m - k):
                prod_mu *= r_mu[j]
                prod_mb *= r_mb[j]
            acc += weight * pref * (prod_mu - prod_mb)
        coeffs.append(acc / math.factorial(m))
    return ExactSeries(tuple(coeffs))


# -- verifiers -----------------------------------------------------------------


@dataclass
class Theorem1Verdict:
    minus_delta: object
    f_mu_squared: object
    ratio: object
    tolerance: object
    lower_holds: bool
    upper_holds: bool | None
    hypotheses: dict

    @property
    def holds(self) -> bool:
        return self.lower_holds and self.upper_holds is not False

    def to_dict(self) -> dict:
        s = lambda v: None if v is None else mp.nstr(v, 40)  # noqa: E731
        return {
            "minus_delta": s(self.minus_delta),
            "f_mu_squared": s(self.f_mu_squared),
            "ratio": s(self.ratio),
            "tolerance": s(self.tolerance),
            "lower_holds": self.lower_holds,
            "upper_holds": self.upper_holds,
            "hypotheses": self.hypotheses,
        }


def theorem1_hypotheses(params: HyperParams, x, ctx: PrecisionCtx | None = None) -> dict:
    """Check the hypotheses of the two-sided Turanian bound; raise naming the first failure."""
    ctx = _resolve(ctx)
    if params.split is None:
        raise HypothesisError("a split (a1, b1 | a2, b2) is required")
    a1, b1, a2, b2 = params.a1, params.b1, params.a2, params.b2
    p1, q1, p2, q2 = len(a1), len(b1), len(a2), len(b2)
    if p2 < 1:
        raise HypothesisError("a2 must not be empty (p2 >= 1)")
    if p1 > q1 + 1:
        raise HypothesisError("p1 <= q1 + 1 violated")
    if q2 > p2:
        raise HypothesisError("q2 <= p2 violated")
    if p1 + p2 > q1 + q2 + 1:
        raise HypothesisError("p1 + p2 <= q1 + q2 + 1 violated")
    if any(v <= 0 for v in a2):
        raise HypothesisError("a2 > 0 violated")
    subset = None
    if q2 == 0:
        subset = ()
    elif all(v > 0 for v in b2):
        for idx in itertools.combinations(range(p2), q2):
            cand = tuple(a2[i] for i in idx)
            if muntz_nonneg(cand, b2, ctx=ctx).ok:
                subset = cand
                break
    if subset is None:
        raise HypothesisError("no q2-subset a2' of a2 with v_{a2',b2} >= 0 on [0,1]")
    xr = to_rational(x) if not isinstance(x, Fraction) else x
    cases = theorem2_cases(a1, b1, xr, ctx)
    if not cases:
        raise HypothesisError("nonnegativity of the (a1, b1) block not established by cases A-D")
    return {"a2_subset": [str(v) for v in subset], "cases": cases, "upper_bound_applies": p2 == q2}


def verify_theorem1(params: HyperParams, shifts: ShiftSpec, x,
                    ctx: PrecisionCtx | None = None) -> Theorem1Verdict:
    """Check ``0 <= -delta_f <= f(mu)^2 / 4`` (upper side only when p2 = q2)."""
    ctx = _resolve(ctx)
    hyp = theorem1_hypotheses(params, x, ctx)
    if shifts.alpha <= 0 or shifts.beta <= 0:
        raise HypothesisError("alpha, beta > 0 required")
    if params.p == params.q + 1:
        with mp.workdps(ctx.digits):
            if abs(to_mpf(x)) >= 1:
                raise DomainError("p = q+1 verification is restricted to |x| < 1")
    f_a, f_b, f_0, f_ab = _four_values(params, shifts, x, ctx)
    with mp.workdps(ctx.digits + 10):
        minus_delta = f_0 * f_ab - f_a * f_b
        sq = f_0 * f_0
        scale = max(abs(f_0 * f_ab), abs(f_a * f_b), abs(sq))
        tol = 10 * mp.mpf(ctx.eps) * scale
        lower = minus_delta >= -tol
        upper = (minus_delta <= sq / 4 + tol) if hyp["upper_bound_applies"] else None
        ratio = minus_delta / sq if sq != 0 else None
    return Theorem1Verdict(minus_delta, sq, ratio, tol, bool(lower),
                           None if upper is None else bool(upper), hyp)


@dataclass
class Theorem3Verdict:
    predicted_sign: int
    chain: str
    coefficients: ScaledTuranian | None
    coeffs_hold: bool | None
    first_bad_coeff: int | None
    grid_values: list
    grid_hold: bool
    bad_x: list

    @property
    def holds(self) -> bool:
        return self.grid_hold and self.coeffs_hold is not False

    def to_dict(self) -> dict:
        return {
            "predicted_sign": self.predicted_sign,
            "chain": self.chain,
            "coefficients": None if self.coefficients is None else self.coefficients.to_dict(),
            "coeffs_hold": self.coeffs_hold,
            "first_bad_coeff": self.first_bad_coeff,
            "grid": [[str(x), mp.nstr(v, 30)] for x, v in self.grid_values],
            "grid_hold": self.grid_hold,
            "bad_x": [str(x) for x in self.bad_x],
        }


def predicted_sign(params: HyperParams) -> tuple[int, str]:
    """Sign forced on the Turanian by the decr (p <= q) or incr (p >= q) chain.

    Returns ``(0, ...)`` when neither chain applies.
    """
    a, b = params.upper, params.lower
    if any(v <= 0 for v in a + b):
        return 0, "none"
    if len(a) <= len(b) and esp_chain_decr(a, b).holds:
        if len(a) >= len(b) and esp_chain_incr(a, b).holds:
            return 0, "both"
        return 1, "decr"
    if len(a) >= len(b) and esp_chain_incr(a, b).holds:
        return -1, "incr"
    return 0, "none"


def verify_theorem3(params: HyperParams, shifts: ShiftSpec, order: int = DEFAULT_ORDER,
                    x_grid: Iterable = (), ctx: PrecisionCtx | None = None,
                    margin: float = 1e3) -> Theorem3Verdict:
    """Exact coefficient signs (when ``alpha <= beta + 1``) plus the sign of delta_f on ``x_grid``."""
    ctx = _resolve(ctx)
    _require_shift_all(params)
    sign, chain = predicted_sign(params)
    if chain == "none":
        raise HypothesisError("neither the decr (p <= q) nor the incr (p >= q) chain holds")
    if not shifts.integer_alpha:
        raise HypothesisError("alpha must be a positive integer")
    coeffs = None
    coeffs_hold = None
    first_bad = None
    if shifts.alpha <= shifts.beta + 1:
        coeffs = delta_coeffs_exact(params, shifts, order)
        bad = [m for m, c in enumerate(coeffs.coeffs) if c * sign < 0 or (sign == 0 and c != 0)]
        coeffs_hold = not bad
        first_bad = bad[0] if bad else None
    grid_values = []
    bad_x = []
    for x in x_grid:
        x = to_rational(x)
        if x < 0:
            raise DomainError("the sign claim concerns x >= 0")
        if params.p == params.q + 1 and x >= 1:
            raise DomainError("p = q+1 is restricted to |x| < 1")
        d, scale = delta_f_with_scale(params, shifts, x, ctx)
        with mp.workdps(ctx.digits + 10):
            tol = margin * mp.mpf(ctx.eps) * scale
            ok = d * sign >= -tol if sign else abs(d) <= tol
        grid_values.append((x, d))
        if not ok:
            bad_x.append(x)
    return Theorem3Verdict(sign, chain, coeffs, coeffs_hold, first_bad, grid_values,
                           not bad_x, bad_x)

